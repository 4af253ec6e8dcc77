use proptest::prelude::*;

use pretree_lab::entropy::{join_refinement, minimum_subcover, random_open_cover, CellComplex};
use pretree_lab::tameness::{helly_select, rat, FunctionFamily, HellyOutcome};
use pretree_lab::ztree::{
    between_ext, canonicalize_end, inverse_word, median_ext, reduce, ExtendedPoint, GroupWord, RuleTree, TreeAction,
};
use pretree_lab::{BetweennessStructure, PointId};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Random tree as a parent list: vertex `i + 1` hangs below `parents[i] % (i + 1)`.
fn tree_strategy(max: usize) -> impl Strategy<Value = BetweennessStructure> {
    prop::collection::vec(any::<usize>(), 1..max).prop_map(|parents| {
        let edges: Vec<(usize, usize)> = parents.iter().enumerate().map(|(i, &p)| (p % (i + 1), i + 1)).collect();
        BetweennessStructure::tree_from_edges(parents.len() + 1, &edges).expect("tree")
    })
}

fn binary_word(max: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..2, 0..max)
}

fn free_word(max: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(0u8..4, 0..max).prop_map(reduce)
}

proptest! {
    #[test]
    fn median_is_symmetric_and_lies_between(t in tree_strategy(24), picks in prop::array::uniform3(any::<usize>())) {
        let n = t.len();
        let [a, b, c] = picks.map(|x| PointId(x % n));
        let m = t.median(a, b, c).unwrap().expect("trees are median pretrees");
        prop_assert_eq!(t.median(b, c, a).unwrap(), Some(m));
        prop_assert_eq!(t.median(c, a, b).unwrap(), Some(m));
        prop_assert!(t.between(a, m, b).unwrap() && t.between(b, m, c).unwrap() && t.between(a, m, c).unwrap());
        prop_assert_eq!(t.between(a, b, c).unwrap(), t.median(a, b, c).unwrap() == Some(b));
    }

    #[test]
    fn intervals_split_at_inner_points(t in tree_strategy(20), picks in prop::array::uniform3(any::<usize>())) {
        let n = t.len();
        let [a, b, c] = picks.map(|x| PointId(x % n));
        if t.between(a, c, b).unwrap() {
            let ab = t.interval(a, b).unwrap();
            let ac = t.interval(a, c).unwrap();
            let cb = t.interval(c, b).unwrap();
            for p in t.points() {
                prop_assert_eq!(ab.contains(p), ac.contains(p) || cb.contains(p));
            }
        }
    }

    #[test]
    fn canonical_ends_keep_their_expansion(pre in binary_word(6), per in prop::collection::vec(0u8..2, 1..5)) {
        let tree = RuleTree::Kary(2);
        let e = canonicalize_end(tree, &pre, &per).unwrap();
        let expected: Vec<u8> = pre.iter().copied().chain(per.iter().copied().cycle()).take(48).collect();
        prop_assert_eq!(e.expand(48), expected);
        let ExtendedPoint::End { pre: p2, per: q2 } = &e else { panic!("an end") };
        prop_assert_eq!(canonicalize_end(tree, p2, q2).unwrap(), e.clone());
        prop_assert!(p2.len() <= pre.len() && q2.len() <= per.len());
    }

    #[test]
    fn free_reduction_cancels_inverses(w in free_word(12), v in free_word(12)) {
        let mut both = w.clone();
        both.extend(inverse_word(&w));
        prop_assert!(reduce(both).is_empty());
        let mut wv = w.clone();
        wv.extend(&v);
        let r = reduce(wv);
        prop_assert!(r.windows(2).all(|p| p[1] != p[0] ^ 1));
    }

    #[test]
    fn odometer_step_is_invertible(w in binary_word(16)) {
        let action = TreeAction::odometer();
        let x = ExtendedPoint::Vertex(w);
        let y = action.act(&GroupWord(vec![(0, false)]), &x);
        prop_assert_eq!(action.act(&GroupWord(vec![(0, true)]), &y), x);
    }

    #[test]
    fn extended_medians_lie_between(a in free_word(8), b in free_word(8), c in free_word(8)) {
        let p = |w: Vec<u8>| ExtendedPoint::Vertex(w);
        let (a, b, c) = (p(a), p(b), p(c));
        let m = median_ext(&a, &b, &c);
        prop_assert!(between_ext(&a, &m, &b) && between_ext(&b, &m, &c) && between_ext(&a, &m, &c));
        prop_assert_eq!(median_ext(&c, &a, &b), m);
    }

    #[test]
    fn helly_selection_respects_epsilon(
        rows in prop::collection::vec(prop::collection::vec(0i64..9, 4), 2..40),
        denom in 1i64..9,
    ) {
        let points: Vec<String> = (0..4).map(|i| format!("p{i}")).collect();
        let functions = rows.iter().map(|r| r.iter().map(|&v| rat(v, 8)).collect()).collect();
        let family = FunctionFamily::from_functions(points, functions).unwrap();
        let eps = rat(1, denom);
        if let HellyOutcome::Selected(s) = helly_select(&family, &eps, 2).unwrap() {
            prop_assert!(s.indices.len() >= 2);
            prop_assert!(s.oscillation <= eps);
            prop_assert!(s.indices.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn minimum_subcovers_cover(t in tree_strategy(8), seed in any::<u64>(), m in 1usize..3) {
        let c = CellComplex::new(&t, m).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_open_cover(&c, &mut rng);
        let min = minimum_subcover(&c, &a).unwrap();
        prop_assert!(min.len() <= a.len());
        let join = join_refinement(&a, &a);
        let mut union = c.empty_set();
        for s in join.members() {
            prop_assert!(c.is_open(s));
            union.union_with(s);
        }
        prop_assert_eq!(union, c.full_set());
        prop_assert!(minimum_subcover(&c, &join).unwrap().len() <= min.len());
    }
}
