//! Exact minimum set cover by branch and bound.

use fixedbitset::FixedBitSet;

/// Indices of the members that are not strictly contained in another member
/// (the first of several equal members is kept).
pub fn maximal_members(sets: &[FixedBitSet]) -> Vec<usize> {
    (0..sets.len())
        .filter(|&i| {
            !sets.iter().enumerate().any(|(j, s)| {
                j != i && sets[i].is_subset(s) && (sets[i] != *s || j < i)
            })
        })
        .collect()
}

fn greedy(universe: &FixedBitSet, sets: &[FixedBitSet], candidates: &[usize]) -> Vec<usize> {
    let mut uncovered = universe.clone();
    let mut chosen = Vec::new();
    while !uncovered.is_clear() {
        let best = candidates
            .iter()
            .copied()
            .max_by_key(|&i| (sets[i].intersection(&uncovered).count(), std::cmp::Reverse(i)))
            .expect("coverable");
        chosen.push(best);
        uncovered.difference_with(&sets[best]);
    }
    chosen
}

struct Search<'a> {
    sets: &'a [FixedBitSet],
    covering: Vec<Vec<usize>>,
    best: Option<Vec<usize>>,
    bound: usize,
    nodes: u64,
}

impl Search<'_> {
    fn run(&mut self, uncovered: &FixedBitSet, chosen: &mut Vec<usize>) {
        self.nodes += 1;
        if uncovered.is_clear() {
            if chosen.len() < self.bound {
                self.bound = chosen.len();
                self.best = Some(chosen.clone());
            }
            return;
        }
        if chosen.len() + 1 >= self.bound {
            return;
        }
        // scarcest uncovered cell
        let cell = uncovered
            .ones()
            .min_by_key(|&c| self.covering[c].len())
            .expect("nonempty");
        let widest = self
            .sets
            .iter()
            .map(|s| s.intersection(uncovered).count())
            .max()
            .unwrap_or(0);
        let remaining = uncovered.count_ones(..);
        if widest == 0 || chosen.len() + remaining.div_ceil(widest) >= self.bound {
            return;
        }
        for k in 0..self.covering[cell].len() {
            let i = self.covering[cell][k];
            let mut rest = uncovered.clone();
            rest.difference_with(&self.sets[i]);
            chosen.push(i);
            self.run(&rest, chosen);
            chosen.pop();
        }
    }
}

/// Minimum number of members covering `universe`, with one optimal choice of
/// member indices; `None` when the members do not cover.
///
/// Members contained in other members are dropped first (this never changes
/// the optimum). Branching picks the uncovered cell with fewest covering
/// members and tries those members in index order; the first optimum found is
/// returned, so the result is deterministic.
pub fn minimum_cover(universe: &FixedBitSet, sets: &[FixedBitSet]) -> Option<Vec<usize>> {
    let mut union = FixedBitSet::with_capacity(universe.len());
    for s in sets {
        union.union_with(s);
    }
    if !universe.is_subset(&union) {
        return None;
    }
    let keep = maximal_members(sets);
    let upper = greedy(universe, sets, &keep);
    let mut covering = vec![Vec::new(); universe.len()];
    for &i in &keep {
        for c in sets[i].ones() {
            if c < covering.len() {
                covering[c].push(i);
            }
        }
    }
    let kept: Vec<FixedBitSet> = (0..sets.len())
        .map(|i| {
            if keep.binary_search(&i).is_ok() {
                let mut s = sets[i].clone();
                s.intersect_with(universe);
                s
            } else {
                FixedBitSet::with_capacity(universe.len())
            }
        })
        .collect();
    let mut search = Search {
        sets: &kept,
        covering,
        best: None,
        bound: upper.len() + 1,
        nodes: 0,
    };
    search.run(universe, &mut Vec::new());
    let mut best = search.best.expect("greedy cover bounds the search");
    best.sort_unstable();
    Some(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn set(n: usize, bits: &[usize]) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(n);
        for &b in bits {
            s.insert(b);
        }
        s
    }

    fn brute(universe: &FixedBitSet, sets: &[FixedBitSet]) -> Option<usize> {
        (0u32..1 << sets.len())
            .filter(|mask| {
                let mut u = FixedBitSet::with_capacity(universe.len());
                for (i, s) in sets.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        u.union_with(s);
                    }
                }
                universe.is_subset(&u)
            })
            .map(|m| m.count_ones() as usize)
            .min()
    }

    #[test]
    fn small_instances() {
        let u = set(5, &[0, 1, 2, 3, 4]);
        let sets = vec![set(5, &[0, 1]), set(5, &[1, 2, 3]), set(5, &[3, 4]), set(5, &[0, 1, 2, 3, 4])];
        assert_eq!(minimum_cover(&u, &sets), Some(vec![3]));
        assert_eq!(minimum_cover(&u, &sets[..3]), Some(vec![0, 1, 2]));
        assert_eq!(minimum_cover(&u, &sets[..2]), None);
        assert_eq!(maximal_members(&[set(3, &[0]), set(3, &[0]), set(3, &[0, 1])]), vec![2]);
    }

    #[test]
    fn matches_subset_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..300 {
            let n = rng.gen_range(1..14);
            let k = rng.gen_range(1..13);
            let sets: Vec<FixedBitSet> = (0..k)
                .map(|_| {
                    let bits: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.3)).collect();
                    set(n, &bits)
                })
                .collect();
            let u = set(n, &(0..n).collect::<Vec<_>>());
            let got = minimum_cover(&u, &sets);
            assert_eq!(got.as_ref().map(Vec::len), brute(&u, &sets));
            if let Some(idx) = got {
                let mut cov = FixedBitSet::with_capacity(n);
                for i in idx {
                    cov.union_with(&sets[i]);
                }
                assert!(u.is_subset(&cov));
            }
        }
    }
}
