use std::cmp::Ordering;

use super::{RuleTree, Word};
use crate::error::{Error, Result};

/// A vertex or an eventually periodic end `pre · per^∞`.
///
/// Ends built through [`canonicalize_end`] are canonical, so equality of
/// points is structural equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ExtendedPoint {
    Vertex(Word),
    End { pre: Word, per: Word },
}

/// Length of the longest common prefix of two expansions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Depth {
    Finite(usize),
    /// The points coincide.
    Equal,
}

impl Depth {
    pub fn at_least(self, d: usize) -> bool {
        match self {
            Depth::Finite(k) => k >= d,
            Depth::Equal => true,
        }
    }

    pub fn finite(self) -> Option<usize> {
        match self {
            Depth::Finite(k) => Some(k),
            Depth::Equal => None,
        }
    }
}

impl std::fmt::Display for Depth {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Depth::Finite(k) => write!(f, "{k}"),
            Depth::Equal => write!(f, "equal"),
        }
    }
}

impl ExtendedPoint {
    pub fn root() -> Self {
        ExtendedPoint::Vertex(Word::new())
    }

    pub fn is_end(&self) -> bool {
        matches!(self, ExtendedPoint::End { .. })
    }

    /// The `i`-th letter of the expansion.
    pub fn letter_at(&self, i: usize) -> Option<u8> {
        match self {
            ExtendedPoint::Vertex(w) => w.get(i).copied(),
            ExtendedPoint::End { pre, per } => Some(if i < pre.len() {
                pre[i]
            } else {
                per[(i - pre.len()) % per.len()]
            }),
        }
    }

    /// First `n` letters of the expansion (the whole word for short vertices).
    pub fn expand(&self, n: usize) -> Word {
        (0..n).map_while(|i| self.letter_at(i)).collect()
    }

    /// Length of a vertex word; `None` for ends.
    pub fn depth(&self) -> Option<usize> {
        match self {
            ExtendedPoint::Vertex(w) => Some(w.len()),
            ExtendedPoint::End { .. } => None,
        }
    }

    /// Whether the expansion starts with `w`.
    pub fn has_prefix(&self, w: &[u8]) -> bool {
        w.iter().enumerate().all(|(i, &l)| self.letter_at(i) == Some(l))
    }

    /// Vertex at distance `n` from the root along this point (clamped for vertices).
    pub fn prefix_vertex(&self, n: usize) -> ExtendedPoint {
        ExtendedPoint::Vertex(self.expand(n))
    }

    /// Parse `v:<word>` or `e:<pre>:<per>`.
    pub fn parse(tree: RuleTree, s: &str) -> Result<Self> {
        let bad = |m: &str| Error::InvalidWord(s.to_string(), m.to_string());
        if let Some(w) = s.strip_prefix("v:") {
            return Ok(ExtendedPoint::Vertex(tree.parse_word(w)?));
        }
        if let Some(rest) = s.strip_prefix("e:") {
            let (pre, per) = rest.split_once(':').ok_or_else(|| bad("expected e:<pre>:<per>"))?;
            return canonicalize_end(tree, &tree.parse_word(pre)?, &tree.parse_word(per)?);
        }
        Err(bad("expected v:<word> or e:<pre>:<per>"))
    }

    pub fn display(&self, tree: RuleTree) -> String {
        match self {
            ExtendedPoint::Vertex(w) => format!("v:{}", tree.format_word(w)),
            ExtendedPoint::End { pre, per } => {
                format!("e:{}:{}", tree.format_word(pre), tree.format_word(per))
            }
        }
    }

    /// Letters in range and reduced expansion.
    pub fn validate(&self, tree: RuleTree) -> Result<()> {
        match self {
            ExtendedPoint::Vertex(w) => tree.check_word(w),
            ExtendedPoint::End { pre, per } => {
                let probe = self.expand(pre.len() + 2 * per.len());
                tree.check_word(&probe)
            }
        }
    }
}

fn primitive_root(per: &[u8]) -> &[u8] {
    let n = per.len();
    for p in 1..n {
        if n.is_multiple_of(p) && (p..n).all(|i| per[i] == per[i - p]) {
            return &per[..p];
        }
    }
    per
}

/// Canonical end with expansion `pre · per^∞`: primitive period and shortest preperiod.
pub fn canonicalize_end(tree: RuleTree, pre: &[u8], per: &[u8]) -> Result<ExtendedPoint> {
    let fmt = || format!("{}·({})^∞", tree.format_word(pre), tree.format_word(per));
    if per.is_empty() {
        return Err(Error::InvalidWord(fmt(), "empty period".into()));
    }
    tree.check_word(pre)?;
    tree.check_word(per)?;
    if tree.is_free() {
        let first = per[0];
        let cyclic = per[per.len() - 1] == first ^ 1;
        let junction = pre.last() == Some(&(first ^ 1));
        if cyclic || junction {
            return Err(Error::InvalidWord(fmt(), "expansion not reduced".into()));
        }
    }
    let mut per = primitive_root(per).to_vec();
    let mut pre = pre.to_vec();
    while let (Some(&a), Some(&b)) = (pre.last(), per.last()) {
        if a != b {
            break;
        }
        pre.pop();
        per.rotate_right(1);
    }
    Ok(ExtendedPoint::End { pre, per })
}

/// Longest common prefix of the two expansions, or [`Depth::Equal`].
pub fn confluence(x: &ExtendedPoint, y: &ExtendedPoint) -> Depth {
    if x == y {
        return Depth::Equal;
    }
    let bound = match (x, y) {
        (ExtendedPoint::Vertex(a), ExtendedPoint::Vertex(b)) => a.len().min(b.len()),
        (ExtendedPoint::Vertex(a), _) | (_, ExtendedPoint::Vertex(a)) => a.len(),
        (ExtendedPoint::End { pre: p1, per: q1 }, ExtendedPoint::End { pre: p2, per: q2 }) => {
            // distinct eventually periodic sequences differ before this index
            p1.len().max(p2.len()) + q1.len() + q2.len()
        }
    };
    let k = (0..bound)
        .take_while(|&i| x.letter_at(i) == y.letter_at(i))
        .count();
    Depth::Finite(k)
}

/// `⟨u, w, v⟩` in `X ∪ Ends(X)`: `w` lies on the geodesic joining `u` and `v`.
pub fn between_ext(u: &ExtendedPoint, w: &ExtendedPoint, v: &ExtendedPoint) -> bool {
    if u == v {
        return w == u;
    }
    match w {
        ExtendedPoint::End { .. } => w == u || w == v,
        ExtendedPoint::Vertex(word) => {
            let c = confluence(u, v).finite().expect("distinct points");
            word.len() >= c && (u.has_prefix(word) || v.has_prefix(word))
        }
    }
}

/// Median of three points: the deepest pairwise branch vertex.
pub fn median_ext(a: &ExtendedPoint, b: &ExtendedPoint, c: &ExtendedPoint) -> ExtendedPoint {
    if a == b || a == c {
        return a.clone();
    }
    if b == c {
        return b.clone();
    }
    let d = |x, y| confluence(x, y).finite().expect("distinct points");
    let candidates = [(d(a, b), a), (d(a, c), a), (d(b, c), b)];
    let (depth, p) = candidates
        .iter()
        .max_by(|x, y| x.0.cmp(&y.0).then(Ordering::Greater))
        .expect("three candidates");
    p.prefix_vertex(*depth)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kary() -> RuleTree {
        RuleTree::kary(2).unwrap()
    }

    fn free() -> RuleTree {
        RuleTree::free(2).unwrap()
    }

    fn pt(t: RuleTree, s: &str) -> ExtendedPoint {
        ExtendedPoint::parse(t, s).unwrap()
    }

    fn end(t: RuleTree, pre: &str, per: &str) -> ExtendedPoint {
        canonicalize_end(t, &t.parse_word(pre).unwrap(), &t.parse_word(per).unwrap()).unwrap()
    }

    /// Expansion-comparison oracle for two end descriptions.
    fn same_expansion(t: RuleTree, a: (&str, &str), b: (&str, &str)) -> bool {
        let raw = |(p, q): (&str, &str)| {
            let p = t.parse_word(p).unwrap();
            let q = t.parse_word(q).unwrap();
            (p, q)
        };
        let ((p1, q1), (p2, q2)) = (raw(a), raw(b));
        let n = 2 * (p1.len() + q1.len() + p2.len() + q2.len());
        let at = |p: &Word, q: &Word, i: usize| if i < p.len() { p[i] } else { q[(i - p.len()) % q.len()] };
        (0..n).all(|i| at(&p1, &q1, i) == at(&p2, &q2, i))
    }

    #[test]
    fn canonical_ends() {
        let k = kary();
        let c = end(k, "011", "11");
        assert!(same_expansion(k, ("011", "11"), ("0", "1")));
        assert!(same_expansion(k, ("011", "11"), ("01", "1")));
        assert_eq!(c, ExtendedPoint::End { pre: vec![0], per: vec![1] });
        assert_eq!(end(k, "01", "1"), c);
        assert_eq!(end(k, "", "0"), ExtendedPoint::End { pre: vec![], per: vec![0] });
        let f = free();
        assert_eq!(end(f, "a", "a"), end(f, "", "a"));
        assert_eq!(end(f, "ab", "ab"), end(f, "", "ab"));
        assert_eq!(end(f, "b", "ab"), end(f, "", "ba"));
        assert!(canonicalize_end(f, &[1], &[0]).is_err());
        assert!(canonicalize_end(f, &[], &[0, 2, 1]).is_err());
        assert!(canonicalize_end(k, &[], &[]).is_err());
    }

    #[test]
    fn confluence_examples() {
        let f = free();
        assert_eq!(confluence(&pt(f, "v:aaa"), &pt(f, "e::a")), Depth::Finite(3));
        assert_eq!(confluence(&pt(f, "v:ab"), &pt(f, "v:aB")), Depth::Finite(1));
        let k = kary();
        assert_eq!(confluence(&pt(k, "e::0"), &pt(k, "e::0")), Depth::Equal);
        assert_eq!(confluence(&pt(k, "e::01"), &pt(k, "e:0:10")), Depth::Equal);
        assert_eq!(confluence(&pt(k, "e::01"), &pt(k, "e:0101:1")), Depth::Finite(4));
    }

    #[test]
    fn between_examples() {
        let f = free();
        let root = ExtendedPoint::root();
        assert!(between_ext(&root, &pt(f, "v:a"), &pt(f, "e::a")));
        assert!(!between_ext(&pt(f, "e::a"), &pt(f, "v:b"), &pt(f, "e::A")));
        assert!(between_ext(&pt(f, "e::a"), &root, &pt(f, "e::A")));
        let u = pt(f, "v:ab");
        let xi = pt(f, "e:b:a");
        assert!(between_ext(&u, &u, &xi));
        assert!(between_ext(&u, &xi, &xi));
    }

    #[test]
    fn median_examples() {
        let f = free();
        let root = ExtendedPoint::root();
        assert_eq!(median_ext(&pt(f, "e::a"), &pt(f, "e::b"), &root), root);
        let xi = pt(f, "e:a:b");
        assert_eq!(median_ext(&xi, &xi, &pt(f, "v:B")), xi);
        assert_eq!(median_ext(&pt(f, "e:a:b"), &pt(f, "e:a:B"), &root), pt(f, "v:a"));
    }

    #[test]
    fn median_lies_on_all_three_geodesics() {
        let f = free();
        let pts: Vec<ExtendedPoint> = ["v:ε", "v:a", "v:ab", "v:B", "e::a", "e:a:b", "e:ab:A", "e::ba", "v:abA"]
            .iter()
            .map(|s| pt(f, s))
            .collect();
        for a in &pts {
            for b in &pts {
                for c in &pts {
                    let m = median_ext(a, b, c);
                    assert!(between_ext(a, &m, b) && between_ext(a, &m, c) && between_ext(b, &m, c));
                }
            }
        }
    }
}
