//! Maps between betweenness structures and their monotonicity.
//!
//! Two notions are checked:
//!
//! * **B-monotone**: `f[u,v] ⊆ [f(u), f(v)]` for all `u, v`.
//! * **C-monotone**: the preimage of every connected subset of the target is
//!   connected (or empty). On a finite tree "connected" means the induced
//!   subgraph is connected; on a linear order it means an order interval.

use serde::Serialize;

use crate::betweenness::{mask_iter, Backend, BetweennessStructure, IntervalTable, Mask, PointId};
use crate::error::{Error, Result};

/// Upper bound on the number of connected target subsets enumerated for mode C.
pub const MAX_CONNECTED_SUBSETS: usize = 1 << 20;
/// Largest structure size accepted by [`monotone_equivalence`].
pub const MAX_EQUIVALENCE_POINTS: usize = 6;

#[derive(Clone, Debug)]
pub struct Mapping<'a> {
    pub source: &'a BetweennessStructure,
    pub target: &'a BetweennessStructure,
    table: Vec<PointId>,
}

impl<'a> Mapping<'a> {
    pub fn new(
        source: &'a BetweennessStructure,
        target: &'a BetweennessStructure,
        table: Vec<PointId>,
    ) -> Result<Self> {
        if table.len() != source.len() {
            return Err(Error::InvalidMapping(format!(
                "table has {} entries for {} source points",
                table.len(),
                source.len()
            )));
        }
        for &p in &table {
            target.check_point(p)?;
        }
        Ok(Self {
            source,
            target,
            table,
        })
    }

    /// Build from `(source name, target name)` pairs; every source point must appear exactly once.
    pub fn from_pairs<S: AsRef<str>>(
        source: &'a BetweennessStructure,
        target: &'a BetweennessStructure,
        pairs: &[(S, S)],
    ) -> Result<Self> {
        let mut table = vec![None; source.len()];
        for (s, d) in pairs {
            let s = source.point(s.as_ref())?;
            let d = target.point(d.as_ref())?;
            if table[s.0].replace(d).is_some() {
                return Err(Error::InvalidMapping(format!(
                    "source point `{}` mapped twice",
                    source.name(s)
                )));
            }
        }
        let table = table
            .into_iter()
            .enumerate()
            .map(|(i, d)| {
                d.ok_or_else(|| {
                    Error::InvalidMapping(format!(
                        "source point `{}` has no image",
                        source.name(PointId(i))
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            source,
            target,
            table,
        })
    }

    pub fn identity(t: &'a BetweennessStructure) -> Self {
        Self {
            source: t,
            target: t,
            table: t.points().collect(),
        }
    }

    pub fn apply(&self, p: PointId) -> PointId {
        self.table[p.0]
    }

    pub fn table(&self) -> &[PointId] {
        &self.table
    }

    /// `other ∘ self`.
    pub fn then<'b>(&self, other: &Mapping<'b>) -> Result<Mapping<'b>>
    where
        'a: 'b,
    {
        if other.source != self.target {
            return Err(Error::InvalidMapping(
                "composition requires matching target and source".into(),
            ));
        }
        Ok(Mapping {
            source: self.source,
            target: other.target,
            table: self.table.iter().map(|&p| other.apply(p)).collect(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MonotoneMode {
    /// Interval preserving.
    B,
    /// Connected preimages of connected sets.
    C,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum MonotoneWitness {
    /// `x ∈ [u,v]` but `f(x) ∉ [f(u), f(v)]`; names are `(u, x, v)`.
    Triple(String, String, String),
    /// A connected target subset whose preimage is disconnected.
    Subset {
        target_subset: Vec<String>,
        preimage: Vec<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonotoneVerdict {
    pub monotone: bool,
    pub witness: Option<MonotoneWitness>,
}

pub fn check_monotone(f: &Mapping<'_>, mode: MonotoneMode) -> Result<MonotoneVerdict> {
    let src = IntervalTable::new(f.source)?;
    let dst = IntervalTable::new(f.target)?;
    let table: Vec<usize> = f.table.iter().map(|p| p.0).collect();
    let names = |t: &BetweennessStructure, m: Mask| -> Vec<String> {
        mask_iter(m).map(|i| t.name(PointId(i)).to_string()).collect()
    };
    match mode {
        MonotoneMode::B => {
            let bad = b_violation(&src, &dst, &table);
            Ok(MonotoneVerdict {
                monotone: bad.is_none(),
                witness: bad.map(|(u, x, v)| {
                    MonotoneWitness::Triple(
                        f.source.name(PointId(u)).into(),
                        f.source.name(PointId(x)).into(),
                        f.source.name(PointId(v)).into(),
                    )
                }),
            })
        }
        MonotoneMode::C => {
            let connected_src = Connectivity::new(f.source)?;
            let subsets = connected_subsets(f.target)?;
            let pre = preimages(&table, f.target.len());
            let bad = c_violation(&connected_src, &subsets, &pre);
            Ok(MonotoneVerdict {
                monotone: bad.is_none(),
                witness: bad.map(|(s, p)| MonotoneWitness::Subset {
                    target_subset: names(f.target, s),
                    preimage: names(f.source, p),
                }),
            })
        }
    }
}

fn b_violation(src: &IntervalTable, dst: &IntervalTable, f: &[usize]) -> Option<(usize, usize, usize)> {
    let n = src.len();
    for u in 0..n {
        for v in u..n {
            let allowed = dst.interval(f[u], f[v]);
            for x in mask_iter(src.interval(u, v)) {
                if allowed >> f[x] & 1 == 0 {
                    return Some((u, x, v));
                }
            }
        }
    }
    None
}

fn preimages(f: &[usize], target_len: usize) -> Vec<Mask> {
    let mut pre = vec![0 as Mask; target_len];
    for (x, &y) in f.iter().enumerate() {
        pre[y] |= 1 << x;
    }
    pre
}

fn c_violation(src: &Connectivity, subsets: &[Mask], pre: &[Mask]) -> Option<(Mask, Mask)> {
    for &s in subsets {
        let p = mask_iter(s).fold(0, |acc, y| acc | pre[y]);
        if p != 0 && !src.is_connected(p) {
            return Some((s, p));
        }
    }
    None
}

/// Connectedness of point subsets in a tree or linear order.
pub(crate) enum Connectivity {
    Tree { edges: Vec<(usize, usize)> },
    Order { rank: Vec<usize> },
}

impl Connectivity {
    pub(crate) fn new(t: &BetweennessStructure) -> Result<Self> {
        if t.len() > IntervalTable::MAX_POINTS {
            return Err(Error::SizeLimit {
                what: "points",
                got: t.len(),
                limit: IntervalTable::MAX_POINTS,
            });
        }
        match t.backend() {
            Backend::Tree { .. } => Ok(Connectivity::Tree {
                edges: t.edges().unwrap_or_default(),
            }),
            Backend::LinearOrder { rank } => Ok(Connectivity::Order { rank: rank.clone() }),
            Backend::Explicit { .. } => Err(Error::BackendMismatch(
                "connectedness needs a tree or linear-order backend".into(),
            )),
        }
    }

    /// Nonempty subsets only; a forest is connected iff it has one more vertex than edges.
    pub(crate) fn is_connected(&self, m: Mask) -> bool {
        match self {
            Connectivity::Tree { edges } => {
                let inner = edges
                    .iter()
                    .filter(|&&(u, v)| m >> u & 1 == 1 && m >> v & 1 == 1)
                    .count();
                m.count_ones() as usize == inner + 1
            }
            Connectivity::Order { rank } => {
                let ranks: Vec<usize> = mask_iter(m).map(|i| rank[i]).collect();
                let lo = ranks.iter().min().copied().unwrap_or(0);
                let hi = ranks.iter().max().copied().unwrap_or(0);
                hi - lo + 1 == ranks.len()
            }
        }
    }
}

/// All nonempty connected subsets of a tree- or order-backed structure.
pub fn connected_subsets(t: &BetweennessStructure) -> Result<Vec<Mask>> {
    let n = t.len();
    if n > IntervalTable::MAX_POINTS {
        return Err(Error::SizeLimit {
            what: "points",
            got: n,
            limit: IntervalTable::MAX_POINTS,
        });
    }
    match t.backend() {
        Backend::LinearOrder { rank } => {
            let mut by_rank = vec![0; n];
            for (p, &r) in rank.iter().enumerate() {
                by_rank[r] = p;
            }
            let mut out = Vec::new();
            for lo in 0..n {
                let mut m: Mask = 0;
                for &p in &by_rank[lo..] {
                    m |= 1 << p;
                    out.push(m);
                }
            }
            Ok(out)
        }
        Backend::Tree { adjacency } => {
            let nbr: Vec<Mask> = adjacency
                .iter()
                .map(|ns| ns.iter().fold(0, |acc, &y| acc | (1 << y)))
                .collect();
            let mut out = Vec::new();
            for r in 0..n {
                let banned: Mask = ((1 << r) - 1) | (1 << r);
                extend_subtrees(&nbr, 1 << r, nbr[r] & !banned, banned, &mut out)?;
            }
            Ok(out)
        }
        Backend::Explicit { .. } => Err(Error::BackendMismatch(
            "connected subsets need a tree or linear-order backend".into(),
        )),
    }
}

fn extend_subtrees(nbr: &[Mask], set: Mask, ext: Mask, banned: Mask, out: &mut Vec<Mask>) -> Result<()> {
    if out.len() >= MAX_CONNECTED_SUBSETS {
        return Err(Error::SizeLimit {
            what: "connected subsets",
            got: out.len() + 1,
            limit: MAX_CONNECTED_SUBSETS,
        });
    }
    out.push(set);
    let mut banned = banned;
    for w in mask_iter(ext) {
        banned |= 1 << w;
        let next = (ext | nbr[w]) & !set & !banned;
        extend_subtrees(nbr, set | 1 << w, next, banned, out)?;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquivalenceReport {
    pub source_points: usize,
    pub target_points: usize,
    pub maps: usize,
    pub b_monotone: usize,
    pub c_monotone: usize,
    /// First map on which the two verdicts disagree, as `(source, target)` name pairs.
    pub counterexample: Option<Vec<(String, String)>>,
}

impl EquivalenceReport {
    pub fn agree(&self) -> bool {
        self.counterexample.is_none()
    }
}

/// Enumerate every total map `source → target` and compare B- and C-monotonicity.
pub fn monotone_equivalence(
    source: &BetweennessStructure,
    target: &BetweennessStructure,
) -> Result<EquivalenceReport> {
    for t in [source, target] {
        if !matches!(t.backend(), Backend::Tree { .. }) {
            return Err(Error::BackendMismatch(
                "monotone equivalence needs tree-backed structures".into(),
            ));
        }
        if t.len() > MAX_EQUIVALENCE_POINTS {
            return Err(Error::SizeLimit {
                what: "points",
                got: t.len(),
                limit: MAX_EQUIVALENCE_POINTS,
            });
        }
    }
    let (ns, nt) = (source.len(), target.len());
    let src = IntervalTable::new(source)?;
    let dst = IntervalTable::new(target)?;
    let conn = Connectivity::new(source)?;
    let subsets = connected_subsets(target)?;

    let mut report = EquivalenceReport {
        source_points: ns,
        target_points: nt,
        maps: 0,
        b_monotone: 0,
        c_monotone: 0,
        counterexample: None,
    };
    let mut f = vec![0usize; ns];
    loop {
        let b = b_violation(&src, &dst, &f).is_none();
        let c = c_violation(&conn, &subsets, &preimages(&f, nt)).is_none();
        report.maps += 1;
        report.b_monotone += b as usize;
        report.c_monotone += c as usize;
        if b != c && report.counterexample.is_none() {
            report.counterexample = Some(
                f.iter()
                    .enumerate()
                    .map(|(x, &y)| {
                        (
                            source.name(PointId(x)).to_string(),
                            target.name(PointId(y)).to_string(),
                        )
                    })
                    .collect(),
            );
        }
        // odometer-style increment over all nt^ns maps
        let mut i = 0;
        while i < ns {
            f[i] += 1;
            if f[i] < nt {
                break;
            }
            f[i] = 0;
            i += 1;
        }
        if i == ns {
            break;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map<'a>(
        s: &'a BetweennessStructure,
        t: &'a BetweennessStructure,
        pairs: &[(&str, &str)],
    ) -> Mapping<'a> {
        Mapping::from_pairs(s, t, pairs).unwrap()
    }

    #[test]
    fn identity_is_monotone_both_ways() {
        let t = BetweennessStructure::path(4);
        let id = Mapping::identity(&t);
        assert!(check_monotone(&id, MonotoneMode::B).unwrap().monotone);
        assert!(check_monotone(&id, MonotoneMode::C).unwrap().monotone);
    }

    #[test]
    fn collapse_path4_onto_path2() {
        let s = BetweennessStructure::path(4);
        let t = BetweennessStructure::path(2);
        let f = map(&s, &t, &[("0", "0"), ("1", "0"), ("2", "1"), ("3", "1")]);
        assert!(check_monotone(&f, MonotoneMode::B).unwrap().monotone);
        assert!(check_monotone(&f, MonotoneMode::C).unwrap().monotone);
    }

    #[test]
    fn swap_breaks_monotonicity_with_witness() {
        let s = BetweennessStructure::path(4);
        let f = map(&s, &s, &[("0", "0"), ("1", "2"), ("2", "1"), ("3", "3")]);
        let v = check_monotone(&f, MonotoneMode::B).unwrap();
        assert!(!v.monotone);
        assert_eq!(
            v.witness,
            Some(MonotoneWitness::Triple("0".into(), "1".into(), "2".into()))
        );
        let c = check_monotone(&f, MonotoneMode::C).unwrap();
        assert!(!c.monotone);
        assert!(matches!(c.witness, Some(MonotoneWitness::Subset { .. })));
    }

    #[test]
    fn mode_c_rejects_explicit_backend() {
        let e = BetweennessStructure::explicit_with_endpoints::<&str>(&["u", "v"], &[]).unwrap();
        let id = Mapping::identity(&e);
        assert!(matches!(
            check_monotone(&id, MonotoneMode::C),
            Err(Error::BackendMismatch(_))
        ));
    }

    #[test]
    fn mapping_must_be_total() {
        let s = BetweennessStructure::path(3);
        assert!(matches!(
            Mapping::from_pairs(&s, &s, &[("0", "0"), ("1", "1")]),
            Err(Error::InvalidMapping(_))
        ));
        assert!(matches!(
            Mapping::from_pairs(&s, &s, &[("0", "0"), ("1", "1"), ("2", "7")]),
            Err(Error::UnknownPoint(_))
        ));
    }

    /// Brute force: all nonempty subsets whose induced subgraph is connected (BFS).
    fn connected_oracle(t: &BetweennessStructure) -> Vec<Mask> {
        let adj = t.adjacency().unwrap();
        let n = t.len();
        let mut out = Vec::new();
        for m in 1..(1u128 << n) {
            let start = m.trailing_zeros() as usize;
            let mut seen: Mask = 1 << start;
            let mut stack = vec![start];
            while let Some(x) = stack.pop() {
                for &y in &adj[x] {
                    if m >> y & 1 == 1 && seen >> y & 1 == 0 {
                        seen |= 1 << y;
                        stack.push(y);
                    }
                }
            }
            if seen == m {
                out.push(m);
            }
        }
        out
    }

    #[test]
    fn connected_subset_enumeration_matches_oracle() {
        let trees = [
            BetweennessStructure::path(6),
            BetweennessStructure::star(&["a", "b", "d", "e", "f"]).unwrap(),
            BetweennessStructure::tree_from_edges(8, &[(0, 1), (1, 2), (1, 3), (3, 4), (3, 5), (0, 6), (6, 7)])
                .unwrap(),
        ];
        for t in &trees {
            let mut got = connected_subsets(t).unwrap();
            got.sort();
            let mut want = connected_oracle(t);
            want.sort();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn connected_equals_convex_on_trees_and_orders() {
        let tree = BetweennessStructure::tree_from_edges(6, &[(0, 1), (1, 2), (1, 3), (3, 4), (0, 5)]).unwrap();
        let order = BetweennessStructure::linear_order(&["a", "b", "c", "d", "e"]).unwrap();
        for t in [&tree, &order] {
            let conn = Connectivity::new(t).unwrap();
            for m in 1..(1u128 << t.len()) {
                let pts: Vec<PointId> = mask_iter(m).map(PointId).collect();
                assert_eq!(conn.is_connected(m), t.is_convex(&pts).unwrap());
            }
        }
    }

    #[test]
    fn equivalence_small_cases() {
        let p3 = BetweennessStructure::path(3);
        let r = monotone_equivalence(&p3, &p3).unwrap();
        assert_eq!(r.maps, 27);
        assert!(r.agree());
        let p2 = BetweennessStructure::path(2);
        let r = monotone_equivalence(&p2, &p2).unwrap();
        assert_eq!((r.maps, r.b_monotone), (4, 4));
        let star = BetweennessStructure::star(&["x", "y", "z"]).unwrap();
        assert!(monotone_equivalence(&star, &p2).unwrap().agree());
        let big = BetweennessStructure::path(7);
        assert!(matches!(monotone_equivalence(&big, &p2), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn composition_of_monotone_maps() {
        let s = BetweennessStructure::path(4);
        let m = BetweennessStructure::path(3);
        let t = BetweennessStructure::path(2);
        let f = map(&s, &m, &[("0", "0"), ("1", "1"), ("2", "1"), ("3", "2")]);
        let g = map(&m, &t, &[("0", "0"), ("1", "0"), ("2", "1")]);
        let h = f.then(&g).unwrap();
        assert!(check_monotone(&h, MonotoneMode::B).unwrap().monotone);
    }
}
