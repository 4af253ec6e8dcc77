//! Shadow sets and the finite shadow topology.
//!
//! For `u ≠ v` the shadow `S^v_u = {x : u ∈ [x,v]}` is the set of points that
//! `u` hides from a light placed at `v`. Shadows form a closed subbase; on a
//! finite carrier the generated topology is stored extensionally as its full
//! family of closed sets.

use std::collections::{HashSet, VecDeque};

use serde::Serialize;

use crate::betweenness::{mask_iter, BetweennessStructure, IntervalTable, Mask, PointId};
use crate::error::{Error, Result};
use crate::report::CheckRecord;

/// Largest carrier for which the closed-set family is materialised.
pub const MAX_TOPOLOGY_POINTS: usize = 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShadowSet {
    pub base: PointId,
    pub light: PointId,
    pub members: Vec<PointId>,
}

/// `S^light_base = {x : base ∈ [x, light]}`.
pub fn shadow(t: &BetweennessStructure, base: PointId, light: PointId) -> Result<ShadowSet> {
    t.check_point(base)?;
    t.check_point(light)?;
    if base == light {
        return Err(Error::DegeneratePair(t.name(base).to_string()));
    }
    let members = t
        .points()
        .filter(|&x| t.between_unchecked(x.0, base.0, light.0))
        .collect();
    Ok(ShadowSet {
        base,
        light,
        members,
    })
}

fn shadow_mask(table: &IntervalTable, base: usize, light: usize) -> Mask {
    (0..table.len())
        .filter(|&x| table.between(x, base, light))
        .fold(0, |m, x| m | 1 << x)
}

/// A topology on `0..carrier` given by its closed sets (sorted, deduplicated).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTopology {
    carrier: usize,
    closed_sets: Vec<Mask>,
}

impl FiniteTopology {
    /// Closed sets generated by a closed subbase on `0..carrier`.
    ///
    /// Every closed set of a finite space is a union of point closures, and the
    /// closure of `x` is the intersection of the subbase members containing `x`;
    /// the family is grown from those closures by repeated unions.
    pub fn from_closed_subbase(carrier: usize, subbase: &[Mask]) -> Result<Self> {
        if carrier > MAX_TOPOLOGY_POINTS {
            return Err(Error::SizeLimit {
                what: "topology carrier",
                got: carrier,
                limit: MAX_TOPOLOGY_POINTS,
            });
        }
        let full: Mask = (1 << carrier) - 1;
        let closures: Vec<Mask> = (0..carrier)
            .map(|x| {
                subbase
                    .iter()
                    .filter(|&&s| s >> x & 1 == 1)
                    .fold(full, |acc, &s| acc & s)
            })
            .collect();
        let mut seen: HashSet<Mask> = HashSet::from([0]);
        let mut queue = VecDeque::from([0 as Mask]);
        while let Some(m) = queue.pop_front() {
            for x in mask_iter(full & !m) {
                let next = m | closures[x];
                if seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        let mut closed_sets: Vec<Mask> = seen.into_iter().collect();
        closed_sets.sort_unstable();
        Ok(Self {
            carrier,
            closed_sets,
        })
    }

    pub fn carrier(&self) -> usize {
        self.carrier
    }

    pub fn full(&self) -> Mask {
        (1 << self.carrier) - 1
    }

    pub fn closed_sets(&self) -> &[Mask] {
        &self.closed_sets
    }

    pub fn is_closed(&self, m: Mask) -> bool {
        self.closed_sets.binary_search(&m).is_ok()
    }

    pub fn is_open(&self, m: Mask) -> bool {
        self.is_closed(self.full() & !m)
    }

    pub fn is_discrete(&self) -> bool {
        self.closed_sets.len() == 1usize << self.carrier
    }

    /// Smallest closed set containing `x`.
    pub fn point_closure(&self, x: usize) -> Mask {
        self.closed_sets
            .iter()
            .filter(|&&c| c >> x & 1 == 1)
            .fold(self.full(), |acc, &c| acc & c)
    }

    /// Smallest open set containing `x`.
    pub fn minimal_neighborhood(&self, x: usize) -> Mask {
        let outside = self
            .closed_sets
            .iter()
            .filter(|&&c| c >> x & 1 == 0)
            .fold(0, |acc, &c| acc | c);
        self.full() & !outside
    }

    /// Traces of the closed sets on `subset`, re-indexed by position within `subset`.
    pub fn subspace(&self, subset: &[usize]) -> FiniteTopology {
        let mut traces: Vec<Mask> = self
            .closed_sets
            .iter()
            .map(|&c| compress(c, subset))
            .collect();
        traces.sort_unstable();
        traces.dedup();
        FiniteTopology {
            carrier: subset.len(),
            closed_sets: traces,
        }
    }
}

/// Re-index the bits of `m` found at positions `subset[i]` to position `i`.
fn compress(m: Mask, subset: &[usize]) -> Mask {
    subset
        .iter()
        .enumerate()
        .filter(|&(_, &p)| m >> p & 1 == 1)
        .fold(0, |acc, (i, _)| acc | 1 << i)
}

fn expand(m: Mask, subset: &[usize]) -> Mask {
    mask_iter(m).fold(0, |acc, i| acc | 1 << subset[i])
}

/// The topology whose closed subbase is all shadows `S^v_u`, `u ≠ v`.
pub fn generate_topology(t: &BetweennessStructure) -> Result<FiniteTopology> {
    if t.len() > MAX_TOPOLOGY_POINTS {
        return Err(Error::SizeLimit {
            what: "topology carrier",
            got: t.len(),
            limit: MAX_TOPOLOGY_POINTS,
        });
    }
    let table = IntervalTable::new(t)?;
    FiniteTopology::from_closed_subbase(t.len(), &shadow_subbase(&table))
}

pub fn shadow_subbase(table: &IntervalTable) -> Vec<Mask> {
    let n = table.len();
    let mut out = Vec::with_capacity(n * n);
    for u in 0..n {
        for v in 0..n {
            if u != v {
                out.push(shadow_mask(table, u, v));
            }
        }
    }
    out
}

/// Hausdorff for a finite space means discrete.
pub fn is_hausdorff(t: &BetweennessStructure) -> Result<bool> {
    Ok(generate_topology(t)?.is_discrete())
}

/// The median retraction `φ_{u,v}(x) = m(u, x, v)`.
pub fn retraction(t: &BetweennessStructure, u: PointId, v: PointId, x: PointId) -> Result<PointId> {
    t.median(u, x, v)?.ok_or_else(|| {
        Error::EmptyMedian(
            t.name(u).to_string(),
            t.name(x).to_string(),
            t.name(v).to_string(),
        )
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RetractionReport {
    pub u: String,
    pub v: String,
    pub checks: Vec<CheckRecord>,
}

impl RetractionReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Retraction, median preservation, continuity and the exact preimage identities for `φ_{u,v}`.
pub fn retraction_report(t: &BetweennessStructure, u: PointId, v: PointId) -> Result<RetractionReport> {
    t.check_point(u)?;
    t.check_point(v)?;
    if u == v {
        return Err(Error::DegeneratePair(t.name(u).to_string()));
    }
    let table = IntervalTable::new(t)?;
    let medians = table
        .median_table(t)?
        .ok_or_else(|| Error::Precondition("not a median pretree".into()))?;
    let topology = generate_topology(t)?;
    Ok(retraction_report_with(t, &table, &medians, &topology, u.0, v.0))
}

/// Same as [`retraction_report`] with precomputed tables (for sweeps over all pairs).
pub fn retraction_report_with(
    t: &BetweennessStructure,
    table: &IntervalTable,
    medians: &[u8],
    topology: &FiniteTopology,
    u: usize,
    v: usize,
) -> RetractionReport {
    let n = t.len();
    let name = |i: usize| t.name(PointId(i)).to_string();
    let med = |a: usize, b: usize, c: usize| medians[(a * n + b) * n + c] as usize;
    let phi: Vec<usize> = (0..n).map(|x| med(u, x, v)).collect();
    let uv = table.interval(u, v);
    let mut checks = Vec::new();

    // (i) image inside [u,v], identity on [u,v]
    let bad = (0..n).find(|&x| uv >> phi[x] & 1 == 0 || (uv >> x & 1 == 1 && phi[x] != x));
    checks.push(
        CheckRecord::from_witness(
            "retraction",
            bad.map(|x| format!("x={} phi(x)={}", name(x), name(phi[x]))),
        )
        .with("interval_size", uv.count_ones()),
    );

    // (ii) m(φx1, φx2, φx3) = φ(m(x1,x2,x3))
    let mut bad = None;
    'sh: for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if med(phi[a], phi[b], phi[c]) != phi[med(a, b, c)] {
                    bad = Some(format!("({}, {}, {})", name(a), name(b), name(c)));
                    break 'sh;
                }
            }
        }
    }
    checks.push(CheckRecord::from_witness("median-preserving", bad).with("triples", n * n * n));

    // (iii) continuity: preimages of subspace-closed subsets of [u,v] are closed
    let members: Vec<usize> = mask_iter(uv).collect();
    let subspace = topology.subspace(&members);
    let preimage = |target: Mask| (0..n).filter(|&x| target >> phi[x] & 1 == 1).fold(0 as Mask, |m, x| m | 1 << x);
    let bad = subspace.closed_sets().iter().find_map(|&c| {
        let target = expand(c, &members);
        let pre = preimage(target);
        (!topology.is_closed(pre)).then(|| format!("closed {{{}}} has open-only preimage {{{}}}", names(t, target), names(t, pre)))
    });
    checks.push(
        CheckRecord::from_witness("continuity", bad).with("subspace_closed_sets", subspace.closed_sets().len()),
    );

    // (iv) φ⁻¹[u,w] = S^v_w for w ∈ [u,v), φ⁻¹[w,v] = S^u_w for w ∈ (u,v]
    let mut bad = None;
    let mut identities = 0;
    for w in members.iter().copied() {
        if w != v {
            identities += 1;
            let lhs = preimage(table.interval(u, w));
            let rhs = shadow_mask(table, w, v);
            if lhs != rhs && bad.is_none() {
                bad = Some(format!("w={}: preimage of [u,w] is {{{}}}, shadow is {{{}}}", name(w), names(t, lhs), names(t, rhs)));
            }
        }
        if w != u {
            identities += 1;
            let lhs = preimage(table.interval(w, v));
            let rhs = shadow_mask(table, w, u);
            if lhs != rhs && bad.is_none() {
                bad = Some(format!("w={}: preimage of [w,v] is {{{}}}, shadow is {{{}}}", name(w), names(t, lhs), names(t, rhs)));
            }
        }
    }
    checks.push(CheckRecord::from_witness("preimage-identities", bad).with("identities", identities));

    // cross-check: the interval's own shadow topology equals its subspace topology
    let induced = IntervalTable::new(&t.induced(&members.iter().map(|&i| PointId(i)).collect::<Vec<_>>()).expect("subset of valid points"))
        .expect("interval fits the table");
    let own = FiniteTopology::from_closed_subbase(members.len(), &shadow_subbase(&induced))
        .expect("interval is no larger than the carrier");
    checks.push(CheckRecord::from_witness(
        "interval-topology",
        (own != subspace).then(|| {
            format!(
                "interval topology has {} closed sets, subspace topology {}",
                own.closed_sets().len(),
                subspace.closed_sets().len()
            )
        }),
    ));

    RetractionReport {
        u: name(u),
        v: name(v),
        checks,
    }
}

fn names(t: &BetweennessStructure, m: Mask) -> String {
    mask_iter(m)
        .map(|i| t.name(PointId(i)).to_string())
        .collect::<Vec<_>>()
        .join(",")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeparationReport {
    pub strict_triples: usize,
    /// `(u, w, v, reason)` for the first few failures.
    pub violations: Vec<(String, String, String, String)>,
}

impl SeparationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// For every strict triple `⟨u,w,v⟩` with `U = X∖S^u_w`, `V = X∖S^v_w`:
/// `u ∈ U`, `v ∈ V` and `w ∈ [x,y]` for all `x ∈ U`, `y ∈ V`.
pub fn shadow_separation(t: &BetweennessStructure) -> Result<SeparationReport> {
    let table = IntervalTable::new(t)?;
    Ok(shadow_separation_with(t, &table))
}

pub fn shadow_separation_with(t: &BetweennessStructure, table: &IntervalTable) -> SeparationReport {
    let n = table.len();
    let full = table.full();
    let name = |i: usize| t.name(PointId(i)).to_string();
    // through[x*n+w] = {y : w ∈ [x,y]}
    let mut through = vec![0 as Mask; n * n];
    for x in 0..n {
        for y in 0..n {
            for w in mask_iter(table.interval(x, y)) {
                through[x * n + w] |= 1 << y;
            }
        }
    }
    let mut report = SeparationReport {
        strict_triples: 0,
        violations: Vec::new(),
    };
    for u in 0..n {
        for v in 0..n {
            if u == v {
                continue;
            }
            for w in mask_iter(table.interval(u, v) & !(1 << u | 1 << v)) {
                report.strict_triples += 1;
                let big_u = full & !shadow_mask(table, w, u);
                let big_v = full & !shadow_mask(table, w, v);
                let reason = if big_u >> u & 1 == 0 {
                    Some("u not in U".to_string())
                } else if big_v >> v & 1 == 0 {
                    Some("v not in V".to_string())
                } else {
                    mask_iter(big_u).find_map(|x| {
                        let miss = big_v & !through[x * n + w];
                        (miss != 0).then(|| {
                            format!("w not in [{}, {}]", name(x), name(miss.trailing_zeros() as usize))
                        })
                    })
                };
                if let Some(r) = reason {
                    if report.violations.len() < 8 {
                        report.violations.push((name(u), name(w), name(v), r));
                    }
                }
            }
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilityReport {
    pub stable: bool,
    /// First pair (in index order) with no separating point.
    pub witness: Option<(String, String)>,
    /// Unordered pairs `(u, v, w)` that are stable, with the separating point found.
    pub stable_pairs: Vec<(String, String, String)>,
    pub weak_note: &'static str,
}

pub const WEAK_STABILITY_NOTE: &str =
    "weak stability quantifies over infinite subsets and holds vacuously on a finite carrier";

/// Decide stability exactly on a finite space using minimal open neighbourhoods.
pub fn stability_check(t: &BetweennessStructure, topology: &FiniteTopology) -> Result<StabilityReport> {
    if topology.carrier() != t.len() {
        return Err(Error::Precondition(format!(
            "topology carrier has {} points, structure {}",
            topology.carrier(),
            t.len()
        )));
    }
    let table = IntervalTable::new(t)?;
    let n = t.len();
    let name = |i: usize| t.name(PointId(i)).to_string();
    let nbhd: Vec<Mask> = (0..n).map(|x| topology.minimal_neighborhood(x)).collect();
    let mut report = StabilityReport {
        stable: true,
        witness: None,
        stable_pairs: Vec::new(),
        weak_note: WEAK_STABILITY_NOTE,
    };
    for u in 0..n {
        for v in (u + 1)..n {
            match pair_separator(&table, &nbhd, u, v) {
                Some(w) => report.stable_pairs.push((name(u), name(v), name(w))),
                None => {
                    if report.stable {
                        report.stable = false;
                        report.witness = Some((name(u), name(v)));
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Some `w ∈ [u,v]∖{u,v}` with `w ∈ [x,y]` for all `x` near `u` and `y` near `v`.
fn pair_separator(table: &IntervalTable, nbhd: &[Mask], u: usize, v: usize) -> Option<usize> {
    mask_iter(table.interval(u, v) & !(1 << u | 1 << v)).find(|&w| {
        mask_iter(nbhd[u]).all(|x| mask_iter(nbhd[v]).all(|y| table.between(x, w, y)))
    })
}

/// Whether a single pair is stable.
pub fn pair_stable(
    t: &BetweennessStructure,
    topology: &FiniteTopology,
    u: PointId,
    v: PointId,
) -> Result<Option<PointId>> {
    let table = IntervalTable::new(t)?;
    let nbhd: Vec<Mask> = (0..t.len()).map(|x| topology.minimal_neighborhood(x)).collect();
    Ok(pair_separator(&table, &nbhd, u.0, v.0).map(PointId))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(t: &BetweennessStructure, names: &[&str]) -> Vec<PointId> {
        let mut v: Vec<PointId> = names.iter().map(|n| t.point(n).unwrap()).collect();
        v.sort();
        v
    }

    #[test]
    fn shadow_examples() {
        let t = BetweennessStructure::path(4);
        let s = shadow(&t, PointId(1), PointId(3)).unwrap();
        assert_eq!(s.members, ids(&t, &["0", "1"]));
        let star = BetweennessStructure::star(&["x", "y", "z"]).unwrap();
        let c = star.point("c").unwrap();
        let x = star.point("x").unwrap();
        assert_eq!(shadow(&star, c, x).unwrap().members, ids(&star, &["c", "y", "z"]));
        assert!(matches!(shadow(&t, PointId(2), PointId(2)), Err(Error::DegeneratePair(_))));
    }

    /// Naive fixpoint: close the subbase under pairwise unions, then pairwise intersections.
    fn naive_closed_sets(n: usize, subbase: &[Mask]) -> Vec<Mask> {
        let full: Mask = (1 << n) - 1;
        let mut fam: HashSet<Mask> = subbase.iter().copied().collect();
        fam.insert(0);
        fam.insert(full);
        loop {
            let cur: Vec<Mask> = fam.iter().copied().collect();
            let before = fam.len();
            for &a in &cur {
                for &b in &cur {
                    fam.insert(a | b);
                }
            }
            if fam.len() == before {
                break;
            }
        }
        loop {
            let cur: Vec<Mask> = fam.iter().copied().collect();
            let before = fam.len();
            for &a in &cur {
                for &b in &cur {
                    fam.insert(a & b);
                }
            }
            if fam.len() == before {
                break;
            }
        }
        let mut v: Vec<Mask> = fam.into_iter().collect();
        v.sort();
        v
    }

    #[test]
    fn generated_topology_matches_naive_closure() {
        let antichain = BetweennessStructure::explicit_with_endpoints::<&str>(&["u", "v", "w"], &[]).unwrap();
        let broken = BetweennessStructure::explicit_with_endpoints(
            &["a", "b", "c", "d"],
            &[("a", "b", "c"), ("a", "c", "d"), ("b", "d", "a")],
        )
        .unwrap();
        let structures = vec![
            BetweennessStructure::path(3),
            BetweennessStructure::path(5),
            BetweennessStructure::star(&["x", "y", "z"]).unwrap(),
            antichain,
            broken,
        ];
        for t in &structures {
            let table = IntervalTable::new(t).unwrap();
            let sub = shadow_subbase(&table);
            let got = FiniteTopology::from_closed_subbase(t.len(), &sub).unwrap();
            assert_eq!(got.closed_sets(), naive_closed_sets(t.len(), &sub).as_slice());
        }
    }

    #[test]
    fn small_topologies_are_discrete() {
        for t in [
            BetweennessStructure::path(3),
            BetweennessStructure::path(2),
            BetweennessStructure::star(&["x", "y", "z"]).unwrap(),
            BetweennessStructure::path(4),
        ] {
            let topo = generate_topology(&t).unwrap();
            assert_eq!(topo.closed_sets().len(), 1 << t.len());
            assert!(is_hausdorff(&t).unwrap());
        }
    }

    #[test]
    fn antichain_topology_regression() {
        // shadows S^v_u = {x : u ∈ [x,v]} = {u}: every singleton is closed
        let t = BetweennessStructure::explicit_with_endpoints::<&str>(&["u", "v", "w"], &[]).unwrap();
        assert!(is_hausdorff(&t).unwrap());
    }

    #[test]
    fn retraction_examples() {
        let t = BetweennessStructure::path(4);
        assert_eq!(retraction(&t, PointId(0), PointId(2), PointId(3)).unwrap(), PointId(2));
        assert_eq!(retraction(&t, PointId(0), PointId(2), PointId(1)).unwrap(), PointId(1));
        let s = BetweennessStructure::star(&["x", "y", "z"]).unwrap();
        let p = |n: &str| s.point(n).unwrap();
        assert_eq!(retraction(&s, p("x"), p("y"), p("z")).unwrap(), p("c"));
    }

    #[test]
    fn retraction_report_on_path_and_star() {
        let t = BetweennessStructure::path(4);
        let r = retraction_report(&t, PointId(0), PointId(2)).unwrap();
        assert!(r.all_passed(), "{r:?}");
        // φ⁻¹[0,1] = {0,1} = S²₁
        let table = IntervalTable::new(&t).unwrap();
        assert_eq!(shadow_mask(&table, 1, 2), 0b0011);
        let s = BetweennessStructure::star(&["x", "y", "z"]).unwrap();
        let r = retraction_report(&s, s.point("x").unwrap(), s.point("y").unwrap()).unwrap();
        assert_eq!(r.checks.len(), 5);
        assert!(r.all_passed(), "{r:?}");
    }

    #[test]
    fn separation_examples() {
        let t = BetweennessStructure::path(4);
        let r = shadow_separation(&t).unwrap();
        assert!(r.passed());
        // ordered strict triples of a 4-path: pairs at distance 2 (4 ordered) with 1 inner point,
        // pairs at distance 3 (2 ordered) with 2 inner points
        assert_eq!(r.strict_triples, 8);
        let table = IntervalTable::new(&t).unwrap();
        assert_eq!(table.full() & !shadow_mask(&table, 1, 0), 0b0001);
        assert_eq!(table.full() & !shadow_mask(&table, 1, 3), 0b1100);
        let edge = BetweennessStructure::path(2);
        let r = shadow_separation(&edge).unwrap();
        assert_eq!((r.strict_triples, r.passed()), (0, true));
    }

    #[test]
    fn stability_examples() {
        let t = BetweennessStructure::path(3);
        let topo = generate_topology(&t).unwrap();
        let r = stability_check(&t, &topo).unwrap();
        assert!(!r.stable);
        assert_eq!(r.witness, Some(("0".into(), "1".into())));
        assert!(r.stable_pairs.contains(&("0".into(), "2".into(), "1".into())));

        let edge = BetweennessStructure::path(2);
        let r = stability_check(&edge, &generate_topology(&edge).unwrap()).unwrap();
        assert!(!r.stable);

        for k in 2..8 {
            let t = BetweennessStructure::path(k + 1);
            let topo = generate_topology(&t).unwrap();
            assert!(pair_stable(&t, &topo, PointId(0), PointId(k)).unwrap().is_some());
        }
    }
}
