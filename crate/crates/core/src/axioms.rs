//! Exhaustive axiom checks for pretrees and median algebras.
//!
//! All checks run over an [`IntervalTable`], so every quantifier is a loop
//! over point indices and set conditions are single mask operations.

use std::fmt;

use serde::Serialize;

use crate::betweenness::{mask_iter, BetweennessStructure, IntervalTable, Mask, PointId};
use crate::error::{Error, Result};

/// Number of witnesses kept per failing axiom.
pub const MAX_WITNESSES: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Axiom {
    B1,
    B2,
    B3,
    A0,
    A1,
    A2,
    A3,
    A4,
    A5,
    M1,
    M2,
    M3,
}

impl Axiom {
    pub const PRETREE: [Axiom; 9] = [
        Axiom::B1,
        Axiom::B2,
        Axiom::B3,
        Axiom::A0,
        Axiom::A1,
        Axiom::A2,
        Axiom::A3,
        Axiom::A4,
        Axiom::A5,
    ];
    pub const MEDIAN: [Axiom; 3] = [Axiom::M1, Axiom::M2, Axiom::M3];

    pub fn statement(self) -> &'static str {
        match self {
            Axiom::B1 => "<a,b,c> => <c,b,a>",
            Axiom::B2 => "<a,b,c> and <a,c,b> <=> b = c",
            Axiom::B3 => "<a,b,c> => <a,b,d> or <d,b,c>",
            Axiom::A0 => "[a,b] contains {a,b}",
            Axiom::A1 => "[a,b] = [b,a]",
            Axiom::A2 => "c in [a,b] and b in [a,c] => b = c",
            Axiom::A3 => "[a,b] subset of [a,c] u [c,b]",
            Axiom::A4 => "c in [a,b] => [a,b] = [a,c] u [c,b]",
            Axiom::A5 => "b in [a,c] and c in [a,d] => c in [b,d]",
            Axiom::M1 => "m(x,x,y) = x",
            Axiom::M2 => "m is invariant under permutations of its arguments",
            Axiom::M3 => "m(m(x,y,z),u,v) = m(x,m(y,u,v),m(z,u,v))",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomVerdict {
    pub axiom: Axiom,
    /// Failing tuples as point names; empty iff the axiom holds.
    pub witnesses: Vec<Vec<String>>,
}

impl AxiomVerdict {
    pub fn passed(&self) -> bool {
        self.witnesses.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub verdicts: Vec<AxiomVerdict>,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(AxiomVerdict::passed)
    }

    pub fn verdict(&self, axiom: Axiom) -> Option<&AxiomVerdict> {
        self.verdicts.iter().find(|v| v.axiom == axiom)
    }

    pub fn passed(&self, axiom: Axiom) -> bool {
        self.verdict(axiom).is_some_and(AxiomVerdict::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AxiomVerdict> {
        self.verdicts.iter().filter(|v| !v.passed())
    }

    pub fn extend(&mut self, other: AxiomReport) {
        self.verdicts.extend(other.verdicts);
    }
}

struct Collector<'a> {
    t: &'a BetweennessStructure,
    axiom: Axiom,
    witnesses: Vec<Vec<String>>,
}

impl<'a> Collector<'a> {
    fn new(t: &'a BetweennessStructure, axiom: Axiom) -> Self {
        Self {
            t,
            axiom,
            witnesses: Vec::new(),
        }
    }

    /// Record a witness; returns false once enough witnesses are collected.
    fn push(&mut self, tuple: &[usize]) -> bool {
        self.witnesses
            .push(tuple.iter().map(|&i| self.t.name(PointId(i)).to_string()).collect());
        self.witnesses.len() < MAX_WITNESSES
    }

    fn full(&self) -> bool {
        self.witnesses.len() >= MAX_WITNESSES
    }

    fn finish(self) -> AxiomVerdict {
        AxiomVerdict {
            axiom: self.axiom,
            witnesses: self.witnesses,
        }
    }
}

/// Exhaustively verify B1–B3 and A0–A5.
pub fn check_axioms(t: &BetweennessStructure) -> Result<AxiomReport> {
    let table = IntervalTable::new(t)?;
    Ok(check_axioms_with(t, &table))
}

pub fn check_axioms_with(t: &BetweennessStructure, table: &IntervalTable) -> AxiomReport {
    let n = table.len();
    let full = table.full();
    let iv = |a: usize, c: usize| table.interval(a, c);
    let bit = |i: usize| -> Mask { 1 << i };

    // right[a*n+b] = {d : <a,b,d>}, left[b*n+c] = {d : <d,b,c>}
    let mut right = vec![0 as Mask; n * n];
    let mut left = vec![0 as Mask; n * n];
    for a in 0..n {
        for d in 0..n {
            for b in mask_iter(iv(a, d)) {
                right[a * n + b] |= bit(d);
                left[b * n + d] |= bit(a);
            }
        }
    }

    let mut verdicts = Vec::with_capacity(9);

    let mut c1 = Collector::new(t, Axiom::B1);
    'b1: for a in 0..n {
        for c in 0..n {
            let missing = iv(a, c) & !iv(c, a);
            for b in mask_iter(missing) {
                if !c1.push(&[a, b, c]) {
                    break 'b1;
                }
            }
        }
    }
    verdicts.push(c1.finish());

    let mut c2 = Collector::new(t, Axiom::B2);
    'b2: for a in 0..n {
        for b in 0..n {
            let both = right[a * n + b] & iv(a, b);
            if both & bit(b) == 0 && !c2.push(&[a, b, b]) {
                break 'b2;
            }
            for c in mask_iter(both & !bit(b)) {
                if !c2.push(&[a, b, c]) {
                    break 'b2;
                }
            }
        }
    }
    verdicts.push(c2.finish());

    let mut c3 = Collector::new(t, Axiom::B3);
    'b3: for a in 0..n {
        for c in 0..n {
            for b in mask_iter(iv(a, c)) {
                let covered = right[a * n + b] | left[b * n + c];
                for d in mask_iter(full & !covered) {
                    if !c3.push(&[a, b, c, d]) {
                        break 'b3;
                    }
                }
            }
        }
    }
    verdicts.push(c3.finish());

    let mut c = Collector::new(t, Axiom::A0);
    'a0: for a in 0..n {
        for b in 0..n {
            let need = bit(a) | bit(b);
            if iv(a, b) & need != need && !c.push(&[a, b]) {
                break 'a0;
            }
        }
    }
    verdicts.push(c.finish());

    let mut c = Collector::new(t, Axiom::A1);
    'a1: for a in 0..n {
        for b in (a + 1)..n {
            if iv(a, b) != iv(b, a) && !c.push(&[a, b]) {
                break 'a1;
            }
        }
    }
    verdicts.push(c.finish());

    let mut c = Collector::new(t, Axiom::A2);
    'a2: for a in 0..n {
        for b in 0..n {
            for cc in mask_iter(iv(a, b) & !bit(b)) {
                if table.between(a, b, cc) && !c.push(&[a, b, cc]) {
                    break 'a2;
                }
            }
        }
    }
    verdicts.push(c.finish());

    let mut c = Collector::new(t, Axiom::A3);
    'a3: for a in 0..n {
        for b in 0..n {
            for cc in 0..n {
                if iv(a, b) & !(iv(a, cc) | iv(cc, b)) != 0 && !c.push(&[a, b, cc]) {
                    break 'a3;
                }
            }
        }
    }
    verdicts.push(c.finish());

    let mut c = Collector::new(t, Axiom::A4);
    'a4: for a in 0..n {
        for b in 0..n {
            for cc in mask_iter(iv(a, b)) {
                if iv(a, b) != iv(a, cc) | iv(cc, b) && !c.push(&[a, b, cc]) {
                    break 'a4;
                }
            }
        }
    }
    verdicts.push(c.finish());

    // b in [a,c] and c in [a,d] => c in [b,d]; i.e. right[a][c] ⊆ right[b][c] for b in [a,c]
    let mut c = Collector::new(t, Axiom::A5);
    'a5: for a in 0..n {
        for cc in 0..n {
            let ds = right[a * n + cc];
            for b in mask_iter(iv(a, cc)) {
                for d in mask_iter(ds & !right[b * n + cc]) {
                    if !c.push(&[a, b, cc, d]) {
                        break 'a5;
                    }
                }
            }
        }
    }
    verdicts.push(c.finish());

    AxiomReport { verdicts }
}

/// Exhaustively verify M1–M3 for the induced median operation.
///
/// Fails with [`Error::Precondition`] when some median is empty.
pub fn check_median_algebra(t: &BetweennessStructure) -> Result<AxiomReport> {
    let table = IntervalTable::new(t)?;
    let medians = table
        .median_table(t)?
        .ok_or_else(|| Error::Precondition("not a median pretree".into()))?;
    Ok(check_median_table(t, &medians))
}

/// M1–M3 for a median table indexed `(x * n + y) * n + z`.
pub fn check_median_table(t: &BetweennessStructure, medians: &[u8]) -> AxiomReport {
    let n = t.len();
    let m = |x: usize, y: usize, z: usize| medians[(x * n + y) * n + z] as usize;
    let mut verdicts = Vec::with_capacity(3);

    let mut c = Collector::new(t, Axiom::M1);
    'm1: for x in 0..n {
        for y in 0..n {
            if m(x, x, y) != x && !c.push(&[x, y]) {
                break 'm1;
            }
        }
    }
    verdicts.push(c.finish());

    let mut c = Collector::new(t, Axiom::M2);
    'm2: for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                let v = m(x, y, z);
                let same = v == m(x, z, y)
                    && v == m(y, x, z)
                    && v == m(y, z, x)
                    && v == m(z, x, y)
                    && v == m(z, y, x);
                if !same && !c.push(&[x, y, z]) {
                    break 'm2;
                }
            }
        }
    }
    let symmetric = c.witnesses.is_empty();
    verdicts.push(c.finish());

    // Under M2 both sides are symmetric in (u,v) and in (y,z), so half of each pair suffices.
    let mut c = Collector::new(t, Axiom::M3);
    let mut retract = vec![0usize; n];
    'm3: for u in 0..n {
        let v_start = if symmetric { u } else { 0 };
        for v in v_start..n {
            for (p, r) in retract.iter_mut().enumerate() {
                *r = m(p, u, v);
            }
            for x in 0..n {
                let row = &medians[x * n * n..(x + 1) * n * n];
                for y in 0..n {
                    let ry = retract[y];
                    let rrow = &row[ry * n..(ry + 1) * n];
                    let z_start = if symmetric { y } else { 0 };
                    for z in z_start..n {
                        let lhs = retract[row[y * n + z] as usize];
                        let rhs = rrow[retract[z]] as usize;
                        if lhs != rhs && !c.push(&[x, y, z, u, v]) {
                            break 'm3;
                        }
                    }
                }
            }
            if c.full() {
                break 'm3;
            }
        }
    }
    verdicts.push(c.finish());

    AxiomReport { verdicts }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_passes_everything() {
        let t = BetweennessStructure::path(4);
        let r = check_axioms(&t).unwrap();
        assert!(r.all_passed(), "{r:?}");
        assert_eq!(r.verdicts.len(), 9);
        let m = check_median_algebra(&t).unwrap();
        assert!(m.all_passed());
    }

    #[test]
    fn linear_order_passes() {
        let t = BetweennessStructure::linear_order(&["0", "1", "2"]).unwrap();
        assert!(check_axioms(&t).unwrap().all_passed());
        assert!(check_median_algebra(&t).unwrap().all_passed());
    }

    #[test]
    fn b2_violation_reports_witness() {
        let t = BetweennessStructure::explicit_with_endpoints(
            &["a", "b", "c"],
            &[("a", "b", "c"), ("a", "c", "b")],
        )
        .unwrap();
        let r = check_axioms(&t).unwrap();
        let b2 = r.verdict(Axiom::B2).unwrap();
        assert!(!b2.passed());
        assert_eq!(b2.witnesses[0], ["a", "b", "c"]);
        // a passing axiom carries no witness
        assert!(r.verdict(Axiom::B1).unwrap().witnesses.is_empty());
    }

    #[test]
    fn antichain_is_a_pretree_but_not_median() {
        let t = BetweennessStructure::explicit_with_endpoints::<&str>(&["u", "v", "w"], &[]).unwrap();
        let r = check_axioms(&t).unwrap();
        for ax in [Axiom::B1, Axiom::B2, Axiom::B3] {
            assert!(r.passed(ax), "{ax}");
        }
        assert!(matches!(check_median_algebra(&t), Err(Error::Precondition(_))));
    }

    #[test]
    fn star_median_algebra() {
        let t = BetweennessStructure::star(&["x", "y", "z"]).unwrap();
        assert!(check_median_algebra(&t).unwrap().all_passed());
    }

    #[test]
    fn broken_median_table_is_caught() {
        let t = BetweennessStructure::path(3);
        let n = 3;
        let mut med = vec![0u8; 27];
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let mut v = [x, y, z];
                    v.sort();
                    med[(x * n + y) * n + z] = v[1] as u8;
                }
            }
        }
        assert!(check_median_table(&t, &med).all_passed());
        // m(0,0,2) = 1 breaks M1
        med[2] = 1;
        let r = check_median_table(&t, &med);
        assert!(!r.passed(Axiom::M1));
        assert!(!r.passed(Axiom::M2));
    }
}
