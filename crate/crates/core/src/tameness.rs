//! Independence of function families, bounded-length tameness checks,
//! Helly-type subsequence selection and monotone separators.
//!
//! A family `f_1..f_n` on a finite carrier is *independent* when some
//! thresholds `a < b` realise every sign pattern: for each split of the
//! indices into `P` and `M` there is a point `x` with `f_i(x) < a` on `P` and
//! `f_i(x) > b` on `M`. Only full splits are enumerated: any disjoint pair
//! `(P, M)` extends to a full split whose witness also witnesses `(P, M)`.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::betweenness::{BetweennessStructure, IntervalTable, PointId};
use crate::error::{Error, Result};
use crate::mapping::{check_monotone, Mapping, MonotoneMode, MonotoneVerdict};
use crate::report::CheckRecord;
use crate::Rational;

/// Largest family accepted by [`is_independent`] (2ⁿ patterns).
pub const MAX_INDEPENDENCE_LEN: usize = 16;
/// Largest sub-family length accepted by [`tame_check`].
pub const MAX_TAME_LEN: usize = 12;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Bounded finite sequence of rational-valued functions on a finite carrier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionFamily {
    points: Vec<String>,
    functions: Vec<Vec<Rational>>,
    lower: Rational,
    upper: Rational,
}

impl FunctionFamily {
    pub fn new(
        points: Vec<String>,
        functions: Vec<Vec<Rational>>,
        lower: Rational,
        upper: Rational,
    ) -> Result<Self> {
        if lower > upper {
            return Err(Error::InvalidFamily(format!("bounds {lower} > {upper}")));
        }
        for (i, f) in functions.iter().enumerate() {
            if f.len() != points.len() {
                return Err(Error::InvalidFamily(format!(
                    "function {i} has {} values for {} points",
                    f.len(),
                    points.len()
                )));
            }
            if let Some(v) = f.iter().find(|v| **v < lower || **v > upper) {
                return Err(Error::InvalidFamily(format!(
                    "function {i} takes value {v} outside [{lower}, {upper}]"
                )));
            }
        }
        Ok(Self {
            points,
            functions,
            lower,
            upper,
        })
    }

    /// Bounds taken from the values themselves.
    pub fn from_functions(points: Vec<String>, functions: Vec<Vec<Rational>>) -> Result<Self> {
        let all = functions.iter().flatten();
        let lower = all.clone().min().cloned().unwrap_or_else(Rational::zero);
        let upper = all.max().cloned().unwrap_or_else(Rational::zero);
        Self::new(points, functions, lower, upper)
    }

    /// Family on the points of a structure.
    pub fn on(t: &BetweennessStructure, functions: Vec<Vec<Rational>>) -> Result<Self> {
        Self::from_functions(t.names().to_vec(), functions)
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn functions(&self) -> &[Vec<Rational>] {
        &self.functions
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn bounds(&self) -> (&Rational, &Rational) {
        (&self.lower, &self.upper)
    }

    /// Sub-family by indices, keeping the declared bounds.
    pub fn subfamily(&self, indices: &[usize]) -> Self {
        Self {
            points: self.points.clone(),
            functions: indices.iter().map(|&i| self.functions[i].clone()).collect(),
            lower: self.lower.clone(),
            upper: self.upper.clone(),
        }
    }
}

/// One realised sign pattern: bit `i` of `above` set means `f_i(x) > b`, clear means `f_i(x) < a`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PatternWitness {
    pub above: u32,
    pub point: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndependenceWitness {
    #[serde(serialize_with = "ser_display")]
    pub a: Rational,
    #[serde(serialize_with = "ser_display")]
    pub b: Rational,
    /// One entry per full split, ordered by `above`.
    pub patterns: Vec<PatternWitness>,
}

fn ser_display<S: serde::Serializer, T: std::fmt::Display>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

impl IndependenceWitness {
    /// Re-verify the witness against a family.
    pub fn verify(&self, family: &FunctionFamily) -> bool {
        let n = family.len();
        if self.a >= self.b || self.patterns.len() != 1 << n {
            return false;
        }
        self.patterns.iter().enumerate().all(|(k, p)| {
            let Some(x) = family.points.iter().position(|q| *q == p.point) else {
                return false;
            };
            p.above as usize == k
                && (0..n).all(|i| {
                    let v = &family.functions[i][x];
                    if p.above >> i & 1 == 1 {
                        *v > self.b
                    } else {
                        *v < self.a
                    }
                })
        })
    }
}

/// Search thresholds `a < b` realising all `2ⁿ` splits.
///
/// Only the gaps between consecutive distinct values matter: `a` is placed a
/// quarter into its gap and `b` three quarters into its gap (same gap or a
/// later one), so every threshold pair with distinct behaviour is tried.
pub fn is_independent(family: &FunctionFamily) -> Result<Option<IndependenceWitness>> {
    let n = family.len();
    if n == 0 {
        return Err(Error::InvalidFamily("empty family".into()));
    }
    if n > MAX_INDEPENDENCE_LEN {
        return Err(Error::SizeLimit {
            what: "family length",
            got: n,
            limit: MAX_INDEPENDENCE_LEN,
        });
    }
    let needed = 1usize << n;
    if family.points.len() < needed {
        return Ok(None);
    }
    let values: Vec<&Rational> = family
        .functions
        .iter()
        .flatten()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let gaps = values.len().saturating_sub(1);
    let four = Rational::from_integer(4.into());
    let three = Rational::from_integer(3.into());
    for i in 0..gaps {
        for j in i..gaps {
            // f < a  ⟺  f ≤ values[i];  f > b  ⟺  f ≥ values[j+1]
            let (lo, hi) = (values[i], values[j + 1]);
            let mut seen: Vec<Option<usize>> = vec![None; needed];
            let mut count = 0;
            for x in 0..family.points.len() {
                let mut above = 0usize;
                let mut full = true;
                for (k, f) in family.functions.iter().enumerate() {
                    if f[x] >= *hi {
                        above |= 1 << k;
                    } else if f[x] > *lo {
                        full = false;
                        break;
                    }
                }
                if full && seen[above].is_none() {
                    seen[above] = Some(x);
                    count += 1;
                }
            }
            if count == needed {
                let a = values[i] + (values[i + 1] - values[i]) / &four;
                let b = values[j] + (values[j + 1] - values[j]) * &three / &four;
                let patterns = seen
                    .into_iter()
                    .enumerate()
                    .map(|(above, x)| PatternWitness {
                        above: above as u32,
                        point: family.points[x.expect("all patterns seen")].clone(),
                    })
                    .collect();
                return Ok(Some(IndependenceWitness { a, b, patterns }));
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TameVerdict {
    pub tame: bool,
    /// Longest independent sub-family found (indices increasing), empty when tame.
    pub indices: Vec<usize>,
    pub witness: Option<IndependenceWitness>,
    /// Number of sub-families tested.
    pub tested: usize,
}

/// No order-preserving sub-family of length `2..=max_len` is independent.
///
/// A single non-constant function is always independent on its own, so
/// length-one sub-families are not counted against tameness. Sub-families of an
/// independent family are independent, so level `k+1` only extends the
/// independent sub-families of level `k`.
pub fn tame_check(family: &FunctionFamily, max_len: usize) -> Result<TameVerdict> {
    if max_len > MAX_TAME_LEN {
        return Err(Error::SizeLimit {
            what: "sub-family length",
            got: max_len,
            limit: MAX_TAME_LEN,
        });
    }
    let n = family.len();
    let mut verdict = TameVerdict {
        tame: true,
        indices: Vec::new(),
        witness: None,
        tested: 0,
    };
    let mut level: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    for _len in 2..=max_len.min(n) {
        let mut next = Vec::new();
        for base in &level {
            let last = *base.last().expect("nonempty");
            for k in last + 1..n {
                let mut idx = base.clone();
                idx.push(k);
                verdict.tested += 1;
                if let Some(w) = is_independent(&family.subfamily(&idx))? {
                    if verdict.tame || idx.len() > verdict.indices.len() {
                        verdict.tame = false;
                        verdict.indices = idx.clone();
                        verdict.witness = Some(w);
                    }
                    next.push(idx);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        level = next;
    }
    Ok(verdict)
}

/// The chain `[u,v]` ordered by `x ≤ y ⟺ ⟨x,y,v⟩`, starting at `u`.
fn chain(t: &BetweennessStructure, table: &IntervalTable, u: usize, v: usize) -> Vec<usize> {
    let mut members: Vec<usize> = (0..t.len()).filter(|&x| table.between(u, x, v)).collect();
    members.sort_by_key(|&x| table.interval(u, x).count_ones());
    members
}

/// `f = e ∘ φ_{u,v}` with `e` spacing the chain `[u,v]` evenly over `[0,1]`.
pub fn monotone_separator(t: &BetweennessStructure, u: PointId, v: PointId) -> Result<Vec<Rational>> {
    t.check_point(u)?;
    t.check_point(v)?;
    if u == v {
        return Err(Error::DegeneratePair(t.name(u).to_string()));
    }
    let table = IntervalTable::new(t)?;
    separator_with(t, &table, u.0, v.0)
}

fn separator_with(t: &BetweennessStructure, table: &IntervalTable, u: usize, v: usize) -> Result<Vec<Rational>> {
    let chain = chain(t, table, u, v);
    let steps = (chain.len() - 1) as i64;
    let mut position = vec![0i64; t.len()];
    for (i, &x) in chain.iter().enumerate() {
        position[x] = i as i64;
    }
    (0..t.len())
        .map(|x| {
            let m = (0..t.len())
                .filter(|&c| table.between(u, c, x) && table.between(u, c, v) && table.between(x, c, v))
                .collect::<Vec<_>>();
            match m.as_slice() {
                [c] => Ok(rat(position[*c], steps)),
                [] => Err(Error::EmptyMedian(
                    t.name(PointId(u)).into(),
                    t.name(PointId(x)).into(),
                    t.name(PointId(v)).into(),
                )),
                many => Err(Error::NonSingletonMedian {
                    a: t.name(PointId(u)).into(),
                    b: t.name(PointId(x)).into(),
                    c: t.name(PointId(v)).into(),
                    size: many.len(),
                }),
            }
        })
        .collect()
}

/// Random monotone function: a random separator post-composed with a random
/// nondecreasing step map into `{0, 1/100, …, 1}`.
pub fn random_monotone<R: Rng + ?Sized>(t: &BetweennessStructure, table: &IntervalTable, rng: &mut R) -> Result<Vec<Rational>> {
    let n = t.len();
    if n < 2 {
        return Ok(vec![Rational::zero(); n]);
    }
    let u = rng.gen_range(0..n);
    let mut v = rng.gen_range(0..n - 1);
    if v >= u {
        v += 1;
    }
    let base = separator_with(t, table, u, v)?;
    let distinct: BTreeSet<&Rational> = base.iter().collect();
    let mut levels: Vec<i64> = (0..distinct.len()).map(|_| rng.gen_range(0..=100)).collect();
    levels.sort_unstable();
    let step: BTreeMap<&Rational, Rational> = distinct
        .into_iter()
        .zip(levels)
        .map(|(k, l)| (k, rat(l, 100)))
        .collect();
    Ok(base.iter().map(|x| step[x].clone()).collect())
}

/// Deterministic per-trial generator derived from a master seed.
pub fn trial_rng(master: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(trial);
    rng
}

/// B-monotonicity of a rational-valued function against the order on its values.
pub fn function_is_monotone(t: &BetweennessStructure, values: &[Rational]) -> Result<MonotoneVerdict> {
    if values.len() != t.len() {
        return Err(Error::InvalidFamily(format!(
            "{} values for {} points",
            values.len(),
            t.len()
        )));
    }
    let distinct: Vec<&Rational> = values.iter().collect::<BTreeSet<_>>().into_iter().collect();
    let names: Vec<String> = distinct.iter().map(|v| v.to_string()).collect();
    let order = BetweennessStructure::linear_order(&names)?;
    let table = values
        .iter()
        .map(|v| PointId(distinct.binary_search(&v).expect("value is present")))
        .collect();
    check_monotone(&Mapping::new(t, &order, table)?, MonotoneMode::B)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConvFunReport {
    pub trials: usize,
    pub independent_pairs: usize,
    /// First offending pair as value lists `(trial, f, g)`, if any.
    pub first_offender: Option<(usize, Vec<String>, Vec<String>)>,
}

impl ConvFunReport {
    pub fn passed(&self) -> bool {
        self.independent_pairs == 0
    }
}

/// Generate random monotone pairs on a median pretree and count independent ones.
pub fn convfun_property_test(t: &BetweennessStructure, trials: usize, seed: u64) -> Result<ConvFunReport> {
    let table = IntervalTable::new(t)?;
    if table.median_table(t)?.is_none() {
        return Err(Error::Precondition("not a median pretree".into()));
    }
    let mut report = ConvFunReport {
        trials,
        independent_pairs: 0,
        first_offender: None,
    };
    for i in 0..trials {
        let mut rng = trial_rng(seed, i as u64);
        let f = random_monotone(t, &table, &mut rng)?;
        let g = random_monotone(t, &table, &mut rng)?;
        let fam = FunctionFamily::on(t, vec![f, g])?;
        if is_independent(&fam)?.is_some() {
            report.independent_pairs += 1;
            if report.first_offender.is_none() {
                let show = |v: &[Rational]| v.iter().map(|x| x.to_string()).collect();
                report.first_offender = Some((i, show(&fam.functions[0]), show(&fam.functions[1])));
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SelectionResult {
    /// Selected indices, strictly increasing.
    pub indices: Vec<usize>,
    /// Midpoint of the kept bucket at each carrier point.
    #[serde(serialize_with = "ser_display_vec")]
    pub limit: Vec<Rational>,
    /// Largest spread of selected values at any carrier point.
    #[serde(serialize_with = "ser_display")]
    pub oscillation: Rational,
}

fn ser_display_vec<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum HellyOutcome {
    Selected(SelectionResult),
    /// Refinement dropped below the target; `kept` indices survived.
    Insufficient { kept: usize },
}

/// Pigeonhole refinement: at each carrier point keep the largest bucket of width `epsilon`.
pub fn helly_select(family: &FunctionFamily, epsilon: &Rational, target_len: usize) -> Result<HellyOutcome> {
    if !epsilon.is_positive() {
        return Err(Error::NonPositiveEpsilon);
    }
    let mut current: Vec<usize> = (0..family.len()).collect();
    let mut limit = Vec::with_capacity(family.points.len());
    let half = Rational::new(1.into(), 2.into());
    // the last bucket is closed, so `⌈(d−c)/ε⌉` buckets cover `[c, d]`
    let levels: num_bigint::BigInt = ((&family.upper - &family.lower) / epsilon).ceil().to_integer();
    let top: num_bigint::BigInt = levels - num_bigint::BigInt::from(1);
    let top = if top < num_bigint::BigInt::from(0) { num_bigint::BigInt::from(0) } else { top };
    for x in 0..family.points.len() {
        let mut buckets: BTreeMap<num_bigint::BigInt, Vec<usize>> = BTreeMap::new();
        for &i in &current {
            let k = ((&family.functions[i][x] - &family.lower) / epsilon).floor().to_integer().min(top.clone());
            buckets.entry(k).or_default().push(i);
        }
        // BTreeMap iterates by increasing midpoint, so `max_by_key` must not win ties late
        let mut best: Option<(&num_bigint::BigInt, &Vec<usize>)> = None;
        for (k, members) in &buckets {
            if best.is_none_or(|(_, b)| members.len() > b.len()) {
                best = Some((k, members));
            }
        }
        let Some((k, members)) = best else {
            return Ok(HellyOutcome::Insufficient { kept: 0 });
        };
        limit.push(&family.lower + (Rational::from_integer(k.clone()) + &half) * epsilon);
        current = members.clone();
        if current.len() < target_len {
            return Ok(HellyOutcome::Insufficient { kept: current.len() });
        }
    }
    if current.len() < target_len {
        return Ok(HellyOutcome::Insufficient { kept: current.len() });
    }
    let mut oscillation = Rational::zero();
    for x in 0..family.points.len() {
        let vals = current.iter().map(|&i| &family.functions[i][x]);
        let lo = vals.clone().min().expect("nonempty");
        let hi = vals.max().expect("nonempty");
        let spread = hi - lo;
        if spread > oscillation {
            oscillation = spread;
        }
    }
    Ok(HellyOutcome::Selected(SelectionResult {
        indices: current,
        limit,
        oscillation,
    }))
}

/// Sufficient input length for [`helly_select`]: `target · ⌈(d−c)/ε⌉^|carrier|` (saturating).
pub fn helly_length_bound(family: &FunctionFamily, epsilon: &Rational, target_len: usize) -> u128 {
    let per_point = ((&family.upper - &family.lower) / epsilon).ceil().to_integer();
    let per_point: u128 = per_point.try_into().unwrap_or(u128::MAX).max(1);
    let mut bound = target_len as u128;
    for _ in 0..family.points.len() {
        bound = bound.saturating_mul(per_point);
    }
    bound
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SeparatingFamilyReport {
    /// `(u, v)` for each member, in member order.
    pub pairs: Vec<(String, String)>,
    pub checks: Vec<CheckRecord>,
}

impl SeparatingFamilyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Separators for all pairs `u < v`, checked for point separation, pairwise
/// non-independence and invariance under the supplied automorphisms.
pub fn separating_tame_family(
    t: &BetweennessStructure,
    automorphisms: &[Vec<PointId>],
) -> Result<(FunctionFamily, SeparatingFamilyReport)> {
    let table = IntervalTable::new(t)?;
    if table.median_table(t)?.is_none() {
        return Err(Error::Precondition("not a median pretree".into()));
    }
    let n = t.len();
    let mut pairs = Vec::new();
    let mut functions = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            pairs.push((t.name(PointId(u)).to_string(), t.name(PointId(v)).to_string()));
            functions.push(separator_with(t, &table, u, v)?);
        }
    }
    let family = FunctionFamily::new(t.names().to_vec(), functions, Rational::zero(), Rational::one())?;
    let mut checks = Vec::new();

    let mut unseparated = None;
    'sep: for p in 0..n {
        for q in p + 1..n {
            if family.functions.iter().all(|f| f[p] == f[q]) {
                unseparated = Some(format!("({}, {})", t.name(PointId(p)), t.name(PointId(q))));
                break 'sep;
            }
        }
    }
    checks.push(CheckRecord::from_witness("separates-points", unseparated).with("members", family.len()));

    let mut independent = None;
    let mut tested = 0;
    'tame: for i in 0..family.len() {
        for j in i + 1..family.len() {
            tested += 1;
            if is_independent(&family.subfamily(&[i, j]))?.is_some() {
                independent = Some(format!("members {i} and {j}"));
                break 'tame;
            }
        }
    }
    checks.push(CheckRecord::from_witness("no-independent-pair", independent).with("pairs", tested));

    let mut broken = None;
    'inv: for (k, g) in automorphisms.iter().enumerate() {
        if let Some(w) = automorphism_defect(&table, g) {
            broken = Some(format!("automorphism {k} is not an automorphism: {w}"));
            break;
        }
        for (i, f) in family.functions.iter().enumerate() {
            let composed: Vec<Rational> = (0..n).map(|x| f[g[x].0].clone()).collect();
            if !function_is_monotone(t, &composed)?.monotone {
                broken = Some(format!("member {i} composed with automorphism {k}"));
                break 'inv;
            }
        }
    }
    checks.push(
        CheckRecord::from_witness("automorphism-invariance", broken).with("automorphisms", automorphisms.len()),
    );

    Ok((family, SeparatingFamilyReport { pairs, checks }))
}

fn automorphism_defect(table: &IntervalTable, g: &[PointId]) -> Option<String> {
    let n = table.len();
    if g.len() != n || g.iter().any(|p| p.0 >= n) {
        return Some("wrong length or range".into());
    }
    let mut seen = vec![false; n];
    for p in g {
        if std::mem::replace(&mut seen[p.0], true) {
            return Some("not a bijection".into());
        }
    }
    for a in 0..n {
        for c in 0..n {
            for b in 0..n {
                if table.between(a, b, c) != table.between(g[a].0, g[b].0, g[c].0) {
                    return Some(format!("betweenness of ({a},{b},{c}) not preserved"));
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| rat(x, 1)).collect()
    }

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| i.to_string()).collect()
    }

    #[test]
    fn rademacher_pair_is_independent() {
        let fam = FunctionFamily::from_functions(names(4), vec![ints(&[0, 0, 1, 1]), ints(&[0, 1, 0, 1])]).unwrap();
        let w = is_independent(&fam).unwrap().expect("independent");
        assert_eq!((w.a.clone(), w.b.clone()), (rat(1, 4), rat(3, 4)));
        assert_eq!(w.patterns.len(), 4);
        assert!(w.verify(&fam));
    }

    #[test]
    fn constant_and_opposite_families_are_not_independent() {
        let c = FunctionFamily::from_functions(names(4), vec![ints(&[2, 2, 2, 2])]).unwrap();
        assert!(is_independent(&c).unwrap().is_none());
        let t = BetweennessStructure::path(4);
        let fam = FunctionFamily::on(&t, vec![ints(&[0, 1, 2, 3]), ints(&[3, 2, 1, 0])]).unwrap();
        assert!(is_independent(&fam).unwrap().is_none());
    }

    #[test]
    fn single_nonconstant_function_is_independent_by_definition() {
        let f = FunctionFamily::from_functions(names(2), vec![ints(&[0, 1])]).unwrap();
        assert!(is_independent(&f).unwrap().is_some());
        // but a singleton family is tame: no sub-family of length ≥ 2 exists
        let v = tame_check(&f, 4).unwrap();
        assert!(v.tame);
        assert_eq!(v.tested, 0);
    }

    #[test]
    fn independence_size_limits() {
        let fam = FunctionFamily::from_functions(names(1), vec![ints(&[0]); 17]).unwrap();
        assert!(matches!(is_independent(&fam), Err(Error::SizeLimit { .. })));
        let empty = FunctionFamily::from_functions(names(1), vec![]).unwrap();
        assert!(matches!(is_independent(&empty), Err(Error::InvalidFamily(_))));
        assert!(matches!(tame_check(&empty, 13), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn tame_check_finds_rademacher_pair() {
        let fam = FunctionFamily::from_functions(
            names(4),
            vec![ints(&[0, 1, 2, 3]), ints(&[0, 0, 1, 1]), ints(&[1, 1, 1, 1]), ints(&[0, 1, 0, 1])],
        )
        .unwrap();
        let v = tame_check(&fam, 3).unwrap();
        assert!(!v.tame);
        assert_eq!(v.indices, vec![1, 3]);
    }

    #[test]
    fn monotone_family_is_tame() {
        let t = BetweennessStructure::path(5);
        let fam = FunctionFamily::on(
            &t,
            vec![ints(&[0, 1, 2, 3, 4]), ints(&[4, 3, 2, 1, 0]), ints(&[0, 0, 1, 1, 1]), ints(&[2, 1, 0, 0, 0])],
        )
        .unwrap();
        assert!(tame_check(&fam, 4).unwrap().tame);
    }

    #[test]
    fn separator_examples() {
        let t = BetweennessStructure::path(4);
        let f = monotone_separator(&t, PointId(0), PointId(3)).unwrap();
        assert_eq!(f, vec![rat(0, 1), rat(1, 3), rat(2, 3), rat(1, 1)]);
        let s = BetweennessStructure::star(&["x", "y", "z"]).unwrap();
        let p = |n: &str| s.point(n).unwrap();
        let f = monotone_separator(&s, p("x"), p("y")).unwrap();
        assert_eq!(f[p("x").0], rat(0, 1));
        assert_eq!(f[p("c").0], rat(1, 2));
        assert_eq!(f[p("z").0], rat(1, 2));
        assert_eq!(f[p("y").0], rat(1, 1));
        assert!(matches!(monotone_separator(&t, PointId(1), PointId(1)), Err(Error::DegeneratePair(_))));
    }

    #[test]
    fn helly_alternating_sequence() {
        let t = BetweennessStructure::path(3);
        let g = ints(&[0, 0, 1]);
        let h = ints(&[0, 1, 1]);
        let seq: Vec<Vec<Rational>> = (0..64).map(|i| if i % 2 == 0 { g.clone() } else { h.clone() }).collect();
        let fam = FunctionFamily::on(&t, seq).unwrap();
        let eps = rat(1, 100);
        let HellyOutcome::Selected(r) = helly_select(&fam, &eps, 32).unwrap() else {
            panic!("selection failed")
        };
        assert_eq!(r.indices, (0..64).step_by(2).collect::<Vec<_>>());
        assert_eq!(r.oscillation, rat(0, 1));
        for (l, gv) in r.limit.iter().zip(&g) {
            assert!((l - gv).abs() <= &eps / rat(2, 1));
        }
    }

    #[test]
    fn helly_shrinking_sequence() {
        let t = BetweennessStructure::path(6);
        let seq: Vec<Vec<Rational>> = (1..=64).map(|n| (0..6).map(|x| rat(x, n)).collect()).collect();
        let fam = FunctionFamily::on(&t, seq).unwrap();
        let eps = rat(1, 100);
        let HellyOutcome::Selected(r) = helly_select(&fam, &eps, 4).unwrap() else {
            panic!("selection failed")
        };
        assert!(r.oscillation < eps);
        // selection sits in the tail, consecutive indices
        assert!(r.indices[0] >= 32);
        assert!(r.indices.windows(2).all(|w| w[1] == w[0] + 1));
        assert!(function_is_monotone(&t, &r.limit).unwrap().monotone);
        assert!(matches!(helly_select(&fam, &rat(0, 1), 1), Err(Error::NonPositiveEpsilon)));
    }

    #[test]
    fn helly_length_bound_suffices() {
        let t = BetweennessStructure::path(3);
        let table = IntervalTable::new(&t).unwrap();
        let eps = rat(1, 2);
        for trial in 0..200 {
            let mut rng = trial_rng(5, trial);
            let mut seq: Vec<Vec<Rational>> = vec![ints(&[0, 0, 0]), ints(&[1, 1, 1])];
            while seq.len() < 3 * 8 {
                seq.push(random_monotone(&t, &table, &mut rng).unwrap());
            }
            let fam = FunctionFamily::on(&t, seq).unwrap();
            assert_eq!(helly_length_bound(&fam, &eps, 3), 24);
            let HellyOutcome::Selected(r) = helly_select(&fam, &eps, 3).unwrap() else {
                panic!("pigeonhole bound violated in trial {trial}")
            };
            assert!(r.oscillation <= eps);
        }
    }

    #[test]
    fn convfun_on_path_and_star() {
        let t = BetweennessStructure::path(10);
        assert!(convfun_property_test(&t, 300, 1).unwrap().passed());
        let s = BetweennessStructure::star(&["a", "b", "d", "e"]).unwrap();
        assert!(convfun_property_test(&s, 300, 2).unwrap().passed());
    }

    #[test]
    fn separating_family_examples() {
        let edge = BetweennessStructure::path(2);
        let (fam, r) = separating_tame_family(&edge, &[]).unwrap();
        assert_eq!(fam.len(), 1);
        assert!(r.all_passed());
        let p4 = BetweennessStructure::path(4);
        let (fam, r) = separating_tame_family(&p4, &[]).unwrap();
        assert_eq!(fam.len(), 6);
        assert!(r.all_passed(), "{r:?}");
        let s = BetweennessStructure::star(&["x", "y", "z"]).unwrap();
        let p = |n: &str| s.point(n).unwrap();
        let mut swap: Vec<PointId> = s.points().collect();
        swap.swap(p("x").0, p("y").0);
        let (_, r) = separating_tame_family(&s, &[swap]).unwrap();
        assert!(r.all_passed(), "{r:?}");
    }

    #[test]
    fn non_automorphism_is_reported() {
        let p4 = BetweennessStructure::path(4);
        let bad = vec![PointId(1), PointId(0), PointId(2), PointId(3)];
        let (_, r) = separating_tame_family(&p4, &[bad]).unwrap();
        assert!(!r.all_passed());
    }
}
