use std::collections::{BTreeSet, HashSet};

use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::Serialize;

use super::action::{Generator, GroupWord, TreeAction};
use super::point::{between_ext, canonicalize_end, confluence, median_ext, Depth, ExtendedPoint};
use super::{RuleTree, Word};
use crate::error::{Error, Result};
use crate::report::CheckRecord;
use crate::tameness::trial_rng;
use crate::Rational;

/// Uniform random reduced word of length `len` continuing after `prev`.
pub fn random_word<R: Rng + ?Sized>(tree: RuleTree, len: usize, prev: Option<u8>, rng: &mut R) -> Word {
    let mut w = Word::with_capacity(len);
    let mut last = prev;
    for _ in 0..len {
        let options: Vec<u8> = tree.successors(last).collect();
        let l = options[rng.gen_range(0..options.len())];
        w.push(l);
        last = Some(l);
    }
    w
}

/// Random vertex of depth ≤ 5 or random end with short preperiod and period, equally likely.
pub fn random_point<R: Rng + ?Sized>(tree: RuleTree, rng: &mut R) -> ExtendedPoint {
    if rng.gen_bool(0.5) {
        let len = rng.gen_range(0..=5);
        return ExtendedPoint::Vertex(random_word(tree, len, None, rng));
    }
    loop {
        let pre_len = rng.gen_range(0..=3);
        let per_len = rng.gen_range(1..=3);
        let pre = random_word(tree, pre_len, None, rng);
        let per = random_word(tree, per_len, pre.last().copied(), rng);
        if let Ok(e) = canonicalize_end(tree, &pre, &per) {
            return e;
        }
    }
}

/// Sampled check that every generator and its inverse commute with the median.
pub fn check_action_monotone(action: &TreeAction, sample_size: usize, seed: u64) -> Vec<CheckRecord> {
    let tree = action.tree();
    let mut records = Vec::new();
    for i in 0..action.len() {
        for inverse in [false, true] {
            let g = GroupWord(vec![(i, inverse)]);
            let name = format!("median-preserving {}", action.format_group_word(&g));
            let mut witness = None;
            for k in 0..sample_size {
                let mut rng = trial_rng(seed, (i * 2 + usize::from(inverse)) as u64 * 1_000_003 + k as u64);
                let [a, b, c] = [0; 3].map(|_| random_point(tree, &mut rng));
                let lhs = action.act(&g, &median_ext(&a, &b, &c));
                let (ga, gb, gc) = (action.act(&g, &a), action.act(&g, &b), action.act(&g, &c));
                let rhs = median_ext(&ga, &gb, &gc);
                if lhs != rhs {
                    witness = Some(format!(
                        "({}, {}, {}): g·m = {}, m(ga, gb, gc) = {}",
                        a.display(tree),
                        b.display(tree),
                        c.display(tree),
                        lhs.display(tree),
                        rhs.display(tree)
                    ));
                    break;
                }
            }
            records.push(CheckRecord::from_witness(name, witness).with("samples", sample_size));
        }
    }
    records
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProximalityCertificate {
    pub elements: Vec<GroupWord>,
    /// `depths[i]` is the confluence of `gᵢx` and `gᵢy`; nondecreasing.
    pub depths: Vec<Depth>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Proximality {
    Certificate(ProximalityCertificate),
    /// Bounded search exhausted; not a proof of distality.
    NotFound { search_len: usize, best_depth: Depth },
}

/// Beam width of the proximality search.
const PROXIMAL_BEAM: usize = 16;

/// Search words of length ≤ `search_len`, extending on the left, for
/// nondecreasing confluence depths of `(gx, gy)` reaching `target_depth`.
pub fn detect_proximal(
    action: &TreeAction,
    x: &ExtendedPoint,
    y: &ExtendedPoint,
    target_depth: usize,
    search_len: usize,
) -> Proximality {
    struct State {
        path: Vec<(GroupWord, Depth)>,
        gx: ExtendedPoint,
        gy: ExtendedPoint,
    }
    let start = confluence(x, y);
    if start.at_least(target_depth) {
        return Proximality::Certificate(ProximalityCertificate {
            elements: vec![GroupWord::identity()],
            depths: vec![start],
        });
    }
    let mut beam = vec![State {
        path: Vec::new(),
        gx: x.clone(),
        gy: y.clone(),
    }];
    let mut best = start;
    let mut seen: HashSet<(ExtendedPoint, ExtendedPoint)> = HashSet::new();
    seen.insert((x.clone(), y.clone()));
    for _ in 0..search_len {
        let mut next = Vec::new();
        for s in &beam {
            let here = s.path.last().map_or(start, |p| p.1);
            let elem = s.path.last().map_or_else(GroupWord::identity, |p| p.0.clone());
            for i in 0..action.len() {
                for inverse in [false, true] {
                    let gx = action.apply_generator(i, inverse, &s.gx);
                    let gy = action.apply_generator(i, inverse, &s.gy);
                    let d = confluence(&gx, &gy);
                    if d < here || !seen.insert((gx.clone(), gy.clone())) {
                        continue;
                    }
                    let g = GroupWord(vec![(i, inverse)]).then_left(&elem).reduced();
                    let mut path = s.path.clone();
                    path.push((g, d));
                    next.push(State { path, gx, gy });
                }
            }
        }
        // stable: ties keep generator order
        next.sort_by(|a, b| b.path.last().unwrap().1.cmp(&a.path.last().unwrap().1));
        next.truncate(PROXIMAL_BEAM);
        if let Some(s) = next.first() {
            let d = s.path.last().unwrap().1;
            best = best.max(d);
            if d.at_least(target_depth) {
                let (elements, depths) = s.path.iter().cloned().unzip();
                return Proximality::Certificate(ProximalityCertificate { elements, depths });
            }
        }
        if next.is_empty() {
            break;
        }
        beam = next;
    }
    Proximality::NotFound {
        search_len,
        best_depth: best,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CylinderPermutation {
    pub k: usize,
    /// `images[i]` is the image of the cylinder whose word encodes `i` least significant letter first.
    pub images: Vec<usize>,
    /// Cycle lengths, descending.
    pub cycles: Vec<usize>,
}

pub const MAX_CYLINDER_DEPTH: usize = 16;

/// Permutation induced on depth-`k` cylinders by the single level-preserving
/// generator of a rooted binary action.
pub fn cylinder_dynamics(action: &TreeAction, k: usize) -> Result<CylinderPermutation> {
    if action.tree() != RuleTree::Kary(2) || action.len() != 1 {
        return Err(Error::WrongActionKind("need one generator on the rooted binary tree".into()));
    }
    if !matches!(action.generators()[0], Generator::Odometer | Generator::Relabel(_)) {
        return Err(Error::WrongActionKind("generator is not level-preserving".into()));
    }
    if k > MAX_CYLINDER_DEPTH {
        return Err(Error::SizeLimit {
            what: "cylinder depth",
            got: k,
            limit: MAX_CYLINDER_DEPTH,
        });
    }
    let g = GroupWord(vec![(0, false)]);
    let encode = |w: &[u8]| w.iter().enumerate().map(|(i, &b)| (b as usize) << i).sum::<usize>();
    let images: Vec<usize> = (0..1usize << k)
        .map(|i| {
            let w: Word = (0..k).map(|j| (i >> j & 1) as u8).collect();
            match action.act(&g, &ExtendedPoint::Vertex(w)) {
                ExtendedPoint::Vertex(img) => encode(&img),
                ExtendedPoint::End { .. } => unreachable!("vertices map to vertices"),
            }
        })
        .collect();
    let mut seen = vec![false; images.len()];
    let mut cycles = Vec::new();
    for i in 0..images.len() {
        let mut len = 0;
        let mut j = i;
        while !seen[j] {
            seen[j] = true;
            j = images[j];
            len += 1;
        }
        if len > 0 {
            cycles.push(len);
        }
    }
    cycles.sort_unstable_by(|a, b| b.cmp(a));
    Ok(CylinderPermutation { k, images, cycles })
}

/// Depth-`k` cylinders visited by `x, gx, …, g^{steps−1}x` for the single generator `g`.
pub fn omega_limit_approx(action: &TreeAction, x: &ExtendedPoint, k: usize, steps: usize) -> Result<BTreeSet<Word>> {
    if action.len() != 1 {
        return Err(Error::WrongActionKind("need a cyclic action".into()));
    }
    let mut out = BTreeSet::new();
    let mut p = x.clone();
    for _ in 0..steps {
        out.insert(p.expand(k));
        p = action.apply_generator(0, false, &p);
    }
    Ok(out)
}

fn cancellation(t: &[u8], c: &[u8]) -> usize {
    let mut k = 0;
    while k < t.len() && k < c.len() && t[t.len() - 1 - k] == c[k] ^ 1 {
        k += 1;
    }
    k
}

/// Every end with prefix `r` has prefix `target`.
fn cylinder_within(tree: RuleTree, r: &[u8], target: &[u8]) -> bool {
    if r.len() >= target.len() {
        return r.starts_with(target);
    }
    tree.successors(r.last().copied()).all(|l| {
        let mut child = r.to_vec();
        child.push(l);
        cylinder_within(tree, &child, target)
    })
}

/// Translation by `t` maps the cylinder `[c]` of ends into `[target]`.
fn image_within(tree: RuleTree, t: &[u8], c: &[u8], target: &[u8]) -> bool {
    let k = cancellation(t, c);
    if k < c.len() {
        let mut r = t[..t.len() - k].to_vec();
        r.extend_from_slice(&c[k..]);
        return cylinder_within(tree, &r, target);
    }
    // the image of [c] is not a cylinder; split it
    tree.successors(c.last().copied()).all(|l| {
        let mut child = c.to_vec();
        child.push(l);
        image_within(tree, t, &child, target)
    })
}

/// Exact test of `t · (Ends ∖ [w]) ⊆ [w']` for a free-group translation `t`.
pub fn maps_complement_into(tree: RuleTree, t: &[u8], w: &[u8], w_prime: &[u8]) -> bool {
    (0..w.len()).all(|i| {
        let p = &w[..i];
        tree.successors(p.last().copied())
            .filter(|&l| l != w[i])
            .all(|l| {
                let mut piece = p.to_vec();
                piece.push(l);
                image_within(tree, t, &piece, w_prime)
            })
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpSearch {
    pub witness: Option<GroupWord>,
    pub radius: usize,
    /// Group elements tested.
    pub examined: usize,
}

/// Breadth-first search for `g` of length ≤ `radius` with `g·(Ends ∖ [w]) ⊆ [w']`.
///
/// For the standard free generators with rank ≥ 2 only words starting with
/// `w'` are tested: if `g` does not start with `w'`, two ends outside `[w]`
/// beginning with distinct letters that do not cancel against `g` are mapped
/// to ends `g·l·…` that cannot both lie in `[w']`.
pub fn extreme_proximality_witness(action: &TreeAction, w: &[u8], w_prime: &[u8], radius: usize) -> Result<EpSearch> {
    ep_search(action, w, w_prime, radius, true)
}

fn ep_search(action: &TreeAction, w: &[u8], w_prime: &[u8], radius: usize, prune: bool) -> Result<EpSearch> {
    let tree = action.tree();
    if !tree.is_free() || action.generators().iter().any(|g| !matches!(g, Generator::Translate(_))) {
        return Err(Error::WrongActionKind("need a free-group translation action".into()));
    }
    if w.is_empty() || w_prime.is_empty() {
        return Err(Error::InvalidWord("ε".into(), "cylinder words must be nonempty".into()));
    }
    tree.check_word(w)?;
    tree.check_word(w_prime)?;
    let prefix = match (prune, tree) {
        (true, RuleTree::Free(rank)) if rank >= 2 && action.is_standard_free() => Some(group_word_of(action, w_prime)),
        _ => None,
    };
    let mut examined = 0;
    for len in 0..=radius {
        let candidates: Vec<GroupWord> = match &prefix {
            Some(omega) if len < omega.len() => continue,
            Some(omega) => {
                let last = *omega.0.last().expect("nonempty");
                action
                    .group_words_of_length(len - omega.len())
                    .into_iter()
                    .filter(|s| s.0.first() != Some(&(last.0, !last.1)))
                    .map(|s| omega.then_left(&s))
                    .collect()
            }
            None => action.group_words_of_length(len),
        };
        for g in candidates {
            examined += 1;
            let t = action.translation_word(&g).expect("translation action");
            if maps_complement_into(tree, &t, w, w_prime) {
                return Ok(EpSearch {
                    witness: Some(g),
                    radius,
                    examined,
                });
            }
        }
    }
    Ok(EpSearch {
        witness: None,
        radius,
        examined,
    })
}

fn group_word_of(action: &TreeAction, word: &[u8]) -> GroupWord {
    GroupWord(
        word.iter()
            .map(|&l| {
                let i = action
                    .generators()
                    .iter()
                    .position(|g| matches!(g, Generator::Translate(t) if t[0] / 2 == l / 2))
                    .expect("standard generators cover every letter");
                let Generator::Translate(t) = &action.generators()[i] else {
                    unreachable!()
                };
                (i, t[0] != l)
            })
            .collect(),
    )
}

/// Terms `(uₙ, wₙ, vₙ)` of a sequence of between-triples and its claimed limit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleSequence {
    pub terms: Vec<[ExtendedPoint; 3]>,
    /// Index of the first term; the `n`-th term is within confluence depth `n` of the limit.
    pub start: usize,
    pub limit: [ExtendedPoint; 3],
}

/// Vertex approximation of `x` at depth `n` (constant for vertices).
pub fn approximant(x: &ExtendedPoint, n: usize) -> ExtendedPoint {
    match x {
        ExtendedPoint::Vertex(_) => x.clone(),
        ExtendedPoint::End { .. } => x.prefix_vertex(n),
    }
}

impl TripleSequence {
    /// Terms all between, converging by confluence depth, limit between.
    pub fn check(&self, tree: RuleTree) -> std::result::Result<(), String> {
        let show = |t: &[ExtendedPoint; 3]| {
            format!("({}, {}, {})", t[0].display(tree), t[1].display(tree), t[2].display(tree))
        };
        for t in &self.terms {
            if !between_ext(&t[0], &t[1], &t[2]) {
                return Err(format!("term {} is not a between-triple", show(t)));
            }
        }
        if let Some(last) = self.terms.last() {
            let n = self.start + self.terms.len() - 1;
            if !(0..3).all(|i| confluence(&last[i], &self.limit[i]).at_least(n)) {
                return Err(format!("term {} is not within depth {n} of the limit", show(last)));
            }
        }
        if !between_ext(&self.limit[0], &self.limit[1], &self.limit[2]) {
            return Err(format!("limit {} is not a between-triple", show(&self.limit)));
        }
        Ok(())
    }
}

fn size(x: &ExtendedPoint) -> usize {
    match x {
        ExtendedPoint::Vertex(w) => w.len(),
        ExtendedPoint::End { pre, per } => pre.len() + per.len(),
    }
}

/// Random convergent sequence of between-triples.
pub fn random_triple_sequence<R: Rng + ?Sized>(tree: RuleTree, rng: &mut R) -> TripleSequence {
    let u = random_point(tree, rng);
    let v = loop {
        let v = random_point(tree, rng);
        if v != u {
            break v;
        }
    };
    let c = confluence(&u, &v).finite().expect("distinct");
    let kind = rng.gen_range(0..3);
    let w = match kind {
        0 => u.clone(),
        1 => v.clone(),
        _ => {
            let side = if rng.gen_bool(0.5) { &u } else { &v };
            let max = side.depth().unwrap_or(c + 4).max(c);
            side.prefix_vertex(rng.gen_range(c..=max))
        }
    };
    let start = size(&u) + size(&v) + size(&w) + 1;
    let terms = (start..start + 8)
        .map(|n| {
            let (un, vn) = (approximant(&u, n), approximant(&v, n));
            let wn = match kind {
                0 => un.clone(),
                1 => vn.clone(),
                _ => w.clone(),
            };
            [un, wn, vn]
        })
        .collect();
    TripleSequence {
        terms,
        start,
        limit: [u, w, v],
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosednessReport {
    pub samples: usize,
    pub violations: usize,
    pub first_violation: Option<String>,
}

/// Sample convergent sequences of between-triples and check their limits are between.
pub fn closedness_test(tree: RuleTree, sample_size: usize, seed: u64) -> ClosednessReport {
    let mut report = ClosednessReport {
        samples: sample_size,
        violations: 0,
        first_violation: None,
    };
    for k in 0..sample_size {
        let mut rng = trial_rng(seed, k as u64);
        let seq = random_triple_sequence(tree, &mut rng);
        if let Err(e) = seq.check(tree) {
            report.violations += 1;
            report.first_violation.get_or_insert(e);
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilizationReport {
    pub samples: usize,
    pub violations: usize,
    pub first_violation: Option<String>,
}

/// Along `xₙ → x`, membership `u ∈ [xₙ, v]` is eventually constant, and equals
/// `u ∈ [x, v]` when `u` is a vertex.
pub fn shadow_stabilization(tree: RuleTree, samples: usize, seed: u64) -> StabilizationReport {
    let mut report = StabilizationReport {
        samples,
        violations: 0,
        first_violation: None,
    };
    for k in 0..samples {
        let mut rng = trial_rng(seed, k as u64);
        let u = random_point(tree, &mut rng);
        let v = random_point(tree, &mut rng);
        let x = loop {
            let x = random_point(tree, &mut rng);
            if x.is_end() {
                break x;
            }
        };
        let settle = size(&u) + size(&v) + size(&x) + 1;
        // with an end as base the limit value can differ (u = x), so only constancy is checked
        let limit = if u.is_end() {
            between_ext(&x.prefix_vertex(settle), &u, &v)
        } else {
            between_ext(&x, &u, &v)
        };
        let bad = (settle..2 * settle + 4).find(|&n| between_ext(&x.prefix_vertex(n), &u, &v) != limit);
        if let Some(n) = bad {
            report.violations += 1;
            report.first_violation.get_or_insert_with(|| {
                format!(
                    "u = {}, v = {}, x = {}: membership at depth {n} differs from the limit",
                    u.display(tree),
                    v.display(tree),
                    x.display(tree)
                )
            });
        }
    }
    report
}

/// Order embedding of the axis positions `−∞ < … < −1 < 0 < 1 < … < +∞` into ℚ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AxisEmbedding {
    /// `t ↦ t / (1 + |t|)`, `±∞ ↦ ±1`.
    Saturating,
    /// Constant map; monotone but not an embedding.
    Constant(Rational),
}

/// Monotone function `e ∘ φ_{ξ,η}` on `X ∪ Ends(X)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxisFunction {
    pub xi: ExtendedPoint,
    pub eta: ExtendedPoint,
    pub embedding: AxisEmbedding,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum AxisPos {
    NegInf,
    At(i64),
    PosInf,
}

impl AxisFunction {
    pub fn new(tree: RuleTree, xi: ExtendedPoint, eta: ExtendedPoint, embedding: AxisEmbedding) -> Result<Self> {
        xi.validate(tree)?;
        eta.validate(tree)?;
        if !xi.is_end() || !eta.is_end() || xi == eta {
            return Err(Error::Precondition("axis needs two distinct ends".into()));
        }
        Ok(Self { xi, eta, embedding })
    }

    fn split(&self) -> usize {
        confluence(&self.xi, &self.eta).finite().expect("distinct ends")
    }

    fn position(&self, x: &ExtendedPoint) -> AxisPos {
        let m = median_ext(&self.xi, x, &self.eta);
        if m == self.xi {
            return AxisPos::NegInf;
        }
        if m == self.eta {
            return AxisPos::PosInf;
        }
        let len = m.depth().expect("median of distinct ends is a vertex") as i64;
        let d = self.split() as i64;
        let ExtendedPoint::Vertex(word) = &m else { unreachable!() };
        if self.xi.has_prefix(word) {
            AxisPos::At(d - len)
        } else {
            AxisPos::At(len - d)
        }
    }

    fn embed(&self, p: AxisPos) -> Rational {
        match &self.embedding {
            AxisEmbedding::Constant(c) => c.clone(),
            AxisEmbedding::Saturating => match p {
                AxisPos::NegInf => -Rational::one(),
                AxisPos::PosInf => Rational::one(),
                AxisPos::At(t) => Rational::new(t.into(), (1 + t.abs()).into()),
            },
        }
    }

    pub fn value(&self, x: &ExtendedPoint) -> Rational {
        self.embed(self.position(x))
    }

    /// Infimum and supremum over a cylinder `[c]` (vertices and ends with prefix `c`).
    fn cylinder_range(&self, c: &[u8]) -> (Rational, Rational) {
        let has_xi = self.xi.has_prefix(c);
        let has_eta = self.eta.has_prefix(c);
        let here = self.value(&ExtendedPoint::Vertex(c.to_vec()));
        match (has_xi, has_eta) {
            (true, true) => (self.embed(AxisPos::NegInf), self.embed(AxisPos::PosInf)),
            (true, false) => (self.embed(AxisPos::NegInf), here),
            (false, true) => (here, self.embed(AxisPos::PosInf)),
            (false, false) => (here.clone(), here),
        }
    }

    /// Infimum and supremum over the ray of `rho` from depth `k0`, end included.
    fn ray_range(&self, rho: &ExtendedPoint, k0: usize) -> (Rational, Rational) {
        let mut vals = vec![self.value(&rho.prefix_vertex(k0)), self.value(rho)];
        if *rho != self.xi && *rho != self.eta {
            let far = [&self.xi, &self.eta]
                .iter()
                .map(|e| confluence(rho, e).finite().expect("distinct"))
                .max()
                .expect("two ends")
                + 1;
            vals.extend((k0..=far.max(k0)).map(|k| self.value(&rho.prefix_vertex(k))));
        }
        let lo = vals.iter().min().expect("nonempty").clone();
        let hi = vals.iter().max().expect("nonempty").clone();
        (lo, hi)
    }
}

/// One part of a closed subset of `X ∪ Ends(X)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClosedPiece {
    /// All vertices and ends with the given prefix.
    Cylinder(Word),
    Point(ExtendedPoint),
    /// The vertices along an end together with the end.
    Ray(ExtendedPoint),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FragmentOutcome {
    Found {
        point: ExtendedPoint,
        depth: usize,
        oscillation: Rational,
    },
    /// No candidate qualified up to the depth bound; not a disproof.
    NotFound { depth: usize },
}

fn candidates(tree: RuleTree, closed: &[ClosedPiece], depth: usize) -> Vec<ExtendedPoint> {
    let mut out = Vec::new();
    for piece in closed {
        match piece {
            ClosedPiece::Point(x) => out.push(x.clone()),
            ClosedPiece::Ray(rho) => {
                out.push(rho.clone());
                out.extend((0..=depth).map(|k| rho.prefix_vertex(k)));
            }
            ClosedPiece::Cylinder(c) => {
                for l in tree.successors(c.last().copied()) {
                    if let Ok(e) = canonicalize_end(tree, c, &[l]) {
                        out.push(e);
                    }
                }
                out.push(ExtendedPoint::Vertex(c.clone()));
            }
        }
    }
    let mut seen = HashSet::new();
    out.retain(|p| seen.insert(p.clone()));
    out
}

/// Oscillation of `f` over `closed ∩ N_d(p)`, where `N_d(p)` is the set of
/// points with confluence at least `d` with `p`; a vertex shorter than `d` is
/// isolated.
fn oscillation(f: &AxisFunction, closed: &[ClosedPiece], p: &ExtendedPoint, d: usize) -> Rational {
    if p.depth().is_some_and(|len| len < d) {
        return Rational::zero();
    }
    let q = p.expand(d);
    let mut lo: Option<Rational> = None;
    let mut hi: Option<Rational> = None;
    let mut add = |(a, b): (Rational, Rational)| {
        if lo.as_ref().is_none_or(|l| a < *l) {
            lo = Some(a);
        }
        if hi.as_ref().is_none_or(|h| b > *h) {
            hi = Some(b);
        }
    };
    for piece in closed {
        match piece {
            ClosedPiece::Cylinder(c) => {
                if c.starts_with(&q) {
                    add(f.cylinder_range(c));
                } else if q.starts_with(c) {
                    add(f.cylinder_range(&q));
                }
            }
            ClosedPiece::Point(x) => {
                if x.has_prefix(&q) {
                    let v = f.value(x);
                    add((v.clone(), v));
                }
            }
            ClosedPiece::Ray(rho) => {
                if rho.has_prefix(&q) {
                    add(f.ray_range(rho, q.len()));
                }
            }
        }
    }
    match (lo, hi) {
        (Some(l), Some(h)) => h - l,
        _ => Rational::zero(),
    }
}

/// Find a point of the closed set at which the restriction of `f` oscillates
/// by less than `epsilon` on some neighbourhood of depth ≤ `depth`.
pub fn fragment_scan(
    tree: RuleTree,
    f: &AxisFunction,
    closed: &[ClosedPiece],
    epsilon: &Rational,
    depth: usize,
) -> Result<FragmentOutcome> {
    if !epsilon.is_positive() {
        return Err(Error::NonPositiveEpsilon);
    }
    if closed.is_empty() {
        return Err(Error::Precondition("empty closed set".into()));
    }
    for piece in closed {
        match piece {
            ClosedPiece::Cylinder(c) => tree.check_word(c)?,
            ClosedPiece::Point(x) => x.validate(tree)?,
            ClosedPiece::Ray(rho) => {
                rho.validate(tree)?;
                if !rho.is_end() {
                    return Err(Error::Precondition("a ray must be given by an end".into()));
                }
            }
        }
    }
    for p in candidates(tree, closed, depth) {
        for d in 0..=depth {
            let osc = oscillation(f, closed, &p, d);
            if osc < *epsilon {
                return Ok(FragmentOutcome::Found {
                    point: p,
                    depth: d,
                    oscillation: osc,
                });
            }
        }
    }
    Ok(FragmentOutcome::NotFound { depth })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FragmentFixture {
    pub name: &'static str,
    pub tree: RuleTree,
    pub f: AxisFunction,
    pub closed: Vec<ClosedPiece>,
}

/// Monotone-function fixtures for the fragmentation scan.
pub fn fragment_fixtures() -> Vec<FragmentFixture> {
    let bin = RuleTree::Kary(2);
    let tern = RuleTree::Kary(3);
    let free = RuleTree::Free(2);
    let p = |t: RuleTree, s: &str| ExtendedPoint::parse(t, s).expect("fixture point");
    let w = |t: RuleTree, s: &str| t.parse_word(s).expect("fixture word");
    let axis = |t: RuleTree, a: &str, b: &str, e: AxisEmbedding| {
        AxisFunction::new(t, p(t, a), p(t, b), e).expect("fixture axis")
    };
    let sat = AxisEmbedding::Saturating;
    vec![
        FragmentFixture {
            name: "constant",
            tree: bin,
            f: axis(bin, "e::0", "e::1", AxisEmbedding::Constant(Rational::new(1.into(), 2.into()))),
            closed: vec![ClosedPiece::Cylinder(Word::new())],
        },
        FragmentFixture {
            name: "binary-ray",
            tree: bin,
            f: axis(bin, "e::0", "e::1", sat.clone()),
            closed: vec![ClosedPiece::Ray(p(bin, "e::0"))],
        },
        FragmentFixture {
            name: "binary-whole-space",
            tree: bin,
            f: axis(bin, "e::0", "e::1", sat.clone()),
            closed: vec![ClosedPiece::Cylinder(Word::new())],
        },
        FragmentFixture {
            name: "binary-off-axis",
            tree: bin,
            f: axis(bin, "e:0:01", "e:1:0", sat.clone()),
            closed: vec![
                ClosedPiece::Cylinder(w(bin, "00")),
                ClosedPiece::Point(p(bin, "e::1")),
                ClosedPiece::Ray(p(bin, "e:0:01")),
            ],
        },
        FragmentFixture {
            name: "ternary-cylinders",
            tree: tern,
            f: axis(tern, "e::01", "e::2", sat.clone()),
            closed: vec![ClosedPiece::Cylinder(w(tern, "0")), ClosedPiece::Ray(p(tern, "e:0:1"))],
        },
        FragmentFixture {
            name: "free-axis",
            tree: free,
            f: axis(free, "e::A", "e::a", sat.clone()),
            closed: vec![
                ClosedPiece::Ray(p(free, "e::a")),
                ClosedPiece::Ray(p(free, "e::A")),
                ClosedPiece::Cylinder(w(free, "b")),
            ],
        },
        FragmentFixture {
            name: "free-whole-space",
            tree: free,
            f: axis(free, "e:a:b", "e::B", sat),
            closed: vec![ClosedPiece::Cylinder(Word::new())],
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::super::reduce;
    use super::*;

    fn pt(t: RuleTree, s: &str) -> ExtendedPoint {
        ExtendedPoint::parse(t, s).unwrap()
    }

    #[test]
    fn translations_and_odometer_preserve_medians() {
        let free = TreeAction::free_translations(2).unwrap();
        assert!(check_action_monotone(&free, 500, 3).iter().all(|r| r.passed));
        let odo = TreeAction::odometer();
        assert!(check_action_monotone(&odo, 500, 3).iter().all(|r| r.passed));
    }

    #[test]
    fn broken_swap_is_caught() {
        let tree = RuleTree::Free(2);
        let a = TreeAction::new(tree, vec![('w', Generator::Swap(vec![0], vec![2, 2]))]).unwrap();
        let records = check_action_monotone(&a, 1000, 3);
        assert!(records.iter().any(|r| !r.passed && r.witness.is_some()));
    }

    #[test]
    fn proximal_free_pair() {
        let a = TreeAction::free_translations(2).unwrap();
        let t = a.tree();
        let Proximality::Certificate(c) = detect_proximal(&a, &pt(t, "e::b"), &pt(t, "e::B"), 6, 20) else {
            panic!("no certificate")
        };
        assert_eq!(c.depths, (1..=6).map(Depth::Finite).collect::<Vec<_>>());
        let names: Vec<String> = c.elements.iter().map(|g| a.format_group_word(g)).collect();
        assert_eq!(names, ["a", "aa", "aaa", "aaaa", "aaaaa", "aaaaaa"]);
        let x = pt(t, "e:a:b");
        let Proximality::Certificate(c) = detect_proximal(&a, &x, &x, 5, 3) else {
            panic!("no certificate")
        };
        assert_eq!(c.depths, vec![Depth::Equal]);
    }

    #[test]
    fn odometer_has_no_proximal_pair() {
        let a = TreeAction::odometer();
        let t = a.tree();
        let r = detect_proximal(&a, &pt(t, "e::0"), &pt(t, "e:1:0"), 20, 64);
        assert_eq!(
            r,
            Proximality::NotFound {
                search_len: 64,
                best_depth: Depth::Finite(0)
            }
        );
    }

    #[test]
    fn odometer_cycles() {
        let a = TreeAction::odometer();
        assert_eq!(cylinder_dynamics(&a, 1).unwrap().cycles, vec![2]);
        assert_eq!(cylinder_dynamics(&a, 3).unwrap().cycles, vec![8]);
        assert_eq!(cylinder_dynamics(&a, 12).unwrap().cycles, vec![4096]);
        assert!(cylinder_dynamics(&TreeAction::free_translations(2).unwrap(), 2).is_err());
        assert!(cylinder_dynamics(&a, 17).is_err());
    }

    #[test]
    fn omega_limit_examples() {
        let a = TreeAction::odometer();
        let zero = pt(a.tree(), "e::0");
        assert_eq!(omega_limit_approx(&a, &zero, 3, 8).unwrap().len(), 8);
        assert_eq!(omega_limit_approx(&a, &zero, 3, 4).unwrap().len(), 4);
        let id = TreeAction::new(RuleTree::Kary(2), vec![('i', Generator::Relabel(vec![0, 1]))]).unwrap();
        let x = pt(id.tree(), "e:1:01");
        let got = omega_limit_approx(&id, &x, 3, 10).unwrap();
        assert_eq!(got.into_iter().collect::<Vec<_>>(), vec![vec![1, 0, 1]]);
    }

    /// Enumerate all ends outside `[w]` to a sufficient depth and translate them.
    fn brute_complement_into(tree: RuleTree, t: &[u8], w: &[u8], target: &[u8]) -> bool {
        let depth = w.len() + t.len() + target.len() + 1;
        tree.words_of_length(depth)
            .into_iter()
            .filter(|c| !c.starts_with(w))
            .all(|c| {
                let r = reduce(t.iter().chain(&c).copied());
                r.len() > depth - t.len() - 1 - 1 && r.starts_with(target)
            })
    }

    #[test]
    fn complement_test_matches_enumeration() {
        let tree = RuleTree::Free(2);
        let words: Vec<Word> = (1..=2).flat_map(|n| tree.words_of_length(n)).collect();
        let ts: Vec<Word> = (0..=2).flat_map(|n| tree.words_of_length(n)).collect();
        for w in &words {
            for target in &words {
                for t in &ts {
                    assert_eq!(
                        maps_complement_into(tree, t, w, target),
                        brute_complement_into(tree, t, w, target),
                        "t={t:?} w={w:?} target={target:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn extreme_proximality_examples() {
        let a = TreeAction::free_translations(2).unwrap();
        let t = a.tree();
        let find = |w: &str, wp: &str| {
            let r = extreme_proximality_witness(&a, &t.parse_word(w).unwrap(), &t.parse_word(wp).unwrap(), 8).unwrap();
            a.format_group_word(&r.witness.expect("witness"))
        };
        assert_eq!(find("a", "b"), "bA");
        assert_eq!(find("a", "a"), "abA");
        let z = TreeAction::free_translations(1).unwrap();
        let r = extreme_proximality_witness(&z, &[0], &[1], 3).unwrap();
        assert_eq!(r.witness, Some(GroupWord::identity()));
    }

    #[test]
    fn pruned_search_agrees_with_full_search() {
        let a = TreeAction::free_translations(2).unwrap();
        let t = a.tree();
        let words: Vec<Word> = (1..=2).flat_map(|n| t.words_of_length(n)).collect();
        for w in &words {
            for wp in &words {
                let r = w.len() + wp.len() + 2;
                let fast = ep_search(&a, w, wp, r, true).unwrap();
                let slow = ep_search(&a, w, wp, r, false).unwrap();
                assert_eq!(fast.witness, slow.witness);
            }
        }
    }

    #[test]
    fn closedness_examples() {
        let t = RuleTree::Free(2);
        let a = pt(t, "e::a");
        let seq = TripleSequence {
            terms: (1..10).map(|n| [a.prefix_vertex(n), pt(t, "v:a"), ExtendedPoint::root()]).collect(),
            start: 1,
            limit: [a.clone(), pt(t, "v:a"), ExtendedPoint::root()],
        };
        assert!(seq.check(t).is_ok());
        let x = pt(t, "v:ab");
        let constant = TripleSequence {
            terms: vec![[x.clone(), x.clone(), x.clone()]; 4],
            start: 0,
            limit: [x.clone(), x.clone(), x],
        };
        assert!(constant.check(t).is_ok());
        let r = closedness_test(t, 500, 11);
        assert_eq!(r.violations, 0, "{:?}", r.first_violation);
        let r = closedness_test(RuleTree::Kary(2), 500, 11);
        assert_eq!(r.violations, 0, "{:?}", r.first_violation);
    }

    #[test]
    fn shadow_membership_stabilizes() {
        for tree in [RuleTree::Free(2), RuleTree::Kary(3)] {
            let r = shadow_stabilization(tree, 500, 5);
            assert_eq!(r.violations, 0, "{:?}", r.first_violation);
        }
    }

    #[test]
    fn fragment_examples() {
        let eps = Rational::new(1.into(), 8.into());
        let fx = fragment_fixtures();
        let ray = fx.iter().find(|f| f.name == "binary-ray").unwrap();
        let FragmentOutcome::Found { point, depth, oscillation } =
            fragment_scan(ray.tree, &ray.f, &ray.closed, &eps, 16).unwrap()
        else {
            panic!("not found")
        };
        assert_eq!(point, pt(ray.tree, "e::0"));
        assert_eq!(depth, 8);
        assert_eq!(oscillation, Rational::new(1.into(), 9.into()));
        for f in &fx {
            let out = fragment_scan(f.tree, &f.f, &f.closed, &eps, 16).unwrap();
            assert!(matches!(out, FragmentOutcome::Found { .. }), "{}", f.name);
        }
        assert!(fragment_scan(ray.tree, &ray.f, &[], &eps, 4).is_err());
        let bad = [ClosedPiece::Ray(ExtendedPoint::root())];
        assert!(fragment_scan(ray.tree, &ray.f, &bad, &eps, 4).is_err());
    }

    #[test]
    fn axis_function_is_monotone_on_samples() {
        // f(m(x, y, z)) lies between two of f(x), f(y), f(z): sampled B-monotonicity
        let t = RuleTree::Free(2);
        let f = AxisFunction::new(t, pt(t, "e:a:b"), pt(t, "e::B"), AxisEmbedding::Saturating).unwrap();
        let mut rng = trial_rng(9, 0);
        for _ in 0..2000 {
            let [x, y] = [0; 2].map(|_| random_point(t, &mut rng));
            let m = random_point(t, &mut rng);
            if between_ext(&x, &m, &y) {
                let (a, b, c) = (f.value(&x), f.value(&m), f.value(&y));
                assert!((a <= b && b <= c) || (c <= b && b <= a));
            }
        }
    }
}
