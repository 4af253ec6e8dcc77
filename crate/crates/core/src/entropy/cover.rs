use std::collections::HashSet;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::complex::{Automorphism, CellComplex, CellSet};
use super::setcover::{maximal_members, minimum_cover};
use crate::betweenness::BetweennessStructure;
use crate::error::{Error, Result};
use crate::treegen::random_tree_edges;

/// Finite cover of a cell complex by open sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellCover {
    names: Vec<String>,
    members: Vec<CellSet>,
}

impl CellCover {
    pub fn new(complex: &CellComplex, names: Vec<String>, members: Vec<CellSet>) -> Result<Self> {
        if names.len() != members.len() {
            return Err(Error::NotACover("one name per member required".into()));
        }
        let mut union = complex.empty_set();
        for (n, m) in names.iter().zip(&members) {
            if m.len() != complex.cell_count() {
                return Err(Error::NotACover(format!("member {n} belongs to another complex")));
            }
            if !complex.is_open(m) {
                return Err(Error::NotACover(format!("member {n} is not open")));
            }
            union.union_with(m);
        }
        if union.count_ones(..) != complex.cell_count() {
            let mut missing = complex.full_set();
            missing.difference_with(&union);
            return Err(Error::NotACover(format!("cells {} uncovered", complex.format_set(&missing))));
        }
        Ok(Self { names, members })
    }

    /// Members named by cell-name lists.
    pub fn from_named<S: AsRef<str>>(complex: &CellComplex, sets: &[(S, Vec<S>)]) -> Result<Self> {
        let names = sets.iter().map(|(n, _)| n.as_ref().to_string()).collect();
        let members = sets
            .iter()
            .map(|(_, cells)| complex.cell_set(cells))
            .collect::<Result<Vec<_>>>()?;
        Self::new(complex, names, members)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn members(&self) -> &[CellSet] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `L_A`: the sum of the boundary sizes of the members.
    pub fn boundary_total(&self, complex: &CellComplex) -> usize {
        self.members.iter().map(|m| complex.boundary(m).count_ones(..)).sum()
    }

    /// Union of the member boundaries.
    pub fn boundary_union(&self, complex: &CellComplex) -> CellSet {
        let mut p = complex.empty_set();
        for m in &self.members {
            p.union_with(&complex.boundary(m));
        }
        p
    }

    /// No member can be dropped.
    pub fn is_irreducible(&self, complex: &CellComplex) -> bool {
        (0..self.len()).all(|i| !self.covers_without(complex, &[i]))
    }

    fn covers_without(&self, complex: &CellComplex, skip: &[usize]) -> bool {
        let mut u = complex.empty_set();
        for (i, m) in self.members.iter().enumerate() {
            if !skip.contains(&i) {
                u.union_with(m);
            }
        }
        u.count_ones(..) == complex.cell_count()
    }

    pub fn subcover(&self, indices: &[usize]) -> CellCover {
        CellCover {
            names: indices.iter().map(|&i| self.names[i].clone()).collect(),
            members: indices.iter().map(|&i| self.members[i].clone()).collect(),
        }
    }

    /// Image under an automorphism, member by member.
    pub fn image(&self, s: &Automorphism) -> CellCover {
        CellCover {
            names: self.names.clone(),
            members: self.members.iter().map(|m| pull_back(s, m)).collect(),
        }
    }

    pub fn describe(&self, complex: &CellComplex) -> String {
        self.names
            .iter()
            .zip(&self.members)
            .map(|(n, m)| format!("{n} = {}", complex.format_set(m)))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// Apply `s` cell-wise; openness and boundary size are preserved.
pub fn pull_back(s: &Automorphism, a: &CellSet) -> CellSet {
    s.image(a)
}

/// Drop duplicate members, then drop members in index order while the rest still covers.
pub fn irreducible_subcover(complex: &CellComplex, cover: &CellCover) -> Result<CellCover> {
    CellCover::new(complex, cover.names.clone(), cover.members.clone())?;
    let mut seen = HashSet::new();
    let mut keep: Vec<usize> = (0..cover.len()).filter(|&i| seen.insert(cover.members[i].clone())).collect();
    let mut i = 0;
    while i < keep.len() {
        let mut trial = keep.clone();
        trial.remove(i);
        if cover.subcover(&trial).covers_without(complex, &[]) {
            keep = trial;
        } else {
            i += 1;
        }
    }
    Ok(cover.subcover(&keep))
}

/// Exact minimum-cardinality subcover.
pub fn minimum_subcover(complex: &CellComplex, cover: &CellCover) -> Result<CellCover> {
    let idx = minimum_cover(&complex.full_set(), &cover.members)
        .ok_or_else(|| Error::NotACover("members do not cover the complex".into()))?;
    Ok(cover.subcover(&idx))
}

/// All nonempty pairwise intersections, first occurrence kept.
pub fn join_refinement(a: &CellCover, b: &CellCover) -> CellCover {
    let mut seen = HashSet::new();
    let mut out = CellCover {
        names: Vec::new(),
        members: Vec::new(),
    };
    for (na, ma) in a.names.iter().zip(&a.members) {
        for (nb, mb) in b.names.iter().zip(&b.members) {
            let mut m = ma.clone();
            m.intersect_with(mb);
            if !m.is_clear() && seen.insert(m.clone()) {
                out.names.push(format!("{na}∧{nb}"));
                out.members.push(m);
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Lemma1Report {
    pub members: usize,
    pub boundary_points: usize,
    pub holds: bool,
}

/// `|cover| ≤ |P|` for an irreducible cover of a connected complex with at least two members.
pub fn lemma1_check(complex: &CellComplex, cover: &CellCover) -> Result<Lemma1Report> {
    CellCover::new(complex, cover.names.clone(), cover.members.clone())?;
    if cover.len() < 2 {
        return Err(Error::Precondition("cover needs at least two members".into()));
    }
    if !complex.is_connected() {
        return Err(Error::Precondition("complex is not connected".into()));
    }
    if !cover.is_irreducible(complex) {
        return Err(Error::Precondition("cover has a proper subcover".into()));
    }
    let p = cover.boundary_union(complex).count_ones(..);
    Ok(Lemma1Report {
        members: cover.len(),
        boundary_points: p,
        holds: cover.len() <= p,
    })
}

/// Sequence `s₀, s₁, …` of automorphisms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AutoSeq {
    /// `sᵢ = sⁱ`, starting from the identity.
    Powers(Automorphism),
    Explicit(Vec<Automorphism>),
}

impl AutoSeq {
    pub fn get(&self, i: usize) -> Result<Automorphism> {
        match self {
            AutoSeq::Powers(s) => Ok(s.power(i)),
            AutoSeq::Explicit(list) => list
                .get(i)
                .cloned()
                .ok_or_else(|| Error::Precondition(format!("sequence has only {} terms", list.len()))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntropyRow {
    pub n: usize,
    /// Members of the (pruned) join.
    pub join_members: usize,
    pub minimum: usize,
    /// `n · L_A`.
    pub bound: usize,
    pub within_bound: bool,
    /// `ln N_n / n`.
    pub h_hat: f64,
}

pub const MAX_ENTROPY_N: usize = 12;

/// `N_n = N(s₀(A) ∨ … ∨ s_{n−1}(A))` for `n = 1..=n_max`, with the bound `N_n ≤ n·L_A`.
///
/// After each join, members contained in another member are dropped. Every
/// member of the full join lies inside a member of the pruned one, and the
/// pruned join is a subfamily of the full one, so `N_n` is unchanged.
pub fn sequence_entropy(complex: &CellComplex, cover: &CellCover, seq: &AutoSeq, n_max: usize) -> Result<Vec<EntropyRow>> {
    if n_max > MAX_ENTROPY_N {
        return Err(Error::SizeLimit {
            what: "n_max",
            got: n_max,
            limit: MAX_ENTROPY_N,
        });
    }
    CellCover::new(complex, cover.names.clone(), cover.members.clone())?;
    let l_a = cover.boundary_total(complex);
    let mut rows = Vec::with_capacity(n_max);
    let mut join: Option<CellCover> = None;
    for n in 1..=n_max {
        let s = seq.get(n - 1)?;
        complex.validate(&s)?;
        let next = match &join {
            None => cover.image(&s),
            Some(j) => join_refinement(j, &cover.image(&s)),
        };
        let keep = maximal_members(&next.members);
        let pruned = next.subcover(&keep);
        let minimum = minimum_subcover(complex, &pruned)?.len();
        rows.push(EntropyRow {
            n,
            join_members: pruned.len(),
            minimum,
            bound: n * l_a,
            within_bound: minimum <= n * l_a,
            h_hat: (minimum as f64).ln() / n as f64,
        });
        join = Some(pruned);
    }
    Ok(rows)
}

/// Random irreducible cover by open balls with at least two members.
pub fn random_open_cover<R: Rng + ?Sized>(complex: &CellComplex, rng: &mut R) -> CellCover {
    let v = complex.vertex_count();
    assert!(v >= 2, "complex needs two vertices");
    loop {
        let mut names = Vec::new();
        let mut members = Vec::new();
        let mut covered = complex.empty_set();
        while covered.count_ones(..) < complex.cell_count() {
            let member = if rng.gen_bool(0.2) {
                let e = rng.gen_range(v..complex.cell_count());
                let mut s = complex.empty_set();
                s.insert(e);
                s
            } else {
                let center = rng.gen_range(0..v);
                let radius = rng.gen_range(1..=3);
                complex.open_ball(center, radius)
            };
            covered.union_with(&member);
            names.push(format!("U{}", names.len()));
            members.push(member);
        }
        let cover = CellCover::new(complex, names, members).expect("open members covering everything");
        let irreducible = irreducible_subcover(complex, &cover).expect("valid cover");
        if irreducible.len() >= 2 {
            return irreducible;
        }
    }
}

/// A complex, a cover and an automorphism sequence.
#[derive(Clone, Debug)]
pub struct EntropyFixture {
    pub name: String,
    pub complex: CellComplex,
    pub cover: CellCover,
    pub seq: AutoSeq,
}

fn binary_tree() -> BetweennessStructure {
    let names = ["r", "a", "b", "a1", "a2", "b1", "b2"];
    let edges = [("r", "a"), ("r", "b"), ("a", "a1"), ("a", "a2"), ("b", "b1"), ("b", "b2")];
    BetweennessStructure::tree(&names, &edges).expect("binary tree")
}

/// The three-member cover `{v0, v0~v1}`, `{v0~v1, v1, v1~v2}`, `{v1~v2, v2}` of the path `v0 – v1 – v2`.
pub fn path_b_cover() -> (CellComplex, CellCover) {
    let t = BetweennessStructure::tree(&["v0", "v1", "v2"], &[("v0", "v1"), ("v1", "v2")]).expect("path");
    let c = CellComplex::new(&t, 1).expect("complex");
    let cover = CellCover::from_named(
        &c,
        &[
            ("B1", vec!["v0", "v0~v1"]),
            ("B2", vec!["v0~v1", "v1", "v1~v2"]),
            ("B3", vec!["v1~v2", "v2"]),
        ],
    )
    .expect("cover");
    (c, cover)
}

/// Branch swaps available at every vertex of the underlying tree.
pub fn branch_swaps(complex: &CellComplex) -> Vec<Automorphism> {
    let names = complex.tree_names().to_vec();
    let mut out = Vec::new();
    for a in &names {
        for b in &names {
            if a < b {
                if let Ok(s) = complex.branch_swap(a, b) {
                    out.push(s);
                }
            }
        }
    }
    out
}

/// Deterministic fixture set: hand-built cases followed by seeded random ones.
pub fn entropy_fixtures(seed: u64, random: usize) -> Vec<EntropyFixture> {
    let mut out = Vec::new();
    let (path, b) = path_b_cover();
    out.push(EntropyFixture {
        name: "path-b-cover-reflection".into(),
        complex: path.clone(),
        cover: b.clone(),
        seq: AutoSeq::Powers(path.reflection().expect("path")),
    });
    out.push(EntropyFixture {
        name: "path-b-cover-identity".into(),
        complex: path.clone(),
        cover: b,
        seq: AutoSeq::Powers(path.identity()),
    });

    let edge = CellComplex::new(&BetweennessStructure::path(2), 4).expect("edge");
    let halves = CellCover::from_named(
        &edge,
        &[
            ("H1", vec!["0", "0~0-1/1", "0-1/1", "0-1/1~0-1/2", "0-1/2", "0-1/2~0-1/3"]),
            ("H2", vec!["0-1/1~0-1/2", "0-1/2", "0-1/2~0-1/3", "0-1/3", "0-1/3~1", "1"]),
        ],
    )
    .expect("halves");
    out.push(EntropyFixture {
        name: "edge-halves-reflection".into(),
        complex: edge.clone(),
        cover: halves,
        seq: AutoSeq::Powers(edge.reflection().expect("edge")),
    });

    let bin = CellComplex::new(&binary_tree(), 2).expect("binary");
    let cell = |n: &str| bin.cell(n).expect("cell");
    let balls: Vec<CellSet> = ["r", "a", "b", "a1", "a2", "b1", "b2"]
        .iter()
        .map(|v| bin.open_ball(cell(v), 2))
        .collect();
    let names = (1..=balls.len()).map(|i| format!("N{i}")).collect();
    let bin_cover = irreducible_subcover(&bin, &CellCover::new(&bin, names, balls).expect("balls")).expect("cover");
    let swap_ab = bin.branch_swap("a", "b").expect("swap");
    let swap_a = bin.branch_swap("a1", "a2").expect("swap");
    let swap_b = bin.branch_swap("b1", "b2").expect("swap");
    out.push(EntropyFixture {
        name: "binary-swap-powers".into(),
        complex: bin.clone(),
        cover: bin_cover.clone(),
        seq: AutoSeq::Powers(swap_ab.compose(&swap_a)),
    });
    let mut alt = vec![bin.identity()];
    for i in 1..MAX_ENTROPY_N {
        let prev = alt[i - 1].clone();
        let step = match i % 3 {
            0 => &swap_ab,
            1 => &swap_a,
            _ => &swap_b,
        };
        alt.push(step.compose(&prev));
    }
    out.push(EntropyFixture {
        name: "binary-swap-walk".into(),
        complex: bin.clone(),
        cover: bin_cover,
        seq: AutoSeq::Explicit(alt),
    });

    let p5 = CellComplex::new(&BetweennessStructure::path(5), 2).expect("path");
    let windows: Vec<CellSet> = (0..p5.vertex_count()).step_by(2).map(|v| p5.open_ball(v, 2)).collect();
    let names = (1..=windows.len()).map(|i| format!("W{i}")).collect();
    let window_cover =
        irreducible_subcover(&p5, &CellCover::new(&p5, names, windows).expect("windows")).expect("cover");
    out.push(EntropyFixture {
        name: "path5-windows-reflection".into(),
        complex: p5.clone(),
        cover: window_cover,
        seq: AutoSeq::Powers(p5.reflection().expect("path")),
    });

    let star = CellComplex::new(&BetweennessStructure::star(&["l1", "l2", "l3", "l4"]).expect("star"), 2)
        .expect("star");
    let rotation = star
        .automorphism_from_names(&[("l1", "l2"), ("l2", "l3"), ("l3", "l4"), ("l4", "l1")])
        .expect("rotation");
    let arms: Vec<CellSet> = ["l1", "l2", "l3", "l4", "c"]
        .iter()
        .map(|v| star.open_ball(star.cell(v).expect("cell"), 2))
        .collect();
    let names = (1..=arms.len()).map(|i| format!("R{i}")).collect();
    let arm_cover = irreducible_subcover(&star, &CellCover::new(&star, names, arms).expect("arms")).expect("cover");
    out.push(EntropyFixture {
        name: "star-rotation".into(),
        complex: star,
        cover: arm_cover,
        seq: AutoSeq::Powers(rotation),
    });

    for k in 0..random {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let n = rng.gen_range(3..=8);
        let edges = random_tree_edges(n, &mut rng);
        let tree = BetweennessStructure::tree_from_edges(n, &edges).expect("tree");
        let complex = CellComplex::new(&tree, rng.gen_range(1..=3)).expect("complex");
        let cover = random_open_cover(&complex, &mut rng);
        let gens = branch_swaps(&complex);
        let mut seq = vec![complex.identity()];
        for _ in 1..MAX_ENTROPY_N {
            let mut s = complex.identity();
            if !gens.is_empty() {
                for _ in 0..rng.gen_range(0..=3) {
                    s = gens[rng.gen_range(0..gens.len())].compose(&s);
                }
            }
            seq.push(s);
        }
        out.push(EntropyFixture {
            name: format!("random-{k}"),
            complex,
            cover,
            seq: AutoSeq::Explicit(seq),
        });
    }
    out
}
