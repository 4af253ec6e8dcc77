//! Finite betweenness structures.
//!
//! A [`BetweennessStructure`] is a finite set of named points together with a
//! ternary relation `⟨a,b,c⟩` ("b lies between a and c"). The relation is
//! given by one of three backends: a finite graph-theoretic tree, a total
//! order, or an explicit table of triples.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// Index of a point inside one [`BetweennessStructure`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointId(pub usize);

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Backend {
    /// `⟨a,b,c⟩` iff `b` is on the unique simple path from `a` to `c`.
    Tree { adjacency: Vec<Vec<usize>> },
    /// `⟨a,b,c⟩` iff `a ≤ b ≤ c` or `c ≤ b ≤ a`; `rank[p]` is the position of `p`.
    LinearOrder { rank: Vec<usize> },
    /// Triples stored as `(min(a,c), b, max(a,c))`, so `(a,b,c)` and `(c,b,a)` share a record.
    Explicit { triples: HashSet<(usize, usize, usize)> },
}

impl Backend {
    pub fn kind(&self) -> &'static str {
        match self {
            Backend::Tree { .. } => "tree",
            Backend::LinearOrder { .. } => "linear-order",
            Backend::Explicit { .. } => "explicit",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BetweennessStructure {
    names: Vec<String>,
    index: HashMap<String, usize>,
    backend: Backend,
}

/// The interval `[u,v] = {x : ⟨u,x,v⟩}`, members sorted by index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub u: PointId,
    pub v: PointId,
    pub members: Vec<PointId>,
}

impl Interval {
    pub fn contains(&self, p: PointId) -> bool {
        self.members.binary_search(&p).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

fn index_names<S: AsRef<str>>(points: &[S]) -> Result<(Vec<String>, HashMap<String, usize>)> {
    let mut names = Vec::with_capacity(points.len());
    let mut index = HashMap::with_capacity(points.len());
    for p in points {
        let p = p.as_ref().to_string();
        if index.insert(p.clone(), names.len()).is_some() {
            return Err(Error::DuplicatePoint(p));
        }
        names.push(p);
    }
    Ok((names, index))
}

impl BetweennessStructure {
    /// Tree backend from point names and edges between them.
    pub fn tree<S: AsRef<str>>(points: &[S], edges: &[(S, S)]) -> Result<Self> {
        let (names, index) = index_names(points)?;
        let lookup = |s: &S| {
            index
                .get(s.as_ref())
                .copied()
                .ok_or_else(|| Error::UnknownPoint(s.as_ref().to_string()))
        };
        let mut idx_edges = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            idx_edges.push((lookup(u)?, lookup(v)?));
        }
        let adjacency = tree_adjacency(names.len(), &idx_edges)?;
        Ok(Self {
            names,
            index,
            backend: Backend::Tree { adjacency },
        })
    }

    /// Tree backend on points named `"0"..n`.
    pub fn tree_from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let points: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let (names, index) = index_names(&points)?;
        let adjacency = tree_adjacency(n, edges)?;
        Ok(Self {
            names,
            index,
            backend: Backend::Tree { adjacency },
        })
    }

    /// The path `0 – 1 – … – (n-1)`.
    pub fn path(n: usize) -> Self {
        let edges: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        Self::tree_from_edges(n, &edges).expect("a path is a tree")
    }

    /// A star with center `c` and the given leaves.
    pub fn star<S: AsRef<str>>(leaves: &[S]) -> Result<Self> {
        let mut points = vec!["c".to_string()];
        points.extend(leaves.iter().map(|l| l.as_ref().to_string()));
        let edges: Vec<(String, String)> = leaves
            .iter()
            .map(|l| ("c".to_string(), l.as_ref().to_string()))
            .collect();
        Self::tree(&points, &edges)
    }

    /// Linear order backend; `points` are listed from smallest to largest.
    pub fn linear_order<S: AsRef<str>>(points: &[S]) -> Result<Self> {
        let (names, index) = index_names(points)?;
        let rank = (0..names.len()).collect();
        Ok(Self {
            names,
            index,
            backend: Backend::LinearOrder { rank },
        })
    }

    /// Explicit backend holding exactly the given triples (normalized under `(a,b,c) ↦ (c,b,a)`).
    pub fn explicit<S: AsRef<str>>(points: &[S], triples: &[(S, S, S)]) -> Result<Self> {
        let (names, index) = index_names(points)?;
        let lookup = |s: &S| {
            index
                .get(s.as_ref())
                .copied()
                .ok_or_else(|| Error::UnknownPoint(s.as_ref().to_string()))
        };
        let mut set = HashSet::new();
        for (a, b, c) in triples {
            set.insert(normalize(lookup(a)?, lookup(b)?, lookup(c)?));
        }
        Ok(Self {
            names,
            index,
            backend: Backend::Explicit { triples: set },
        })
    }

    /// Explicit backend with all endpoint triples `⟨a,a,c⟩`, `⟨a,c,c⟩` added to the given ones.
    pub fn explicit_with_endpoints<S: AsRef<str>>(
        points: &[S],
        triples: &[(S, S, S)],
    ) -> Result<Self> {
        let mut s = Self::explicit(points, triples)?;
        let n = s.len();
        if let Backend::Explicit { triples } = &mut s.backend {
            for a in 0..n {
                for c in 0..n {
                    triples.insert(normalize(a, a, c));
                    triples.insert(normalize(a, c, c));
                }
            }
        }
        Ok(s)
    }

    /// Explicit backend from index triples on points named by `names`.
    pub fn explicit_from_indices(
        names: Vec<String>,
        triples: impl IntoIterator<Item = (usize, usize, usize)>,
    ) -> Result<Self> {
        let (names, index) = index_names(&names)?;
        let n = names.len();
        let mut set = HashSet::new();
        for (a, b, c) in triples {
            if a >= n || b >= n || c >= n {
                return Err(Error::InvalidStructure(format!(
                    "triple ({a},{b},{c}) out of range"
                )));
            }
            set.insert(normalize(a, b, c));
        }
        Ok(Self {
            names,
            index,
            backend: Backend::Explicit { triples: set },
        })
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = PointId> + '_ {
        (0..self.names.len()).map(PointId)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, p: PointId) -> &str {
        &self.names[p.0]
    }

    pub fn point(&self, name: &str) -> Result<PointId> {
        self.index
            .get(name)
            .map(|&i| PointId(i))
            .ok_or_else(|| Error::UnknownPoint(name.to_string()))
    }

    pub fn check_point(&self, p: PointId) -> Result<PointId> {
        if p.0 < self.len() {
            Ok(p)
        } else {
            Err(Error::UnknownPoint(p.to_string()))
        }
    }

    /// Tree adjacency lists, when tree-backed.
    pub fn adjacency(&self) -> Option<&[Vec<usize>]> {
        match &self.backend {
            Backend::Tree { adjacency } => Some(adjacency),
            _ => None,
        }
    }

    /// Tree edges `(u, v)` with `u < v`, when tree-backed.
    pub fn edges(&self) -> Option<Vec<(usize, usize)>> {
        self.adjacency().map(|adj| {
            let mut out = Vec::new();
            for (u, ns) in adj.iter().enumerate() {
                for &v in ns {
                    if u < v {
                        out.push((u, v));
                    }
                }
            }
            out
        })
    }

    pub fn between(&self, a: PointId, b: PointId, c: PointId) -> Result<bool> {
        self.check_point(a)?;
        self.check_point(b)?;
        self.check_point(c)?;
        Ok(self.between_unchecked(a.0, b.0, c.0))
    }

    pub(crate) fn between_unchecked(&self, a: usize, b: usize, c: usize) -> bool {
        match &self.backend {
            Backend::Tree { adjacency } => {
                if b == a || b == c {
                    return true;
                }
                let parent = bfs_parents(adjacency, a);
                let mut x = c;
                while x != a {
                    if x == b {
                        return true;
                    }
                    x = parent[x];
                }
                false
            }
            Backend::LinearOrder { rank } => {
                let (ra, rb, rc) = (rank[a], rank[b], rank[c]);
                ra.min(rc) <= rb && rb <= ra.max(rc)
            }
            Backend::Explicit { triples } => triples.contains(&normalize(a, b, c)),
        }
    }

    pub fn interval(&self, u: PointId, v: PointId) -> Result<Interval> {
        self.check_point(u)?;
        self.check_point(v)?;
        let members = match &self.backend {
            Backend::Tree { adjacency } => {
                let parent = bfs_parents(adjacency, u.0);
                let mut m = vec![PointId(v.0)];
                let mut x = v.0;
                while x != u.0 {
                    x = parent[x];
                    m.push(PointId(x));
                }
                m.sort();
                m
            }
            _ => self
                .points()
                .filter(|&x| self.between_unchecked(u.0, x.0, v.0))
                .collect(),
        };
        Ok(Interval { u, v, members })
    }

    /// The unique point of `[a,b] ∩ [a,c] ∩ [b,c]`, `None` when the intersection is empty.
    pub fn median(&self, a: PointId, b: PointId, c: PointId) -> Result<Option<PointId>> {
        let ab = self.interval(a, b)?;
        let ac = self.interval(a, c)?;
        let bc = self.interval(b, c)?;
        let common: Vec<PointId> = ab
            .members
            .iter()
            .copied()
            .filter(|&x| ac.contains(x) && bc.contains(x))
            .collect();
        match common.len() {
            0 => Ok(None),
            1 => Ok(Some(common[0])),
            size => Err(Error::NonSingletonMedian {
                a: self.name(a).to_string(),
                b: self.name(b).to_string(),
                c: self.name(c).to_string(),
                size,
            }),
        }
    }

    /// True iff every triple has a nonempty median.
    pub fn is_median_pretree(&self) -> Result<bool> {
        if self.len() <= IntervalTable::MAX_POINTS {
            let table = IntervalTable::new(self)?;
            return Ok(table.median_table(self)?.is_some());
        }
        for a in self.points() {
            for b in self.points() {
                for c in self.points() {
                    if self.median(a, b, c)?.is_none() {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// True iff `[u,v] ⊆ S` for all `u, v ∈ S`.
    pub fn is_convex(&self, set: &[PointId]) -> Result<bool> {
        for &p in set {
            self.check_point(p)?;
        }
        let members: HashSet<PointId> = set.iter().copied().collect();
        for &u in set {
            for &v in set {
                if u < v && !self.interval(u, v)?.members.iter().all(|x| members.contains(x)) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Explicit structure induced on a subset, keeping the original names.
    pub fn induced(&self, subset: &[PointId]) -> Result<Self> {
        for &p in subset {
            self.check_point(p)?;
        }
        let names: Vec<String> = subset.iter().map(|&p| self.name(p).to_string()).collect();
        let mut triples = Vec::new();
        for (i, &a) in subset.iter().enumerate() {
            for (j, &b) in subset.iter().enumerate() {
                for (k, &c) in subset.iter().enumerate() {
                    if i <= k && self.between_unchecked(a.0, b.0, c.0) {
                        triples.push((i, j, k));
                    }
                }
            }
        }
        Self::explicit_from_indices(names, triples)
    }
}

fn normalize(a: usize, b: usize, c: usize) -> (usize, usize, usize) {
    if a <= c {
        (a, b, c)
    } else {
        (c, b, a)
    }
}

fn tree_adjacency(n: usize, edges: &[(usize, usize)]) -> Result<Vec<Vec<usize>>> {
    if n == 0 {
        return Err(Error::NotATree("no points".into()));
    }
    if edges.len() != n - 1 {
        return Err(Error::NotATree(format!(
            "{} points need {} edges, got {}",
            n,
            n - 1,
            edges.len()
        )));
    }
    let mut adjacency = vec![Vec::new(); n];
    for &(u, v) in edges {
        if u >= n || v >= n {
            return Err(Error::NotATree(format!("edge ({u},{v}) out of range")));
        }
        if u == v {
            return Err(Error::NotATree(format!("self loop at {u}")));
        }
        if adjacency[u].contains(&v) {
            return Err(Error::NotATree(format!("duplicate edge ({u},{v})")));
        }
        adjacency[u].push(v);
        adjacency[v].push(u);
    }
    for ns in &mut adjacency {
        ns.sort_unstable();
    }
    let parent = bfs_parents(&adjacency, 0);
    if parent.contains(&usize::MAX) {
        return Err(Error::NotATree("graph is disconnected".into()));
    }
    Ok(adjacency)
}

/// BFS parent pointers from `root`; `parent[root] = root`, unreachable nodes get `usize::MAX`.
pub(crate) fn bfs_parents(adjacency: &[Vec<usize>], root: usize) -> Vec<usize> {
    bfs_order(adjacency, root).0
}

/// BFS parent pointers together with the visiting order.
pub(crate) fn bfs_order(adjacency: &[Vec<usize>], root: usize) -> (Vec<usize>, Vec<usize>) {
    let mut parent = vec![usize::MAX; adjacency.len()];
    parent[root] = root;
    let mut order = Vec::with_capacity(adjacency.len());
    let mut queue = VecDeque::from([root]);
    while let Some(x) = queue.pop_front() {
        order.push(x);
        for &y in &adjacency[x] {
            if parent[y] == usize::MAX {
                parent[y] = x;
                queue.push_back(y);
            }
        }
    }
    (parent, order)
}

/// Bitmask over the points of a structure with at most 128 points.
pub type Mask = u128;

/// All intervals of a structure as bitmasks, for exhaustive checks.
///
/// `iv[a * n + c]` is the set of `b` with `⟨a,b,c⟩`.
#[derive(Clone, Debug)]
pub struct IntervalTable {
    n: usize,
    iv: Vec<Mask>,
}

impl IntervalTable {
    pub const MAX_POINTS: usize = 128;

    pub fn new(t: &BetweennessStructure) -> Result<Self> {
        let n = t.len();
        if n > Self::MAX_POINTS {
            return Err(Error::SizeLimit {
                what: "points",
                got: n,
                limit: Self::MAX_POINTS,
            });
        }
        let mut iv = vec![0 as Mask; n * n];
        match &t.backend {
            Backend::Tree { adjacency } => {
                for a in 0..n {
                    let (parent, order) = bfs_order(adjacency, a);
                    for c in order {
                        iv[a * n + c] = if c == a {
                            1 << a
                        } else {
                            iv[a * n + parent[c]] | (1 << c)
                        };
                    }
                }
            }
            _ => {
                for a in 0..n {
                    for c in 0..n {
                        let mut m = 0;
                        for b in 0..n {
                            if t.between_unchecked(a, b, c) {
                                m |= 1 << b;
                            }
                        }
                        iv[a * n + c] = m;
                    }
                }
            }
        }
        Ok(Self { n, iv })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn full(&self) -> Mask {
        if self.n == 128 {
            Mask::MAX
        } else {
            (1 << self.n) - 1
        }
    }

    #[inline]
    pub fn interval(&self, a: usize, c: usize) -> Mask {
        self.iv[a * self.n + c]
    }

    #[inline]
    pub fn between(&self, a: usize, b: usize, c: usize) -> bool {
        self.interval(a, c) >> b & 1 == 1
    }

    /// Median table indexed `a * n² + b * n + c`, or `None` if some median is empty.
    /// Fails if some median set has more than one point.
    pub fn median_table(&self, t: &BetweennessStructure) -> Result<Option<Vec<u8>>> {
        let n = self.n;
        let mut table = vec![0u8; n * n * n];
        for a in 0..n {
            for b in 0..n {
                let ab = self.interval(a, b);
                for c in 0..n {
                    let m = ab & self.interval(a, c) & self.interval(b, c);
                    match m.count_ones() {
                        0 => return Ok(None),
                        1 => table[(a * n + b) * n + c] = m.trailing_zeros() as u8,
                        size => {
                            return Err(Error::NonSingletonMedian {
                                a: t.name(PointId(a)).to_string(),
                                b: t.name(PointId(b)).to_string(),
                                c: t.name(PointId(c)).to_string(),
                                size: size as usize,
                            })
                        }
                    }
                }
            }
        }
        Ok(Some(table))
    }
}

/// Iterate the indices set in a mask.
pub fn mask_iter(mut m: Mask) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}
