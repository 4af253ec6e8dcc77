use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use crate::betweenness::BetweennessStructure;
use crate::error::{Error, Result};
use crate::treegen::{centers, rooted_canonical};

pub type CellSet = FixedBitSet;

/// Subdivided finite tree as a cell complex: vertices are 0-cells, each
/// original edge is split into `m` open 1-cells.
///
/// Cells `0..vertex_count()` are vertices, the rest are 1-cells. Subdivision
/// vertices are named `u-v/i`, 1-cells `a~b` after their endpoints.
#[derive(Clone, Debug)]
pub struct CellComplex {
    tree_names: Vec<String>,
    tree_edges: Vec<(usize, usize)>,
    tree_adjacency: Vec<Vec<usize>>,
    subdivision: usize,
    vertices: usize,
    /// Endpoints of each 1-cell, indexed by `cell - vertices`.
    segments: Vec<(usize, usize)>,
    names: Vec<String>,
    index: HashMap<String, usize>,
    /// Incident 1-cells (as cell ids) of each vertex.
    star: Vec<Vec<usize>>,
    /// Per original edge `(u, v)`: vertex chain from `u` to `v` and 1-cell chain.
    chains: Vec<(Vec<usize>, Vec<usize>)>,
}

impl CellComplex {
    pub fn new(tree: &BetweennessStructure, subdivision: usize) -> Result<Self> {
        let adjacency = tree
            .adjacency()
            .ok_or_else(|| Error::BackendMismatch("a cell complex needs a tree-backed structure".into()))?
            .to_vec();
        if subdivision == 0 {
            return Err(Error::InvalidStructure("subdivision factor must be at least 1".into()));
        }
        let tree_names = tree.names().to_vec();
        let tree_edges = tree.edges().expect("tree backend");
        let mut names = tree_names.clone();
        let mut chains = Vec::new();
        let mut segments = Vec::new();
        for &(u, v) in &tree_edges {
            let mut chain = vec![u];
            for i in 1..subdivision {
                chain.push(names.len());
                names.push(format!("{}-{}/{i}", tree_names[u], tree_names[v]));
            }
            chain.push(v);
            let cells = chain.windows(2).map(|w| {
                segments.push((w[0], w[1]));
                segments.len() - 1
            });
            let cells: Vec<usize> = cells.collect();
            chains.push((chain, cells));
        }
        let vertices = names.len();
        for (a, b) in &segments {
            let name = format!("{}~{}", names[*a], names[*b]);
            names.push(name);
        }
        for (_, cells) in &mut chains {
            for c in cells.iter_mut() {
                *c += vertices;
            }
        }
        let mut star = vec![Vec::new(); vertices];
        for (k, &(a, b)) in segments.iter().enumerate() {
            star[a].push(vertices + k);
            star[b].push(vertices + k);
        }
        let mut index = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::DuplicatePoint(name.clone()));
            }
        }
        Ok(Self {
            tree_names,
            tree_edges,
            tree_adjacency: adjacency,
            subdivision,
            vertices,
            segments,
            names,
            index,
            star,
            chains,
        })
    }

    pub fn cell_count(&self) -> usize {
        self.names.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn subdivision(&self) -> usize {
        self.subdivision
    }

    pub fn tree_names(&self) -> &[String] {
        &self.tree_names
    }

    pub fn is_vertex(&self, cell: usize) -> bool {
        cell < self.vertices
    }

    pub fn cell_name(&self, cell: usize) -> &str {
        &self.names[cell]
    }

    pub fn cell(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownCell(name.to_string()))
    }

    /// Endpoints of a 1-cell.
    pub fn endpoints(&self, cell: usize) -> (usize, usize) {
        self.segments[cell - self.vertices]
    }

    /// Incident 1-cells of a vertex.
    pub fn star_of(&self, vertex: usize) -> &[usize] {
        &self.star[vertex]
    }

    pub fn empty_set(&self) -> CellSet {
        FixedBitSet::with_capacity(self.cell_count())
    }

    pub fn full_set(&self) -> CellSet {
        let mut s = self.empty_set();
        s.insert_range(..);
        s
    }

    pub fn cell_set<S: AsRef<str>>(&self, names: &[S]) -> Result<CellSet> {
        let mut s = self.empty_set();
        for n in names {
            s.insert(self.cell(n.as_ref())?);
        }
        Ok(s)
    }

    pub fn format_set(&self, s: &CellSet) -> String {
        let names: Vec<&str> = s.ones().map(|c| self.cell_name(c)).collect();
        format!("{{{}}}", names.join(", "))
    }

    /// Every vertex of the set has all incident 1-cells in the set.
    pub fn is_open(&self, s: &CellSet) -> bool {
        s.ones()
            .take_while(|&c| c < self.vertices)
            .all(|v| self.star[v].iter().all(|&e| s.contains(e)))
    }

    /// Vertices outside the set incident to a 1-cell of the set.
    pub fn boundary(&self, s: &CellSet) -> CellSet {
        let mut b = self.empty_set();
        for c in s.ones().filter(|&c| c >= self.vertices) {
            let (x, y) = self.endpoints(c);
            for v in [x, y] {
                if !s.contains(v) {
                    b.insert(v);
                }
            }
        }
        b
    }

    /// Smallest open set containing `s`.
    pub fn open_hull(&self, s: &CellSet) -> CellSet {
        let mut h = s.clone();
        for v in s.ones().take_while(|&c| c < self.vertices) {
            for &e in &self.star[v] {
                h.insert(e);
            }
        }
        h
    }

    /// Cells at combinatorial distance `< radius` from a vertex, opened.
    pub fn open_ball(&self, center: usize, radius: usize) -> CellSet {
        let mut dist = vec![usize::MAX; self.vertices];
        dist[center] = 0;
        let mut queue = std::collections::VecDeque::from([center]);
        while let Some(v) = queue.pop_front() {
            for &e in &self.star[v] {
                let (a, b) = self.endpoints(e);
                let w = if a == v { b } else { a };
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        let mut s = self.empty_set();
        for (v, &d) in dist.iter().enumerate() {
            if d < radius {
                s.insert(v);
            }
        }
        self.open_hull(&s)
    }

    /// The complex is connected: every vertex reachable from vertex 0.
    pub fn is_connected(&self) -> bool {
        self.vertices == 0 || self.open_ball(0, usize::MAX).count_ones(..) == self.cell_count()
    }

    pub fn identity(&self) -> Automorphism {
        Automorphism {
            cells: (0..self.cell_count()).collect(),
        }
    }

    /// Extend an automorphism of the underlying tree (by vertex index) to the complex.
    pub fn automorphism_from_tree(&self, perm: &[usize]) -> Result<Automorphism> {
        let n = self.tree_names.len();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidAutomorphism("not a permutation of the tree vertices".into()));
        }
        let edge_index: HashMap<(usize, usize), usize> =
            self.tree_edges.iter().enumerate().map(|(k, &e)| (e, k)).collect();
        let mut cells = vec![usize::MAX; self.cell_count()];
        for (v, &p) in perm.iter().enumerate() {
            cells[v] = p;
        }
        for (k, &(u, v)) in self.tree_edges.iter().enumerate() {
            let (pu, pv) = (perm[u], perm[v]);
            let (target, reversed) = match (edge_index.get(&(pu, pv)), edge_index.get(&(pv, pu))) {
                (Some(&t), _) => (t, false),
                (None, Some(&t)) => (t, true),
                (None, None) => {
                    return Err(Error::InvalidAutomorphism(format!(
                        "edge {}–{} is not mapped to an edge",
                        self.tree_names[u], self.tree_names[v]
                    )))
                }
            };
            let (src_v, src_c) = &self.chains[k];
            let (dst_v, dst_c) = &self.chains[target];
            let m = self.subdivision;
            for i in 1..m {
                cells[src_v[i]] = if reversed { dst_v[m - i] } else { dst_v[i] };
            }
            for i in 0..m {
                cells[src_c[i]] = if reversed { dst_c[m - 1 - i] } else { dst_c[i] };
            }
        }
        let a = Automorphism { cells };
        self.validate(&a)?;
        Ok(a)
    }

    pub fn automorphism_from_names<S: AsRef<str>>(&self, pairs: &[(S, S)]) -> Result<Automorphism> {
        let n = self.tree_names.len();
        let pos = |s: &str| {
            self.tree_names
                .iter()
                .position(|t| t == s)
                .ok_or_else(|| Error::UnknownPoint(s.to_string()))
        };
        let mut perm: Vec<usize> = (0..n).collect();
        for (a, b) in pairs {
            perm[pos(a.as_ref())?] = pos(b.as_ref())?;
        }
        self.automorphism_from_tree(&perm)
    }

    /// Central symmetry: swap the two halves at a central edge, or the first
    /// pair of isomorphic branches at a central vertex. On a path this is the
    /// end-to-end reversal.
    pub fn reflection(&self) -> Result<Automorphism> {
        let adj = &self.tree_adjacency;
        if adj.len() == 1 {
            return Ok(self.identity());
        }
        let none = || Error::InvalidAutomorphism("the tree has no central symmetry".into());
        match *centers(adj).as_slice() {
            [c, d] => {
                if rooted_canonical(adj, c, Some(d)) != rooted_canonical(adj, d, Some(c)) {
                    return Err(none());
                }
                self.automorphism_from_tree(&self.swap_perm(c, d, d, c))
            }
            [c] => {
                let forms: Vec<String> = adj[c].iter().map(|&x| rooted_canonical(adj, x, Some(c))).collect();
                for i in 0..forms.len() {
                    if let Some(j) = (i + 1..forms.len()).find(|&j| forms[j] == forms[i]) {
                        return self.automorphism_from_tree(&self.swap_perm(adj[c][i], adj[c][j], c, c));
                    }
                }
                Err(none())
            }
            _ => Err(none()),
        }
    }

    /// Exchange the branches at a common neighbour `p` through `a` and `b`.
    pub fn branch_swap(&self, a: &str, b: &str) -> Result<Automorphism> {
        let pos = |s: &str| {
            self.tree_names
                .iter()
                .position(|t| t == s)
                .ok_or_else(|| Error::UnknownPoint(s.to_string()))
        };
        let (a, b) = (pos(a)?, pos(b)?);
        let adj = &self.tree_adjacency;
        let p = adj[a]
            .iter()
            .copied()
            .find(|p| adj[b].contains(p) && a != b)
            .ok_or_else(|| Error::InvalidAutomorphism("branches need a common neighbour".into()))?;
        if rooted_canonical(adj, a, Some(p)) != rooted_canonical(adj, b, Some(p)) {
            return Err(Error::InvalidAutomorphism("branches are not isomorphic".into()));
        }
        self.automorphism_from_tree(&self.swap_perm(a, b, p, p))
    }

    /// Vertex permutation exchanging the isomorphic branches rooted at `a`
    /// (away from `pa`) and at `b` (away from `pb`).
    fn swap_perm(&self, a: usize, b: usize, pa: usize, pb: usize) -> Vec<usize> {
        let adj = &self.tree_adjacency;
        let mut perm: Vec<usize> = (0..adj.len()).collect();
        let mut stack = vec![(a, b, pa, pb)];
        while let Some((x, y, px, py)) = stack.pop() {
            perm[x] = y;
            perm[y] = x;
            let sorted = |v: usize, parent: usize| {
                let mut kids: Vec<(String, usize)> = adj[v]
                    .iter()
                    .filter(|&&c| c != parent)
                    .map(|&c| (rooted_canonical(adj, c, Some(v)), c))
                    .collect();
                kids.sort();
                kids
            };
            for ((_, cx), (_, cy)) in sorted(x, px).into_iter().zip(sorted(y, py)) {
                stack.push((cx, cy, x, y));
            }
        }
        perm
    }

    /// Bijective on cells, vertices to vertices, incidence preserved.
    pub fn validate(&self, a: &Automorphism) -> Result<()> {
        let n = self.cell_count();
        let mut seen = vec![false; n];
        if a.cells.len() != n || a.cells.iter().any(|&c| c >= n || std::mem::replace(&mut seen[c], true)) {
            return Err(Error::InvalidAutomorphism("not a permutation of the cells".into()));
        }
        for c in self.vertices..n {
            let (x, y) = self.endpoints(c);
            let img = a.cells[c];
            if img < self.vertices {
                return Err(Error::InvalidAutomorphism("1-cell mapped to a vertex".into()));
            }
            let (ix, iy) = self.endpoints(img);
            let (px, py) = (a.cells[x], a.cells[y]);
            if !((ix, iy) == (px, py) || (ix, iy) == (py, px)) {
                return Err(Error::InvalidAutomorphism(format!(
                    "incidence of {} not preserved",
                    self.cell_name(c)
                )));
            }
        }
        Ok(())
    }
}

/// Cell permutation preserving incidence.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Automorphism {
    cells: Vec<usize>,
}

impl Automorphism {
    pub fn cells(&self) -> &[usize] {
        &self.cells
    }

    pub fn apply(&self, cell: usize) -> usize {
        self.cells[cell]
    }

    /// Image of a cell set.
    pub fn image(&self, s: &CellSet) -> CellSet {
        let mut out = FixedBitSet::with_capacity(s.len());
        for c in s.ones() {
            out.insert(self.cells[c]);
        }
        out
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Automorphism) -> Automorphism {
        Automorphism {
            cells: other.cells.iter().map(|&c| self.cells[c]).collect(),
        }
    }

    pub fn power(&self, k: usize) -> Automorphism {
        let mut out = Automorphism {
            cells: (0..self.cells.len()).collect(),
        };
        for _ in 0..k {
            out = self.compose(&out);
        }
        out
    }

    pub fn is_identity(&self) -> bool {
        self.cells.iter().enumerate().all(|(i, &c)| i == c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> CellComplex {
        let t = BetweennessStructure::tree(&["v0", "v1", "v2"], &[("v0", "v1"), ("v1", "v2")]).unwrap();
        CellComplex::new(&t, 1).unwrap()
    }

    #[test]
    fn openness_and_boundary() {
        let c = path3();
        let o = c.cell_set(&["v0~v1", "v1", "v1~v2"]).unwrap();
        assert!(c.is_open(&o));
        assert_eq!(c.boundary(&o), c.cell_set(&["v0", "v2"]).unwrap());
        assert!(!c.is_open(&c.cell_set(&["v1"]).unwrap()));
        let e = c.cell_set(&["v0~v1"]).unwrap();
        assert!(c.is_open(&e));
        assert_eq!(c.boundary(&e), c.cell_set(&["v0", "v1"]).unwrap());
        assert!(matches!(c.cell_set(&["nope"]), Err(Error::UnknownCell(_))));
        assert!(c.is_connected());
    }

    #[test]
    fn subdivision_names_and_counts() {
        let t = BetweennessStructure::path(3);
        let c = CellComplex::new(&t, 3).unwrap();
        assert_eq!(c.vertex_count(), 3 + 2 * 2);
        assert_eq!(c.cell_count(), 7 + 6);
        assert!(c.cell("0-1/2").is_ok());
        assert!(c.cell("0-1/2~1").is_ok());
    }

    #[test]
    fn reflection_of_path() {
        let c = path3();
        let r = c.reflection().unwrap();
        let a = c.cell_set(&["v0", "v0~v1"]).unwrap();
        assert_eq!(r.image(&a), c.cell_set(&["v2", "v1~v2"]).unwrap());
        assert!(r.power(2).is_identity());
        let t = BetweennessStructure::path(4);
        let c = CellComplex::new(&t, 3).unwrap();
        let r = c.reflection().unwrap();
        assert!(r.power(2).is_identity());
        assert!(!r.is_identity());
        assert_eq!(r.apply(c.cell("0").unwrap()), c.cell("3").unwrap());
        assert_eq!(r.apply(c.cell("1-2/1").unwrap()), c.cell("1-2/2").unwrap());
    }

    #[test]
    fn central_symmetry_of_trees() {
        let names = ["r", "a", "b", "a1", "a2", "b1", "b2"];
        let edges = [("r", "a"), ("r", "b"), ("a", "a1"), ("a", "a2"), ("b", "b1"), ("b", "b2")];
        let c = CellComplex::new(&BetweennessStructure::tree(&names, &edges).unwrap(), 1).unwrap();
        assert_eq!(c.reflection().unwrap(), c.branch_swap("a", "b").unwrap());
        let lopsided = BetweennessStructure::tree(&["x", "y", "z", "w"], &[("x", "y"), ("y", "z"), ("y", "w")]).unwrap();
        let c = CellComplex::new(&lopsided, 1).unwrap();
        assert_eq!(c.reflection().unwrap().apply(c.cell("y").unwrap()), c.cell("y").unwrap());
        let spider = BetweennessStructure::tree(
            &["c", "p", "q", "q2", "r", "r2", "r3"],
            &[("c", "p"), ("c", "q"), ("q", "q2"), ("c", "r"), ("r", "r2"), ("r2", "r3")],
        )
        .unwrap();
        assert!(CellComplex::new(&spider, 1).unwrap().reflection().is_err());
    }

    #[test]
    fn branch_swap_on_binary_tree() {
        let names = ["r", "a", "b", "a1", "a2", "b1", "b2"];
        let edges = [("r", "a"), ("r", "b"), ("a", "a1"), ("a", "a2"), ("b", "b1"), ("b", "b2")];
        let t = BetweennessStructure::tree(&names, &edges).unwrap();
        let c = CellComplex::new(&t, 2).unwrap();
        let s = c.branch_swap("a", "b").unwrap();
        assert!(s.power(2).is_identity());
        assert_eq!(s.apply(c.cell("a1").unwrap()), c.cell("b1").unwrap());
        let leaf = c.branch_swap("a1", "a2").unwrap();
        assert_eq!(leaf.apply(c.cell("a1").unwrap()), c.cell("a2").unwrap());
        assert!(c.branch_swap("a", "a1").is_err());
        let open = c.open_ball(c.cell("a").unwrap(), 2);
        assert!(c.is_open(&s.image(&open)));
        assert_eq!(
            c.boundary(&s.image(&open)).count_ones(..),
            c.boundary(&open).count_ones(..)
        );
    }

    #[test]
    fn non_automorphism_rejected() {
        let c = path3();
        assert!(c.automorphism_from_names(&[("v0", "v1"), ("v1", "v0")]).is_err());
    }
}
