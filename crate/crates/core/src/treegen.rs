//! Tree generators: seeded random labelled trees and exhaustive enumeration of
//! unlabelled trees by canonical form.

use std::collections::BTreeSet;

use rand::Rng;

use crate::betweenness::BetweennessStructure;

/// Uniform random labelled tree on `n ≥ 1` points (Prüfer decoding), points named `"0"..n`.
pub fn random_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> BetweennessStructure {
    let edges = random_tree_edges(n, rng);
    BetweennessStructure::tree_from_edges(n, &edges).expect("Prüfer decoding yields a tree")
}

pub fn random_tree_edges<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<(usize, usize)> {
    assert!(n >= 1);
    if n == 1 {
        return Vec::new();
    }
    if n == 2 {
        return vec![(0, 1)];
    }
    let code: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    prufer_decode(n, &code)
}

fn prufer_decode(n: usize, code: &[usize]) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &c in code {
        degree[c] += 1;
    }
    let mut leaves: BTreeSet<usize> = (0..n).filter(|&i| degree[i] == 1).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &c in code {
        let leaf = *leaves.iter().next().expect("a leaf always exists");
        leaves.remove(&leaf);
        edges.push((leaf, c));
        degree[c] -= 1;
        if degree[c] == 1 {
            leaves.insert(c);
        }
    }
    let rest: Vec<usize> = leaves.into_iter().collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Canonical string of the tree rooted at `root` (AHU encoding).
pub fn rooted_canonical(adjacency: &[Vec<usize>], root: usize, parent: Option<usize>) -> String {
    let mut children: Vec<String> = adjacency[root]
        .iter()
        .filter(|&&c| Some(c) != parent)
        .map(|&c| rooted_canonical(adjacency, c, Some(root)))
        .collect();
    children.sort();
    let mut s = String::from("(");
    for c in children {
        s.push_str(&c);
    }
    s.push(')');
    s
}

/// Centers of a tree (one or two vertices), found by peeling leaves.
pub fn centers(adjacency: &[Vec<usize>]) -> Vec<usize> {
    let n = adjacency.len();
    if n <= 2 {
        return (0..n).collect();
    }
    let mut degree: Vec<usize> = adjacency.iter().map(Vec::len).collect();
    let mut layer: Vec<usize> = (0..n).filter(|&i| degree[i] <= 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &leaf in &layer {
            for &y in &adjacency[leaf] {
                if degree[y] > 0 {
                    degree[y] -= 1;
                    if degree[y] == 1 {
                        next.push(y);
                    }
                }
            }
            degree[leaf] = 0;
        }
        layer = next;
    }
    layer.sort_unstable();
    layer
}

/// Isomorphism-invariant canonical string of an unrooted tree.
pub fn canonical_form(adjacency: &[Vec<usize>]) -> String {
    centers(adjacency)
        .into_iter()
        .map(|c| rooted_canonical(adjacency, c, None))
        .min()
        .unwrap_or_default()
}

/// All unlabelled trees on exactly `n ≥ 1` vertices, as edge lists over `0..n`.
pub fn all_trees(n: usize) -> Vec<Vec<(usize, usize)>> {
    assert!(n >= 1);
    let mut level: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
    for size in 2..=n {
        let mut seen = BTreeSet::new();
        let mut next = Vec::new();
        for edges in &level {
            for attach in 0..size - 1 {
                let mut e = edges.clone();
                e.push((attach, size - 1));
                let adj = adjacency_of(size, &e);
                if seen.insert(canonical_form(&adj)) {
                    next.push(e);
                }
            }
        }
        level = next;
    }
    level
}

/// All unlabelled trees with `1..=max_n` vertices, as structures.
pub fn all_trees_up_to(max_n: usize) -> Vec<BetweennessStructure> {
    (1..=max_n)
        .flat_map(|n| {
            all_trees(n)
                .into_iter()
                .map(move |e| BetweennessStructure::tree_from_edges(n, &e).expect("valid tree"))
        })
        .collect()
}

pub fn adjacency_of(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    for ns in &mut adj {
        ns.sort_unstable();
    }
    adj
}
