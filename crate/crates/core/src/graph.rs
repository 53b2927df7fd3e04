//! Multigraph substrate and the two random models.
//!
//! Vertices are `0..n` in memory and `1..=n` in every serialized form.
//! Edges are ordered pairs; loops and parallel edges are allowed so the same
//! type houses both the simple model `G(n,m)` and the independent-pair model
//! `G'(n,m)`. Neighbour lists carry multiplicity, and a loop at `v` puts `v`
//! into its own list twice.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    simple: bool,
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl MultiGraph {
    /// Builds a multigraph from 0-based ordered pairs.
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if let Some(&(u, v)) = edges.iter().find(|&&(u, v)| u >= n || v >= n) {
            return Err(Error::domain(format!(
                "edge ({}, {}) has an endpoint outside 1..={n}",
                u + 1,
                v + 1
            )));
        }
        let mut degree = vec![0usize; n + 1];
        for &(u, v) in &edges {
            degree[u] += 1;
            degree[v] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut acc = 0;
        for d in &degree[..n] {
            offsets.push(acc);
            acc += d;
        }
        offsets.push(acc);
        let mut fill = offsets.clone();
        let mut targets = vec![0usize; acc];
        for &(u, v) in &edges {
            targets[fill[u]] = v;
            fill[u] += 1;
            targets[fill[v]] = u;
            fill[v] += 1;
        }
        Ok(MultiGraph {
            n,
            edges,
            simple: false,
            offsets,
            targets,
        })
    }

    /// Builds a graph and asserts that it is simple.
    pub fn new_simple(n: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut g = Self::new(n, edges)?;
        if !g.check_simple() {
            return Err(Error::domain("graph has a loop or a repeated edge"));
        }
        g.simple = true;
        Ok(g)
    }

    /// Builds a multigraph from 1-based pairs.
    pub fn from_one_based(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut zero = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u == 0 || v == 0 {
                return Err(Error::domain("vertex ids are 1-based"));
            }
            zero.push((u - 1, v - 1));
        }
        Self::new(n, zero)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Whether the graph was constructed with the simple assertion.
    pub fn simple_flag(&self) -> bool {
        self.simple
    }

    /// Checks directly that there are no loops and no repeated undirected pair.
    pub fn check_simple(&self) -> bool {
        let mut seen = HashSet::with_capacity(self.edges.len());
        self.edges
            .iter()
            .all(|&(u, v)| u != v && seen.insert((u.min(v), u.max(v))))
    }

    /// Neighbours of `v` with multiplicity.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Number of edges with one endpoint in `a` and the other in `b`, with
    /// multiplicity. Each edge is counted at most once, so `a == b` gives the
    /// number of edges inside `a`.
    pub fn edge_count_between(&self, a: &[usize], b: &[usize]) -> Result<usize> {
        let in_a = self.indicator(a)?;
        let in_b = self.indicator(b)?;
        Ok(self
            .edges
            .iter()
            .filter(|&&(u, v)| (in_a[u] && in_b[v]) || (in_a[v] && in_b[u]))
            .count())
    }

    /// Number of edges inside `set`.
    pub fn edges_inside(&self, set: &[usize]) -> Result<usize> {
        self.edge_count_between(set, set)
    }

    fn indicator(&self, set: &[usize]) -> Result<Vec<bool>> {
        let mut mark = vec![false; self.n];
        for &v in set {
            if v >= self.n {
                return Err(Error::domain(format!("vertex {} outside 1..={}", v + 1, self.n)));
            }
            mark[v] = true;
        }
        Ok(mark)
    }

    /// Edge-list text: `n m` on the first line, then one 1-based `u v` per line.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(16 + 12 * self.edges.len());
        writeln!(out, "{} {}", self.n, self.edges.len()).unwrap();
        for &(u, v) in &self.edges {
            writeln!(out, "{} {}", u + 1, v + 1).unwrap();
        }
        out
    }

    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (hl, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing `n m` header".into(),
        })?;
        let (n, m) = parse_pair(header, hl + 1)?;
        let mut edges = Vec::with_capacity(m);
        for (i, line) in lines {
            let (u, v) = parse_pair(line, i + 1)?;
            if u == 0 || v == 0 || u > n || v > n {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("endpoint outside 1..={n}"),
                });
            }
            edges.push((u - 1, v - 1));
        }
        if edges.len() != m {
            return Err(Error::Parse {
                line: hl + 1,
                msg: format!("header declares {m} edges, found {}", edges.len()),
            });
        }
        Self::new(n, edges)
    }
}

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize)> {
    let bad = |msg: &str| Error::Parse {
        line: lineno,
        msg: msg.to_string(),
    };
    let mut it = line.split_whitespace();
    let a = it.next().ok_or_else(|| bad("expected two integers"))?;
    let b = it.next().ok_or_else(|| bad("expected two integers"))?;
    if it.next().is_some() {
        return Err(bad("trailing tokens"));
    }
    let a = a.parse().map_err(|_| bad("not an unsigned integer"))?;
    let b = b.parse().map_err(|_| bad("not an unsigned integer"))?;
    Ok((a, b))
}

/// `m = ⌈dn/2⌉`, the edge count for average degree `d`.
pub fn edges_for_degree(n: usize, d: f64) -> usize {
    (d * n as f64 / 2.0).ceil() as usize
}

fn unrank_pair(n: usize, rank: usize) -> (usize, usize) {
    // row u holds pairs (u, u+1..n); it starts at u(2n-u-1)/2
    let start = |u: usize| u * (2 * n - u - 1) / 2;
    let (mut lo, mut hi) = (0usize, n - 1);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if start(mid) <= rank {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, lo + 1 + rank - start(lo))
}

/// Uniform simple graph with exactly `m` edges, edges sorted.
pub fn sample_gnm_with<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<MultiGraph> {
    let pairs = n * n.saturating_sub(1) / 2;
    if m > pairs {
        return Err(Error::domain(format!("m={m} exceeds n(n-1)/2={pairs}")));
    }
    let mut edges: Vec<(usize, usize)> = index::sample(rng, pairs, m)
        .into_iter()
        .map(|r| unrank_pair(n, r))
        .collect();
    edges.sort_unstable();
    let mut g = MultiGraph::new(n, edges)?;
    g.simple = true;
    Ok(g)
}

pub fn sample_gnm(n: usize, m: usize, seed: u64) -> Result<MultiGraph> {
    sample_gnm_with(n, m, &mut rng::stream(seed, 0))
}

/// `m` ordered pairs drawn independently and uniformly from all `n²` pairs.
pub fn sample_gnm_multi_with<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<MultiGraph> {
    if n == 0 {
        return Err(Error::domain("G'(n,m) needs n >= 1"));
    }
    let edges = (0..m)
        .map(|_| (rng.random_range(0..n), rng.random_range(0..n)))
        .collect();
    MultiGraph::new(n, edges)
}

pub fn sample_gnm_multi(n: usize, m: usize, seed: u64) -> Result<MultiGraph> {
    sample_gnm_multi_with(n, m, &mut rng::stream(seed, 0))
}

/// Small named graphs used by tests, examples and the CLI.
pub mod families {
    use super::MultiGraph;

    pub fn edgeless(n: usize) -> MultiGraph {
        MultiGraph::new_simple(n, Vec::new()).unwrap()
    }

    pub fn complete(n: usize) -> MultiGraph {
        let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        MultiGraph::new_simple(n, edges).unwrap()
    }

    pub fn triangle() -> MultiGraph {
        complete(3)
    }

    pub fn path(n: usize) -> MultiGraph {
        let edges = (1..n).map(|v| (v - 1, v)).collect();
        MultiGraph::new_simple(n, edges).unwrap()
    }

    pub fn cycle(n: usize) -> MultiGraph {
        let mut edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        edges.push((n - 1, 0));
        MultiGraph::new_simple(n, edges).unwrap()
    }

    /// Complete multipartite graph; part `i` is a contiguous block of `sizes[i]` vertices.
    pub fn complete_multipartite(sizes: &[usize]) -> MultiGraph {
        let mut part = Vec::new();
        for (i, &s) in sizes.iter().enumerate() {
            part.extend(std::iter::repeat_n(i, s));
        }
        let n = part.len();
        let edges = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|&(u, v)| part[u] != part[v])
            .collect();
        MultiGraph::new_simple(n, edges).unwrap()
    }

    /// Vertex-disjoint union; the vertices of `b` follow those of `a`.
    pub fn disjoint_union(a: &MultiGraph, b: &MultiGraph) -> MultiGraph {
        let shift = a.n();
        let edges = a
            .edges()
            .iter()
            .copied()
            .chain(b.edges().iter().map(|&(u, v)| (u + shift, v + shift)))
            .collect();
        MultiGraph::new_simple(a.n() + b.n(), edges).unwrap()
    }

    /// Resolves the names accepted on the command line.
    pub fn by_name(name: &str) -> Option<MultiGraph> {
        let lower = name.to_ascii_lowercase();
        match lower.as_str() {
            "triangle" | "k3" => return Some(triangle()),
            "k222" => return Some(complete_multipartite(&[2, 2, 2])),
            "two-triangles" => return Some(disjoint_union(&triangle(), &triangle())),
            _ => {}
        }
        let num = |prefix: &str| lower.strip_prefix(prefix).and_then(|s| s.parse::<usize>().ok());
        if let Some(n) = num("path") {
            return (n >= 1).then(|| path(n));
        }
        if let Some(n) = num("cycle") {
            return (n >= 3).then(|| cycle(n));
        }
        if let Some(n) = num("edgeless") {
            return Some(edgeless(n));
        }
        if let Some(n) = num("k") {
            return Some(complete(n));
        }
        None
    }
}
