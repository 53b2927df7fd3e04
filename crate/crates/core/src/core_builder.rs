//! The peeling construction that exhibits a frozen core of a coloring, and
//! the small-set expansion predicate used to bound the peeled part.
//!
//! With classes `V_i = σ⁻¹(i)` and a threshold `ℓ`:
//!
//! 1. `W_i` holds the vertices of `V_i` with fewer than `3ℓ` neighbours in
//!    some other class; `W` is their union.
//! 2. `U` holds the vertices with more than `ℓ` neighbours in some `W_j`.
//! 3. `Y` starts as `U` and absorbs any vertex with at least `ℓ` neighbours
//!    in `Y` until none is left.
//!
//! The core is `V ∖ (W ∪ Y)`. Comparisons are strict exactly where stated
//! and a real `ℓ` is compared against integer counts without rounding.

use std::collections::VecDeque;

use serde::Serialize;

use crate::coloring::{is_proper, Coloring};
use crate::error::{Error, Result};
use crate::graph::MultiGraph;

#[derive(Debug, Clone, PartialEq)]
pub struct CoreDecomposition {
    pub k: u32,
    pub ell: f64,
    /// `W_1..W_k`, each sorted.
    pub w_per_class: Vec<Vec<usize>>,
    pub w: Vec<usize>,
    pub u: Vec<usize>,
    pub y: Vec<usize>,
    pub core: Vec<usize>,
}

impl CoreDecomposition {
    /// Whether the core is guaranteed to survive whitening. A core vertex
    /// keeps at least `ℓ` in-core neighbours of every other color, which
    /// implies stability only once `ℓ ≥ 2`.
    pub fn whitening_guaranteed(&self) -> bool {
        self.ell >= 2.0
    }

    /// JSON view with 1-based sorted vertex lists.
    pub fn export(&self) -> CoreExport {
        let one = |s: &[usize]| s.iter().map(|v| v + 1).collect::<Vec<_>>();
        CoreExport {
            k: self.k,
            ell: self.ell,
            w_per_class: self.w_per_class.iter().map(|s| one(s)).collect(),
            w: one(&self.w),
            u: one(&self.u),
            y: one(&self.y),
            core: one(&self.core),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CoreExport {
    pub k: u32,
    pub ell: f64,
    #[serde(rename = "W_per_class")]
    pub w_per_class: Vec<Vec<usize>>,
    #[serde(rename = "W")]
    pub w: Vec<usize>,
    #[serde(rename = "U")]
    pub u: Vec<usize>,
    #[serde(rename = "Y")]
    pub y: Vec<usize>,
    pub core: Vec<usize>,
}

/// `ℓ = max(e⁻⁷ ln k, floor)`. The unfloored value is below 3 for every
/// `k` that can be handled at desk scale.
pub fn default_ell(k: u32, floor: f64) -> f64 {
    ((-7.0f64).exp() * (k as f64).ln()).max(floor)
}

/// Neighbour counts per color: `row[v*(k+1) + j]` is the number of
/// neighbours of `v` in `V_j`.
fn color_counts(g: &MultiGraph, colors: &[u32], k: usize) -> Vec<u32> {
    let mut counts = vec![0u32; g.n() * (k + 1)];
    for v in 0..g.n() {
        for &u in g.neighbors(v) {
            if u != v {
                counts[v * (k + 1) + colors[u] as usize] += 1;
            }
        }
    }
    counts
}

pub fn build_core(g: &MultiGraph, c: &Coloring, ell: f64) -> Result<CoreDecomposition> {
    if !(ell > 0.0) || !ell.is_finite() {
        return Err(Error::domain("ell must be a positive real"));
    }
    if !is_proper(g, c)? {
        return Err(Error::domain("core construction needs a proper coloring"));
    }
    let n = g.n();
    let k = c.k() as usize;
    let colors = c.colors();
    let width = k + 1;
    let counts = color_counts(g, colors, k);

    let in_w: Vec<bool> = (0..n)
        .map(|v| {
            let own = colors[v] as usize;
            (1..=k).any(|j| j != own && (counts[v * width + j] as f64) < 3.0 * ell)
        })
        .collect();

    let mut w_counts = vec![0u32; n * width];
    for v in 0..n {
        for &u in g.neighbors(v) {
            if in_w[u] && u != v {
                w_counts[v * width + colors[u] as usize] += 1;
            }
        }
    }
    let in_u: Vec<bool> = (0..n)
        .map(|v| (1..=k).any(|j| w_counts[v * width + j] as f64 > ell))
        .collect();

    let in_y = close_under_threshold(g, &in_u, ell);

    let collect = |mask: &[bool]| (0..n).filter(|&v| mask[v]).collect::<Vec<_>>();
    let mut w_per_class = vec![Vec::new(); k];
    for v in 0..n {
        if in_w[v] {
            w_per_class[colors[v] as usize - 1].push(v);
        }
    }
    let core = (0..n).filter(|&v| !in_w[v] && !in_y[v]).collect();
    Ok(CoreDecomposition {
        k: c.k(),
        ell,
        w_per_class,
        w: collect(&in_w),
        u: collect(&in_u),
        y: collect(&in_y),
        core,
    })
}

/// Grows `seed` by repeatedly adding any vertex with at least `ell`
/// neighbours in the set. The closure is unique, so a worklist suffices.
pub fn close_under_threshold(g: &MultiGraph, seed: &[bool], ell: f64) -> Vec<bool> {
    let n = g.n();
    let mut inside = seed.to_vec();
    let mut hits = vec![0u32; n];
    let mut queue: VecDeque<usize> = VecDeque::new();
    queue.extend((0..n).filter(|&v| inside[v]));
    while let Some(v) = queue.pop_front() {
        for &u in g.neighbors(v) {
            if inside[u] {
                continue;
            }
            hits[u] += 1;
            if hits[u] as f64 >= ell {
                inside[u] = true;
                queue.push_back(u);
            }
        }
    }
    inside
}

/// Every core vertex has at least `ℓ` neighbours of each other color that
/// are themselves in the core.
pub fn core_freeze_check(g: &MultiGraph, c: &Coloring, d: &CoreDecomposition) -> bool {
    let k = c.k() as usize;
    let mut in_core = vec![false; g.n()];
    for &v in &d.core {
        in_core[v] = true;
    }
    let mut row = vec![0u32; k + 1];
    d.core.iter().all(|&v| {
        row.iter_mut().for_each(|x| *x = 0);
        for &u in g.neighbors(v) {
            if in_core[u] && u != v {
                row[c.color(u) as usize] += 1;
            }
        }
        let own = c.color(v) as usize;
        (1..=k).all(|j| j == own || row[j] as f64 >= d.ell)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExpansionMethod {
    /// Exhaustive branch-and-bound over all sets up to the size bound.
    Exhaustive,
    /// The `ℓ/2`-peeling of the whole graph is empty, which rules out a
    /// violating set of any size.
    PeelingCertificate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExpansionOutcome {
    /// Lexicographically least set `Y` (sorted, 0-based) with
    /// `|Y| ≤ max_size` and `e(Y) ≥ (ℓ/2)|Y|`, if any.
    pub violation: Option<Vec<usize>>,
    pub method: ExpansionMethod,
    pub exact: bool,
    pub nodes: u64,
}

/// Vertices left after repeatedly deleting those with fewer than `ℓ/2`
/// remaining incident edge ends (a loop counts two).
pub fn peel_residue(g: &MultiGraph, ell: f64) -> Vec<usize> {
    let n = g.n();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut alive = vec![true; n];
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| (deg[v] as f64) < ell / 2.0).collect();
    let mut queued = vec![false; n];
    for &v in &queue {
        queued[v] = true;
    }
    while let Some(v) = queue.pop_front() {
        alive[v] = false;
        for &u in g.neighbors(v) {
            if u != v && alive[u] {
                deg[u] -= 1;
                if !queued[u] && (deg[u] as f64) < ell / 2.0 {
                    queued[u] = true;
                    queue.push_back(u);
                }
            }
        }
    }
    (0..n).filter(|&v| alive[v]).collect()
}

/// Searches for a set of at most `max_size` vertices spanning at least
/// `(ℓ/2)·|Y|` edges. `budget` caps the number of search nodes.
pub fn expansion_violation(g: &MultiGraph, ell: f64, max_size: usize, budget: Option<u64>) -> Result<ExpansionOutcome> {
    if !(ell > 0.0) {
        return Err(Error::domain("ell must be positive"));
    }
    let residue = peel_residue(g, ell);
    if residue.is_empty() || max_size == 0 {
        return Ok(ExpansionOutcome {
            violation: None,
            method: ExpansionMethod::PeelingCertificate,
            exact: true,
            nodes: 0,
        });
    }
    let n = g.n();
    let mut loops = vec![0usize; n];
    for &(u, v) in g.edges() {
        if u == v {
            loops[u] += 1;
        }
    }
    let mut search = Search {
        g,
        half_ell: ell / 2.0,
        max_size,
        budget,
        nodes: 0,
        loops,
        in_set: vec![false; n],
        set: Vec::new(),
        to_set: vec![0; n],
    };
    match search.dfs(0, 0) {
        Ok(found) => Ok(ExpansionOutcome {
            violation: found,
            method: ExpansionMethod::Exhaustive,
            exact: true,
            nodes: search.nodes,
        }),
        Err(()) => Err(Error::ExpansionBudget {
            budget: budget.unwrap_or(0),
            peel_remaining: residue.len(),
        }),
    }
}

struct Search<'g> {
    g: &'g MultiGraph,
    half_ell: f64,
    max_size: usize,
    budget: Option<u64>,
    nodes: u64,
    loops: Vec<usize>,
    in_set: Vec<bool>,
    set: Vec<usize>,
    /// `to_set[v]` = edges between `v` and the current set (loops excluded).
    to_set: Vec<usize>,
}

impl Search<'_> {
    /// Preorder over sorted sets, which is lexicographic order. `edges` is
    /// `e(set)`; candidates are the vertices `>= from`.
    fn dfs(&mut self, from: usize, edges: usize) -> std::result::Result<Option<Vec<usize>>, ()> {
        let n = self.g.n();
        for v in from..n {
            self.nodes += 1;
            if self.budget.is_some_and(|b| self.nodes > b) {
                return Err(());
            }
            if !self.could_violate(v, edges) {
                continue;
            }
            let e = edges + self.to_set[v] + self.loops[v];
            self.push(v);
            if e as f64 >= self.half_ell * self.set.len() as f64 {
                let found = self.set.clone();
                self.pop(v);
                return Ok(Some(found));
            }
            if self.set.len() < self.max_size {
                if let Some(found) = self.dfs(v + 1, e)? {
                    self.pop(v);
                    return Ok(Some(found));
                }
            }
            self.pop(v);
        }
        Ok(None)
    }

    /// Bound for every extension of `set ∪ {first}` by vertices `> first`:
    /// each added vertex contributes its edges to the current set, its
    /// loops, and at most half of its edges towards other candidates.
    fn could_violate(&self, first: usize, edges: usize) -> bool {
        let n = self.g.n();
        let room = self.max_size - self.set.len();
        let gain = |v: usize| -> f64 {
            let towards = self
                .g
                .neighbors(v)
                .iter()
                .filter(|&&u| u != v && u >= first && !self.in_set[u])
                .count();
            (self.to_set[v] + self.loops[v]) as f64 + towards as f64 / 2.0
        };
        let base = edges as f64 + gain(first);
        let mut extra: Vec<f64> = (first + 1..n).map(gain).collect();
        extra.sort_by(|a, b| b.total_cmp(a));
        let mut total = base;
        if total >= self.half_ell * (self.set.len() + 1) as f64 {
            return true;
        }
        for (t, x) in extra.iter().take(room - 1).enumerate() {
            total += x;
            if total >= self.half_ell * (self.set.len() + 2 + t) as f64 {
                return true;
            }
        }
        false
    }

    fn push(&mut self, v: usize) {
        self.in_set[v] = true;
        self.set.push(v);
        for &u in self.g.neighbors(v) {
            if u != v {
                self.to_set[u] += 1;
            }
        }
    }

    fn pop(&mut self, v: usize) {
        self.in_set[v] = false;
        self.set.pop();
        for &u in self.g.neighbors(v) {
            if u != v {
                self.to_set[u] -= 1;
            }
        }
    }
}
