//! Stability, the whitening process and δ-frozen sets.
//!
//! Whitening starts from a coloring and repeatedly sends an unstable
//! non-joker vertex to the joker color 0. A vertex is stable when it is
//! colored and sees at least two neighbours (with multiplicity) of every
//! other color. Stability is monotone in the set of colored vertices, so the
//! fixed point does not depend on the order of the zeroing steps; the
//! worklist version and the sweep/schedule versions below must agree.

use std::collections::VecDeque;

use rand::seq::SliceRandom;

use crate::coloring::{assignment_text, enumerate_proper, parse_assignment, Coloring};
use crate::error::{Error, Result};
use crate::graph::MultiGraph;
use crate::rng;

/// A total map from vertices to `0..=k`, 0 being the joker color.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartialColoring {
    k: u32,
    values: Vec<u32>,
}

impl PartialColoring {
    pub fn new(k: u32, values: Vec<u32>) -> Result<Self> {
        if let Some(c) = values.iter().find(|&&c| c > k) {
            return Err(Error::domain(format!("value {c} outside 0..={k}")));
        }
        Ok(PartialColoring { k, values })
    }

    pub fn zeros(n: usize, k: u32) -> Self {
        PartialColoring { k, values: vec![0; n] }
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn value(&self, v: usize) -> u32 {
        self.values[v]
    }

    pub fn set(&mut self, v: usize, c: u32) {
        assert!(c <= self.k);
        self.values[v] = c;
    }

    pub fn zero_count(&self) -> usize {
        self.values.iter().filter(|&&c| c == 0).count()
    }

    /// Class sizes `ν_0..ν_k`.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut nu = vec![0; self.k as usize + 1];
        for &c in &self.values {
            nu[c as usize] += 1;
        }
        nu
    }

    /// Relabels non-joker colors; 0 stays 0.
    pub fn permute_colors(&self, perm: &[u32]) -> PartialColoring {
        PartialColoring {
            k: self.k,
            values: self
                .values
                .iter()
                .map(|&c| if c == 0 { 0 } else { perm[c as usize - 1] })
                .collect(),
        }
    }

    pub fn to_text(&self) -> String {
        assignment_text(self.values.len(), self.k, &self.values)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let (k, values) = parse_assignment(text)?;
        PartialColoring::new(k, values)
    }
}

impl From<&Coloring> for PartialColoring {
    fn from(c: &Coloring) -> Self {
        PartialColoring {
            k: c.k(),
            values: c.colors().to_vec(),
        }
    }
}

/// Per-vertex counts of neighbours of each value `0..=k`.
fn neighbor_counts(g: &MultiGraph, z: &PartialColoring) -> Vec<u32> {
    let width = z.k as usize + 1;
    let mut counts = vec![0u32; g.n() * width];
    for v in 0..g.n() {
        for &u in g.neighbors(v) {
            counts[v * width + z.values[u] as usize] += 1;
        }
    }
    counts
}

fn stable_from_counts(row: &[u32], own: u32) -> bool {
    own != 0
        && row
            .iter()
            .enumerate()
            .skip(1)
            .all(|(j, &cnt)| j as u32 == own || cnt >= 2)
}

pub fn is_stable(g: &MultiGraph, z: &PartialColoring, v: usize) -> bool {
    let own = z.values[v];
    if own == 0 {
        return false;
    }
    let mut row = vec![0u32; z.k as usize + 1];
    for &u in g.neighbors(v) {
        row[z.values[u] as usize] += 1;
    }
    stable_from_counts(&row, own)
}

fn check_sizes(g: &MultiGraph, n: usize) -> Result<()> {
    if g.n() != n {
        return Err(Error::domain(format!(
            "assignment has {n} entries, graph has {} vertices",
            g.n()
        )));
    }
    Ok(())
}

/// The whitening image of a coloring.
pub fn whiten(g: &MultiGraph, c: &Coloring) -> Result<PartialColoring> {
    whiten_partial(g, &PartialColoring::from(c))
}

/// Runs the whitening process from an arbitrary partial coloring, using a
/// worklist of vertices whose neighbourhood changed.
pub fn whiten_partial(g: &MultiGraph, start: &PartialColoring) -> Result<PartialColoring> {
    check_sizes(g, start.n())?;
    let mut z = start.clone();
    let width = z.k as usize + 1;
    let mut counts = neighbor_counts(g, &z);
    let mut queued = vec![true; g.n()];
    let mut queue: VecDeque<usize> = (0..g.n()).collect();
    while let Some(v) = queue.pop_front() {
        queued[v] = false;
        let own = z.values[v];
        if own == 0 || stable_from_counts(&counts[v * width..(v + 1) * width], own) {
            continue;
        }
        z.values[v] = 0;
        for &u in g.neighbors(v) {
            counts[u * width + own as usize] -= 1;
            counts[u * width] += 1;
            if !queued[u] && z.values[u] != 0 {
                queued[u] = true;
                queue.push_back(u);
            }
        }
    }
    Ok(z)
}

/// Reference implementation: full sweeps that recompute stability from
/// scratch until a sweep changes nothing. Quadratic; kept for differential tests.
pub fn whiten_reference(g: &MultiGraph, start: &PartialColoring) -> Result<PartialColoring> {
    check_sizes(g, start.n())?;
    let mut z = start.clone();
    loop {
        let unstable: Vec<usize> = (0..g.n())
            .filter(|&v| z.values[v] != 0 && !is_stable(g, &z, v))
            .collect();
        if unstable.is_empty() {
            return Ok(z);
        }
        // zero one at a time so the sweep is a legal sequence of single steps
        for v in unstable {
            if z.values[v] != 0 && !is_stable(g, &z, v) {
                z.values[v] = 0;
            }
        }
    }
}

/// Whitening with an explicit schedule: at every step `pick` receives the
/// currently unstable colored vertices (ascending) and returns the index of
/// the one to zero next.
pub fn whiten_by_schedule<F>(g: &MultiGraph, start: &PartialColoring, mut pick: F) -> Result<PartialColoring>
where
    F: FnMut(&[usize]) -> usize,
{
    check_sizes(g, start.n())?;
    let mut z = start.clone();
    loop {
        let unstable: Vec<usize> = (0..g.n())
            .filter(|&v| z.values[v] != 0 && !is_stable(g, &z, v))
            .collect();
        if unstable.is_empty() {
            return Ok(z);
        }
        let i = pick(&unstable);
        z.values[unstable[i]] = 0;
    }
}

/// Whether `f` is δ-frozen in `c`: every other proper coloring that changes
/// some vertex of `f` changes at least `δn` vertices of `f`.
///
/// Compares against every proper coloring, so the cost is exponential.
/// `budget` bounds the number of colorings visited; running out is an error,
/// never a `false`.
pub fn is_delta_frozen(g: &MultiGraph, c: &Coloring, f: &[usize], delta: f64, budget: Option<u64>) -> Result<bool> {
    check_sizes(g, c.n())?;
    if let Some(&v) = f.iter().find(|&&v| v >= g.n()) {
        return Err(Error::domain(format!("vertex {} outside the graph", v + 1)));
    }
    if f.is_empty() {
        return Ok(true);
    }
    let need = delta * g.n() as f64;
    let mut it = enumerate_proper(g, c.k());
    let mut visited = 0u64;
    while let Some(tau) = it.next_ref() {
        visited += 1;
        if budget.is_some_and(|b| visited > b) {
            return Err(Error::BudgetExceeded {
                what: "coloring enumeration",
                budget: budget.unwrap(),
            });
        }
        let changed = f.iter().filter(|&&v| tau[v] != c.color(v)).count();
        if changed > 0 && (changed as f64) < need {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of the sampling variant of the frozen check.
#[derive(Debug, Clone, PartialEq)]
pub enum FrozenVerdict {
    /// A proper coloring that changes `f` on fewer than `δn` vertices.
    Falsified(Coloring),
    /// No counterexample among the sampled colorings. This is not a proof.
    NotFalsified { sampled: usize },
}

/// Looks for counterexamples among up to `samples` proper colorings found by
/// backtracking over a randomly relabelled vertex and color order.
pub fn delta_frozen_sampled(
    g: &MultiGraph,
    c: &Coloring,
    f: &[usize],
    delta: f64,
    samples: usize,
    seed: u64,
) -> Result<FrozenVerdict> {
    check_sizes(g, c.n())?;
    let n = g.n();
    let mut r = rng::stream(seed, 0);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut r);
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut palette: Vec<u32> = (1..=c.k()).collect();
    palette.shuffle(&mut r);
    let relabelled = MultiGraph::new(n, g.edges().iter().map(|&(u, v)| (pos[u], pos[v])).collect())?;
    let need = delta * n as f64;
    let mut it = enumerate_proper(&relabelled, c.k());
    let mut sampled = 0;
    while sampled < samples {
        let Some(t) = it.next_ref() else { break };
        sampled += 1;
        let tau: Vec<u32> = (0..n).map(|v| palette[t[pos[v]] as usize - 1]).collect();
        let changed = f.iter().filter(|&&v| tau[v] != c.color(v)).count();
        if changed > 0 && (changed as f64) < need {
            return Ok(FrozenVerdict::Falsified(Coloring::new(c.k(), tau)?));
        }
    }
    Ok(FrozenVerdict::NotFalsified { sampled })
}
