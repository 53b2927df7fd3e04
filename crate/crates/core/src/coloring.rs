//! Proper k-colorings: validity, exhaustive enumeration, class profiles.

use std::fmt::Write as _;

use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::MultiGraph;

/// A total map from vertices to colors `1..=k`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Coloring {
    k: u32,
    colors: Vec<u32>,
}

impl Coloring {
    pub fn new(k: u32, colors: Vec<u32>) -> Result<Self> {
        if k == 0 {
            return Err(Error::domain("k must be positive"));
        }
        if let Some(c) = colors.iter().find(|&&c| c == 0 || c > k) {
            return Err(Error::domain(format!("color {c} outside 1..={k}")));
        }
        Ok(Coloring { k, colors })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n(&self) -> usize {
        self.colors.len()
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn color(&self, v: usize) -> u32 {
        self.colors[v]
    }

    /// Class sizes `ν_1..ν_k`.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut nu = vec![0; self.k as usize];
        for &c in &self.colors {
            nu[c as usize - 1] += 1;
        }
        nu
    }

    /// Hamming distance.
    pub fn distance(&self, other: &Coloring) -> usize {
        self.colors.iter().zip(&other.colors).filter(|(a, b)| a != b).count()
    }

    /// Relabels colors: `perm[c-1]` is the new color of old color `c`.
    pub fn permute_colors(&self, perm: &[u32]) -> Coloring {
        Coloring {
            k: self.k,
            colors: self.colors.iter().map(|&c| perm[c as usize - 1]).collect(),
        }
    }

    /// `n k` followed by the color list.
    pub fn to_text(&self) -> String {
        assignment_text(self.colors.len(), self.k, &self.colors)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let (k, colors) = parse_assignment(text)?;
        Coloring::new(k, colors)
    }
}

pub(crate) fn assignment_text(n: usize, k: u32, values: &[u32]) -> String {
    let mut out = format!("{n} {k}\n");
    for (i, c) in values.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        write!(out, "{c}").unwrap();
    }
    out.push('\n');
    out
}

pub(crate) fn parse_assignment(text: &str) -> Result<(u32, Vec<u32>)> {
    let mut tokens = text.split_whitespace();
    let mut next = |what: &str| -> Result<u64> {
        tokens
            .next()
            .ok_or_else(|| Error::Parse {
                line: 1,
                msg: format!("missing {what}"),
            })?
            .parse()
            .map_err(|_| Error::Parse {
                line: 1,
                msg: format!("{what} is not an unsigned integer"),
            })
    };
    let n = next("n")? as usize;
    let k = next("k")? as u32;
    let values = (0..n)
        .map(|_| next("color").map(|c| c as u32))
        .collect::<Result<Vec<_>>>()?;
    if tokens.next().is_some() {
        return Err(Error::Parse {
            line: 1,
            msg: format!("more than {n} values"),
        });
    }
    Ok((k, values))
}

pub fn is_proper(g: &MultiGraph, c: &Coloring) -> Result<bool> {
    if c.n() != g.n() {
        return Err(Error::domain(format!(
            "coloring has {} entries, graph has {} vertices",
            c.n(),
            g.n()
        )));
    }
    Ok(g.edges().iter().all(|&(u, v)| c.colors[u] != c.colors[v]))
}

/// Lexicographic stream of all proper `k`-colorings.
///
/// Backtracking in vertex order with forward checking: assigning a color to
/// `v` forbids it at later neighbours, and a branch dies as soon as some
/// later vertex has every color forbidden. Colors are tried in increasing
/// order, so the stream is sorted by assignment vector.
pub struct ProperColorings<'g> {
    g: &'g MultiGraph,
    k: usize,
    colors: Vec<u32>,
    next_color: Vec<u32>,
    forbid: Vec<u32>,
    blocked: Vec<usize>,
    depth: usize,
    state: EnumState,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum EnumState {
    Fresh,
    Running,
    Done,
}

pub fn enumerate_proper(g: &MultiGraph, k: u32) -> ProperColorings<'_> {
    let n = g.n();
    let has_loop = g.edges().iter().any(|&(u, v)| u == v);
    ProperColorings {
        g,
        k: k as usize,
        colors: vec![0; n],
        next_color: vec![1; n],
        forbid: vec![0; n * k as usize],
        blocked: vec![0; n],
        depth: 0,
        state: if has_loop || k == 0 {
            EnumState::Done
        } else {
            EnumState::Fresh
        },
    }
}

impl<'g> ProperColorings<'g> {
    /// Borrowing variant of `next`, avoids one allocation per coloring.
    pub fn next_ref(&mut self) -> Option<&[u32]> {
        let n = self.g.n();
        match self.state {
            EnumState::Done => return None,
            EnumState::Fresh => {
                self.state = EnumState::Running;
                if n == 0 {
                    self.state = EnumState::Done;
                    return Some(&self.colors);
                }
            }
            EnumState::Running => {
                // resume from the last leaf: retract the final vertex
                self.depth = n - 1;
                self.unassign(n - 1);
            }
        }
        loop {
            let v = self.depth;
            let mut placed = false;
            while self.next_color[v] as usize <= self.k {
                let c = self.next_color[v];
                self.next_color[v] += 1;
                if self.forbid[v * self.k + c as usize - 1] > 0 {
                    continue;
                }
                if self.assign(v, c) {
                    placed = true;
                    break;
                }
                self.unassign(v);
            }
            if placed {
                if v + 1 == n {
                    return Some(&self.colors);
                }
                self.depth = v + 1;
                self.next_color[v + 1] = 1;
            } else {
                self.next_color[v] = 1;
                if v == 0 {
                    self.state = EnumState::Done;
                    return None;
                }
                self.depth = v - 1;
                self.unassign(v - 1);
            }
        }
    }

    /// Colors `v` and propagates; false on a domain wipe-out.
    fn assign(&mut self, v: usize, c: u32) -> bool {
        self.colors[v] = c;
        let mut ok = true;
        for &u in self.g.neighbors(v) {
            if u > v {
                let slot = u * self.k + c as usize - 1;
                self.forbid[slot] += 1;
                if self.forbid[slot] == 1 {
                    self.blocked[u] += 1;
                    if self.blocked[u] == self.k {
                        ok = false;
                    }
                }
            }
        }
        ok
    }

    fn unassign(&mut self, v: usize) {
        let c = self.colors[v];
        if c == 0 {
            return;
        }
        for &u in self.g.neighbors(v) {
            if u > v {
                let slot = u * self.k + c as usize - 1;
                self.forbid[slot] -= 1;
                if self.forbid[slot] == 0 {
                    self.blocked[u] -= 1;
                }
            }
        }
        self.colors[v] = 0;
    }
}

impl Iterator for ProperColorings<'_> {
    type Item = Coloring;

    fn next(&mut self) -> Option<Coloring> {
        let k = self.k as u32;
        self.next_ref().map(|c| Coloring { k, colors: c.to_vec() })
    }
}

/// Number of proper `k`-colorings, optionally restricted to class sizes `profile`.
pub fn count_proper(g: &MultiGraph, k: u32, profile: Option<&[usize]>) -> Result<u64> {
    if let Some(p) = profile {
        if p.len() != k as usize {
            return Err(Error::domain("profile length must equal k"));
        }
        if p.iter().sum::<usize>() != g.n() {
            return Ok(0);
        }
    }
    let mut it = enumerate_proper(g, k);
    let mut count = 0u64;
    let mut sizes = vec![0usize; k as usize];
    while let Some(c) = it.next_ref() {
        match profile {
            None => count += 1,
            Some(p) => {
                sizes.iter_mut().for_each(|s| *s = 0);
                for &x in c {
                    sizes[x as usize - 1] += 1;
                }
                if sizes == p {
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}

/// Class sizes and their fractions. `nu.len()` is `k` for colorings and
/// `k + 1` (index 0 = joker) for partial colorings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassProfile {
    pub nu: Vec<usize>,
    pub alpha: Vec<f64>,
}

impl ClassProfile {
    pub fn from_sizes(nu: Vec<usize>) -> Self {
        let n: usize = nu.iter().sum();
        let alpha = nu
            .iter()
            .map(|&x| if n == 0 { 0.0 } else { x as f64 / n as f64 })
            .collect();
        ClassProfile { nu, alpha }
    }

    pub fn of(c: &Coloring) -> Self {
        Self::from_sizes(c.class_sizes())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BalanceReport {
    pub n: usize,
    pub k: u32,
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
    /// `n / (k ln⁴ k)`
    pub deviation_threshold: f64,
    pub violations: usize,
    /// `ln⁸ k`
    pub violation_limit: f64,
    pub pass: bool,
    /// Caller-supplied relative slack for `|ν_i − n/k| ≤ slack·n/k`, if any.
    pub slack: Option<f64>,
    pub within_slack: Option<bool>,
}

/// Class-balance statistics of a coloring against `n/k`.
pub fn balance_check(c: &Coloring, slack: Option<f64>) -> Result<BalanceReport> {
    balance_check_sizes(&c.class_sizes(), slack)
}

pub fn balance_check_sizes(nu: &[usize], slack: Option<f64>) -> Result<BalanceReport> {
    let k = nu.len() as u32;
    if k < 2 {
        return Err(Error::domain("balance check needs k >= 2"));
    }
    let n: usize = nu.iter().sum();
    let kf = k as f64;
    let mean = n as f64 / kf;
    let deviations: Vec<f64> = nu.iter().map(|&x| (x as f64 - mean).abs()).collect();
    let max_deviation = deviations.iter().cloned().fold(0.0, f64::max);
    let deviation_threshold = n as f64 / (kf * kf.ln().powi(4));
    let violations = deviations.iter().filter(|&&d| d > deviation_threshold).count();
    let violation_limit = kf.ln().powi(8);
    Ok(BalanceReport {
        n,
        k,
        max_deviation,
        deviation_threshold,
        violations,
        violation_limit,
        pass: violations as f64 <= violation_limit,
        slack,
        within_slack: slack.map(|s| max_deviation <= s * mean),
        deviations,
    })
}

/// Planted model: a uniformly shuffled balanced coloring (class sizes differ
/// by at most one), then `m` distinct edges drawn uniformly among the pairs
/// it leaves bichromatic. The coloring is proper by construction.
pub fn sample_planted_with<R: Rng + ?Sized>(n: usize, k: u32, m: usize, rng: &mut R) -> Result<(MultiGraph, Coloring)> {
    if k == 0 {
        return Err(Error::domain("need k >= 1"));
    }
    let mut colors: Vec<u32> = (0..n).map(|v| (v % k as usize) as u32 + 1).collect();
    colors.shuffle(rng);
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
        .filter(|&(u, v)| colors[u] != colors[v])
        .collect();
    if m > pairs.len() {
        return Err(Error::domain(format!(
            "m={m} exceeds the {} bichromatic pairs of the planted coloring",
            pairs.len()
        )));
    }
    let mut edges: Vec<(usize, usize)> = index::sample(rng, pairs.len(), m)
        .into_iter()
        .map(|i| pairs[i])
        .collect();
    edges.sort_unstable();
    Ok((MultiGraph::new_simple(n, edges)?, Coloring::new(k, colors)?))
}
