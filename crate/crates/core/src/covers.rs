//! Cover axioms, the valid-cover census and the cover profile predicate.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::coloring::{enumerate_proper, Coloring};
use crate::error::{Error, Result};
use crate::graph::MultiGraph;
use crate::whitening::{whiten, PartialColoring};

/// The first violated cover axiom, with its witness (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "axiom")]
pub enum CoverViolation {
    /// Edge `index` joins two vertices of the same non-joker color.
    CV1 { index: usize, u: usize, v: usize },
    /// Colored vertex that is not stable.
    CV2 { vertex: usize },
    /// Joker vertex without a missing color `i` and a second color `j` seen at most once.
    CV3 { vertex: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverCheck {
    pub violation: Option<CoverViolation>,
}

impl CoverCheck {
    pub fn is_cover(&self) -> bool {
        self.violation.is_none()
    }
}

pub fn check_cover(g: &MultiGraph, z: &PartialColoring) -> Result<CoverCheck> {
    if z.n() != g.n() {
        return Err(Error::domain("assignment and graph sizes differ"));
    }
    if z.k() < 2 {
        return Err(Error::domain("covers need k >= 2"));
    }
    let vals = z.values();
    for (index, &(u, v)) in g.edges().iter().enumerate() {
        if vals[u] != 0 && vals[u] == vals[v] {
            return Ok(CoverCheck {
                violation: Some(CoverViolation::CV1 { index, u, v }),
            });
        }
    }
    let width = z.k() as usize + 1;
    let mut row = vec![0u32; width];
    let mut cv3 = None;
    for v in 0..g.n() {
        row.iter_mut().for_each(|x| *x = 0);
        for &u in g.neighbors(v) {
            row[vals[u] as usize] += 1;
        }
        let own = vals[v];
        if own != 0 {
            if row.iter().enumerate().skip(1).any(|(j, &c)| j as u32 != own && c < 2) {
                return Ok(CoverCheck {
                    violation: Some(CoverViolation::CV2 { vertex: v }),
                });
            }
        } else if cv3.is_none() && !joker_ok(&row) {
            cv3 = Some(v);
        }
    }
    Ok(CoverCheck {
        violation: cv3.map(|vertex| CoverViolation::CV3 { vertex }),
    })
}

/// Some color `i` is absent around the vertex and another color `j != i` occurs at most once.
fn joker_ok(row: &[u32]) -> bool {
    let absent = row[1..].iter().filter(|&&c| c == 0).count();
    let sparse = row[1..].iter().filter(|&&c| c <= 1).count();
    absent >= 1 && sparse >= 2
}

pub fn is_cover(g: &MultiGraph, z: &PartialColoring) -> Result<bool> {
    Ok(check_cover(g, z)?.is_cover())
}

/// Proper colorings grouped by their whitening image. Keys are exactly the
/// valid covers, in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverCensus {
    pub n: usize,
    pub k: u32,
    pub clusters: BTreeMap<PartialColoring, Vec<Coloring>>,
}

impl CoverCensus {
    pub fn cover_count(&self) -> usize {
        self.clusters.len()
    }

    pub fn coloring_count(&self) -> usize {
        self.clusters.values().map(Vec::len).sum()
    }

    /// Cluster sizes in key order.
    pub fn cluster_sizes(&self) -> Vec<usize> {
        self.clusters.values().map(Vec::len).collect()
    }

    pub fn export(&self, with_colorings: bool) -> CensusExport {
        CensusExport {
            n: self.n,
            k: self.k,
            clusters: self
                .clusters
                .iter()
                .map(|(z, cs)| ClusterExport {
                    cover: z.values().to_vec(),
                    cluster_size: cs.len(),
                    colorings: with_colorings.then(|| cs.iter().map(|c| c.colors().to_vec()).collect()),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CensusExport {
    pub n: usize,
    pub k: u32,
    pub clusters: Vec<ClusterExport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusterExport {
    pub cover: Vec<u32>,
    pub cluster_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub colorings: Option<Vec<Vec<u32>>>,
}

/// Enumerates all proper colorings (at most `budget` of them) and groups them
/// by whitening image. Whitening runs in parallel; the result is ordered.
pub fn valid_cover_census(g: &MultiGraph, k: u32, budget: Option<u64>) -> Result<CoverCensus> {
    let mut colorings = Vec::new();
    for c in enumerate_proper(g, k) {
        if budget.is_some_and(|b| colorings.len() as u64 >= b) {
            return Err(Error::BudgetExceeded {
                what: "coloring enumeration",
                budget: budget.unwrap(),
            });
        }
        colorings.push(c);
    }
    let covers: Vec<PartialColoring> = colorings.par_iter().map(|c| whiten(g, c)).collect::<Result<_>>()?;
    let mut clusters: BTreeMap<PartialColoring, Vec<Coloring>> = BTreeMap::new();
    for (z, c) in covers.into_iter().zip(colorings) {
        clusters.entry(z).or_default().push(c);
    }
    Ok(CoverCensus { n: g.n(), k, clusters })
}

/// Minimum Hamming distance between colorings in different clusters; `None`
/// when there are fewer than two clusters.
pub fn cluster_separation(census: &CoverCensus) -> Option<usize> {
    let groups: Vec<&Vec<Coloring>> = census.clusters.values().collect();
    if groups.len() < 2 {
        return None;
    }
    let mut best = usize::MAX;
    for (i, a) in groups.iter().enumerate() {
        for b in &groups[i + 1..] {
            for x in a.iter() {
                for y in b.iter() {
                    best = best.min(x.distance(y));
                }
            }
        }
    }
    Some(best)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverProfileReport {
    pub n: usize,
    pub k: u32,
    pub zeros: usize,
    /// `n k^(-2/3)`
    pub zero_limit: f64,
    pub z1: bool,
    /// `max_i |ν_i k/n − 1|` over the colored classes.
    pub max_ratio_deviation: f64,
    pub balance_slack: f64,
    pub z2: bool,
    pub deviations: Vec<f64>,
    /// `n / (k ln³ k)`
    pub deviation_threshold: f64,
    pub violations: usize,
    /// `ln⁹ k`
    pub violation_limit: f64,
    pub z3: bool,
}

impl CoverProfileReport {
    pub fn all_pass(&self) -> bool {
        self.z1 && self.z2 && self.z3
    }
}

/// Default relative slack for the class-size condition at desk scale.
pub const DEFAULT_BALANCE_SLACK: f64 = 0.5;

/// Evaluates the three profile conditions a valid cover satisfies w.h.p.:
/// few jokers, every colored class near `n/k`, few classes off by more than
/// `n/(k ln³ k)`.
pub fn check_cover_profile(z: &PartialColoring, balance_slack: f64) -> Result<CoverProfileReport> {
    profile_from_sizes(&z.class_sizes(), balance_slack)
}

/// Same, from class sizes `ν_0..ν_k`.
pub fn profile_from_sizes(nu: &[usize], balance_slack: f64) -> Result<CoverProfileReport> {
    if nu.len() < 3 {
        return Err(Error::domain("cover profile needs k >= 2"));
    }
    let k = (nu.len() - 1) as u32;
    let kf = k as f64;
    let n: usize = nu.iter().sum();
    let nf = n as f64;
    let zeros = nu[0];
    let zero_limit = nf * kf.powf(-2.0 / 3.0);
    let mean = nf / kf;
    let max_ratio_deviation = nu[1..]
        .iter()
        .map(|&x| if n == 0 { 0.0 } else { (x as f64 * kf / nf - 1.0).abs() })
        .fold(0.0, f64::max);
    let deviations: Vec<f64> = nu[1..].iter().map(|&x| (x as f64 - mean).abs()).collect();
    let deviation_threshold = nf / (kf * kf.ln().powi(3));
    let violations = deviations.iter().filter(|&&d| d > deviation_threshold).count();
    let violation_limit = kf.ln().powi(9);
    Ok(CoverProfileReport {
        n,
        k,
        zeros,
        zero_limit,
        z1: zeros as f64 <= zero_limit,
        max_ratio_deviation,
        balance_slack,
        z2: max_ratio_deviation <= balance_slack,
        deviations,
        deviation_threshold,
        violations,
        violation_limit,
        z3: violations as f64 <= violation_limit,
    })
}
