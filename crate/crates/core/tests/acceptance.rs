//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runs without the libtest harness so the lines are
//! always printed.

use std::process::ExitCode;
use std::time::Instant;

use nalgebra::DVector;
use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::Rng;

use colorcover::coloring::{count_proper, enumerate_proper, Coloring};
use colorcover::core_builder::{build_core, core_freeze_check, expansion_violation};
use colorcover::covers::{cluster_separation, is_cover, valid_cover_census};
use colorcover::graph::{edges_for_degree, families, sample_gnm_with, MultiGraph};
use colorcover::moments::ballsbins::compositions;
use colorcover::moments::*;
use colorcover::rng::stream;
use colorcover::whitening::{is_delta_frozen, whiten, whiten_by_schedule, PartialColoring};
use colorcover::Error;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

/// All `(n²)^m` ordered edge tuples on `n` vertices.
fn all_edge_tuples(n: usize, m: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).collect();
    let mut out = vec![Vec::new()];
    for _ in 0..m {
        out = out
            .into_iter()
            .flat_map(|t| {
                pairs.iter().map(move |&p| {
                    let mut t = t.clone();
                    t.push(p);
                    t
                })
            })
            .collect();
    }
    out
}

fn multinomial(n: u64, parts: &[usize]) -> u64 {
    let fact = |x: u64| (1..=x).product::<u64>();
    fact(n) / parts.iter().map(|&p| fact(p as u64)).product::<u64>()
}

fn c1_exact_moment() -> Verdict {
    let n = 3usize;
    let mut checked = 0;
    let mut worst = 0.0f64;
    for m in 1..=2usize {
        let tuples = all_edge_tuples(n, m);
        let graphs: Vec<MultiGraph> = tuples.into_iter().map(|t| MultiGraph::new(n, t).unwrap()).collect();
        for k in 2..=3u32 {
            for nu in compositions(n as u64, k as usize) {
                let nu: Vec<usize> = nu.into_iter().map(|x| x as usize).collect();
                let total: u64 = graphs.iter().map(|g| count_proper(g, k, Some(&nu)).unwrap()).sum();
                let avg = Ratio::new(total as i64, graphs.len() as i64);
                let same: Ratio<i64> = nu.iter().map(|&v| Ratio::new((v * v) as i64, (n * n) as i64)).sum();
                let q = Ratio::from_integer(1) - same;
                let exact = Ratio::from_integer(multinomial(n as u64, &nu) as i64) * q.pow(m as i32);
                if avg != exact {
                    return verdict(
                        false,
                        format!("m={m} k={k} nu={nu:?}: average {avg} vs formula {exact}"),
                    );
                }
                let float = expected_colorings_exact(n, m, &nu).unwrap();
                let want = *exact.numer() as f64 / *exact.denom() as f64;
                worst = worst.max((float - want).abs());
                checked += 1;
            }
        }
    }
    verdict(
        worst <= 1e-12,
        format!("{checked} profiles exact in rationals, float error {worst:.1e}"),
    )
}

fn c2_poissonization() -> Verdict {
    let mut worst = 0.0f64;
    let mut cases = 0;
    let mut c_max = 0.0f64;
    for mu in 0..=6u64 {
        for nu in 1..=4usize {
            for t in compositions(mu, nu) {
                let exact = balls_bins_joint(mu, &t).unwrap();
                for lambda in [0.5, 1.0, 5.0] {
                    let p = poisson_conditioned_joint(lambda, &t, mu).unwrap();
                    worst = worst.max((p - exact).abs());
                    cases += 1;
                }
                if mu > 0 {
                    c_max = c_max.max(poissonization_constant(mu, &t).unwrap());
                }
            }
        }
    }
    verdict(
        worst <= 1e-12,
        format!("{cases} cases, max |difference| {worst:.1e}; sqrt(mu) constant max {c_max:.3}"),
    )
}

/// The random corpus shared by criteria 3 and 4: G(n, m) with `n ∈ 6..=12`
/// and average degree 4.
fn corpus() -> Vec<MultiGraph> {
    (0..200u64)
        .map(|i| {
            let mut r = stream(0xC0FFEE, i);
            let n = r.random_range(6..=12usize);
            sample_gnm_with(n, edges_for_degree(n, 4.0), &mut r).unwrap()
        })
        .collect()
}

fn c3_order_independence(graphs: &[MultiGraph]) -> Verdict {
    let mut colorings = 0;
    let mut runs = 0;
    for (i, g) in graphs.iter().enumerate() {
        let mut r = stream(0x0DE5, i as u64);
        for c in enumerate_proper(g, 3) {
            let reference = whiten(g, &c).unwrap();
            colorings += 1;
            for _ in 0..5 {
                let mut order: Vec<usize> = (0..g.n()).collect();
                order.shuffle(&mut r);
                let rank: Vec<usize> = {
                    let mut rank = vec![0; g.n()];
                    for (pos, &v) in order.iter().enumerate() {
                        rank[v] = pos;
                    }
                    rank
                };
                let out = whiten_by_schedule(g, &PartialColoring::from(&c), |unstable| {
                    (0..unstable.len()).min_by_key(|&j| rank[unstable[j]]).unwrap()
                })
                .unwrap();
                runs += 1;
                if out != reference {
                    return verdict(
                        false,
                        format!("graph {i}: order changed the result for {:?}", c.colors()),
                    );
                }
            }
        }
    }
    verdict(
        colorings > 0,
        format!(
            "{} graphs, {colorings} colorings, {runs} random orders agree",
            graphs.len()
        ),
    )
}

/// Every cover of `g`, by brute force over all `(k+1)^n` maps.
fn all_covers(g: &MultiGraph, k: u32) -> Vec<PartialColoring> {
    let n = g.n();
    let base = k as u64 + 1;
    let mut out = Vec::new();
    for code in 0..base.pow(n as u32) {
        let mut x = code;
        let values: Vec<u32> = (0..n)
            .map(|_| {
                let v = (x % base) as u32;
                x /= base;
                v
            })
            .collect();
        let z = PartialColoring::new(k, values).unwrap();
        if is_cover(g, &z).unwrap() {
            out.push(z);
        }
    }
    out
}

fn c4_cover_soundness(graphs: &[MultiGraph]) -> Verdict {
    let mut images = 0;
    let mut minimality = 0;
    for (i, g) in graphs.iter().enumerate() {
        let colorings: Vec<Coloring> = enumerate_proper(g, 3).collect();
        let covers = if g.n() <= 8 && !colorings.is_empty() {
            Some(all_covers(g, 3))
        } else {
            None
        };
        for c in &colorings {
            let z = whiten(g, c).unwrap();
            images += 1;
            if !is_cover(g, &z).unwrap() {
                return verdict(false, format!("graph {i}: whitening image is not a cover"));
            }
            if let Some(covers) = &covers {
                minimality += 1;
                let better = covers.iter().find(|w| {
                    w.zero_count() < z.zero_count() && (0..g.n()).all(|v| w.value(v) == 0 || w.value(v) == c.color(v))
                });
                if let Some(w) = better {
                    return verdict(false, format!("graph {i}: cover {:?} has fewer zeros", w.values()));
                }
            }
        }
    }
    verdict(
        images > 0 && minimality > 0,
        format!("{images} images pass CV1-CV3; minimality checked by brute force for {minimality}"),
    )
}

fn c5_census_golden() -> Verdict {
    let tri = valid_cover_census(&families::triangle(), 3, None).unwrap();
    let k222 = valid_cover_census(&families::complete_multipartite(&[2, 2, 2]), 3, None).unwrap();
    let t = families::triangle();
    let two = valid_cover_census(&families::disjoint_union(&t, &t), 3, None).unwrap();
    let checks = [
        ("triangle has 1 cluster", tri.cover_count() == 1),
        ("K222 has 6 singleton clusters", k222.cluster_sizes() == vec![1; 6]),
        ("K222 separation 4", cluster_separation(&k222) == Some(4)),
        ("two triangles separation 2", cluster_separation(&two) == Some(2)),
    ];
    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    let note = format!(
        "two triangles: {} cluster(s) of sizes {:?}, separation {:?}",
        two.cover_count(),
        two.cluster_sizes(),
        cluster_separation(&two)
    );
    if failed.is_empty() {
        verdict(true, note)
    } else {
        verdict(false, format!("failed: {}; {note}", failed.join(", ")))
    }
}

/// Rate as a function of the first `k − 1` coordinates.
fn reduced_rate(k: u32, d: f64, x: &[f64]) -> f64 {
    let mut alpha = x.to_vec();
    alpha.push(1.0 - x.iter().sum::<f64>());
    coloring_rate(k, d, &alpha).unwrap()
}

fn c6_hessian() -> Verdict {
    let mut r = stream(0x4E55, 0);
    let mut worst_g = 0.0f64;
    let mut worst_h = 0.0f64;
    let mut worst_gap = f64::NEG_INFINITY;
    for _ in 0..100 {
        let k = r.random_range(2..=6u32);
        let d = r.random_range(0.1..10.0);
        let w: Vec<f64> = (0..k).map(|_| 0.2 + r.random::<f64>()).collect();
        let s: f64 = w.iter().sum();
        let alpha: Vec<f64> = w.iter().map(|x| x / s).collect();
        let x = &alpha[..k as usize - 1];
        let m = x.len();

        let g = grad_f(k, d, &alpha).unwrap();
        let h = 1e-6;
        let fd_g = DVector::from_fn(m, |i, _| {
            let mut p = x.to_vec();
            let mut q = x.to_vec();
            p[i] += h;
            q[i] -= h;
            (reduced_rate(k, d, &p) - reduced_rate(k, d, &q)) / (2.0 * h)
        });
        worst_g = worst_g.max((&fd_g - &g).norm() / g.norm().max(1e-3));

        let hess = hessian_f(k, d, &alpha).unwrap();
        let h = 1e-4;
        let f_at = |di: usize, si: f64, dj: usize, sj: f64| {
            let mut p = x.to_vec();
            p[di] += si * h;
            p[dj] += sj * h;
            reduced_rate(k, d, &p)
        };
        let fd_h = nalgebra::DMatrix::from_fn(m, m, |i, j| {
            (f_at(i, 1.0, j, 1.0) - f_at(i, 1.0, j, -1.0) - f_at(i, -1.0, j, 1.0) + f_at(i, -1.0, j, -1.0))
                / (4.0 * h * h)
        });
        worst_h = worst_h.max((&fd_h - &hess).norm() / hess.norm());
        let top = hess.symmetric_eigen().eigenvalues.max();
        worst_gap = worst_gap.max(top + d);
    }
    verdict(
        worst_g <= 1e-5 && worst_h <= 1e-5 && worst_gap < 0.0,
        format!("max rel err grad {worst_g:.1e}, Hessian {worst_h:.1e}; max (lambda_max + d) = {worst_gap:.3}"),
    )
}

fn c7_first_moment_trend() -> Verdict {
    let mut parts = Vec::new();
    let mut prev = f64::INFINITY;
    let mut ok = true;
    for k in [100u32, 1000, 10_000] {
        // bisection oracle on the balanced rate
        let (mut lo, mut hi) = (1.0, 4.0 * k as f64 * (k as f64).ln());
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if balanced_coloring_rate(k, mid) > 0.0 {
                lo = mid
            } else {
                hi = mid
            }
        }
        let diff = lo - d_first(k);
        let closed = balanced_coloring_root(k) - d_first(k);
        let bound = 2.0 * (k as f64).ln() / k as f64;
        ok &= diff.abs() <= bound && diff.abs() < prev && (closed - diff).abs() < 1e-6;
        prev = diff.abs();
        parts.push(format!("k={k}: {diff:+.3e} (bound {bound:.2e})"));
    }
    verdict(ok, parts.join("; "))
}

fn c8_cover_threshold() -> Verdict {
    let mut parts = Vec::new();
    let mut ok = true;
    let mut prev = f64::INFINITY;
    for k in [100u32, 1000, 10_000] {
        let d = cover_threshold(k).unwrap();
        let gap = d - d_cavity(k);
        if gap.abs() >= prev {
            ok = false;
            parts.push(format!("|gap| not decreasing at k={k}"));
        }
        prev = gap.abs();
        parts.push(format!("k={k}: d_cover={d:.4} gap={gap:+.4}"));
        if k == 10_000 && gap.abs() > 0.5 {
            ok = false;
            parts.push(format!("gap {gap:.4} exceeds 0.5 at k=10^4"));
        }
    }
    for k in [10u32, 20, 30, 50, 100, 300, 1000, 3000, 10_000] {
        match cover_threshold(k) {
            Ok(d) if d < d_first(k) => {}
            Ok(d) => {
                ok = false;
                parts.push(format!("k={k}: {d} >= d_first"));
            }
            Err(Error::NoSignChange { max_rate, .. }) => {
                // no crossing anywhere in the bracket: the rate is already
                // negative at and beyond d_first
                let at_first = optimal_alpha0(k, d_first(k)).unwrap().rate;
                if !(max_rate < 0.0 && at_first < 0.0) {
                    ok = false;
                }
                parts.push(format!("k={k}: rate < 0 on the whole bracket (max {max_rate:.3e})"));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("k={k}: {e}"));
            }
        }
    }
    verdict(ok, parts.join("; "))
}

fn c9_optimizer_location() -> Verdict {
    let mut parts = Vec::new();
    let mut prev = f64::INFINITY;
    let mut ok = true;
    let mut last = 0.0;
    for k in [100u32, 1000, 10_000] {
        let kf = k as f64;
        let o = optimal_alpha0(k, d_cavity(k)).unwrap();
        let ratio = o.alpha0 * 2.0 * kf / (1.0 + 4.0 * kf.ln());
        ok &= (ratio - 1.0).abs() < prev;
        prev = (ratio - 1.0).abs();
        last = ratio;
        parts.push(format!(
            "k={k}: {ratio:.4}{}",
            if o.at_boundary { " (boundary)" } else { "" }
        ));
    }
    ok &= (0.8..=1.2).contains(&last);
    verdict(ok, parts.join("; "))
}

/// Planted k-partite graph: classes of size `s`, each cross pair present
/// with probability `p`.
fn planted(k: usize, s: usize, p: f64, seed: u64) -> (MultiGraph, Coloring) {
    let mut r = stream(seed, 0);
    let n = k * s;
    let color = |v: usize| v / s;
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if color(u) != color(v) && r.random_bool(p) {
                edges.push((u, v));
            }
        }
    }
    let c = Coloring::new(k as u32, (0..n).map(|v| color(v) as u32 + 1).collect()).unwrap();
    (MultiGraph::new(n, edges).unwrap(), c)
}

fn c10_core_freeze() -> Verdict {
    let mut instances: Vec<(MultiGraph, Coloring)> = Vec::new();
    for sizes in [[6usize, 6, 6], [7, 7, 7], [6, 7, 8]] {
        let g = families::complete_multipartite(&sizes);
        let mut colors = Vec::new();
        for (i, &s) in sizes.iter().enumerate() {
            colors.extend(std::iter::repeat_n(i as u32 + 1, s));
        }
        instances.push((g, Coloring::new(3, colors).unwrap()));
    }
    for seed in 0..60u64 {
        let (k, s, p) = match seed % 3 {
            0 => (3, 9, 0.8),
            1 => (3, 9, 0.9),
            _ => (4, 8, 0.9),
        };
        instances.push(planted(k, s, p, seed));
    }
    for g in corpus().into_iter().take(40) {
        if let Some(c) = enumerate_proper(&g, 3).next() {
            instances.push((g, c));
        }
    }

    let (mut freeze_true, mut nonempty, mut frozen_checked, mut fails) = (0, 0, 0, Vec::new());
    for (idx, (g, c)) in instances.iter().enumerate() {
        let k = c.k();
        let kf = k as f64;
        for ell in [2.0, 2.5] {
            let d = build_core(g, c, ell).unwrap();
            if core_freeze_check(g, c, &d) && !d.core.is_empty() {
                freeze_true += 1;
                let z = whiten(g, c).unwrap();
                if d.core.iter().any(|&v| z.value(v) == 0) {
                    fails.push(format!("instance {idx} ell={ell}: core vertex whitened"));
                }
            }
            if d.core.is_empty() {
                continue;
            }
            nonempty += 1;
            let n = g.n() as f64;
            let size = (2.0 * n * kf.ln().ln() / (kf * kf.ln())).ceil() as usize;
            let exp = expansion_violation(g, ell, size, Some(50_000_000)).unwrap();
            if exp.violation.is_none() {
                frozen_checked += 1;
                let delta = 1.0 / (kf * kf.ln());
                match is_delta_frozen(g, c, &d.core, delta, Some(50_000_000)) {
                    Ok(true) => {}
                    Ok(false) => fails.push(format!("instance {idx} ell={ell}: core not delta-frozen")),
                    Err(e) => fails.push(format!("instance {idx}: {e}")),
                }
            }
        }
    }
    let summary = format!(
        "{} instances; freeze check true on {freeze_true} nonempty cores; nonempty cores {nonempty}; frozen by enumeration {frozen_checked}",
        instances.len()
    );
    if fails.is_empty() {
        verdict(freeze_true > 0 && frozen_checked > 0, summary)
    } else {
        let shown: Vec<_> = fails.iter().take(3).cloned().collect();
        verdict(
            false,
            format!("{summary}; {} failures, e.g. {}", fails.len(), shown.join("; ")),
        )
    }
}

type Criterion<'a> = Box<dyn Fn() -> Verdict + 'a>;

fn main() -> ExitCode {
    let graphs = corpus();
    let criteria: Vec<(&str, Criterion<'_>)> = vec![
        ("1 exact moment oracle", Box::new(c1_exact_moment)),
        ("2 poissonization identity", Box::new(c2_poissonization)),
        (
            "3 whitening order independence",
            Box::new(|| c3_order_independence(&graphs)),
        ),
        (
            "4 cover soundness and minimality",
            Box::new(|| c4_cover_soundness(&graphs)),
        ),
        ("5 census golden values", Box::new(c5_census_golden)),
        ("6 gradient, Hessian, eigenvalues", Box::new(c6_hessian)),
        ("7 first-moment threshold trend", Box::new(c7_first_moment_trend)),
        ("8 cover threshold at finite k", Box::new(c8_cover_threshold)),
        ("9 optimizer location", Box::new(c9_optimizer_location)),
        ("10 core and freeze consistency", Box::new(c10_core_freeze)),
    ];
    let mut failed = 0;
    for (name, run) in &criteria {
        let start = Instant::now();
        let v = run();
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!("criterion {name}: {tag} ({:.2?}) {}", start.elapsed(), v.detail);
        failed += usize::from(!v.pass);
    }
    println!(
        "acceptance: {} of {} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
