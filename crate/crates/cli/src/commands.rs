use std::collections::BTreeMap;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use colorcover::coloring::{balance_check, enumerate_proper, is_proper, sample_planted_with, Coloring};
use colorcover::core_builder::{build_core, core_freeze_check, default_ell};
use colorcover::covers::{
    check_cover, check_cover_profile, cluster_separation, valid_cover_census, DEFAULT_BALANCE_SLACK,
};
use colorcover::graph::{edges_for_degree, families, sample_gnm_multi_with, sample_gnm_with, MultiGraph};
use colorcover::moments::ballsbins::compositions;
use colorcover::moments::threshold::{BOUNDS_COLUMNS, REFERENCE_D3_UPPER};
use colorcover::moments::{
    balls_bins_joint, bounds_table, expected_colorings_exact, poisson_conditioned_joint, poissonization_constant,
};
use colorcover::rng::{stream, StreamRng};
use colorcover::whitening::{is_delta_frozen, whiten};

use crate::args::{CommandKind, Event, Model, Options};
use crate::error::{CliError, CliResult};

/// A command's result: the JSON payload and, for tabular commands, the
/// table behind it.
pub struct Outcome {
    pub result: Value,
    pub table: Option<Table>,
}

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }
}

fn json_only(result: impl Serialize) -> CliResult<Outcome> {
    Ok(Outcome {
        result: serde_json::to_value(result)?,
        table: None,
    })
}

pub fn run(kind: CommandKind, o: &Options) -> CliResult<Outcome> {
    if o.trials == 0 {
        return Err(CliError::Config("--trials must be at least 1".into()));
    }
    match kind {
        CommandKind::Generate => generate(o),
        CommandKind::Color => color(o),
        CommandKind::Whiten => whiten_cmd(o),
        CommandKind::Census => census(o),
        CommandKind::Core => core(o),
        CommandKind::Bounds => bounds(o),
        CommandKind::Montecarlo => montecarlo(o),
        CommandKind::ModelCompare => model_compare(o),
        CommandKind::BallsbinsCheck => ballsbins_check(o),
    }
}

fn need<T: Copy>(v: Option<T>, flag: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::Config(format!("--{flag} is required")))
}

fn seed(o: &Options) -> CliResult<u64> {
    need(o.seed, "seed").map_err(|_| CliError::Config("--seed is required for sampled graphs".into()))
}

fn single_k(o: &Options) -> CliResult<u32> {
    match o.k.as_slice() {
        [k] if *k >= 1 => Ok(*k),
        [] => Err(CliError::Config("--k is required".into())),
        _ => Err(CliError::Config("--k takes a single positive value here".into())),
    }
}

/// `m` from exactly one of `--m` and `--d`.
fn edge_count(o: &Options, n: usize) -> CliResult<usize> {
    match (o.m, o.d) {
        (Some(m), None) => Ok(m),
        (None, Some(d)) if d >= 0.0 && d.is_finite() => Ok(edges_for_degree(n, d)),
        (None, Some(_)) => Err(CliError::Config("--d must be finite and nonnegative".into())),
        _ => Err(CliError::Config("exactly one of --m and --d is required".into())),
    }
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// The `--edges` graph if given, otherwise one sample from `model`.
fn graph(o: &Options, model: Model) -> CliResult<MultiGraph> {
    if let Some(arg) = &o.edges {
        let path = Path::new(arg);
        let g = if path.is_file() {
            MultiGraph::parse_edge_list(&read(path)?)?
        } else {
            families::by_name(arg)
                .ok_or_else(|| CliError::Config(format!("no file or built-in graph named {arg:?}")))?
        };
        if let Some(n) = o.n {
            if n != g.n() {
                return Err(CliError::Config(format!(
                    "--n {n} but the graph has {} vertices",
                    g.n()
                )));
            }
        }
        return Ok(g);
    }
    let n = need(o.n, "n")?;
    let m = edge_count(o, n)?;
    let mut r = stream(seed(o)?, 0);
    sample(model, n, m, single_k(o).unwrap_or(3), &mut r).map(|(g, _)| g)
}

fn sample(model: Model, n: usize, m: usize, k: u32, r: &mut StreamRng) -> CliResult<(MultiGraph, Option<Coloring>)> {
    Ok(match model {
        Model::Gnm => (sample_gnm_with(n, m, r)?, None),
        Model::Multi => (sample_gnm_multi_with(n, m, r)?, None),
        Model::Planted => {
            let (g, c) = sample_planted_with(n, k, m, r)?;
            (g, Some(c))
        }
    })
}

fn parse_coloring(arg: &str, k: u32) -> CliResult<Coloring> {
    let path = Path::new(arg);
    if path.is_file() {
        return Ok(Coloring::parse(&read(path)?)?);
    }
    let colors = arg
        .split(',')
        .map(|t| t.trim().parse::<u32>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::Config(format!("--coloring {arg:?} is neither a file nor a comma list")))?;
    Ok(Coloring::new(k, colors)?)
}

fn one_based(edges: &[(usize, usize)]) -> Vec<[usize; 2]> {
    edges.iter().map(|&(u, v)| [u + 1, v + 1]).collect()
}

fn generate(o: &Options) -> CliResult<Outcome> {
    let model = o.model.unwrap_or(Model::Gnm);
    let g = graph(
        &Options {
            edges: None,
            ..o.clone()
        },
        model,
    )?;
    let mut table = Table::new(&["u", "v"]);
    for [u, v] in one_based(g.edges()) {
        table.rows.push(vec![u.to_string(), v.to_string()]);
    }
    Ok(Outcome {
        result: json!({ "n": g.n(), "m": g.m(), "model": model, "simple": g.check_simple(), "edges": one_based(g.edges()) }),
        table: Some(table),
    })
}

fn color(o: &Options) -> CliResult<Outcome> {
    let k = single_k(o)?;
    let g = graph(o, o.model.unwrap_or(Model::Gnm))?;
    let mut profiles: BTreeMap<Vec<usize>, u64> = BTreeMap::new();
    let mut listed = Vec::new();
    let mut it = enumerate_proper(&g, k);
    let mut count = 0u64;
    while let Some(c) = it.next_ref() {
        count += 1;
        if o.budget.is_some_and(|b| count > b) {
            return Err(colorcover::Error::BudgetExceeded {
                what: "coloring enumeration",
                budget: o.budget.unwrap(),
            }
            .into());
        }
        let mut sizes = vec![0usize; k as usize];
        for &x in c {
            sizes[x as usize - 1] += 1;
        }
        *profiles.entry(sizes).or_default() += 1;
        if listed.len() < o.limit {
            listed.push(c.to_vec());
        }
    }
    let mut table = Table::new(&["profile", "count"]);
    for (nu, c) in &profiles {
        table.rows.push(vec![join(nu, " "), c.to_string()]);
    }
    let profiles: Vec<Value> = profiles
        .into_iter()
        .map(|(nu, count)| json!({ "nu": nu, "count": count }))
        .collect();
    Ok(Outcome {
        result: json!({ "n": g.n(), "m": g.m(), "k": k, "count": count, "profiles": profiles, "colorings": listed }),
        table: Some(table),
    })
}

fn join<T: ToString>(xs: &[T], sep: &str) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

fn whiten_cmd(o: &Options) -> CliResult<Outcome> {
    let k = single_k(o)?;
    let g = graph(o, o.model.unwrap_or(Model::Gnm))?;
    let c = match &o.coloring {
        Some(arg) => parse_coloring(arg, k)?,
        None => enumerate_proper(&g, k)
            .next()
            .ok_or_else(|| CliError::Config(format!("graph has no proper {k}-coloring; pass --coloring")))?,
    };
    let z = whiten(&g, &c)?;
    let check = check_cover(&g, &z)?;
    json_only(json!({
        "n": g.n(),
        "k": k,
        "coloring": c.colors(),
        "proper": is_proper(&g, &c)?,
        "cover": z.values(),
        "zero_count": z.zero_count(),
        "is_cover": check.is_cover(),
        "violation": check.violation,
        "profile": check_cover_profile(&z, DEFAULT_BALANCE_SLACK)?,
    }))
}

fn census(o: &Options) -> CliResult<Outcome> {
    let k = single_k(o)?;
    let g = graph(o, o.model.unwrap_or(Model::Gnm))?;
    let c = valid_cover_census(&g, k, o.budget)?;
    let export = c.export(o.limit > 0);
    json_only(json!({
        "n": g.n(),
        "k": k,
        "cover_count": c.cover_count(),
        "coloring_count": c.coloring_count(),
        "cluster_sizes": c.cluster_sizes(),
        "separation": cluster_separation(&c),
        "clusters": export.clusters,
    }))
}

/// Reports `done/total` on stderr every tenth of the way.
struct Progress<'a> {
    label: &'a str,
    total: usize,
    done: AtomicUsize,
}

impl<'a> Progress<'a> {
    fn new(label: &'a str, total: usize) -> Self {
        Progress {
            label,
            total,
            done: AtomicUsize::new(0),
        }
    }

    fn tick(&self) {
        let d = self.done.fetch_add(1, Ordering::Relaxed) + 1;
        let step = (self.total / 10).max(1);
        if d.is_multiple_of(step) || d == self.total {
            eprintln!("{}: {d}/{}", self.label, self.total);
        }
    }
}

/// A graph and, when one was planted or supplied, a coloring of it.
type Instance = (MultiGraph, Option<Coloring>);

#[derive(Serialize)]
struct CoreTrial {
    trial: usize,
    n: usize,
    m: usize,
    colorable: bool,
    w: usize,
    u: usize,
    y: usize,
    core: usize,
    freeze_check: bool,
    core_survives_whitening: bool,
    /// `None` when not requested, not colorable, or over budget.
    delta_frozen: Option<bool>,
}

fn core(o: &Options) -> CliResult<Outcome> {
    let k = single_k(o)?;
    let ell = o.ell.unwrap_or_else(|| default_ell(k, 2.0));
    let instances: Vec<(usize, CliResult<Instance>)> = if o.edges.is_some() {
        let g = graph(o, Model::Gnm)?;
        let c = match &o.coloring {
            Some(arg) => Some(parse_coloring(arg, k)?),
            None => enumerate_proper(&g, k).next(),
        };
        vec![(0, Ok((g, c)))]
    } else {
        let n = need(o.n, "n")?;
        let m = edge_count(o, n)?;
        let s = seed(o)?;
        let model = o.model.unwrap_or(Model::Planted);
        (0..o.trials)
            .map(|t| {
                let mut r = stream(s, t as u64);
                (t, sample(model, n, m, k, &mut r))
            })
            .collect()
    };
    let progress = Progress::new("core", instances.len());
    let trials = instances
        .into_par_iter()
        .map(|(t, inst)| {
            let (g, c) = inst?;
            let c = match c {
                Some(c) => Some(c),
                None => enumerate_proper(&g, k).next(),
            };
            let out = core_trial(t, &g, c.as_ref(), ell, o);
            progress.tick();
            out
        })
        .collect::<CliResult<Vec<CoreTrial>>>()?;

    let colorable: Vec<&CoreTrial> = trials.iter().filter(|t| t.colorable).collect();
    let mean = |f: fn(&CoreTrial) -> usize| {
        if colorable.is_empty() {
            None
        } else {
            Some(colorable.iter().map(|t| f(t) as f64).sum::<f64>() / colorable.len() as f64)
        }
    };
    let mut table = Table::new(&[
        "trial",
        "n",
        "m",
        "colorable",
        "W",
        "U",
        "Y",
        "core",
        "freeze_check",
        "core_survives_whitening",
        "delta_frozen",
    ]);
    for t in &trials {
        table.rows.push(vec![
            t.trial.to_string(),
            t.n.to_string(),
            t.m.to_string(),
            t.colorable.to_string(),
            t.w.to_string(),
            t.u.to_string(),
            t.y.to_string(),
            t.core.to_string(),
            t.freeze_check.to_string(),
            t.core_survives_whitening.to_string(),
            t.delta_frozen.map(|b| b.to_string()).unwrap_or_default(),
        ]);
    }
    Ok(Outcome {
        result: json!({
            "k": k,
            "ell": ell,
            "whitening_guaranteed": ell >= 2.0,
            "colorable_trials": colorable.len(),
            "mean_W": mean(|t| t.w),
            "mean_U": mean(|t| t.u),
            "mean_Y": mean(|t| t.y),
            "mean_core": mean(|t| t.core),
            "freeze_check_true": colorable.iter().filter(|t| t.freeze_check).count(),
            "core_survives_whitening": colorable.iter().filter(|t| t.core_survives_whitening).count(),
            "trials": trials,
        }),
        table: Some(table),
    })
}

fn core_trial(trial: usize, g: &MultiGraph, c: Option<&Coloring>, ell: f64, o: &Options) -> CliResult<CoreTrial> {
    let Some(c) = c else {
        return Ok(CoreTrial {
            trial,
            n: g.n(),
            m: g.m(),
            colorable: false,
            w: 0,
            u: 0,
            y: 0,
            core: 0,
            freeze_check: false,
            core_survives_whitening: false,
            delta_frozen: None,
        });
    };
    let d = build_core(g, c, ell)?;
    let z = whiten(g, c)?;
    let delta_frozen = match o.delta {
        Some(delta) => match is_delta_frozen(g, c, &d.core, delta, o.budget) {
            Ok(b) => Some(b),
            Err(colorcover::Error::BudgetExceeded { .. }) => None,
            Err(e) => return Err(e.into()),
        },
        None => None,
    };
    Ok(CoreTrial {
        trial,
        n: g.n(),
        m: g.m(),
        colorable: true,
        w: d.w.len(),
        u: d.u.len(),
        y: d.y.len(),
        core: d.core.len(),
        freeze_check: core_freeze_check(g, c, &d),
        core_survives_whitening: d.core.iter().all(|&v| z.value(v) != 0),
        delta_frozen,
    })
}

fn bounds(o: &Options) -> CliResult<Outcome> {
    if o.k.is_empty() {
        return Err(CliError::Config(
            "--k is required (comma-separated list allowed)".into(),
        ));
    }
    let rows =
        o.k.par_iter()
            .map(|&k| bounds_table(k))
            .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&BOUNDS_COLUMNS);
    for r in &rows {
        table.rows.push(vec![
            r.k.to_string(),
            r.d_first.to_string(),
            r.d_an.to_string(),
            r.d_second.to_string(),
            r.d_cavity.to_string(),
            r.d_cover.map(|d| d.to_string()).unwrap_or_default(),
        ]);
    }
    Ok(Outcome {
        result: json!({
            "rows": rows,
            "notes": {
                "d_second": "explicit part only; its lower-order term has no closed form",
                "d_cover": "null when the optimized cover rate has no zero on [k ln k, 3k ln k]",
                "reference_d3_upper": REFERENCE_D3_UPPER,
            },
        }),
        table: Some(table),
    })
}

fn balanced_profile(n: usize, k: usize) -> Vec<usize> {
    (0..k).map(|i| n / k + usize::from(i < n % k)).collect()
}

struct McTrial {
    count: u64,
    colorings: u64,
    balance_pass: u64,
    cover_profile_pass: u64,
}

fn montecarlo(o: &Options) -> CliResult<Outcome> {
    let k = single_k(o)?;
    let n = need(o.n, "n")?;
    let m = edge_count(o, n)?;
    let s = seed(o)?;
    let nu = if o.nu.is_empty() {
        balanced_profile(n, k as usize)
    } else {
        o.nu.clone()
    };
    if nu.len() != k as usize || nu.iter().sum::<usize>() != n {
        return Err(CliError::Config("--nu must have k entries summing to n".into()));
    }
    let expected = expected_colorings_exact(n, m, &nu)?;
    let progress = Progress::new("montecarlo", o.trials);
    let trials = (0..o.trials)
        .into_par_iter()
        .map(|t| {
            let g = sample_gnm_multi_with(n, m, &mut stream(s, t as u64))?;
            let mut out = McTrial {
                count: 0,
                colorings: 0,
                balance_pass: 0,
                cover_profile_pass: 0,
            };
            for c in enumerate_proper(&g, k) {
                out.colorings += 1;
                if c.class_sizes() == nu {
                    out.count += 1;
                }
                if k >= 2 {
                    out.balance_pass += u64::from(balance_check(&c, None)?.pass);
                    out.cover_profile_pass +=
                        u64::from(check_cover_profile(&whiten(&g, &c)?, DEFAULT_BALANCE_SLACK)?.all_pass());
                }
            }
            progress.tick();
            Ok(out)
        })
        .collect::<CliResult<Vec<McTrial>>>()?;
    let t = trials.len() as f64;
    let mean = trials.iter().map(|x| x.count as f64).sum::<f64>() / t;
    let var = if trials.len() > 1 {
        trials.iter().map(|x| (x.count as f64 - mean).powi(2)).sum::<f64>() / (t - 1.0)
    } else {
        0.0
    };
    let std_error = (var / t).sqrt();
    let z = if std_error > 0.0 {
        Some((mean - expected) / std_error)
    } else {
        None
    };
    let colorings: u64 = trials.iter().map(|x| x.colorings).sum();
    let frac = |num: u64| {
        if colorings == 0 {
            None
        } else {
            Some(num as f64 / colorings as f64)
        }
    };
    let mut table = Table::new(&["trial", "count", "colorings"]);
    for (i, x) in trials.iter().enumerate() {
        table
            .rows
            .push(vec![i.to_string(), x.count.to_string(), x.colorings.to_string()]);
    }
    Ok(Outcome {
        result: json!({
            "n": n,
            "m": m,
            "k": k,
            "nu": nu,
            "trials": trials.len(),
            "mean": mean,
            "std_error": std_error,
            "expected": expected,
            "z_score": z,
            "within_3_sigma": z.map(|z| z.abs() <= 3.0),
            "profile_statistics": {
                "colorings": colorings,
                "balance_pass_fraction": frac(trials.iter().map(|x| x.balance_pass).sum()),
                "cover_profile_pass_fraction": frac(trials.iter().map(|x| x.cover_profile_pass).sum()),
            },
        }),
        table: Some(table),
    })
}

fn event_holds(event: Event, g: &MultiGraph, k: u32) -> bool {
    match event {
        Event::Colorable => enumerate_proper(g, k).next().is_some(),
        Event::Isolated => (0..g.n()).any(|v| g.degree(v) == 0),
    }
}

fn model_compare(o: &Options) -> CliResult<Outcome> {
    let k = single_k(o)?;
    let n = need(o.n, "n")?;
    let m = edge_count(o, n)?;
    let s = seed(o)?;
    let event = o.event.unwrap_or(Event::Colorable);
    let progress = Progress::new("model-compare", o.trials);
    let hits = (0..o.trials)
        .into_par_iter()
        .map(|t| {
            let simple = sample_gnm_with(n, m, &mut stream(s, 2 * t as u64))?;
            let multi = sample_gnm_multi_with(n, m, &mut stream(s, 2 * t as u64 + 1))?;
            progress.tick();
            Ok((event_holds(event, &simple, k), event_holds(event, &multi, k)))
        })
        .collect::<CliResult<Vec<(bool, bool)>>>()?;
    let t = hits.len() as f64;
    let p = |sel: fn(&(bool, bool)) -> bool| hits.iter().filter(|h| sel(h)).count() as f64 / t;
    let (p1, p2) = (p(|h| h.0), p(|h| h.1));
    let se = |p: f64| (p * (1.0 - p) / t).sqrt();
    let se_diff = (se(p1).powi(2) + se(p2).powi(2)).sqrt();
    json_only(json!({
        "n": n,
        "m": m,
        "k": k,
        "event": event,
        "trials": hits.len(),
        "p_gnm": p1,
        "p_multi": p2,
        "se_gnm": se(p1),
        "se_multi": se(p2),
        "difference": p1 - p2,
        "z_score": if se_diff > 0.0 { Some((p1 - p2) / se_diff) } else { None },
    }))
}

fn ballsbins_check(o: &Options) -> CliResult<Outcome> {
    if o.nu_max == 0 || o.lambda.iter().any(|&l| l.is_nan() || l <= 0.0) {
        return Err(CliError::Config(
            "--nu-max must be positive and every --lambda > 0".into(),
        ));
    }
    let mut table = Table::new(&[
        "mu",
        "nu",
        "t",
        "lambda",
        "balls_bins",
        "poisson_conditioned",
        "abs_diff",
    ]);
    let mut max_diff = 0.0f64;
    let mut max_c = 0.0f64;
    let mut cases = 0usize;
    for mu in 0..=o.mu_max {
        for nu in 1..=o.nu_max {
            for t in compositions(mu, nu) {
                let exact = balls_bins_joint(mu, &t)?;
                if mu > 0 {
                    max_c = max_c.max(poissonization_constant(mu, &t)?);
                }
                for &lambda in &o.lambda {
                    let p = poisson_conditioned_joint(lambda, &t, mu)?;
                    let diff = (p - exact).abs();
                    max_diff = max_diff.max(diff);
                    cases += 1;
                    table.rows.push(vec![
                        mu.to_string(),
                        nu.to_string(),
                        join(&t, " "),
                        lambda.to_string(),
                        exact.to_string(),
                        p.to_string(),
                        diff.to_string(),
                    ]);
                }
            }
        }
    }
    Ok(Outcome {
        result: json!({
            "cases": cases,
            "max_abs_diff": max_diff,
            "identity_holds": max_diff <= 1e-12,
            "max_poissonization_constant": max_c,
        }),
        table: Some(table),
    })
}
