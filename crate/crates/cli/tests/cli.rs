use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_colorcover"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn validator() -> jsonschema::Validator {
    let text = include_str!("../schema/report.schema.json");
    jsonschema::validator_for(&serde_json::from_str(text).unwrap()).unwrap()
}

fn assert_valid(v: &Value) {
    let errors: Vec<String> = validator()
        .iter_errors(v)
        .map(|e| format!("{e} at {}", e.instance_path()))
        .collect();
    assert!(errors.is_empty(), "schema errors: {errors:#?}\n{v:#}");
}

#[test]
fn census_k222() {
    let r = report(&["census", "--n", "6", "--edges", "K222", "--k", "3"]);
    assert_valid(&r);
    assert_eq!(r["command"], "census");
    assert_eq!(r["schema_version"], "1.0");
    let res = &r["result"];
    assert_eq!(res["cover_count"], 6);
    assert_eq!(res["coloring_count"], 6);
    assert_eq!(res["cluster_sizes"], serde_json::json!([1, 1, 1, 1, 1, 1]));
    assert_eq!(res["separation"], 4);
}

#[test]
fn bounds_k3() {
    let r = report(&["bounds", "--k", "3"]);
    assert_valid(&r);
    let row = &r["result"]["rows"][0];
    assert_eq!(row["k"], 3);
    assert!((row["d_first"].as_f64().unwrap() - 5.49306).abs() < 1e-5);
    assert!(row["d_cover"].is_null());
}

#[test]
fn bounds_csv_columns() {
    let out = run(&["bounds", "--k", "3,100", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,d_first,d_AN,d_second,d_cavity,d_cover"));
    let k100: Vec<&str> = lines.nth(1).unwrap().split(',').collect();
    assert_eq!(k100[0], "100");
    assert!((k100[5].parse::<f64>().unwrap() - 908.858).abs() < 1e-2);
}

#[test]
fn montecarlo_two_vertices() {
    let r = report(&[
        "montecarlo",
        "--n",
        "2",
        "--m",
        "1",
        "--k",
        "2",
        "--trials",
        "10000",
        "--seed",
        "1",
    ]);
    assert_valid(&r);
    let res = &r["result"];
    assert_eq!(res["expected"], 1.0);
    assert_eq!(res["within_3_sigma"], true);
    assert!(res["std_error"].as_f64().unwrap() > 0.0);
}

#[test]
fn reruns_are_byte_identical() {
    for args in [
        &["generate", "--n", "30", "--d", "4", "--seed", "9", "--model", "multi"][..],
        &[
            "core", "--n", "30", "--d", "6", "--k", "3", "--trials", "6", "--seed", "5", "--delta", "0.2",
        ],
        &[
            "montecarlo",
            "--n",
            "6",
            "--m",
            "6",
            "--k",
            "3",
            "--trials",
            "300",
            "--seed",
            "2",
        ],
        &[
            "model-compare",
            "--n",
            "8",
            "--m",
            "10",
            "--k",
            "3",
            "--trials",
            "200",
            "--seed",
            "4",
            "--event",
            "colorable",
        ],
    ] {
        let (a, b) = (run(args), run(args));
        assert!(a.status.success(), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn output_file_matches_stdout() {
    let dir = std::env::temp_dir().join(format!("colorcover-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("g.csv");
    let p = path.to_str().unwrap();
    let base = ["generate", "--n", "12", "--m", "20", "--seed", "3", "--format", "csv"];
    let to_stdout = run(&base);
    let mut args = base.to_vec();
    args.extend(["--output", p]);
    assert!(run(&args).status.success());
    assert_eq!(std::fs::read(&path).unwrap(), to_stdout.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn every_command_validates() {
    for args in [
        &["generate", "--n", "10", "--m", "12", "--seed", "1"][..],
        &[
            "generate", "--n", "12", "--m", "15", "--k", "3", "--model", "planted", "--seed", "1",
        ],
        &["color", "--n", "5", "--edges", "cycle5", "--k", "3", "--limit", "3"],
        &["whiten", "--n", "6", "--edges", "K222", "--k", "3"],
        &[
            "whiten",
            "--n",
            "3",
            "--edges",
            "triangle",
            "--k",
            "3",
            "--coloring",
            "1,2,3",
        ],
        &[
            "census",
            "--n",
            "6",
            "--edges",
            "two-triangles",
            "--k",
            "3",
            "--limit",
            "1",
        ],
        &[
            "core", "--n", "24", "--d", "5", "--k", "3", "--trials", "3", "--seed", "7",
        ],
        &["core", "--n", "6", "--edges", "K222", "--k", "3", "--ell", "2"],
        &["bounds", "--k", "3,4,100"],
        &[
            "montecarlo",
            "--n",
            "6",
            "--m",
            "5",
            "--k",
            "3",
            "--nu",
            "2,2,2",
            "--trials",
            "100",
            "--seed",
            "3",
        ],
        &[
            "model-compare",
            "--n",
            "6",
            "--m",
            "4",
            "--k",
            "3",
            "--trials",
            "100",
            "--seed",
            "3",
            "--event",
            "isolated",
        ],
        &["ballsbins-check", "--mu-max", "4", "--nu-max", "3"],
    ] {
        assert_valid(&report(args));
    }
}

#[test]
fn errors_are_records_with_nonzero_exit() {
    let bad = std::env::temp_dir().join(format!("colorcover-bad-{}.txt", std::process::id()));
    std::fs::write(&bad, "3 2\n1 2\n2 x\n").unwrap();
    let bad = bad.to_str().unwrap().to_string();
    for (args, kind) in [
        (
            &["census", "--n", "3", "--edges", bad.as_str(), "--k", "3"][..],
            "parse",
        ),
        (
            &["census", "--n", "6", "--edges", "no-such-graph", "--k", "3"],
            "config",
        ),
        (&["generate", "--n", "4", "--m", "7", "--seed", "1"], "domain"),
        (&["generate", "--n", "4", "--m", "2"], "config"),
        (
            &["whiten", "--n", "6", "--edges", "K222", "--k", "3", "--format", "csv"],
            "config",
        ),
        (&["bounds", "--k", "1"], "domain"),
    ] {
        let out = run(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
        let v: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_valid(&v);
        assert_eq!(v["error"]["kind"], kind, "{args:?}: {v}");
    }
    std::fs::remove_file(&bad).unwrap();
}

#[test]
fn conflicting_flags_are_rejected() {
    let out = run(&["generate", "--n", "4", "--m", "2", "--d", "1.0", "--seed", "1"]);
    assert!(!out.status.success());
}
