//! The `efcp` binary end to end: exit codes, output formats, determinism.

use std::path::Path;
use std::process::{Command, Output};

use efcp::tvlab::tv_exact_atomic;
use efcp::{Coloring, PaintboxLaw, StochasticMatrix};
use serde_json::{json, Value};

const BIN: &str = env!("CARGO_BIN_EXE_efcp");

fn run(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args);
    if let Some(t) = threads {
        cmd.env("EFCP_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p.to_string_lossy().into_owned()
}

fn point_mass() -> Value {
    json!({"kind": "point_mass", "matrix": {"columns": [[0.8, 0.2], [0.3, 0.7]]}})
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("structured error on stderr")
}

#[test]
fn lyapunov_point_mass_is_trace_minus_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", &json!({"law": point_mass()}));
    let out = run(
        &[
            "lyapunov",
            "--config",
            &cfg,
            "--steps",
            "2000",
            "--replicates",
            "1",
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "lyapunov");
    let l = v["result"]["lambda1"].as_f64().unwrap();
    assert!((l - 0.5).abs() < 1e-9, "{l}");
}

#[test]
fn unknown_config_field_is_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        &json!({"law": point_mass(), "colour": 3}),
    );
    let out = run(&["lyapunov", "--config", &cfg], None);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["status"], "invalid_config");
}

#[test]
fn missing_law_and_bad_flags_are_exit_2() {
    assert_eq!(run(&["lyapunov"], None).status.code(), Some(2));
    assert_eq!(
        run(&["tv", "--m", "notanumber"], None).status.code(),
        Some(2)
    );
    let dir = tempfile::tempdir().unwrap();
    let bad =
        json!({"law": {"kind": "point_mass", "matrix": {"columns": [[0.8, 0.1], [0.3, 0.7]]}}});
    let cfg = write_config(dir.path(), "c.json", &bad);
    assert_eq!(
        run(&["lyapunov", "--config", &cfg], None).status.code(),
        Some(2)
    );
}

#[test]
fn refusals_are_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", &json!({"law": point_mass(), "n": 4}));
    let out = run(&["cutoff", "--config", &cfg], None);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_json(&out)["status"], "refused");
    // not row-column exchangeable
    let out = run(&["project", "--config", &cfg], None);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn tv_csv_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let law = json!({"kind": "atomic", "atoms": [
        {"columns": [[0.8, 0.2], [0.3, 0.7]]}, {"columns": [[0.5, 0.5], [0.7, 0.3]]}], "weights": [0.5, 0.5]});
    let cfg = write_config(
        dir.path(),
        "c.json",
        &json!({"law": law, "x0": "111222", "x0_tilde": "112221", "tv_method": "exact_atomic"}),
    );
    let out = run(&["tv", "--config", &cfg, "--m", "3", "--seed", "7"], None);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("n,m,tv_value,kind,std_error,replicates,seed")
    );
    let last: Vec<String> = lines.last().unwrap().split(',').map(String::from).collect();
    assert_eq!(last[0], "6");
    assert_eq!(last[1], "3");
    assert_eq!(last[3], "exact");
    assert_eq!(last[6], "7");

    let a = StochasticMatrix::from_columns(&[vec![0.8, 0.2], vec![0.3, 0.7]]).unwrap();
    let b = StochasticMatrix::from_columns(&[vec![0.5, 0.5], vec![0.7, 0.3]]).unwrap();
    let lib = PaintboxLaw::atomic(vec![a, b], vec![0.5, 0.5]).unwrap();
    let x = Coloring::parse("111222", 2).unwrap();
    let y = Coloring::parse("112221", 2).unwrap();
    let want = tv_exact_atomic(&lib, &x, &y, 3).unwrap().value;
    let got: f64 = last[2].parse().unwrap();
    assert!((got - want).abs() < 1e-15);
}

#[test]
fn ehrenfest_exact_csv() {
    let out = run(
        &["ehrenfest", "--n", "32", "--exact", "--t-max", "40"],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "n,m,tv_value,kind,std_error,replicates,seed");
    assert_eq!(rows.len(), 42);
    assert!(rows[1].starts_with("32,0,") && rows[1].contains(",exact,"));
    let tvs: Vec<f64> = rows[1..]
        .iter()
        .map(|r| r.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    // from all ones the only overlap with stationarity at t = 0 is that state
    assert!((tvs[0] - (1.0 - 0.5f64.powi(32))).abs() < 1e-12);
    assert!(tvs.windows(2).all(|w| w[1] <= w[0] + 1e-15));
}

#[test]
fn simulate_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        &json!({"law": {"kind": "self_similar", "nu": [1.0, 1.0, 1.0]}}),
    );
    let args = [
        "simulate", "--config", &cfg, "--n", "20", "--steps", "30", "--seed", "11",
    ];
    let a = run(&args, None);
    let b = run(&args, None);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(text.lines().count(), 32);
    let c = run(
        &[
            "simulate", "--config", &cfg, "--n", "20", "--steps", "30", "--seed", "12",
        ],
        None,
    );
    assert_ne!(text.as_bytes(), &c.stdout[..]);
}

#[test]
fn cutoff_report_is_byte_identical_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.json",
        &json!({
            "law": {"kind": "self_similar", "nu": [1.0, 1.0]},
            "n_grid": [16, 32, 64, 128],
            "replicates": 300,
            "lyapunov_steps": 500,
            "lyapunov_replicates": 4,
            "m_cap": 64,
            "seed": 5
        }),
    );
    let one = run(&["cutoff", "--config", &cfg], Some("1"));
    let again = run(&["cutoff", "--config", &cfg], Some("1"));
    let many = run(&["cutoff", "--config", &cfg], Some("4"));
    assert_eq!(
        one.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&one.stderr)
    );
    assert_eq!(one.stdout, again.stdout);
    assert_eq!(one.stdout, many.stdout);
    let v: Value = serde_json::from_slice(&one.stdout).unwrap();
    assert_eq!(v["result"]["rows"].as_array().unwrap().len(), 4);
    assert!(v["result"]["theta_hat"].as_f64().unwrap() > 0.0);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tv.csv");
    let out = run(
        &[
            "ehrenfest",
            "--n",
            "16",
            "--t-max",
            "3",
            "--out",
            path.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("upper_bound"));
}
