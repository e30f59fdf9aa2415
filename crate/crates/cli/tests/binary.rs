//! The `confsym` executable: exit codes, files and configuration merging.

use std::process::{Command, Output};

use serde_json::Value;

fn confsym(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_confsym"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

#[test]
fn branch_example_exits_zero() {
    let out = confsym(&["branch", "p=4", "q=4", "q1=2", "q2=2", "cutoff=12"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["equal"], true);
}

#[test]
fn zeta_example() {
    let out = confsym(&["zeta", "op=yamabe", "n=4"]);
    assert_eq!(out.status.code(), Some(0));
    let z: f64 = json(&out)["zeta0"].to_string().parse().unwrap();
    assert!((z + 1.0 / 90.0).abs() <= 1e-8, "{z}");
}

#[test]
fn parity_error_exits_one() {
    let out = confsym(&["branch", "p=4", "q=5", "q1=2", "q2=3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parity"));
    assert!(out.stdout.is_empty());
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(confsym(&[]).status.code(), Some(1));
    assert_eq!(confsym(&["nonsense"]).status.code(), Some(1));
    assert_eq!(confsym(&["zeta", "op"]).status.code(), Some(1));
    assert_eq!(confsym(&["zeta", "--threads", "0"]).status.code(), Some(1));
    assert_eq!(confsym(&["zeta", "--bogus"]).status.code(), Some(1));
}

#[test]
fn failed_check_exits_two() {
    let out = confsym(&["cone", "kind=residual", "min_order=5"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json(&out)["status"], "verification_failed");
}

#[test]
fn out_and_csv_files() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let table = dir.path().join("t.csv");
    let out = confsym(&[
        "spectrum",
        "op=yamabe",
        "n=4",
        "kmax=1",
        "--exact",
        "--out",
        report.to_str().unwrap(),
        "--csv",
        table.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["lines"][1]["eig"], "6");
    assert_eq!(r["lines"][1]["mult"], 5);
    let csv = std::fs::read_to_string(&table).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.lines().nth(1).unwrap().starts_with("0,2"));

    // a command without a table cannot honour --csv
    let out = confsym(&["zeta", "--csv", table.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_file_and_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.json");
    std::fs::write(
        &path,
        r#"{"command": "spectrum", "params": {"op": "laplace", "n": "2", "kmax": "3"}, "seed": 4}"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();

    let from_file = json(&confsym(&["--config", p]));
    assert_eq!(from_file["lines"].as_array().unwrap().len(), 4);
    assert_eq!(from_file["config"]["seed"], 4);

    // command-line pairs and flags override the file
    let merged = json(&confsym(&["kmax=1", "--config", p, "--seed", "9"]));
    assert_eq!(merged["lines"].as_array().unwrap().len(), 2);
    assert_eq!(merged["config"]["seed"], 9);

    let printed = confsym(&["zeta", "n=3", "--config", p, "--print-config"]);
    let cfg: Value = serde_json::from_slice(&printed.stdout).unwrap();
    assert_eq!(cfg["command"], "zeta");
    assert_eq!(cfg["params"]["n"], "3");
    assert_eq!(cfg["params"]["op"], "laplace");

    std::fs::write(&path, r#"{"command": "spectrum", "surprise": 1}"#).unwrap();
    assert_eq!(confsym(&["--config", p]).status.code(), Some(1));
}

#[test]
fn reports_are_reproducible() {
    let args = ["functional", "kind=deficit", "which=hls", "p=1.5", "samples=3", "--seed", "5"];
    let a = confsym(&args);
    let b = confsym(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = confsym(&["functional", "kind=deficit", "which=hls", "p=1.5", "samples=3", "--seed", "6"]);
    assert_ne!(a.stdout, c.stdout);
}
