//! End-to-end runs of the `simcli` binary.

use std::path::Path;
use std::process::{Command, Output};

fn simcli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_simcli"))
        .args(args)
        .env_remove("SIMCLI_THREADS")
        .output()
        .expect("simcli runs")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Header and first data row of a CSV report, as a lookup.
fn report(out: &Output) -> Vec<(String, String)> {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from);
    let row = lines.next().unwrap().split(',').map(String::from);
    header.zip(row).collect()
}

fn field(rep: &[(String, String)], key: &str) -> f64 {
    rep.iter().find(|(k, _)| k == key).unwrap_or_else(|| panic!("no column {key}")).1.parse().unwrap()
}

#[test]
fn gamma_estimate_of_small_sample() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.txt");
    std::fs::write(&data, "# three points\n0.5\n1\n\n2\n").unwrap();
    let out = simcli(&["estimate", "--model", "gamma", "--data", path(&data)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rep = report(&out);
    // mu_hat = 1 / (sigma_hat * mean(x log x) - mean(log x)) with sigma_hat = 6/7;
    // reference value from 40-digit arithmetic
    assert!((field(&rep, "mu_hat") - 3.366288428740914617173).abs() < 1e-13);
    assert!((field(&rep, "sigma_hat") - 6.0 / 7.0).abs() < 1e-15);
    assert!((field(&rep, "alpha_hat") - 3.366288428740914617173).abs() < 1e-13);
}

#[test]
fn malformed_line_exits_with_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.txt");
    std::fs::write(&data, "1\n2\n3\n4\n5\n6\nabc\n8\n").unwrap();
    let out = simcli(&["estimate", "--model", "gamma", "--data", path(&data)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 7"));
}

#[test]
fn exit_codes() {
    assert_eq!(simcli(&[]).status.code(), Some(1));
    assert_eq!(simcli(&["estimate", "--model", "gamma"]).status.code(), Some(1));
    assert_eq!(simcli(&["--version"]).status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("d.txt");
    std::fs::write(&data, "2\n2\n2\n2\n2\n2\n").unwrap();
    // a constant sample has no weighted fit
    let out = simcli(&["estimate", "--model", "weighted-inverse-lindley", "--data", path(&data)]);
    assert_eq!(out.status.code(), Some(3));
    let missing = dir.path().join("absent.txt");
    assert_eq!(simcli(&["estimate", "--model", "gamma", "--data", path(&missing)]).status.code(), Some(2));
}

#[test]
fn sample_then_estimate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("wil.txt");
    let out = simcli(&[
        "sample", "--model", "weighted-inverse-lindley", "--params", "lambda=1,phi=1",
        "--n", "1000000", "--seed", "42", "--out", path(&data),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = simcli(&[
        "estimate", "--model", "weighted-inverse-lindley", "--data", path(&data),
        "--bootstrap", "20", "--mle", "--seed", "42",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rep = report(&out);
    for key in ["lambda_hat", "phi_hat", "mu_hat", "sigma_hat", "lambda_boot", "phi_boot", "mu_mle", "sigma_mle"] {
        let v = field(&rep, key);
        assert!((v - 1.0).abs() < 0.01, "{key} = {v}");
    }
    let (lo, hi) = (field(&rep, "mu_lower"), field(&rep, "mu_upper"));
    assert!(lo < field(&rep, "mu_hat") && field(&rep, "mu_hat") < hi);
}

#[test]
fn sampling_is_reproducible_and_full_precision() {
    let a = simcli(&["sample", "--model", "gamma", "--params", "alpha=2,beta=3", "--n", "5", "--seed", "7"]);
    let b = simcli(&["sample", "--model", "gamma", "--params", "alpha=2,beta=3", "--n", "5", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
    for line in text.lines() {
        let mantissa = line.split('e').next().unwrap().replace(['.', '-'], "");
        assert_eq!(mantissa.len(), 17, "{line}");
    }
}

#[test]
fn moments_report() {
    let out = simcli(&["moments", "--model", "weighted-inverse-lindley", "--params", "lambda=1,phi=2", "--q", "-1,1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    // E[X^-1] = h4 = (1 + w2 / mu) / sigma with mu = 2, sigma = 1/2, w2 = 2/3
    let h4: f64 = text.lines().find(|l| l.starts_with("h4,")).unwrap()[3..].parse().unwrap();
    assert!((h4 - 8.0 / 3.0).abs() < 1e-14);
    let m: f64 = text.lines().find(|l| l.starts_with("E[X^-1],")).unwrap()[8..].parse().unwrap();
    assert!((m - h4).abs() < 1e-14);
}

#[test]
fn simulate_writes_both_files_and_honours_thread_env() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.cfg");
    std::fs::write(&cfg, "model = gamma\nalpha = 2\nbeta = 1, 3\nn = 10, 40\nreplications = 5\nestimators = mom, mle\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = Command::new(env!("CARGO_BIN_EXE_simcli"))
        .args(["simulate", "--seed", "1", "--config", path(&cfg), "--out", path(&out_dir)])
        .env("SIMCLI_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let metrics = std::fs::read_to_string(out_dir.join("metrics.csv")).unwrap();
    // 4 cells, 2 estimators, 2 parameters
    assert_eq!(metrics.lines().count(), 1 + 4 * 2 * 2);
    let estimates = std::fs::read_to_string(out_dir.join("estimates.csv")).unwrap();
    assert_eq!(estimates.lines().count(), 1 + 4 * 5 * 2);

    std::fs::write(&cfg, "model = gamma\nalpha = 2\nbeta = nope\n").unwrap();
    let bad = simcli(&["simulate", "--seed", "1", "--config", path(&cfg), "--out", path(&out_dir)]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("line 3"));
}
