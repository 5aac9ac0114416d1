use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn tailfit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tailfit"))
        .args(args)
        .env("RUST_LOG", "info")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = tailfit(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn code(args: &[&str]) -> i32 {
    tailfit(args).status.code().expect("exit code")
}

fn read_numbers(path: &Path) -> Vec<f64> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| l.parse().unwrap())
        .collect()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn p(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_owned()
}

#[test]
fn sample_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (p(&dir, "a.txt"), p(&dir, "b.txt"));
    let out = ok(&[
        "sample",
        "pareto:1,1.5",
        "--n",
        "100",
        "--seed",
        "42",
        "--out",
        &a,
    ]);
    ok(&[
        "sample",
        "pareto:1,1.5",
        "--n",
        "100",
        "--seed",
        "42",
        "--out",
        &b,
    ]);
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    let values = read_numbers(Path::new(&a));
    assert_eq!(values.len(), 100);
    assert!(values.iter().all(|&v| v >= 1.0));
    let summary = String::from_utf8(out.stdout).unwrap();
    assert!(summary.starts_with("n=100 min="), "{summary}");

    ok(&[
        "sample",
        "pareto:1,1.5",
        "--n",
        "100",
        "--seed",
        "43",
        "--out",
        &b,
    ]);
    assert_ne!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn sample_to_stdout() {
    let out = ok(&["sample", "lomax:20,1.5", "--n", "10000"]);
    let values: Vec<f64> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| l.parse().unwrap())
        .collect();
    assert_eq!(values.len(), 10_000);
    assert!(values.iter().all(|&v| v >= 0.0));
}

#[test]
fn piecewise_tail_count() {
    let dir = TempDir::new().unwrap();
    let f = p(&dir, "pw.txt");
    ok(&["sample", "piecewise:20,1.5", "--n", "10000", "--out", &f]);
    let above = read_numbers(Path::new(&f))
        .iter()
        .filter(|&&v| v > 20.0)
        .count();
    assert!((above as i64 - 2231).abs() <= 150, "{above}");
}

#[test]
fn bad_dist_spec_is_validation_error() {
    for spec in ["pareto:1", "weibull:1,2", "pareto:-1,2", "lomax:20,0"] {
        assert_eq!(code(&["sample", spec, "--n", "10"]), 2, "{spec}");
    }
    assert_eq!(code(&["sample", "pareto:1,1.5", "--n", "0"]), 2);
}

#[test]
fn unwritable_output_is_io_error() {
    let dir = TempDir::new().unwrap();
    let f = p(&dir, "missing/dir/out.txt");
    assert_eq!(
        code(&["sample", "pareto:1,1.5", "--n", "10", "--out", &f]),
        1
    );
}

#[test]
fn fit_three_equal_values() {
    let dir = TempDir::new().unwrap();
    let f = p(&dir, "e.txt");
    let e = std::f64::consts::E;
    fs::write(&f, format!("{e}\n{e}\n{e}\n")).unwrap();
    let out = ok(&["fit", &f, "--xm", "1", "--estimator", "MLE1"]);
    let v = json(&out);
    assert_eq!(v["estimator"], "MLE1");
    assert_eq!(v["n"], 3);
    assert!((v["beta_hat"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn fit_piecewise_tail() {
    let dir = TempDir::new().unwrap();
    let f = p(&dir, "pw.txt");
    ok(&[
        "sample",
        "piecewise:20,1.5",
        "--n",
        "10000",
        "--seed",
        "7",
        "--out",
        &f,
    ]);
    for est in ["MLE2", "OLS2"] {
        let out = ok(&["fit", &f, "--xm", "20", "--estimator", est]);
        let v = json(&out);
        let n_tail = v["n"].as_f64().unwrap();
        let beta_hat = v["beta_hat"].as_f64().unwrap();
        let half = 3.0 * 1.5 / n_tail.sqrt();
        assert!(
            (beta_hat - 1.5).abs() < half,
            "{est}: {beta_hat} (n_tail {n_tail})"
        );
        let log = String::from_utf8_lossy(&out.stderr);
        assert!(log.contains("dropped"), "{log}");
    }
}

#[test]
fn fit_csv_format() {
    let dir = TempDir::new().unwrap();
    let f = p(&dir, "d.txt");
    fs::write(&f, "2\n3\n5\n8\n").unwrap();
    let out = ok(&[
        "fit",
        &f,
        "--xm",
        "1",
        "--estimator",
        "ols2",
        "--gamma",
        "1.5",
        "--format",
        "csv",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("estimator,beta_hat,n,correction,gamma"));
    assert!(lines.next().unwrap().starts_with("OLS2,"));
}

#[test]
fn fit_errors() {
    let dir = TempDir::new().unwrap();
    let f = p(&dir, "d.txt");
    fs::write(&f, "0.5\n2\n").unwrap();
    // one value above xm, MLE2 needs two
    assert_eq!(code(&["fit", &f, "--xm", "1", "--estimator", "MLE2"]), 2);
    assert_eq!(code(&["fit", &f, "--xm", "1", "--estimator", "MLE1"]), 0);
    assert_eq!(code(&["fit", &f, "--xm", "-1"]), 2);
    fs::write(&f, "1.5\nabc\n").unwrap();
    assert_eq!(code(&["fit", &f, "--xm", "1"]), 2);
    assert_eq!(code(&["fit", &p(&dir, "nope.txt"), "--xm", "1"]), 1);
    assert_eq!(code(&["fit", &f, "--xm", "1", "--estimator", "HILL"]), 2);
}

#[test]
fn cutoff_on_pareto_sample() {
    let dir = TempDir::new().unwrap();
    let f = p(&dir, "p.txt");
    let scan = p(&dir, "scan.csv");
    ok(&[
        "sample",
        "pareto:1,1.5",
        "--n",
        "2000",
        "--seed",
        "3",
        "--out",
        &f,
    ]);
    let out = ok(&["cutoff", &f, "--out", &scan]);
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let xm_hat = summary["xm_hat"].as_f64().unwrap();
    let values = read_numbers(Path::new(&f));
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(xm_hat >= min);
    let beta_hat = summary["beta_hat"].as_f64().unwrap();
    assert!((beta_hat - 1.5).abs() < 0.3, "{summary}");
    assert_eq!(summary["fit_estimator"], "MLE1");

    let csv = fs::read_to_string(&scan).unwrap();
    assert_eq!(csv.lines().next(), Some("candidate_xm,ks,beta_hat"));
    assert_eq!(
        csv.lines().count() - 1,
        summary["candidates"].as_u64().unwrap() as usize
    );
}

#[test]
fn cutoff_json_and_errors() {
    let dir = TempDir::new().unwrap();
    let f = p(&dir, "p.txt");
    ok(&["sample", "pareto:1,1.5", "--n", "50", "--out", &f]);
    let v = json(&ok(&["cutoff", &f, "--format", "json"]));
    assert!(v["xm_hat"].as_f64().unwrap() >= 1.0);
    assert_eq!(code(&["cutoff", &f, "--min-tail", "51"]), 2);
    assert_eq!(code(&["cutoff", &p(&dir, "nope.txt")]), 1);
}

#[test]
fn renyi_minimal_run() {
    let dir = TempDir::new().unwrap();
    let f = p(&dir, "r.csv");
    ok(&["renyi", "--n", "2", "--draws", "100", "--out", &f]);
    let text = fs::read_to_string(&f).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("draw_index,factor,beta_hat"));
    assert_eq!(lines.count(), 100);
}

#[test]
fn renyi_rejects_small_n() {
    assert_eq!(code(&["renyi", "--n", "1"]), 2);
    assert_eq!(code(&["renyi", "--n", "0", "--no-compare"]), 2);
}

#[test]
fn renyi_equivalence_and_beta_scaling() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (p(&dir, "a.csv"), p(&dir, "b.csv"));
    let out = ok(&[
        "renyi", "--n", "100", "--draws", "5000", "--beta", "1.5", "--out", &a,
    ]);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["accepted"], true, "{report}");
    ok(&[
        "renyi",
        "--n",
        "100",
        "--draws",
        "5000",
        "--beta",
        "3",
        "--no-compare",
        "--out",
        &b,
    ]);

    let column = |path: &str| -> Vec<f64> {
        let mut r = csv::Reader::from_path(path).unwrap();
        r.records()
            .map(|rec| rec.unwrap()[2].parse().unwrap())
            .collect()
    };
    let (x, y) = (column(&a), column(&b));
    assert_eq!(x.len(), 5000);
    assert!(x.iter().zip(&y).all(|(x, y)| 2.0 * x == *y));
}

#[test]
fn grid_minimal_run() {
    let dir = TempDir::new().unwrap();
    let cfg = p(&dir, "grid.json");
    fs::write(
        &cfg,
        r#"{"beta_true": 1.5, "n_grid": [10], "replications": 2, "seed": 1}"#,
    )
    .unwrap();
    let out_dir = p(&dir, "out");
    ok(&["grid", &cfg, "--out", &out_dir]);
    let stats = fs::read_to_string(dir.path().join("out/grid_stats.csv")).unwrap();
    assert_eq!(
        stats.lines().next(),
        Some("n,estimator,mean,variance,se_mean")
    );
    assert_eq!(stats.lines().count(), 1 + 4);
    let closer = fs::read_to_string(dir.path().join("out/closer_probability.csv")).unwrap();
    assert_eq!(closer.lines().next(), Some("n,closer_probability"));
    assert_eq!(closer.lines().count(), 2);
}

#[test]
fn grid_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = p(&dir, "grid.json");
    fs::write(
        &cfg,
        r#"{"beta_true": 2.0, "n_grid": [20, 40], "replications": 50, "seed": 9}"#,
    )
    .unwrap();
    let a = ok(&["grid", &cfg]).stdout;
    let b = ok(&["grid", &cfg]).stdout;
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.contains("\n\nn,closer_probability\n"), "{text}");
}

#[test]
fn grid_without_pair_omits_closer() {
    let dir = TempDir::new().unwrap();
    let cfg = p(&dir, "grid.json");
    fs::write(
        &cfg,
        r#"{"beta_true": 1.5, "n_grid": [10, 20], "replications": 5, "seed": 1,
            "estimators": ["OLS1", "OLS2"], "closer_probability": true}"#,
    )
    .unwrap();
    let out_dir = p(&dir, "out");
    let out = ok(&["grid", &cfg, "--out", &out_dir]);
    assert!(String::from_utf8_lossy(&out.stderr).contains("closer_probability"));
    assert!(dir.path().join("out/grid_stats.csv").exists());
    assert!(!dir.path().join("out/closer_probability.csv").exists());
}

#[test]
fn grid_config_errors() {
    let dir = TempDir::new().unwrap();
    let cfg = p(&dir, "grid.json");
    for bad in [
        "{",
        r#"{"beta_true": 1.5, "n_grid": [], "replications": 2, "seed": 1}"#,
        r#"{"beta_true": -1, "n_grid": [10], "replications": 2, "seed": 1}"#,
        r#"{"beta_true": 1.5, "n_grid": [10], "replications": 2, "seed": 1, "typo": 1}"#,
    ] {
        fs::write(&cfg, bad).unwrap();
        assert_eq!(code(&["grid", &cfg]), 2, "{bad}");
    }
    assert_eq!(code(&["grid", &p(&dir, "missing.json")]), 1);
}

#[test]
fn fit_gamma_on_noiseless_curve() {
    let dir = TempDir::new().unwrap();
    let f = p(&dir, "curve.csv");
    let beta = 1.5;
    let mut text = String::from("n,mean\n");
    for n in (10..=1000).step_by(10) {
        let nf = n as f64;
        let r = (std::f64::consts::E - nf.ln().powf(1.6) / nf).ln();
        text.push_str(&format!("{n},{}\n", beta * r));
    }
    fs::write(&f, text).unwrap();
    let v = json(&ok(&["fit-gamma", &f, "--beta", "1.5"]));
    assert!((v["gamma"].as_f64().unwrap() - 1.6).abs() < 1e-3, "{v}");
}

#[test]
fn fit_gamma_reads_grid_output() {
    let dir = TempDir::new().unwrap();
    let cfg = p(&dir, "grid.json");
    fs::write(
        &cfg,
        r#"{"beta_true": 1.5, "n_grid": [50, 100, 200, 400], "replications": 200, "seed": 2}"#,
    )
    .unwrap();
    let out_dir = p(&dir, "out");
    ok(&["grid", &cfg, "--out", &out_dir]);
    let stats = p(&dir, "out/grid_stats.csv");
    let v = json(&ok(&["fit-gamma", &stats, "--beta", "1.5"]));
    assert_eq!(v["points"], 4);
    let g = v["gamma"].as_f64().unwrap();
    assert!((1.0..=2.5).contains(&g));

    fs::write(&cfg, "x,y\n1,2\n").unwrap();
    assert_eq!(code(&["fit-gamma", &cfg, "--beta", "1.5"]), 2);
}
