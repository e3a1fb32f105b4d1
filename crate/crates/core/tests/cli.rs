//! End-to-end checks of the `sa-lab` binary.

use std::path::Path;
use std::process::{Command, Output};

use sa_lab::experiments::CsvTable;

fn sa_lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sa-lab"))
        .args(args)
        .env_remove("SA_LAB_THREADS")
        .output()
        .expect("spawn sa-lab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const GAUSSIAN_CONFIG: &str = "\
[problem]
kind = linear
dim = 2

[noise]
kind = gaussian
std = 1.0

[schedule]
beta = 2.0
k0 = 4.0

[run]
horizon = 2000
runs = 50
moment_orders = 1 2
quantiles = 0.1 0.5 0.9
seed = 11
";

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("gauss.ini");
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn missing_config_exits_2_with_path() {
    let o = sa_lab(&["simulate", "--config", "/nonexistent/cfg.ini", "--out", "/tmp/x"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("/nonexistent/cfg.ini"), "{}", stderr(&o));
}

#[test]
fn malformed_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &GAUSSIAN_CONFIG.replace("std = 1.0", "std = abc"));
    let out = dir.path().join("out");
    let o = sa_lab(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("gauss.ini"));
}

#[test]
fn unknown_flag_exits_2() {
    assert_eq!(sa_lab(&["bounds", "--bogus"]).status.code(), Some(2));
    assert_eq!(sa_lab(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn help_lists_every_flag() {
    let expected: &[(&str, &[&str])] = &[
        ("simulate", &["--config", "--out", "--seed", "--runs", "--threads", "--horizon"]),
        ("bounds", &["--theorem", "--mu", "--lip", "--beta", "--k0", "--sigma", "--p", "--delta", "--k-max"]),
        ("verify", &["--suite", "--seed", "--runs", "--horizon", "--hurst-offset"]),
        ("rate", &["--input", "--column", "--k-min", "--k0"]),
        ("figure", &["--id", "--out", "--runs", "--horizon", "--seed", "--threads"]),
        ("noise-dump", &["--kind", "--alpha", "--hurst", "--c", "--n", "--dim", "--seed", "--out"]),
    ];
    for (cmd, flags) in expected {
        let o = sa_lab(&[cmd, "--help"]);
        assert_eq!(o.status.code(), Some(0));
        let text = stdout(&o);
        for f in *flags {
            assert!(text.contains(f), "{cmd} --help lacks {f}");
        }
    }
}

#[test]
fn simulate_is_deterministic_across_threads() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), GAUSSIAN_CONFIG);
    let mut csvs = Vec::new();
    for (i, threads) in ["1", "3", "1"].iter().enumerate() {
        let out = dir.path().join(format!("out{i}"));
        let o = sa_lab(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap(), "--threads", threads]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(out.join("manifest.json").exists());
        csvs.push(std::fs::read(out.join("gauss.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
    assert_eq!(csvs[0], csvs[2]);

    let other = dir.path().join("seeded");
    let o = sa_lab(&["simulate", "--config", &cfg, "--out", other.to_str().unwrap(), "--seed", "12"]);
    assert_eq!(o.status.code(), Some(0));
    assert_ne!(std::fs::read(other.join("gauss.csv")).unwrap(), csvs[0]);
    let manifest = std::fs::read_to_string(other.join("manifest.json")).unwrap();
    assert!(manifest.contains("\"seed\": 12"));
}

#[test]
fn single_run_has_degenerate_band() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), GAUSSIAN_CONFIG);
    let out = dir.path().join("one");
    let o = sa_lab(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap(), "--runs", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let t = CsvTable::read(&out.join("gauss.csv")).unwrap();
    assert_eq!(t.column("q0.1"), t.column("q0.9"));
    assert_eq!(t.column("q0.1"), t.column("moment_q1"));
    assert!(t.column("se_q1").unwrap().iter().all(|&v| v == 0.0));
}

#[test]
fn simulate_reports_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), GAUSSIAN_CONFIG);
    let out = dir.path().join("diag");
    let o = sa_lab(&["simulate", "--config", &cfg, "--out", out.to_str().unwrap(), "--diagnostics"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("diagnostics over 50 runs"));
}

fn field(text: &str, name: &str) -> String {
    text.lines()
        .find(|l| l.starts_with(name))
        .unwrap_or_else(|| panic!("no `{name}` line in\n{text}"))
        .split_whitespace()
        .nth(1)
        .unwrap()
        .to_string()
}

#[test]
fn bounds_surfaces_constants() {
    let o = sa_lab(&[
        "bounds", "--theorem", "standard", "--mu", "1", "--lip", "2", "--beta", "2", "--sigma", "1", "--k0",
        "10", "--r0", "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    // K0·r0² + 2βσ²/μ.
    assert_eq!(field(&text, "constant").parse::<f64>().unwrap(), 10.0 + 2.0 * 2.0 / 1.0);
    assert_eq!(field(&text, "beta").parse::<f64>().unwrap(), 2.0);

    let o = sa_lab(&[
        "bounds", "--theorem", "heavy", "--beta", "4", "--sigma", "1", "--k0", "4", "--p", "1.5",
    ]);
    // μ = L = 1: 2K0r0^p + 296σ^pβ^{p−1}.
    let c6 = 2.0 * 4.0 + 296.0 * 4f64.powf(0.5);
    assert_eq!(field(&stdout(&o), "constant").parse::<f64>().unwrap(), c6);

    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("lrd.csv");
    let o = sa_lab(&[
        "bounds", "--theorem", "lrd", "--beta", "6", "--sigma", "1", "--k0", "6", "--delta", "0.5", "--k-max",
        "1000", "--out", csv.to_str().unwrap(),
    ]);
    let c9 = 2.0 * 6.0 + 156.0 * 6.0 / 0.5;
    assert_eq!(field(&stdout(&o), "constant").parse::<f64>().unwrap(), c9);
    let t = CsvTable::read(&csv).unwrap();
    let (ks, b) = (t.checkpoints().unwrap(), t.column("bound").unwrap());
    assert_eq!(*ks.last().unwrap(), 1000);
    assert!((b[0] - c9 / 6f64.sqrt()).abs() < 1e-9 * b[0]);
}

#[test]
fn bounds_prints_invalid_flags_and_exits_0() {
    let o = sa_lab(&["bounds", "--theorem", "standard", "--beta", "1", "--sigma", "1", "--k0", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l.starts_with("beta") && l.contains("valid false")), "{text}");
    assert!(text.contains("constants invalid"));
}

#[test]
fn verify_lemmas_passes() {
    let o = sa_lab(&["verify", "--suite", "lemmas"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn verify_smoke_passes() {
    let o = sa_lab(&["verify", "--suite", "u-moments", "--smoke", "--runs", "5", "--horizon", "500"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn verify_noise_negative_control_fails() {
    let o = sa_lab(&["verify", "--suite", "noise", "--hurst-offset", "0.1", "--threads", "1"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn rate_recovers_exact_power_law() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("p.csv");
    let mut text = String::from("k,m\n");
    for j in 0..40 {
        let k = 10 * (j + 1);
        text.push_str(&format!("{k},{:?}\n", 7.0 * (k as f64 + 5.0).powf(-0.6)));
    }
    std::fs::write(&path, text).unwrap();
    let o = sa_lab(&["rate", "--input", path.to_str().unwrap(), "--column", "m", "--k-min", "0", "--k0", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let slope: f64 = field(&stdout(&o), "slope").parse().unwrap();
    assert!((slope + 0.6).abs() < 1e-6);
    let o = sa_lab(&["rate", "--input", path.to_str().unwrap(), "--column", "nope"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn noise_dump_writes_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fgn.csv");
    let o = sa_lab(&[
        "noise-dump", "--kind", "fgn", "--hurst", "0.7", "--n", "64", "--dim", "3", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let t = CsvTable::read(&path).unwrap();
    assert_eq!(t.header, ["k", "eta0", "eta1", "eta2"]);
    assert_eq!(t.columns[0].len(), 64);
    assert!(dir.path().join("manifest.json").exists());

    let a = sa_lab(&["noise-dump", "--kind", "pareto", "--alpha", "1.5", "--n", "10", "--seed", "4"]);
    let b = sa_lab(&["noise-dump", "--kind", "pareto", "--alpha", "1.5", "--n", "10", "--seed", "4"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(stdout(&a).lines().count(), 11);
    assert_eq!(sa_lab(&["noise-dump", "--kind", "stable"]).status.code(), Some(2));
}

#[test]
fn figure_small_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f2");
    let o = sa_lab(&[
        "figure", "--id", "fig2", "--out", out.to_str().unwrap(), "--runs", "8", "--horizon", "300",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for h in ["0.6", "0.7", "0.8", "0.9"] {
        assert!(out.join(format!("fig2_hurst{h}.csv")).exists());
        assert!(out.join(format!("fig2_single_hurst{h}.csv")).exists());
    }
    assert!(out.join("manifest.json").exists());
    assert_eq!(sa_lab(&["figure", "--id", "fig9"]).status.code(), Some(2));
}
