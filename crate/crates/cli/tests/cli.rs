use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn shpattern(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shpattern"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn csv_files(dir: &Path) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .collect();
    files.sort();
    files
}

fn run_in(dir: &Path, args: &[&str]) -> Vec<PathBuf> {
    let mut full = args.to_vec();
    let out = dir.to_str().unwrap();
    full.extend(["--output-dir", out]);
    let result = shpattern(&full);
    assert!(
        result.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&result.stderr)
    );
    assert!(dir.join("manifest.json").exists());
    csv_files(dir)
}

const SMALL_RUNS: &[&[&str]] = &[
    &["dispersion", "--k-min", "0.8", "--k-max", "1.2", "--k-steps", "3", "--t-end", "2"],
    &["compare", "--r", "0.05", "--n-elements", "4", "--t-end", "4", "--dt", "0.2"],
    &["boundary-select", "--n-elements", "4", "--t-end", "2", "--sample-interval", "0.5", "--m-samples", "16"],
    &["boundary-equilibrium", "--r", "0", "--alpha", "0.05", "--beta", "0.05", "--n-elements", "4", "--t-end", "5"],
    &["boundary-profiles", "--points", "16", "--sign", "lower"],
    &["simulate-direct", "--profile", "random", "--seed", "9", "--n-elements", "2", "--m-samples", "16", "--t-end", "1"],
    &["simulate-model", "--profile", "random", "--seed", "9", "--kind", "odd-given", "--t-end", "3"],
];

#[test]
fn reruns_are_byte_identical() {
    for args in SMALL_RUNS {
        let first = tempfile::tempdir().unwrap();
        let second = tempfile::tempdir().unwrap();
        let a = run_in(first.path(), args);
        let b = run_in(second.path(), args);
        assert_eq!(a.len(), b.len());
        assert!(!a.is_empty(), "{args:?} wrote no tables");
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap(), "{args:?}: {}", x.display());
        }
    }
}

#[test]
fn every_table_has_a_header_and_manifest_records_the_run() {
    for args in SMALL_RUNS {
        let dir = tempfile::tempdir().unwrap();
        let files = run_in(dir.path(), args);
        for file in &files {
            let text = fs::read_to_string(file).unwrap();
            let header = text.lines().next().unwrap();
            assert!(header.split(',').all(|c| c.chars().next().is_some_and(char::is_alphabetic)), "{header}");
            let name = file.file_name().unwrap().to_str().unwrap();
            assert!(name.starts_with(args[0]), "{name}");
        }
        let manifest: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
        assert_eq!(manifest["experiment"], args[0]);
        assert_eq!(manifest["rng"], "ChaCha8Rng");
        assert!(manifest["wall_time_seconds"].as_f64().unwrap() >= 0.0);
        assert!(manifest["config"]["params"]["r"].is_number());
        assert!(manifest["outputs"].as_array().unwrap().len() >= files.len());
    }
}

#[test]
fn dispersion_table_matches_theory_at_critical_wavenumber() {
    let dir = tempfile::tempdir().unwrap();
    let files = run_in(
        dir.path(),
        &["dispersion", "--r", "0.1", "--k-min", "0.5", "--k-max", "1.5", "--k-steps", "21"],
    );
    let text = fs::read_to_string(&files[0]).unwrap();
    assert_eq!(text.lines().next().unwrap(), "k,lambda_theory,lambda_measured");
    assert_eq!(text.lines().count(), 22);
    let row: Vec<f64> = text
        .lines()
        .find(|l| l.starts_with("1,"))
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert!((row[1] - 0.1).abs() < 1e-12 && (row[2] - 0.1).abs() < 1e-6);
}

#[test]
fn profile_table_columns() {
    let dir = tempfile::tempdir().unwrap();
    let files = run_in(dir.path(), &["boundary-profiles", "--p", "1", "--sign", "upper"]);
    let text = fs::read_to_string(&files[0]).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "x,alpha_profile,beta_profile,alpha_profile_xx,beta_profile_xx"
    );
    assert_eq!(text.lines().count(), 66);
}

#[test]
fn config_file_is_read_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.json");
    fs::write(
        &config,
        r#"{"experiment": "simulate-model", "params": {"r": 0.2, "n_elements": 3}, "solver": {"t_end": 1.0}}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let result = shpattern(&[
        "run",
        "--config",
        config.to_str().unwrap(),
        "--r",
        "0.3",
        "--output-dir",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{}", String::from_utf8_lossy(&result.stderr));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["experiment"], "simulate-model");
    assert_eq!(manifest["config"]["params"]["r"], 0.3);
    assert_eq!(manifest["config"]["params"]["n_elements"], 3);
}

#[test]
fn invalid_key_exits_one_naming_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.json");
    fs::write(&config, r#"{"params": {"r": 0.1, "bifurcation": 2}}"#).unwrap();
    let result = shpattern(&["compare", "--config", config.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&result.stderr).contains("bifurcation"));

    let result = shpattern(&["compare", "--no-such-flag", "1"]);
    assert_eq!(result.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&result.stderr).contains("no-such-flag"));
}

#[test]
fn invalid_values_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    for args in [
        &["simulate-model", "--m-samples", "20", "--output-dir", out][..],
        &["simulate-model", "--gamma", "2", "--output-dir", out][..],
        &["boundary-select", "--kind", "odd-given", "--sign", "upper", "--output-dir", out][..],
        &["simulate-model", "--sign", "sideways", "--output-dir", out][..],
    ] {
        let result = shpattern(args);
        assert_eq!(result.status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn divergence_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let result = shpattern(&[
        "simulate-model",
        "--r",
        "5",
        "--amplitude",
        "50",
        "--relative",
        "false",
        "--t-end",
        "100",
        "--dt",
        "0.4",
        "--output-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(result.status.code(), Some(2));
}

#[test]
fn help_and_version_succeed() {
    let help = shpattern(&["compare", "--help"]);
    assert_eq!(help.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&help.stdout).contains("--n-elements"));
    assert_eq!(shpattern(&["--version"]).status.code(), Some(0));
    assert_eq!(shpattern(&[]).status.code(), Some(1));
}

#[test]
fn fast_forcing_triggers_a_warning() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("wiggle.json");
    fs::write(
        &config,
        r#"{"forcing": {"kind": "even-given", "alpha": {"type": "harmonic", "mean": 0.0, "amplitude": 0.1, "omega": 3.0, "phase": 0.0}}, "solver": {"t_end": 2.0}}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let result = shpattern(&[
        "simulate-model",
        "--config",
        config.to_str().unwrap(),
        "--output-dir",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success());
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["warnings"].as_array().unwrap().len(), 1);
}
