//! End-to-end checks of the `lab` binary: exit codes and emitted CSV files.

use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lab"))
        .args(args)
        .output()
        .expect("lab runs")
}

const SMALL_RUN: &str = r#"
[experiment]
name = "smoke"
problem = "l2_regression"
activation = "relu2"
target = "prod_sin_half_pi:d=1"
dimension = 1
neuron_counts = [8, 16]

[pointset]
scheme = "circle_grid"

[collocation]
per_axis = 128

[error_quadrature]
kind = "tensor"
cells_per_axis = 128
order = 3
"#;

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let path = dir.join("config.toml");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn run_emits_seed_and_geomean_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_RUN);
    let out_dir = dir.path().join("out");
    let out = lab(&[
        "run",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let geomean = std::fs::read_to_string(out_dir.join("smoke.csv")).unwrap();
    assert!(geomean.starts_with("# schema=1\n"));
    assert!(geomean.contains("# experiment=smoke\n"));
    assert!(geomean.contains("n,radius,l2_error"));
    let per_seed = std::fs::read_to_string(out_dir.join("smoke_seed0.csv")).unwrap();
    assert!(per_seed.contains("# seed=0\n"));
}

#[test]
fn run_prints_to_stdout_without_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_RUN);
    let out = lab(&["run", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("# schema=1\n"));
    assert_eq!(stdout.lines().count(), 5 + 2);
}

#[test]
fn bad_config_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    // decreasing neuron counts are a configuration error
    let cfg = write_config(dir.path(), &SMALL_RUN.replace("[8, 16]", "[16, 8]"));
    let out = lab(&["run", cfg.to_str().unwrap()]);
    assert!(!out.status.success());
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("strictly increasing"), "{stderr}");

    let missing = dir.path().join("missing.toml");
    let out = lab(&["run", missing.to_str().unwrap()]);
    assert!(!out.status.success());
}

#[test]
fn numerical_instability_is_not_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    // ReLU mass matrices over full-circle parameters are exactly singular at
    // n >= 4, but the run must still exit 0 and report the row as unstable
    let cfg = write_config(
        dir.path(),
        r#"
[experiment]
name = "unstable"
problem = "l2_min_variational"
activation = "relu1"
target = "prod_sin_half_pi:d=1"
dimension = 1
neuron_counts = [4, 8]

[pointset]
scheme = "circle_grid"

[quadrature]
kind = "tensor"
cells_per_axis = 64
order = 3
"#,
    );
    let out = lab(&["run", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("unstable"), "{stdout}");
}

#[test]
fn pointset_writes_csv() {
    let out = lab(&["pointset", "circle_grid", "--n", "8"]);
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("# scheme="));
    assert_eq!(stdout.lines().count(), 4 + 8);

    let out = lab(&["pointset", "not_a_scheme"]);
    assert!(!out.status.success());
}

#[test]
fn condition_and_spectrum_emit_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SMALL_RUN);
    let out_dir = dir.path().join("out");

    let out = lab(&[
        "spectrum",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(out_dir.join("smoke_spectrum.csv")).unwrap();
    assert!(csv.contains("index,sigma"));
    // one singular value per neuron at the largest n
    assert_eq!(csv.lines().count(), 4 + 16);

    let cond_cfg = write_config(
        dir.path(),
        &SMALL_RUN
            .replace("l2_regression", "l2_min_variational")
            .replace("[error_quadrature]", "[quadrature]"),
    );
    let out = lab(&[
        "condition",
        cond_cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(out_dir.join("smoke_cond.csv")).unwrap();
    assert!(csv.contains("n,cond"));
}
