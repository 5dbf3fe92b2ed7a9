use std::fs;
use std::path::Path;
use std::process::Command;

use smcg::harness::{self, presets, ExperimentConfig};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_smcg"))
}

fn small_fig6() -> ExperimentConfig {
    let mut cfg = presets::preset("fig6").unwrap();
    cfg.runs = 2;
    cfg
}

#[test]
fn same_seed_gives_identical_results() {
    let mut cfg = small_fig6();
    cfg.runs = 1;
    assert_eq!(harness::run_experiment(&cfg).unwrap(), harness::run_experiment(&cfg).unwrap());
    let mut other = cfg.clone();
    other.master_seed += 1;
    assert_ne!(
        harness::run_experiment(&cfg).unwrap().algorithms[0].mean_sinr_db,
        harness::run_experiment(&other).unwrap().algorithms[0].mean_sinr_db
    );
}

#[test]
fn csv_has_one_row_per_snapshot_and_algorithm() {
    let cfg = small_fig6();
    let res = harness::run_experiment(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig6.csv");
    harness::emit_csv(&res, &path).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "snapshot,algorithm,mean_sinr_db,mean_delta,update_rate_cum");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3000 * cfg.algorithms.len());
    for spec in &cfg.algorithms {
        let count = rows.iter().filter(|r| r.split(',').nth(1) == Some(spec.label())).count();
        assert_eq!(count, 3000);
    }
    assert!(rows[0].starts_with("1,sm-cg,"));
    assert!(rows.last().unwrap().starts_with("3000,mvdr,"));
}

fn run_cli(out: &Path, extra: &[&str]) -> std::process::Output {
    bin()
        .args(["run", "--preset", "fig6", "--runs", "2", "--seed", "11", "--out"])
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

#[test]
fn cli_output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(run_cli(&a, &["--set", "scenario.snapshots=500"]).status.success());
    assert!(run_cli(&b, &["--set", "scenario.snapshots=500"]).status.success());
    let fa = fs::read(a.join("fig6.csv")).unwrap();
    assert_eq!(fa, fs::read(b.join("fig6.csv")).unwrap());
    assert_eq!(fa.iter().filter(|&&c| c == b'\n').count(), 1 + 500 * 5);
    let summary = fs::read_to_string(a.join("fig6_summary.txt")).unwrap();
    assert!(summary.contains("master seed  11"));
}

#[test]
fn cli_rejects_invalid_configuration_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let res = run_cli(&out, &["--set", "scenario.snapshots=0"]);
    assert!(!res.status.success());
    assert!(String::from_utf8_lossy(&res.stderr).contains("scenario.snapshots"));
    assert!(!out.exists());

    let res = bin().args(["run", "--preset", "nope"]).output().unwrap();
    assert!(!res.status.success());
}

#[test]
fn cli_reads_config_files() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = presets::preset("baseline").unwrap();
    cfg.runs = 1;
    cfg.scenario.snapshots = 50;
    cfg.name = "custom".into();
    let path = dir.path().join("custom.toml");
    fs::write(&path, cfg.to_toml().unwrap()).unwrap();
    let out = dir.path().join("o");
    let res = bin().arg("run").arg("--config").arg(&path).arg("--out").arg(&out).output().unwrap();
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let csv = fs::read_to_string(out.join("custom.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 50 * 4);
    let echoed = ExperimentConfig::from_toml(&fs::read_to_string(out.join("custom.toml")).unwrap()).unwrap();
    assert_eq!(echoed, cfg);
}

#[test]
fn cli_complexity_and_presets() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.csv");
    let res = bin()
        .args(["complexity", "--m-min", "8", "--m-max", "10", "--out"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(res.status.success());
    assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), 1 + 3 * 8);

    let res = bin().arg("list-presets").output().unwrap();
    assert!(res.status.success());
    let text = String::from_utf8(res.stdout).unwrap();
    for name in presets::names() {
        assert!(text.contains(name));
    }
}

#[test]
fn sweep_writes_one_row_per_point_and_algorithm() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o");
    let res = bin()
        .args(["run", "--preset", "fig8", "--runs", "1", "--set", "scenario.snapshots=200", "--set", "sweep.snr_db=[0.0, 10.0]", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let text = fs::read_to_string(out.join("fig8_sweep.csv")).unwrap();
    assert_eq!(text.lines().next().unwrap(), "snr_db,algorithm,tail_sinr_db,update_rate");
    assert_eq!(text.lines().count(), 1 + 2 * 5);
}
