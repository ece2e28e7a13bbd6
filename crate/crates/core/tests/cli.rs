//! End-to-end runs of the `renewal-sim` binary.

use std::path::Path;
use std::process::Command;

use renewal_control::cli::{parse_config, SummaryRecord};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_renewal-sim"))
}

fn config(name: &str) -> String {
    format!("{}/tests/configs/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)).unwrap()
}

#[test]
fn tiny_run_matches_golden_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .arg("run")
        .arg(config("tiny.toml"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let trace = std::fs::read_to_string(dir.path().join("one_class_V1/trace.csv")).unwrap();
    assert_eq!(trace, golden("one_class_k20_trace.csv"));
}

#[test]
fn summary_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .arg("run")
        .arg(config("tiny.toml"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = std::fs::read_to_string(dir.path().join("one_class_V1/summary.toml")).unwrap();
    let rec = SummaryRecord::from_toml(&text).unwrap();
    assert_eq!(rec.summary.frames, 20);
    assert_eq!(rec.summary.seed, 1);
    assert_eq!(rec.summary.moving_window, 1000);
    assert_eq!(rec.summary.v, 1.0);
    assert_eq!(SummaryRecord::from_toml(&rec.to_toml().unwrap()).unwrap(), rec);
}

#[test]
fn trace_row_count_follows_frames() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args([
            "run",
            "--scenario",
            "one_class",
            "--V",
            "1",
            "--frames",
            "100",
            "--emit",
            "trace",
            "--out",
        ])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let run_dir = dir.path().join("one_class_V1");
    let trace = std::fs::read_to_string(run_dir.join("trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 101);
    assert!(!run_dir.join("summary.toml").exists());
}

#[test]
fn sweep_writes_one_directory_per_v() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .arg("run")
        .arg(config("sweep.toml"))
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let table = String::from_utf8(out.stdout).unwrap();
    for v in ["0", "0.3", "1"] {
        assert!(dir.path().join(format!("ten_class_V{v}/summary.toml")).exists());
    }
    assert_eq!(table.lines().count(), 5, "{table}");
}

#[test]
fn inline_lfp_config_runs() {
    let out = bin().arg("run").arg(config("inline_lfp.toml")).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let cfg = parse_config(&std::fs::read_to_string(config("inline_lfp.toml")).unwrap()).unwrap();
    assert_eq!(cfg.inline.unwrap().name, "small_lfp");
}

#[test]
fn config_errors_exit_with_two() {
    let out = bin().arg("run").arg(config("bad_number.toml")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("V"));
    let out = bin().args(["run", "--scenario", "missing"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_failures_exit_with_one() {
    let file = tempfile::NamedTempFile::new().unwrap();
    let out = bin()
        .args(["run", "--scenario", "one_class", "--frames", "10", "--out"])
        .arg(file.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn oracle_and_listing() {
    let out = bin().args(["oracle", "--scenario", "one_class"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("power_opt = 0.466666666666"), "{text}");
    let out = bin().args(["oracle", "--scenario", "smart_device"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let out = bin().arg("list-scenarios").output().unwrap();
    assert!(String::from_utf8(out.stdout).unwrap().lines().count() >= 9);
}
