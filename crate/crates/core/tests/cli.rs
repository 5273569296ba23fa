//! Exit codes and artifacts of the command-line driver.

mod common;

use common::config_path;
use std::path::Path;
use std::process::{Command, Output};

fn sonic_patch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sonic-patch")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

/// The reference config with one `key = value` line replaced.
fn variant(dir: &Path, key: &str, value: &str) -> String {
    let text = std::fs::read_to_string(config_path("reference.toml")).unwrap();
    let mut found = false;
    let lines: Vec<String> = text
        .lines()
        .map(|l| {
            if l.trim_start().starts_with(&format!("{key} =")) || l.trim_start().starts_with(&format!("# {key} ")) {
                found = true;
                format!("{key} = {value}")
            } else {
                l.to_string()
            }
        })
        .collect();
    assert!(found, "no line for {key}");
    let path = dir.join(format!("{key}.toml"));
    std::fs::write(&path, lines.join("\n")).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn reference_config_exits_zero_and_writes_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = config_path("reference.toml");
    let o = sonic_patch(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["boundary.csv", "field.csv", "patch.csv", "patch_refined.csv", "sonic.csv", "monitors.json", "run.json", "report.json"] {
        assert!(out.join(f).is_file(), "{f}");
    }
    let head = std::fs::read_to_string(out.join("patch.csv")).unwrap();
    assert!(head.starts_with("xi,eta,u,v,tau,c,theta,wbar,tag"));
    let sonic = std::fs::read_to_string(out.join("sonic.csv")).unwrap();
    assert!(sonic.starts_with("xi,eta,tangent_angle\n"));
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["schema_version"], 1);

    let v = sonic_patch(&["--verify-only", out.to_str().unwrap()]);
    assert_eq!(code(&v), 0, "{}", String::from_utf8_lossy(&v.stderr));
}

#[test]
fn gamma_outside_unit_interval_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = variant(dir.path(), "gamma", "1.5");
    assert_eq!(code(&sonic_patch(&["run", &cfg, "--out", dir.path().to_str().unwrap()])), 2);
}

#[test]
fn sonic_volume_below_covolume_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = variant(dir.path(), "tau_m", "0.04");
    assert_eq!(code(&sonic_patch(&["run", &cfg, "--out", dir.path().to_str().unwrap()])), 2);
}

#[test]
fn unreadable_or_malformed_configs_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&sonic_patch(&["run", "/nonexistent/config.toml"])), 2);
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "seed = \"seven\"\n").unwrap();
    assert_eq!(code(&sonic_patch(&["run", bad.to_str().unwrap()])), 2);
    assert_eq!(code(&sonic_patch(&[])), 2);
    assert_eq!(code(&sonic_patch(&["run"])), 2);
}

#[test]
fn unknown_monitor_override_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = variant(dir.path(), "tau_rtol", "1e-12\nmonitors = { not_a_monitor = 1.0 }");
    assert_eq!(code(&sonic_patch(&["run", &cfg, "--out", dir.path().to_str().unwrap()])), 2);
}

#[test]
fn failing_mandatory_check_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = variant(dir.path(), "tau_rtol", "1e-12\nmonitors = { holder_alpha_min = 0.999 }");
    let o = sonic_patch(&["run", &cfg, "--out", dir.path().join("out").to_str().unwrap()]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("out/report.json").is_file());
}

#[test]
fn boundary_breakdown_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = variant(dir.path(), "tau_m", "5.0");
    let o = sonic_patch(&["run", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
}
