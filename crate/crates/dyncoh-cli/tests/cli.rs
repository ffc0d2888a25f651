//! End-to-end tests of the `dyncoh` binary: exit codes, report files, and
//! determinism across runs.

use std::path::Path;
use std::process::{Command, Output};

fn dyncoh(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_dyncoh"));
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn verify_passes_and_reports_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"suite": "thm5", "dims": [2], "n_channels": 4, "seed": 21}"#,
    );
    let out_a = dir.path().join("run_a");
    let out_b = dir.path().join("run_b");

    let run_a = dyncoh(
        &[
            "verify",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_a.to_str().unwrap(),
        ],
        &[("DYNCOH_THREADS", "1")],
    );
    assert!(
        run_a.status.success(),
        "{}",
        String::from_utf8_lossy(&run_a.stderr)
    );
    let stdout = String::from_utf8_lossy(&run_a.stdout);
    assert!(stdout.contains("PASS"), "{stdout}");

    // Second run with a different worker count must produce identical bytes.
    let run_b = dyncoh(
        &[
            "verify",
            "--config",
            config.to_str().unwrap(),
            "--out",
            out_b.to_str().unwrap(),
        ],
        &[("DYNCOH_THREADS", "4")],
    );
    assert!(run_b.status.success());

    let json_a = std::fs::read(out_a.join("report.json")).unwrap();
    let json_b = std::fs::read(out_b.join("report.json")).unwrap();
    assert_eq!(json_a, json_b, "report.json must be byte-identical");
    let csv_a = std::fs::read(out_a.join("report.csv")).unwrap();
    let csv_b = std::fs::read(out_b.join("report.csv")).unwrap();
    assert_eq!(csv_a, csv_b, "report.csv must be byte-identical");
}

#[test]
fn verify_rejects_unparseable_config_with_status_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), r#"{"suite": "nonsense"}"#);
    let out = dyncoh(&["verify", "--config", config.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("unparseable config"), "{stderr}");
}

#[test]
fn verify_rejects_dimension_above_cap() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"suite": "thm5", "dims": [4], "n_channels": 1}"#,
    );
    let out = dyncoh(&["verify", "--config", config.to_str().unwrap()], &[]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("cap"), "{stderr}");
}

#[test]
fn cli_overrides_take_effect() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(
        dir.path(),
        r#"{"suite": "thm5", "dims": [2], "n_channels": 2, "seed": 1}"#,
    );
    let out_dir = dir.path().join("out");
    let run = dyncoh(
        &[
            "verify",
            "--config",
            config.to_str().unwrap(),
            "--suite",
            "cor6",
            "--seed",
            "99",
            "--out",
            out_dir.to_str().unwrap(),
        ],
        &[],
    );
    assert!(run.status.success());
    let report = std::fs::read_to_string(out_dir.join("report.json")).unwrap();
    assert!(report.contains("\"suite\": \"cor6\""), "{report}");
    assert!(report.contains("\"seed\": 99"), "{report}");
}

#[test]
fn make_channel_then_info_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hadamard.json");
    let made = dyncoh(
        &[
            "make-channel",
            "--kind",
            "hadamard",
            "--out",
            path.to_str().unwrap(),
        ],
        &[],
    );
    assert!(made.status.success());

    let info = dyncoh(&["info", "--channel", path.to_str().unwrap()], &[]);
    assert!(info.status.success());
    let stdout = String::from_utf8_lossy(&info.stdout);
    assert!(stdout.contains("MIO: no"), "{stdout}");
    assert!(stdout.contains("C = 1.000000"), "{stdout}");
}

#[test]
fn coherence_and_entangle_agree_on_hadamard() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.json");
    dyncoh(
        &[
            "make-channel",
            "--kind",
            "hadamard",
            "--out",
            path.to_str().unwrap(),
        ],
        &[],
    );
    let coherence = dyncoh(&["coherence", "--channel", path.to_str().unwrap()], &[]);
    assert!(coherence.status.success());
    let c: serde_json::Value = serde_json::from_slice(&coherence.stdout).expect("report is JSON");
    let entangle = dyncoh(&["entangle", "--channel", path.to_str().unwrap()], &[]);
    assert!(entangle.status.success());
    let e: serde_json::Value = serde_json::from_slice(&entangle.stdout).expect("report is JSON");
    let cv = c["value"].as_f64().unwrap();
    let ev = e["value"].as_f64().unwrap();
    assert!((cv - 1.0).abs() < 1e-9);
    assert!((cv - ev).abs() < 2e-3);
}

#[test]
fn info_rejects_corrupted_channel_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    dyncoh(
        &[
            "make-channel",
            "--kind",
            "dephasing",
            "--out",
            path.to_str().unwrap(),
        ],
        &[],
    );
    let mut value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    value["choi_real"][0] = serde_json::json!(-5.0);
    std::fs::write(&path, serde_json::to_string(&value).unwrap()).unwrap();

    let info = dyncoh(&["info", "--channel", path.to_str().unwrap()], &[]);
    assert_eq!(info.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&info.stderr);
    assert!(
        stderr.contains("not completely positive") || stderr.contains("trace"),
        "{stderr}"
    );
}
