use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use spinframe_core::{FidelitySignature, GameReport, MicroMacroTable, SpinState};
use tempfile::TempDir;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinframe"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn write_state(dir: &Path, name: &str, args: &[&str]) {
    let mut full = vec!["state"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", name]);
    let out = run(dir, &full);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn bloch_of_plus_points_along_x() {
    let dir = TempDir::new().unwrap();
    write_state(dir.path(), "plus.json", &["--kind", "plus", "--n", "1"]);
    let out = run(dir.path(), &["bloch", "--state", "plus.json", "--out", "b.json"]);
    assert_eq!(code(&out), 0);
    let doc = read_json(&dir.path().join("b.json"));
    let r: Vec<f64> = doc["bloch"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert!((r[0] - 1.0).abs() < 1e-12 && r[1].abs() < 1e-12 && r[2].abs() < 1e-12);
}

#[test]
fn signature_document_parses_back() {
    let dir = TempDir::new().unwrap();
    write_state(dir.path(), "w.json", &["--kind", "w", "--n", "3"]);
    let out = run(dir.path(), &["signature", "--state", "w.json", "--family", "tuples", "--out", "sig.json"]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(dir.path().join("sig.json")).unwrap();
    let sig = FidelitySignature::from_json(&text).unwrap();
    assert_eq!(sig.num_spins(), 3);
    assert!(!sig.is_empty());
    let state = SpinState::from_json(&std::fs::read_to_string(dir.path().join("w.json")).unwrap()).unwrap();
    assert_eq!(state.num_spins(), 3);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    for out in ["a.json", "b.json"] {
        let o = run(dir.path(), &["verify-theorem1", "--n", "3", "--trials", "20", "--seed", "4", "--report", out]);
        assert_eq!(code(&o), 0);
    }
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    let b = std::fs::read(dir.path().join("b.json")).unwrap();
    assert_eq!(a, b);
    let first = run(dir.path(), &["witness", "--m", "3", "--attempts", "30", "--seed", "2"]);
    let second = run(dir.path(), &["witness", "--m", "3", "--attempts", "30", "--seed", "2"]);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn verify_passes_and_rejects_oversized_registers() {
    let dir = TempDir::new().unwrap();
    let ok = run(dir.path(), &["verify-theorem1", "--n", "3", "--trials", "30", "--report", "r.json"]);
    assert_eq!(code(&ok), 0);
    let doc = read_json(&dir.path().join("r.json"));
    assert_eq!(doc["manifest"]["subcommand"], "verify-theorem1");
    let big = run(dir.path(), &["verify-theorem1", "--n", "15", "--trials", "1"]);
    assert_eq!(code(&big), 2);
}

#[test]
fn missing_and_malformed_inputs_exit_with_two() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&run(dir.path(), &["signature"])), 2);
    assert_eq!(code(&run(dir.path(), &["signature", "--state", "absent.json"])), 2);
    std::fs::write(dir.path().join("bad.json"), "{ not json").unwrap();
    assert_eq!(code(&run(dir.path(), &["verify-theorem1", "--config", "bad.json"])), 2);
    assert_eq!(code(&run(dir.path(), &["signature", "--state", "bad.json"])), 2);
    std::fs::write(dir.path().join("list.json"), "[1, 2]").unwrap();
    assert_eq!(code(&run(dir.path(), &["verify-theorem1", "--config", "list.json"])), 2);
    assert_eq!(code(&run(dir.path(), &["game", "--config", "bad.json"])), 2);
    assert_eq!(code(&run(dir.path(), &["no-such-command"])), 2);
}

#[test]
fn config_values_apply_and_flags_win() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("cfg.json"), r#"{"n": 2, "trials": 12, "seed": 9}"#).unwrap();
    let out = run(dir.path(), &["verify-theorem1", "--config", "cfg.json", "--report", "a.json"]);
    assert_eq!(code(&out), 0);
    let params = &read_json(&dir.path().join("a.json"))["manifest"]["params"];
    assert_eq!(params["n"], 2);
    assert_eq!(params["trials"], 12);
    assert_eq!(params["seed"], 9);
    let out = run(dir.path(), &["verify-theorem1", "--config", "cfg.json", "--trials", "15", "--report", "b.json"]);
    assert_eq!(code(&out), 0);
    let params = &read_json(&dir.path().join("b.json"))["manifest"]["params"];
    assert_eq!(params["trials"], 15);
    assert_eq!(params["n"], 2);
}

#[test]
fn micromacro_reports_mismatches_without_failing() {
    let dir = TempDir::new().unwrap();
    let out = run(dir.path(), &["micromacro", "--m", "4", "--out", "t.json", "--csv", "t.csv"]);
    assert_eq!(code(&out), 0);
    let doc = read_json(&dir.path().join("t.json"));
    let tables: Vec<MicroMacroTable> = serde_json::from_value(doc["tables"].clone()).unwrap();
    assert_eq!(tables.len(), 2);
    assert_eq!(tables[0].mismatches().count(), 0);
    assert!(tables[1].mismatches().count() > 0);
    let csv = std::fs::read_to_string(dir.path().join("t.csv")).unwrap();
    assert!(csv.starts_with("family,a,b,row"));
    assert!(csv.lines().any(|l| l.ends_with(",false")));
}

fn game_doc(frames: &str) -> String {
    format!(
        r#"{{
  "total_spins": 2,
  "global_state": {{"num_spins": 2, "amplitudes": [[0.6, 0], [0, 0], [0, 0], [0.8, 0]]}},
  "spec_a": [1],
  "spec_b": [2],
  "p": 0.5,
  "labs": [{frames}],
  "trials": 2000,
  "seed": 3
}}"#
    )
}

#[test]
fn game_with_collective_labs_passes() {
    let dir = TempDir::new().unwrap();
    let frames = r#"{"id": "a", "frame": {"kind": "identity"}}, {"id": "b", "frame": {"kind": "haar_collective", "seed": 4}}"#;
    std::fs::write(dir.path().join("g.json"), game_doc(frames)).unwrap();
    let out = run(dir.path(), &["game", "--config", "g.json", "--out", "r.json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc = read_json(&dir.path().join("r.json"));
    let report: GameReport = serde_json::from_value(doc).unwrap();
    assert!(report.postulate1.pass);
    assert_eq!(report.labs.len(), 2);
}

#[test]
fn game_with_global_frame_still_exits_zero() {
    let dir = TempDir::new().unwrap();
    let frames = r#"{"id": "a", "frame": {"kind": "identity"}}, {"id": "g", "frame": {"kind": "haar_global", "seed": 4}}"#;
    std::fs::write(dir.path().join("g.json"), game_doc(frames)).unwrap();
    let out = run(dir.path(), &["game", "--config", "g.json", "--trials", "100", "--out", "r.json"]);
    assert_eq!(code(&out), 0);
    let report: GameReport = serde_json::from_value(read_json(&dir.path().join("r.json"))).unwrap();
    assert!(!report.postulate1.all_collective);
    assert_eq!(report.config.trials, 100);
}

#[test]
fn search_recovers_a_signature() {
    let dir = TempDir::new().unwrap();
    write_state(dir.path(), "m.json", &["--kind", "micro", "--n", "3"]);
    let out = run(
        dir.path(),
        &["search", "--state", "m.json", "--family", "single", "--restarts", "4", "--out", "s.json", "--state-out", "found.json"],
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc = read_json(&dir.path().join("s.json"));
    assert!(doc["result"]["residual"].as_f64().unwrap() < 1e-8);
    let found = SpinState::from_json(&std::fs::read_to_string(dir.path().join("found.json")).unwrap()).unwrap();
    assert_eq!(found.num_spins(), 3);
}
