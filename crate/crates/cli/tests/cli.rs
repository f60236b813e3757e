//! End-to-end behaviour of the `fzwave` binary: output formats, exit codes
//! and reproducibility.

use std::path::Path;
use std::process::{Command, Output};

fn fzwave(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fzwave"))
        .args(args)
        .env("FZWAVE_THREADS", threads)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const REFERENCE_RUN: &str = r#"{
  "model": { "alpha": 0.25, "beta": 0.45, "tau": 0.1, "epsilon": 0.01 },
  "grid": { "x_min": -3.0, "x_max": 3.0, "nx": 61, "t_list": [0.5, 1.0] },
  "initial": { "u0": { "kind": "dirac" }, "v0": { "kind": "zero" } }
}"#;

#[test]
fn roots_prints_closed_form_zero() {
    let out = fzwave(&["roots", "--alpha", "0", "--tau", "0.1", "--theta", "1"], "0");
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("s_z = 0 + 1.348400i"));
}

#[test]
fn missing_config_is_an_input_error() {
    let out = fzwave(&["kernel", "--config", "missing.json"], "0");
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("missing.json"));
    assert!(out.stdout.is_empty());
}

#[test]
fn unknown_subcommand_and_flag_print_usage() {
    for args in [&["bogus"][..], &["kernel", "--colour", "red"][..]] {
        let out = fzwave(args, "0");
        assert_eq!(out.status.code(), Some(2));
        assert!(String::from_utf8(out.stderr).unwrap().contains("Usage"));
    }
}

#[test]
fn inadmissible_parameters_exit_2() {
    let out = fzwave(&["kernel", "--alpha", "0.25", "--beta", "1.2", "--tau", "0.1"], "0");
    assert_eq!(out.status.code(), Some(2));
    let out = fzwave(&["kernel", "--alpha", "0.25", "--beta", "0.5", "--tau", "0.1", "--t-list", "1,0.5"], "0");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn non_convergence_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "short_line.json",
        r#"{ "model": { "alpha": 0.25, "beta": 0.45, "tau": 0.1 },
             "quadrature": { "bromwich_p_max": 100.0 } }"#,
    );
    let out = fzwave(&["oracle", "--config", &cfg, "--t", "1"], "0");
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn solve_writes_csv_with_one_row_per_sample() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.json", REFERENCE_RUN);
    let csv = dir.path().join("u.csv");
    let out = fzwave(&["solve", "--config", &cfg, "--out", csv.to_str().unwrap()], "0");
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,t,u"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 61 * 2);
    // row-major in t, then x
    assert_eq!(rows[0][1], 0.5);
    assert_eq!(rows[61][1], 1.0);
    assert_eq!(rows[0][0], -3.0);
    assert_eq!(rows[60][0], 3.0);
}

#[test]
fn csv_values_round_trip_exactly() {
    let out = fzwave(&["kernel", "--alpha", "0", "--beta", "0.7", "--tau", "0.1", "--nx", "41", "--format", "json"], "0");
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let out = fzwave(&["kernel", "--alpha", "0", "--beta", "0.7", "--tau", "0.1", "--nx", "41"], "0");
    let text = String::from_utf8(out.stdout).unwrap();
    for (line, row) in text.lines().skip(1).zip(json["rows"].as_array().unwrap()) {
        for (cell, value) in line.split(',').zip(row.as_array().unwrap()) {
            let parsed: f64 = cell.parse().unwrap();
            assert_eq!(parsed.to_bits(), value.as_f64().unwrap().to_bits());
        }
    }
}

#[test]
fn json_output_carries_metadata() {
    let out = fzwave(&["kernel", "--alpha", "0.25", "--beta", "1", "--tau", "0.1", "--nx", "5", "--format", "json"], "0");
    assert_eq!(out.status.code(), Some(0));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["columns"], serde_json::json!(["x", "t", "u"]));
    assert_eq!(json["meta"]["field"]["route"], "time_fractional");
    assert_eq!(json["rows"].as_array().unwrap().len(), 5);
}

#[test]
fn flags_override_config_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.json", REFERENCE_RUN);
    let out = fzwave(&["solve", "--config", &cfg, "--beta", "0", "--nx", "3", "--t", "2"], "0");
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.lines().nth(1).unwrap().starts_with("-3.0000000000000000e0,2.0000000000000000e0,"));
}

#[test]
fn limits_emits_side_by_side_columns() {
    let out = fzwave(&["limits", "--case", "alpha0", "--beta", "0.5", "--nx", "21", "--t", "0.5"], "0");
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("x,t,u_general,u_limit,abs_diff"));
    assert_eq!(text.lines().count(), 22);
}

#[test]
fn same_config_gives_identical_bytes_for_any_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "run.json", REFERENCE_RUN);
    let runs: Vec<Vec<u8>> = ["1", "4", "0"]
        .iter()
        .map(|threads| {
            let out = fzwave(&["solve", "--config", &cfg], threads);
            assert_eq!(out.status.code(), Some(0));
            out.stdout
        })
        .collect();
    assert!(runs.iter().all(|r| *r == runs[0]));
}

#[test]
fn bad_thread_count_is_rejected() {
    let out = fzwave(&["roots", "--alpha", "0", "--tau", "0.1", "--theta", "1"], "many");
    assert_eq!(out.status.code(), Some(2));
}
