//! End-to-end subprocess tests: every invocation below runs the installed
//! binary exactly as a user would, and asserts on bytes and exit codes.

use std::process::{Command, Output};

fn mapcount(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mapcount"))
        .args(args)
        .output()
        .expect("binary spawns")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

#[test]
fn counts_csv_contains_known_cell() {
    let out = mapcount(&[
        "counts", "--family", "z", "--genus", "1", "--jmax", "5", "--format", "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("vertices,genus1"));
    assert!(text.lines().any(|l| l == "3,162"), "{text}");
    assert!(text.lines().any(|l| l == "5,52650"), "{text}");
}

#[test]
fn export_csv_is_deterministic_and_carries_known_cells() {
    let args = ["export", "--family", "z", "--format", "csv"];
    let first = mapcount(&args);
    let second = mapcount(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout, "export bytes must not vary");

    let text = stdout_str(&first);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("vertices,genus0,genus1,genus2,genus3,genus4,genus5,genus6,genus7")
    );
    let row3 = text
        .lines()
        .find(|l| l.starts_with("3,"))
        .expect("vertex row 3 present");
    let cells: Vec<&str> = row3.split(',').collect();
    assert_eq!(cells[2], "162"); // genus-1 column
    assert_eq!(text.lines().count(), 16); // header + 15 vertex rows
}

#[test]
fn export_json_round_trips_through_parse() {
    let out = mapcount(&["export", "--family", "e3", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout_str(&out);
    let parsed: serde_json::Value = serde_json::from_str(&text).expect("valid JSON");

    // Re-serializing the parse must reproduce the exact bytes.
    let mut reprinted = serde_json::to_string_pretty(&parsed).unwrap();
    reprinted.push('\n');
    assert_eq!(text, reprinted);

    assert_eq!(parsed["family"], "e");
    assert_eq!(parsed["valence"], "trivalent");
    assert_eq!(parsed["genera"], serde_json::json!([0, 1, 2]));
    let rows = parsed["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 15); // even vertex counts 2…30
    assert_eq!(rows[0]["j"], 2);
    assert_eq!(rows[0]["counts"][0], "2/3");
}

#[test]
fn z0_coupling_series_exact_values() {
    let out = mapcount(&["z0", "--nu", "2", "--series", "coupling", "--order", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(
        parsed["coefficients"],
        serde_json::json!(["1", "-3", "18", "-135", "1134"])
    );
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(
        mapcount(&["counts", "--family", "bogus", "--genus", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(
        mapcount(&[
            "orbit-check", "--nu", "1", "--nmax", "4", "--precision", "256",
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        mapcount(&["qroots", "--nu", "3", "--genus", "2"]).status.code(),
        Some(2)
    );
}

#[test]
fn order_shortfall_exits_3() {
    let out = mapcount(&["derive-zg", "--nu", "2", "--genus", "3", "--order", "5"]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("order too small"), "{err}");
}

#[test]
fn verify_counts_scope_passes() {
    let out = mapcount(&["verify", "--scope", "counts"]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(parsed["scope"], "counts");
    assert_eq!(parsed["passed"], true);
    assert_eq!(parsed["checks_total"], 20);
    assert_eq!(parsed["first_failure"], serde_json::Value::Null);
}

#[test]
fn orbit_check_emits_rows_and_slope_summary() {
    let out = mapcount(&[
        "orbit-check", "--nu", "2", "--N", "1", "--r", "1", "--nmax", "16",
        "--precision", "256", "--terms", "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    let rows = parsed["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 16);
    for key in ["n", "x_n", "cm_value", "abs_err"] {
        assert!(rows[0].get(key).is_some(), "row lacks {key}");
    }
    assert_eq!(parsed["slope_summary"]["truncation"], 3);
    assert!(parsed["slope_summary"]["fitted_slope"].is_f64());
}

#[test]
fn out_flag_writes_payload_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("roots.json");
    let out = mapcount(&[
        "qroots", "--genus", "2", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty(), "payload must go to the file");
    let parsed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(parsed["genus"], 2);
    let roots = parsed["roots"].as_array().unwrap();
    assert_eq!(roots.len(), 1);
    let mid = roots[0]["midpoint"].as_f64().unwrap();
    assert!((mid - 4.0 / 9.0).abs() < 1e-9, "midpoint {mid}");
}
