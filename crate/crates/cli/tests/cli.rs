use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sle-coset"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let out = run(args);
    let code = out.status.code().unwrap_or(-1);
    let stdout = String::from_utf8(out.stdout).unwrap();
    let value = serde_json::from_str(&stdout).unwrap_or_else(|e| panic!("bad json ({e}): {stdout}"));
    (code, value)
}

#[test]
fn coset_drift_holds_at_critical_parameters() {
    let (code, v) = json(&["verify", "thm2", "--k", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "verify thm2");
    assert_eq!(v["config"]["kappa"], "3");
    assert_eq!(v["config"]["tau"], "1/2");
    assert_eq!(v["result"]["status"], "verified");
}

#[test]
fn coset_drift_detects_wrong_tau() {
    let (code, v) = json(&["verify", "thm2", "--k", "1", "--tau", "1"]);
    assert_eq!(code, 1);
    assert_eq!(v["result"]["status"], "violated");
    assert_eq!(v["result"]["direction"], "casimir");
}

#[test]
fn coset_drift_detects_wrong_kappa() {
    let (code, v) = json(&["verify", "thm2", "--k", "1", "--kappa", "4"]);
    assert_eq!(code, 1);
    assert_eq!(v["result"]["status"], "violated");
}

#[test]
fn negative_fractional_levels_parse() {
    let (code, v) = json(&["verify", "thm2", "--k", "-1/2"]);
    assert_eq!(code, 0);
    assert_eq!(v["config"]["k"], "-1/2");
    assert_eq!(v["result"]["status"], "verified");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["verify", "thm2", "--k", "1/0"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "thm2", "--k", "-3/2"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "thm2", "--k", "-3"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn branching_matches_at_level_one() {
    let (code, v) = json(&["verify", "branching", "--k", "1", "--j", "1/2", "--eps", "0", "--grade", "2"]);
    assert_eq!(code, 0);
    let cells = v["result"]["cells"].as_array().unwrap();
    assert!(!cells.is_empty());
    assert!(cells.iter().all(|c| c["match"] == true));
}

#[test]
fn minimal_table_rows_and_duplicates() {
    let (code, v) = json(&["minimal-table", "--p", "3", "--q", "4"]);
    assert_eq!(code, 0);
    let rows = v["result"].as_array().unwrap();
    let find = |p: i64, q: i64, r: i64, s: i64| {
        rows.iter()
            .find(|row| row["p"] == p && row["q"] == q && row["r"] == r && row["s"] == s)
            .unwrap_or_else(|| panic!("row ({p},{q},{r},{s}) missing"))
    };
    let ising_identity = find(3, 4, 1, 1);
    assert_eq!(ising_identity["c"], "1/2");
    assert_eq!(ising_identity["h"], "0");
    assert!(ising_identity["duplicate_of"].is_null());
    let ising_energy = find(3, 4, 2, 1);
    assert_eq!(ising_energy["h"], "1/2");
    assert_eq!(ising_energy["duplicate_of"], "(1,3)");
    let spin = find(3, 4, 1, 2);
    assert_eq!(spin["h"], "1/16");
}

#[test]
fn csv_output_echoes_config_then_header() {
    let out = run(&["--format", "csv", "minimal-table", "--p", "2", "--q", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    let echo = lines.next().unwrap();
    assert!(echo.starts_with("# "));
    let config: Value = serde_json::from_str(&echo[2..]).unwrap();
    assert_eq!(config["command"], "minimal-table");
    assert_eq!(lines.next().unwrap(), "p,q,r,s,c,h,duplicate_of");
    assert!(lines.count() >= 2);
}

#[test]
fn simulate_tensor_level_one_passes() {
    let args = ["simulate", "--k", "1", "--samples", "400", "--T", "0.1", "--dt", "0.01", "--seed", "7"];
    let (code, v) = json(&args);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["status"], "verified");
    assert!(v["result"]["max_abs_z"].as_f64().unwrap() < 4.0);
}

#[test]
fn simulate_trivial_virasoro_module_is_flat() {
    let args = ["simulate", "--target", "virasoro", "--kappa", "6", "--samples", "200", "--T", "0.05", "--dt", "0.01"];
    let (code, v) = json(&args);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["max_abs_z"].as_f64().unwrap(), 0.0);
}

#[test]
fn simulate_is_reproducible_from_echoed_config() {
    let args = ["simulate", "--k", "1", "--samples", "200", "--T", "0.05", "--dt", "0.01", "--seed", "3"];
    let (_, first) = json(&args);
    let cfg = &first["config"];
    let replay: Vec<String> = vec![
        "simulate".into(),
        "--k".into(),
        cfg["k"].as_str().unwrap().into(),
        "--kappa".into(),
        cfg["kappa"].as_str().unwrap().into(),
        "--tau".into(),
        cfg["tau"].as_str().unwrap().into(),
        "--samples".into(),
        cfg["samples"].to_string(),
        "--T".into(),
        cfg["t_end"].to_string(),
        "--dt".into(),
        cfg["dt"].to_string(),
        "--seed".into(),
        cfg["seed"].to_string(),
    ];
    let replay: Vec<&str> = replay.iter().map(String::as_str).collect();
    let (_, second) = json(&replay);
    assert_eq!(first["result"], second["result"]);
}

#[test]
fn internal_process_reports_ratios() {
    let (code, v) = json(&["internal", "--samples", "4", "--levels", "2", "--T", "0.05", "--dt", "1e-3"]);
    assert!(code == 0 || code == 1);
    assert_eq!(v["result"]["ratios"].as_array().unwrap().len(), 1);
}
