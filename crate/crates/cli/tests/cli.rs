use std::fs;
use std::process::{Command, Output};

fn popgrowth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_popgrowth")).args(args).output().unwrap()
}

#[test]
fn run_writes_reports_and_prints_text() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let result = popgrowth(&["run", "--out", out, "--format", "json", "--format", "csv"]);
    assert!(result.status.success());
    let stdout = String::from_utf8(result.stdout).unwrap();
    assert!(stdout.lines().any(|l| l.trim() == "Rank: 1"));
    assert!(dir.path().join("report.json").exists());
    assert!(!dir.path().join("report.txt").exists());
    assert!(dir.path().join("synthetic_table9_regressions.csv").exists());
}

#[test]
fn calibrate_stops_after_the_model() {
    let dir = tempfile::tempdir().unwrap();
    let result = popgrowth(&["calibrate", "--out", dir.path().to_str().unwrap(), "--format", "json"]);
    assert!(result.status.success());
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    let v = &json["vintages"][0];
    assert!(v["model"].is_object());
    assert!(v["johansen"].is_null());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.toml");
    assert_eq!(popgrowth(&["run", "--config", missing.to_str().unwrap()]).status.code(), Some(1));

    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "[dataset]\nsynthetic = true\nsurprise = 1\n").unwrap();
    assert_eq!(popgrowth(&["run", "--config", bad.to_str().unwrap()]).status.code(), Some(1));

    let gapped = dir.path().join("gapped.toml");
    fs::write(dir.path().join("n9.csv"), "year,value\n1969,1\n1970,2\n1972,3\n").unwrap();
    fs::write(&gapped, "[dataset]\ngdp_per_capita = { path = \"n9.csv\" }\nn9_measured = { path = \"n9.csv\" }\n")
        .unwrap();
    let result = popgrowth(&["run", "--config", gapped.to_str().unwrap()]);
    assert_eq!(result.status.code(), Some(2));
    assert!(String::from_utf8(result.stderr).unwrap().contains("gap at 1971"));
}

#[test]
fn simulate_cv_reports_table_and_simulation() {
    let result = popgrowth(&["simulate-cv", "--test", "adf", "--trend", "none", "--reps", "2000", "--format", "json"]);
    assert!(result.status.success());
    let json: serde_json::Value = serde_json::from_slice(&result.stdout).unwrap();
    let values = json["values"].as_array().unwrap();
    assert_eq!(values.len(), 3);
    for v in values {
        assert!((v["table"].as_f64().unwrap() - v["simulated"].as_f64().unwrap()).abs() < 0.3);
    }
    let result = popgrowth(&["simulate-cv", "--test", "dfgls", "--trend", "none", "--reps", "2000"]);
    assert_eq!(result.status.code(), Some(1));
}
