use std::fs;
use std::path::Path;

use popgrowth::report::{emit_report, Report, Stage};
use popgrowth::{run_pipeline, Config, ConfigError, Format, PipelineError, Scope};
use popgrowth_core::synthetic::{demographic_fixture, FixtureSpec};
use popgrowth_core::AnnualSeries;

fn synthetic_report() -> Report {
    run_pipeline(&Config::synthetic(), Scope::Full).unwrap()
}

fn write_series(path: &Path, columns: &[(&str, &AnnualSeries)]) {
    let mut text = String::from("year");
    for (name, _) in columns {
        text.push(',');
        text.push_str(name);
    }
    text.push('\n');
    for (i, year) in columns[0].1.years().enumerate() {
        text.push_str(&year.to_string());
        for (_, s) in columns {
            text.push_str(&format!(",{}", s.values()[i]));
        }
        text.push('\n');
    }
    fs::write(path, text).unwrap();
}

/// Fixture written to CSV next to a config that references it.
fn csv_config(dir: &Path, extra: &str) -> Config {
    let fx = demographic_fixture(&FixtureSpec::default());
    write_series(&dir.join("gdp.csv"), &[("gdp", &fx.gdp_per_capita)]);
    let wobble: Vec<f64> =
        fx.n9_true.values().iter().enumerate().map(|(i, v)| v + 1.2e5 * (1.3 * i as f64).sin()).collect();
    let intercensal = AnnualSeries::new(fx.n9_true.start_year(), wobble, "persons").unwrap();
    write_series(&dir.join("n9.csv"), &[("postcensal", &fx.n9_measured), ("intercensal", &intercensal)]);
    let text = format!(
        r#"
        [dataset]
        label = "postcensal"
        gdp_per_capita = {{ path = "gdp.csv", column = "gdp" }}
        n9_measured = {{ path = "n9.csv", column = "postcensal" }}
        {extra}
        "#
    );
    let path = dir.join("run.toml");
    fs::write(&path, text).unwrap();
    Config::load(&path).unwrap()
}

#[test]
fn synthetic_fixture_recovers_a_and_rank_one() {
    let report = synthetic_report();
    let v = &report.vintages[0];
    let a = v.model.as_ref().unwrap().fit.params.a;
    assert!((a / 547.1325 - 1.0).abs() <= 0.01, "A = {a}");
    assert_eq!(v.johansen.as_ref().unwrap().trace.selected_rank, 1);
    assert!(report.failure.is_none());

    let mut text = Vec::new();
    popgrowth::report::write_to(&report, Format::Text, &mut text).unwrap();
    let text = String::from_utf8(text).unwrap();
    assert!(text.lines().any(|l| l.trim() == "Rank: 1"));
}

#[test]
fn json_round_trip_is_lossless() {
    let report = synthetic_report();
    let json = report.to_json().unwrap();
    let back = Report::from_json(&json).unwrap();
    assert_eq!(back, report);
    assert_eq!(back.to_json().unwrap(), json);
}

#[test]
fn csv_cells_match_the_report() {
    let report = synthetic_report();
    let dir = tempfile::tempdir().unwrap();
    let written = emit_report(&report, dir.path(), &[Format::Csv]).unwrap();
    let mut cells = 0;
    for path in &written {
        let mut rdr = csv::Reader::from_path(path).unwrap();
        let width = rdr.headers().unwrap().len();
        for record in rdr.records() {
            assert_eq!(record.unwrap().len(), width);
            cells += width;
        }
    }
    assert!(written.iter().any(|p| p.file_name().unwrap() == "synthetic_table6_johansen.csv"));
    assert_eq!(cells, report.cell_count());
}

#[test]
fn every_format_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let report = synthetic_report();
    emit_report(&report, dir.path(), &[Format::Json, Format::Text]).unwrap();
    let json = fs::read_to_string(dir.path().join("report.json")).unwrap();
    assert_eq!(json, report.to_json().unwrap());
    assert!(fs::read_to_string(dir.path().join("report.txt")).unwrap().contains("Rank: 1"));
}

#[test]
fn csv_inputs_reproduce_the_synthetic_run() {
    let dir = tempfile::tempdir().unwrap();
    let config = csv_config(dir.path(), "");
    let from_csv = run_pipeline(&config, Scope::Full).unwrap();
    let synthetic = synthetic_report();
    let a = |r: &Report| r.vintages[0].model.as_ref().unwrap().fit.params.a;
    assert!((a(&from_csv) - a(&synthetic)).abs() <= 1e-9 * a(&synthetic));
    assert_eq!(from_csv.provenance.inputs.len(), 2);
    assert!(from_csv.provenance.inputs.iter().all(|h| h.sha256.len() == 64));
}

#[test]
fn input_hash_follows_file_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let config = csv_config(dir.path(), "");
    let before = run_pipeline(&config, Scope::Model).unwrap().provenance.inputs;
    let gdp = dir.path().join("gdp.csv");
    let text = fs::read_to_string(&gdp).unwrap();
    fs::write(&gdp, text.replace("year,gdp", "year, gdp")).unwrap();
    let after = run_pipeline(&config, Scope::Model).unwrap().provenance.inputs;
    assert_ne!(before[0].sha256, after[0].sha256);
    assert_eq!(before[1], after[1]);
}

#[test]
fn gdp_total_is_divided_by_adult_population() {
    let dir = tempfile::tempdir().unwrap();
    let fx = demographic_fixture(&FixtureSpec::default());
    let pop = fx.gdp_per_capita.map(|_| 2.0e8, "persons").unwrap();
    let total = fx.gdp_per_capita.map(|g| g * 2.0e8, "dollars").unwrap();
    write_series(&dir.path().join("gdp.csv"), &[("total", &total), ("adults", &pop)]);
    write_series(&dir.path().join("n9.csv"), &[("value", &fx.n9_measured)]);
    let path = dir.path().join("run.toml");
    fs::write(
        &path,
        r#"
        [dataset]
        gdp_total = { path = "gdp.csv", column = "total" }
        population_15plus = { path = "gdp.csv", column = "adults" }
        n9_measured = { path = "n9.csv" }
        "#,
    )
    .unwrap();
    let report = run_pipeline(&Config::load(&path).unwrap(), Scope::Model).unwrap();
    let rows = &report.vintages[0].model.as_ref().unwrap().rows;
    for (row, g) in rows.iter().zip(fx.gdp_per_capita.values()) {
        assert!((row.gdp_per_capita - g).abs() <= 1e-9 * g);
    }
}

#[test]
fn second_vintage_gets_its_own_tables() {
    let dir = tempfile::tempdir().unwrap();
    let extra = r#"second_vintage = { label = "intercensal", path = "n9.csv", column = "intercensal" }"#;
    let report = run_pipeline(&csv_config(dir.path(), extra), Scope::Tests).unwrap();
    let labels: Vec<&str> = report.vintages.iter().map(|v| v.label.as_str()).collect();
    assert_eq!(labels, ["postcensal", "intercensal"]);
    assert!(report.vintages.iter().all(|v| v.johansen.is_some() && v.var.is_none()));
}

#[test]
fn empty_year_range_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = csv_config(dir.path(), "year_from = 2010\nyear_to = 2020");
    let err = run_pipeline(&config, Scope::Full).unwrap_err();
    assert!(matches!(err, PipelineError::Config(ConfigError::Invalid(_))), "{err}");
    assert_eq!(err.exit_code(), 1);

    let mut config = Config::synthetic();
    config.dataset.year_from = Some(2000);
    config.dataset.year_to = Some(1990);
    assert!(matches!(run_pipeline(&config, Scope::Full), Err(PipelineError::Config(_))));
}

#[test]
fn year_filter_trims_the_sample() {
    let dir = tempfile::tempdir().unwrap();
    let config = csv_config(dir.path(), "year_from = 1962\nyear_to = 2000");
    let report = run_pipeline(&config, Scope::Model).unwrap();
    let rows = &report.vintages[0].model.as_ref().unwrap().rows;
    assert_eq!((rows[0].year, rows.last().unwrap().year), (1962, 2000));
}

#[test]
fn ingest_problems_are_data_errors() {
    let dir = tempfile::tempdir().unwrap();
    let config = csv_config(dir.path(), "");
    let n9 = dir.path().join("n9.csv");
    let text = fs::read_to_string(&n9).unwrap();
    let gapped: String = text.lines().filter(|l| !l.starts_with("1971,")).map(|l| format!("{l}\n")).collect();
    fs::write(&n9, gapped).unwrap();
    let err = run_pipeline(&config, Scope::Full).unwrap_err();
    assert!(err.to_string().ends_with("gap at 1971"), "{err}");
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn stage_failure_keeps_earlier_results() {
    let mut config = Config::synthetic();
    config.tests.var_max_lag = 12;
    let err = run_pipeline(&config, Scope::Full).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    let PipelineError::Stage { stage, partial, .. } = err else { panic!("expected a stage failure") };
    assert_eq!(stage, Stage::LagSelection);
    let v = &partial.vintages[0];
    assert!(v.model.is_some() && v.engle_granger.is_some());
    assert!(v.lag_selection.is_none() && v.johansen.is_none());
    let failure = partial.failure.as_ref().unwrap();
    assert_eq!((failure.stage, failure.kind.as_str()), (Stage::LagSelection, "data"));
    assert!(Report::from_json(&partial.to_json().unwrap()).is_ok());
}

#[test]
fn singular_regression_is_a_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let gdp = AnnualSeries::new(1959, (0..44).map(|i| 10_000.0 + 500.0 * i as f64).collect(), "").unwrap();
    let n9 = gdp.map(|_| 4.0e6, "").unwrap();
    write_series(&dir.path().join("gdp.csv"), &[("value", &gdp)]);
    write_series(&dir.path().join("n9.csv"), &[("value", &n9)]);
    let path = dir.path().join("run.toml");
    fs::write(&path, "[dataset]\ngdp_per_capita = { path = \"gdp.csv\" }\nn9_measured = { path = \"n9.csv\" }\n")
        .unwrap();
    let err = run_pipeline(&Config::load(&path).unwrap(), Scope::Full).unwrap_err();
    assert_eq!(err.exit_code(), 3, "{err}");
}

#[test]
fn audit_rows_cover_the_three_tables() {
    let mut config = Config::synthetic();
    config.monte_carlo.enabled = true;
    config.monte_carlo.replications = 2000;
    let report = run_pipeline(&config, Scope::Full).unwrap();
    let audit = report.critical_value_audit.unwrap();
    assert_eq!(audit.len(), 9);
    assert!(audit.iter().all(|r| r.n_obs == audit[0].n_obs && r.replications == 2000));
}
