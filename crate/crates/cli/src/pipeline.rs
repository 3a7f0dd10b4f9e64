//! End-to-end run: ingestion, calibration, prediction, the test battery and
//! the models, in that order.

use std::fs;

use popgrowth_core::cointegration::{engle_granger, fit_vecm, johansen_trace};
use popgrowth_core::demog::{calibrate_with, predict_n9, trend_growth, CalibrationOptions};
use popgrowth_core::ols::fit_ols_columns;
use popgrowth_core::series::{align, diff, growth_rate, moving_average};
use popgrowth_core::synthetic::demographic_fixture;
use popgrowth_core::unit_root::{adf_sweep, critical_value, dfgls_sweep, simulate_critical_values, UnitRootTest};
use popgrowth_core::var::{diagnostics, fit_var, select_lag, Exogenous};
use popgrowth_core::{AnnualSeries, Level, TrendSpec};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::config::{ColumnInput, Config, ConfigError};
use crate::ingest::{parse_csv, IngestError, YearRange};
use crate::report::{
    AuditRow, InputHash, JohansenSection, ModelRow, ModelSection, Provenance, Regression, Report, SeriesTest, Stage,
    StageFailure, VarSection, VintageReport, REPORT_VERSION,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: popgrowth_core::Error,
        /// Everything computed before the failure, with `failure` filled in.
        partial: Box<Report>,
    },
}

impl PipelineError {
    /// Process exit code: 1 configuration, 2 data, 3 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 1,
            PipelineError::Ingest(_) => 2,
            PipelineError::Stage { source, .. } => {
                if source.is_numerical() {
                    3
                } else {
                    2
                }
            }
        }
    }
}

/// How far a run goes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    /// Calibration and prediction only.
    Model,
    /// Model plus the unit-root, cointegration and lag-selection battery.
    Tests,
    /// Everything, including the models and the optional critical-value audit.
    Full,
}

/// Validated input series with their hashes.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub gdp_per_capita: AnnualSeries,
    /// `(label, measured population)` per vintage.
    pub vintages: Vec<(String, AnnualSeries)>,
    pub hashes: Vec<InputHash>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn read_input(
    name: &str,
    input: &ColumnInput,
    range: YearRange,
    unit: &str,
) -> Result<(AnnualSeries, InputHash), PipelineError> {
    let bytes = fs::read(&input.path).map_err(|source| IngestError::Io { path: input.path.clone(), source })?;
    let series = match parse_csv(bytes.as_slice(), &input.path, &input.column, range, unit) {
        Ok(s) => s,
        Err(IngestError::Empty { path }) if range != YearRange::default() => {
            return Err(ConfigError::Invalid(format!(
                "year range {}-{} leaves no rows in {}",
                range.from.map_or("..".into(), |y| y.to_string()),
                range.to.map_or("..".into(), |y| y.to_string()),
                path.display()
            ))
            .into())
        }
        Err(e) => return Err(e.into()),
    };
    let hash = InputHash { name: name.into(), source: input.path.display().to_string(), sha256: sha256_hex(&bytes) };
    Ok((series, hash))
}

fn series_csv(series: &[(&str, &AnnualSeries)]) -> String {
    let mut s = String::from("year");
    for (name, _) in series {
        s.push(',');
        s.push_str(name);
    }
    s.push('\n');
    let first = series[0].1;
    for (i, year) in first.years().enumerate() {
        s.push_str(&year.to_string());
        for (_, v) in series {
            s.push(',');
            s.push_str(&v.values()[i].to_string());
        }
        s.push('\n');
    }
    s
}

/// Read (or generate) the input series named by the configuration.
pub fn load_inputs(config: &Config) -> Result<Inputs, PipelineError> {
    let d = &config.dataset;
    let range = YearRange { from: d.year_from, to: d.year_to };
    let (gdp, n9, mut hashes) = if d.synthetic {
        let fx = demographic_fixture(&config.synthetic);
        let window = |s: &AnnualSeries| {
            let from = range.from.unwrap_or(s.start_year()).max(s.start_year());
            let to = range.to.unwrap_or(s.end_year()).min(s.end_year());
            s.window(from, to).map_err(|_| ConfigError::Invalid(format!("year range {from}-{to} misses the fixture")))
        };
        let gdp = window(&fx.gdp_per_capita)?;
        let n9 = window(&fx.n9_measured)?;
        let csv = series_csv(&[("gdp_per_capita", &fx.gdp_per_capita), ("n9_measured", &fx.n9_measured)]);
        let hash = InputHash {
            name: "synthetic_fixture".into(),
            source: "synthetic".into(),
            sha256: sha256_hex(csv.as_bytes()),
        };
        (gdp, n9, vec![hash])
    } else {
        let mut hashes = Vec::new();
        let gdp = match (&d.gdp_per_capita, &d.gdp_total, &d.population_15plus) {
            (Some(input), _, _) => {
                let (s, h) = read_input("gdp_per_capita", input, range, "dollars per person")?;
                hashes.push(h);
                s
            }
            (None, Some(total), Some(pop)) => {
                let (total, h1) = read_input("gdp_total", total, range, "dollars")?;
                let (pop, h2) = read_input("population_15plus", pop, range, "persons")?;
                hashes.extend([h1, h2]);
                let pair = align(&total, &pop)
                    .map_err(|e| ConfigError::Invalid(format!("GDP and 15+ population do not overlap: {e}")))?;
                let values = pair.a.values().iter().zip(pair.b.values()).map(|(g, p)| g / p).collect();
                AnnualSeries::new(pair.a.start_year(), values, "dollars per person")
                    .map_err(|e| ConfigError::Invalid(e.to_string()))?
            }
            _ => unreachable!("rejected by Config::validate"),
        };
        let input = d.n9_measured.as_ref().expect("validated");
        let (n9, h) = read_input("n9_measured", input, range, "persons")?;
        hashes.push(h);
        (gdp, n9, hashes)
    };

    let mut vintages = vec![(d.label.clone(), n9)];
    if let Some(v) = &d.second_vintage {
        let input = ColumnInput { path: v.path.clone(), column: v.column.clone() };
        let (s, h) = read_input("n9_second_vintage", &input, range, "persons")?;
        hashes.push(h);
        vintages.push((v.label.clone(), s));
    }
    for (label, s) in &vintages {
        let from = s.start_year().max(gdp.start_year());
        let to = s.end_year().min(gdp.end_year());
        if to < from {
            return Err(ConfigError::Invalid(format!(
                "{label} population ({}-{}) and GDP per capita ({}-{}) share no year",
                s.start_year(),
                s.end_year(),
                gdp.start_year(),
                gdp.end_year()
            ))
            .into());
        }
    }
    hashes.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(Inputs { gdp_per_capita: gdp, vintages, hashes })
}

struct Ctx<'a> {
    config: &'a Config,
    report: Report,
}

impl Ctx<'_> {
    fn fail(mut self, vintage: Option<&str>, stage: Stage, source: popgrowth_core::Error) -> PipelineError {
        self.report.failure = Some(StageFailure {
            vintage: vintage.map(str::to_owned),
            stage,
            kind: if source.is_numerical() { "numerical" } else { "data" }.into(),
            message: source.to_string(),
        });
        PipelineError::Stage { stage, source, partial: Box::new(self.report) }
    }
}

type StageResult<T> = Result<T, (Stage, popgrowth_core::Error)>;

fn at<T>(stage: Stage, r: popgrowth_core::Result<T>) -> StageResult<T> {
    r.map_err(|e| (stage, e))
}

fn unit_root_battery(
    series: &[(&str, &AnnualSeries)],
    adf_max: usize,
    adf_trend: TrendSpec,
    dfgls_max: usize,
    dfgls_trend: TrendSpec,
) -> popgrowth_core::Result<Vec<SeriesTest>> {
    let mut out = Vec::new();
    for (name, s) in series {
        for result in adf_sweep(s, adf_max, adf_trend)?.into_iter().chain(dfgls_sweep(s, dfgls_max, dfgls_trend)?) {
            out.push(SeriesTest { series: name.to_string(), result });
        }
    }
    Ok(out)
}

/// Run every stage for one vintage, filling `v` as stages complete.
fn run_vintage(
    config: &Config,
    gdp: &AnnualSeries,
    measured: &AnnualSeries,
    scope: Scope,
    v: &mut VintageReport,
) -> StageResult<()> {
    let t = &config.tests;

    let g_pc = at(Stage::Growth, growth_rate(gdp))?;
    let initial_year = config.model.initial_year.unwrap_or(gdp.start_year().max(measured.start_year()));
    let options =
        CalibrationOptions { a_bounds: (config.model.a_min, config.model.a_max), ..CalibrationOptions::default() };
    let fit = at(Stage::Calibrate, calibrate_with(&g_pc, gdp, measured, initial_year, &options))?;
    let predicted = at(Stage::Predict, predict_n9(&g_pc, gdp, &fit.params))?;
    let trend = at(Stage::Predict, trend_growth(gdp, fit.params.a))?;
    let rows = gdp
        .years()
        .enumerate()
        .map(|(i, year)| {
            let m = measured.get(year);
            let p = predicted.get(year);
            ModelRow {
                year,
                gdp_per_capita: gdp.values()[i],
                growth: g_pc.get(year),
                trend_growth: trend.values()[i],
                n9_measured: m,
                n9_predicted: p,
                difference: m.zip(p).map(|(m, p)| m - p),
            }
        })
        .collect();
    v.model = Some(ModelSection { fit, rows });
    if scope == Scope::Model {
        return Ok(());
    }

    let pair = at(Stage::UnitRoot, align(measured, &predicted))?;
    let (m, p) = (&pair.a, &pair.b);
    v.unit_root_levels = Some(at(
        Stage::UnitRoot,
        unit_root_battery(
            &[("measured", m), ("predicted", p)],
            t.adf_max_lag,
            TrendSpec::Constant,
            t.dfgls_max_lag,
            TrendSpec::Constant,
        ),
    )?);
    let dm = at(Stage::UnitRoot, diff(m, 1))?;
    let dp = at(Stage::UnitRoot, diff(p, 1))?;
    v.unit_root_differences = Some(at(
        Stage::UnitRoot,
        unit_root_battery(
            &[("measured", &dm), ("predicted", &dp)],
            t.adf_max_lag,
            TrendSpec::Constant,
            t.dfgls_max_lag,
            TrendSpec::Constant,
        ),
    )?);

    // the difference series is zero-mean by calibration: ADF without deterministics
    let d: Vec<f64> = m.values().iter().zip(p.values()).map(|(a, b)| a - b).collect();
    let d = at(Stage::DifferenceTests, AnnualSeries::new(m.start_year(), d, "persons"))?;
    v.difference_tests = Some(at(
        Stage::DifferenceTests,
        unit_root_battery(&[("difference", &d)], t.adf_max_lag, TrendSpec::None, t.dfgls_max_lag, TrendSpec::Constant),
    )?);

    v.engle_granger = Some(at(Stage::EngleGranger, engle_granger(m, p, t.engle_granger_max_lag))?);

    let system = [m.clone(), p.clone()];
    v.lag_selection = Some(at(Stage::LagSelection, select_lag(&system, t.var_max_lag))?);

    let trace = at(Stage::Johansen, johansen_trace(&system, t.johansen_lag, t.johansen_trend))?;
    let levels_var = at(Stage::Johansen, fit_var(&system, t.johansen_lag, None))?;
    let diag = at(Stage::Johansen, diagnostics(&levels_var, t.lm_max_lag))?;
    v.johansen = Some(JohansenSection { trace, diagnostics: diag });
    if scope == Scope::Tests {
        return Ok(());
    }

    let exog = Exogenous { series: p.clone(), lags: vec![0] };
    let exogenous = at(Stage::Var, fit_var(std::slice::from_ref(m), t.var_lag, Some(&exog)))?;
    let endogenous = at(Stage::Var, fit_var(&system, t.var_lag, None))?;
    v.var = Some(VarSection { exogenous, endogenous });

    v.vecm = Some(at(Stage::Vecm, fit_vecm(&system, t.vecm_rank, t.johansen_lag, t.johansen_trend))?);

    let mut regressions = Vec::new();
    for (label, window) in [("M vs. P", 1), ("M vs. MA(2)", 2), ("M vs. MA(3)", 3)] {
        let x = if window == 1 { p.clone() } else { at(Stage::Regressions, moving_average(p, window))? };
        let pair = at(Stage::Regressions, align(m, &x))?;
        let fit = at(Stage::Regressions, fit_ols_columns(pair.a.values(), &[pair.b.values()], true))?;
        regressions.push(Regression {
            label: label.into(),
            regressor: if window == 1 { "predicted".into() } else { format!("predicted, trailing {window}-year mean") },
            sample: (pair.start_year(), pair.end_year()),
            fit,
        });
    }
    v.regressions = Some(regressions);
    Ok(())
}

/// Simulated against tabulated 1%, 5% and 10% values for the tests used on
/// levels at the effective sample size of the first vintage.
fn critical_value_audit(config: &Config, n_obs: usize) -> popgrowth_core::Result<Vec<AuditRow>> {
    let mc = &config.monte_carlo;
    let mut rows = Vec::new();
    for (test, trend) in [
        (UnitRootTest::Adf, TrendSpec::None),
        (UnitRootTest::Adf, TrendSpec::Constant),
        (UnitRootTest::DfGls, TrendSpec::Constant),
    ] {
        let sim = simulate_critical_values(test, trend, n_obs, mc.replications, mc.seed)?;
        for level in Level::ALL {
            rows.push(AuditRow {
                test,
                trend,
                n_obs,
                level,
                table: critical_value(test, trend, n_obs, level)?,
                simulated: sim.get(level),
                replications: mc.replications,
                seed: mc.seed,
            });
        }
    }
    Ok(rows)
}

pub fn provenance(config: &Config, inputs: &Inputs) -> Provenance {
    Provenance {
        library: "popgrowth".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        inputs: inputs.hashes.clone(),
        config: config.clone(),
    }
}

/// Run the pipeline on already loaded inputs.
pub fn run_with_inputs(config: &Config, inputs: &Inputs, scope: Scope) -> Result<Report, PipelineError> {
    let mut ctx = Ctx {
        config,
        report: Report {
            report_version: REPORT_VERSION,
            provenance: provenance(config, inputs),
            vintages: Vec::new(),
            critical_value_audit: None,
            failure: None,
        },
    };
    for (label, measured) in &inputs.vintages {
        let mut v = VintageReport { label: label.clone(), ..VintageReport::default() };
        let outcome = run_vintage(ctx.config, &inputs.gdp_per_capita, measured, scope, &mut v);
        ctx.report.vintages.push(v);
        if let Err((stage, e)) = outcome {
            return Err(ctx.fail(Some(label), stage, e));
        }
    }
    if scope == Scope::Full && config.monte_carlo.enabled {
        let n_obs = ctx.report.vintages[0]
            .unit_root_levels
            .as_ref()
            .and_then(|t| t.first())
            .map(|t| t.result.n_obs)
            .unwrap_or(0);
        match critical_value_audit(config, n_obs) {
            Ok(rows) => ctx.report.critical_value_audit = Some(rows),
            Err(e) => return Err(ctx.fail(None, Stage::CriticalValueAudit, e)),
        }
    }
    Ok(ctx.report)
}

/// Load the inputs named by `config` and run the stages covered by `scope`.
pub fn run_pipeline(config: &Config, scope: Scope) -> Result<Report, PipelineError> {
    config.validate()?;
    let inputs = load_inputs(config)?;
    run_with_inputs(config, &inputs, scope)
}
