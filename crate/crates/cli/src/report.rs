//! The structured report and its JSON, CSV and text emitters.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use popgrowth_core::cointegration::{EgResult, JohansenResult, VecmFit};
use popgrowth_core::demog::FitReport;
use popgrowth_core::ols::OlsFit;
use popgrowth_core::unit_root::{UnitRootResult, UnitRootTest};
use popgrowth_core::var::{DiagnosticsReport, LagSelection, VarFit};
use popgrowth_core::{Level, TrendSpec};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{Config, Format};
use crate::render::{render_text, tables};

/// Bumped on any incompatible change of the JSON layout.
pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum EmitError {
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot serialise report: {0}")]
    Json(#[from] serde_json::Error),
    #[error("cannot write CSV {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub report_version: u32,
    pub provenance: Provenance,
    pub vintages: Vec<VintageReport>,
    pub critical_value_audit: Option<Vec<AuditRow>>,
    pub failure: Option<StageFailure>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub library: String,
    pub version: String,
    pub inputs: Vec<InputHash>,
    pub config: Config,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputHash {
    pub name: String,
    /// File path, or `synthetic` for the generated fixture.
    pub source: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Stage {
    Growth,
    Calibrate,
    Predict,
    UnitRoot,
    DifferenceTests,
    EngleGranger,
    LagSelection,
    Johansen,
    Var,
    Vecm,
    Regressions,
    CriticalValueAudit,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = serde_json::to_value(self).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
        f.write_str(&s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageFailure {
    pub vintage: Option<String>,
    pub stage: Stage,
    /// `data` or `numerical`.
    pub kind: String,
    pub message: String,
}

/// All tables for one population vintage; `None` marks stages not reached.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct VintageReport {
    pub label: String,
    pub model: Option<ModelSection>,
    pub unit_root_levels: Option<Vec<SeriesTest>>,
    pub unit_root_differences: Option<Vec<SeriesTest>>,
    /// Tests on measured minus predicted.
    pub difference_tests: Option<Vec<SeriesTest>>,
    pub engle_granger: Option<EgResult>,
    pub lag_selection: Option<LagSelection>,
    pub johansen: Option<JohansenSection>,
    pub var: Option<VarSection>,
    pub vecm: Option<VecmFit>,
    pub regressions: Option<Vec<Regression>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSection {
    pub fit: FitReport,
    pub rows: Vec<ModelRow>,
}

/// One year of the model-fit data behind the figures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelRow {
    pub year: i32,
    pub gdp_per_capita: f64,
    /// Growth over `year → year + 1`.
    pub growth: Option<f64>,
    pub trend_growth: f64,
    pub n9_measured: Option<f64>,
    pub n9_predicted: Option<f64>,
    pub difference: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesTest {
    pub series: String,
    pub result: UnitRootResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JohansenSection {
    pub trace: JohansenResult,
    /// Diagnostics of the levels VAR at the Johansen lag order.
    pub diagnostics: DiagnosticsReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarSection {
    /// Measured population on its own lags and the predicted one at lag 0.
    pub exogenous: VarFit,
    pub endogenous: VarFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Regression {
    pub label: String,
    pub regressor: String,
    pub sample: (i32, i32),
    /// Slope first, constant last.
    pub fit: OlsFit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRow {
    pub test: UnitRootTest,
    pub trend: TrendSpec,
    pub n_obs: usize,
    pub level: Level,
    pub table: f64,
    pub simulated: f64,
    pub replications: usize,
    pub seed: u64,
}

impl Report {
    pub fn to_json(&self) -> Result<String, serde_json::Error> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Number of data cells across all tables, as written to CSV.
    pub fn cell_count(&self) -> usize {
        tables(self).iter().map(|t| t.rows.len() * t.header.len()).sum()
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> EmitError + '_ {
    move |source| EmitError::Io { path: path.to_path_buf(), source }
}

/// Write the report into `dir` in each requested format: `report.json`,
/// `report.txt` and one CSV per table.
pub fn emit_report(report: &Report, dir: &Path, formats: &[Format]) -> Result<Vec<PathBuf>, EmitError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut written = Vec::new();
    for format in formats {
        match format {
            Format::Json => {
                let path = dir.join("report.json");
                fs::write(&path, report.to_json()?).map_err(io_err(&path))?;
                written.push(path);
            }
            Format::Text => {
                let path = dir.join("report.txt");
                fs::write(&path, render_text(report)).map_err(io_err(&path))?;
                written.push(path);
            }
            Format::Csv => {
                for table in tables(report) {
                    let path = dir.join(format!("{}.csv", table.name));
                    write_csv(&path, &table.header, &table.csv_rows())?;
                    written.push(path);
                }
            }
        }
    }
    Ok(written)
}

fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<(), EmitError> {
    let csv_err = |source| EmitError::Csv { path: path.to_path_buf(), source };
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row).map_err(csv_err)?;
    }
    w.flush().map_err(io_err(path))?;
    Ok(())
}

/// Render a report in one format to a writer (JSON or text; CSV needs a directory).
pub fn write_to<W: Write>(report: &Report, format: Format, mut out: W) -> Result<(), EmitError> {
    let text = match format {
        Format::Json => report.to_json()?,
        Format::Text | Format::Csv => render_text(report),
    };
    out.write_all(text.as_bytes()).map_err(io_err(Path::new("<stdout>")))
}
