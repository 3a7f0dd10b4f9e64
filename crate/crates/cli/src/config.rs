//! TOML run configuration.
//!
//! Relative input paths resolve against the directory of the config file.
//! Nothing is read from the environment.

use std::fs;
use std::path::{Path, PathBuf};

use popgrowth_core::synthetic::FixtureSpec;
use popgrowth_core::TrendSpec;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnInput {
    pub path: PathBuf,
    /// Value column; the year column is always `year`.
    #[serde(default = "default_value_column")]
    pub column: String,
}

fn default_value_column() -> String {
    "value".into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    /// Vintage label of `n9_measured`, e.g. "postcensal".
    #[serde(default = "default_label")]
    pub label: String,
    #[serde(default = "default_age")]
    pub defining_age: u32,
    /// Use the bundled synthetic fixture instead of CSV inputs.
    #[serde(default)]
    pub synthetic: bool,
    pub gdp_per_capita: Option<ColumnInput>,
    /// Total real GDP; divided by `population_15plus` when no per-capita series is given.
    pub gdp_total: Option<ColumnInput>,
    pub population_15plus: Option<ColumnInput>,
    pub n9_measured: Option<ColumnInput>,
    /// A second population vintage run through the same pipeline.
    pub second_vintage: Option<SecondVintage>,
    pub year_from: Option<i32>,
    pub year_to: Option<i32>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SecondVintage {
    pub label: String,
    pub path: PathBuf,
    #[serde(default = "default_value_column")]
    pub column: String,
}

fn default_label() -> String {
    "measured".into()
}
fn default_age() -> u32 {
    9
}
fn default_output_dir() -> PathBuf {
    "report".into()
}
fn default_formats() -> Vec<Format> {
    vec![Format::Text, Format::Csv, Format::Json]
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self {
            label: default_label(),
            defining_age: default_age(),
            synthetic: false,
            gdp_per_capita: None,
            gdp_total: None,
            population_15plus: None,
            n9_measured: None,
            second_vintage: None,
            year_from: None,
            year_to: None,
            output_dir: default_output_dir(),
            formats: default_formats(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    /// Seed year of the prediction; defaults to the first year of the data.
    pub initial_year: Option<i32>,
    pub a_min: f64,
    pub a_max: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self { initial_year: None, a_min: 1.0, a_max: 10_000.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TestConfig {
    pub adf_max_lag: usize,
    pub dfgls_max_lag: usize,
    pub engle_granger_max_lag: usize,
    pub var_max_lag: usize,
    pub johansen_lag: usize,
    pub johansen_trend: TrendSpec,
    pub var_lag: usize,
    pub lm_max_lag: usize,
    pub vecm_rank: usize,
}

impl Default for TestConfig {
    fn default() -> Self {
        Self {
            adf_max_lag: 3,
            dfgls_max_lag: 4,
            engle_granger_max_lag: 3,
            var_max_lag: 4,
            johansen_lag: 2,
            johansen_trend: TrendSpec::Constant,
            var_lag: 2,
            lm_max_lag: 2,
            vecm_rank: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MonteCarloConfig {
    /// Audit the 1% critical values of the unit-root tables by simulation.
    pub enabled: bool,
    pub replications: usize,
    pub seed: u64,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        Self { enabled: false, replications: 50_000, seed: 20_070_101 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub dataset: DatasetConfig,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub tests: TestConfig,
    #[serde(default)]
    pub monte_carlo: MonteCarloConfig,
    /// Fixture parameters, used when `dataset.synthetic` is set.
    #[serde(default)]
    pub synthetic: FixtureSpec,
}

impl Config {
    /// Defaults with the bundled synthetic fixture as input.
    pub fn synthetic() -> Self {
        Self {
            dataset: DatasetConfig { label: "synthetic".into(), synthetic: true, ..DatasetConfig::default() },
            model: ModelConfig::default(),
            tests: TestConfig::default(),
            monte_carlo: MonteCarloConfig::default(),
            synthetic: FixtureSpec::default(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        let mut config = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        config.resolve_paths(base);
        Ok(config)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let config: Self = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let d = &mut self.dataset;
        for input in [&mut d.gdp_per_capita, &mut d.gdp_total, &mut d.population_15plus, &mut d.n9_measured]
            .into_iter()
            .flatten()
        {
            input.path = base.join(&input.path);
        }
        if let Some(v) = d.second_vintage.as_mut() {
            v.path = base.join(&v.path);
        }
        d.output_dir = base.join(&d.output_dir);
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |m: &str| Err(ConfigError::Invalid(m.into()));
        let d = &self.dataset;
        if !d.synthetic {
            if d.n9_measured.is_none() {
                return invalid("dataset.n9_measured is required unless dataset.synthetic is set");
            }
            match (&d.gdp_per_capita, &d.gdp_total, &d.population_15plus) {
                (Some(_), None, None) | (None, Some(_), Some(_)) => {}
                _ => {
                    return invalid(
                        "give either dataset.gdp_per_capita or both dataset.gdp_total and dataset.population_15plus",
                    )
                }
            }
        } else if self.synthetic.end_year - self.synthetic.start_year < 20 {
            return invalid("synthetic fixture needs at least 21 years");
        }
        if let (Some(from), Some(to)) = (d.year_from, d.year_to) {
            if from > to {
                return Err(ConfigError::Invalid(format!("empty year range {from}-{to}")));
            }
        }
        if d.formats.is_empty() {
            return invalid("dataset.formats lists no output format");
        }
        let m = &self.model;
        if !(m.a_min > 0.0 && m.a_max > m.a_min) {
            return Err(ConfigError::Invalid(format!("invalid bounds for A: [{}, {}]", m.a_min, m.a_max)));
        }
        let t = &self.tests;
        for (name, v) in [
            ("adf_max_lag", t.adf_max_lag),
            ("dfgls_max_lag", t.dfgls_max_lag),
            ("engle_granger_max_lag", t.engle_granger_max_lag),
            ("var_max_lag", t.var_max_lag),
            ("johansen_lag", t.johansen_lag),
            ("var_lag", t.var_lag),
            ("lm_max_lag", t.lm_max_lag),
            ("vecm_rank", t.vecm_rank),
        ] {
            if v == 0 {
                return Err(ConfigError::Invalid(format!("tests.{name} must be positive")));
            }
        }
        if t.johansen_trend == TrendSpec::Trend {
            return invalid("tests.johansen_trend must be none or constant");
        }
        let mc = &self.monte_carlo;
        if mc.enabled && mc.replications < 1000 {
            return invalid("monte_carlo.replications must be at least 1000");
        }
        Ok(())
    }
}
