//! Econometric toolkit for the two-component model of real GDP per capita
//! growth: an economic trend driven by a constant annual increment of GDP per
//! capita, plus fluctuations tied to the change rate of a defining-age
//! population cohort.
//!
//! The crate is organised bottom-up:
//!
//! * [`series`]: year-indexed series and the transforms everything else uses.
//! * [`demog`]: trend, forward map, discrete inversion and calibration.
//! * [`ols`]: least squares with inference, plus Jarque-Bera normality.
//! * [`unit_root`]: ADF and DF-GLS with embedded and simulated critical values.
//! * [`cointegration`]: Engle-Granger, Johansen trace test and VECM.
//! * [`var`]: VAR/VARX fits, lag selection, stability and residual diagnostics.
//! * [`synthetic`]: seeded data generators used by the test suites and the
//!   bundled pipeline fixture.

// `!(x > 0.0)` deliberately treats NaN as failing the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cointegration;
pub mod demog;
pub mod dist;
mod error;
mod linalg;
pub mod ols;
pub mod series;
pub mod synthetic;
pub mod unit_root;
pub mod var;

pub use error::{Error, Result};
pub use series::{AlignedPair, AnnualSeries};

/// Significance levels carried by every embedded critical-value table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum Level {
    #[serde(rename = "1%")]
    OnePercent,
    #[serde(rename = "5%")]
    FivePercent,
    #[serde(rename = "10%")]
    TenPercent,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::OnePercent, Level::FivePercent, Level::TenPercent];

    pub fn probability(self) -> f64 {
        match self {
            Level::OnePercent => 0.01,
            Level::FivePercent => 0.05,
            Level::TenPercent => 0.10,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Level::OnePercent => "1%",
            Level::FivePercent => "5%",
            Level::TenPercent => "10%",
        }
    }
}

impl std::fmt::Display for Level {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// Deterministic terms included in a test regression or VAR system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrendSpec {
    None,
    Constant,
    Trend,
}

impl std::fmt::Display for TrendSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TrendSpec::None => "none",
            TrendSpec::Constant => "constant",
            TrendSpec::Trend => "trend",
        })
    }
}

impl std::str::FromStr for TrendSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" => Ok(TrendSpec::None),
            "constant" => Ok(TrendSpec::Constant),
            "trend" => Ok(TrendSpec::Trend),
            other => Err(Error::InvalidSpec(format!("unknown trend specification `{other}`"))),
        }
    }
}
