//! Augmented Dickey-Fuller and DF-GLS unit-root tests.
//!
//! Both report the t-ratio on the lagged level in a Dickey-Fuller regression
//! and compare it with embedded finite-sample critical values looked up at the
//! regression's effective sample size. [`simulate_critical_value`] rebuilds
//! those values from scratch by Monte Carlo and serves as their audit.

mod simulate;
mod tables;

pub use simulate::{simulate_critical_value, simulate_critical_values, simulate_null_distribution};
pub use tables::critical_value;
pub(crate) use tables::{TRACE_CONSTANT, TRACE_NONE};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::from_columns;
use crate::ols::fit_ols;
use crate::series::AnnualSeries;
use crate::{Error, Level, Result, TrendSpec};

/// Local-to-unity constants for GLS detrending.
pub const DFGLS_CBAR_CONSTANT: f64 = -7.0;
pub const DFGLS_CBAR_TREND: f64 = -13.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnitRootTest {
    Adf,
    DfGls,
}

impl std::fmt::Display for UnitRootTest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            UnitRootTest::Adf => "ADF",
            UnitRootTest::DfGls => "DF-GLS",
        })
    }
}

impl std::str::FromStr for UnitRootTest {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "adf" => Ok(UnitRootTest::Adf),
            "dfgls" | "df-gls" => Ok(UnitRootTest::DfGls),
            other => Err(Error::InvalidSpec(format!("unknown unit-root test `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalValues {
    #[serde(rename = "1%")]
    pub one: f64,
    #[serde(rename = "5%")]
    pub five: f64,
    #[serde(rename = "10%")]
    pub ten: f64,
}

impl CriticalValues {
    pub fn get(&self, level: Level) -> f64 {
        match level {
            Level::OnePercent => self.one,
            Level::FivePercent => self.five,
            Level::TenPercent => self.ten,
        }
    }

    /// Most extreme level at which `statistic` falls in the left tail.
    pub fn strongest_rejection(&self, statistic: f64) -> Option<Level> {
        Level::ALL.into_iter().find(|l| statistic < self.get(*l))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitRootResult {
    pub test: UnitRootTest,
    pub statistic: f64,
    pub lag: usize,
    pub trend: TrendSpec,
    pub critical_values: CriticalValues,
    /// Strongest level at which the unit-root null is rejected.
    pub reject_at: Option<Level>,
    /// Observations in the test regression.
    pub n_obs: usize,
    /// First and last year of the test regression.
    pub sample: (i32, i32),
}

impl UnitRootResult {
    pub fn rejects_at(&self, level: Level) -> bool {
        self.statistic < self.critical_values.get(level)
    }
}

/// Dickey-Fuller regression of `Δy_t` on `y_{t−1}`, `lag` lagged differences
/// and the deterministic terms of `trend`. Returns the level t-ratio and the
/// number of observations.
pub(crate) fn df_regression(y: &[f64], lag: usize, trend: TrendSpec) -> Result<(f64, usize)> {
    let n = y.len();
    if n < lag + 3 {
        return Err(Error::DegenerateInput(format!("{n} values cannot support lag {lag}")));
    }
    let dy: Vec<f64> = y.windows(2).map(|w| w[1] - w[0]).collect();
    // dy[i] = y[i+1] − y[i]; regression rows t = lag + 1 ..= n − 1 of y.
    let first = lag + 1;
    let rows = n - first;
    let response: Vec<f64> = (first..n).map(|t| dy[t - 1]).collect();
    let level: Vec<f64> = (first..n).map(|t| y[t - 1]).collect();
    let mut columns: Vec<Vec<f64>> = vec![level];
    for j in 1..=lag {
        columns.push((first..n).map(|t| dy[t - 1 - j]).collect());
    }
    if trend == TrendSpec::Trend {
        columns.push((first..n).map(|t| t as f64).collect());
    }
    let refs: Vec<&[f64]> = columns.iter().map(Vec::as_slice).collect();
    let fit = fit_ols(&response, &from_columns(&refs), trend != TrendSpec::None)?;
    let se = fit.standard_errors[0];
    if !(se > 0.0) || !se.is_finite() {
        return Err(Error::SingularDesign(
            "Dickey-Fuller regression fits exactly; the level coefficient has no standard error".into(),
        ));
    }
    Ok((fit.coefficients[0] / se, rows))
}

/// GLS detrending by quasi-differencing with `ā = 1 + c̄/T`.
pub fn gls_detrend(y: &[f64], trend: TrendSpec) -> Result<Vec<f64>> {
    let cbar = match trend {
        TrendSpec::Constant => DFGLS_CBAR_CONSTANT,
        TrendSpec::Trend => DFGLS_CBAR_TREND,
        TrendSpec::None => return Err(Error::InvalidSpec("DF-GLS requires a constant or trend specification".into())),
    };
    let n = y.len();
    let a = 1.0 + cbar / n as f64;
    let quasi = |v: &dyn Fn(usize) -> f64| -> Vec<f64> {
        (0..n).map(|t| if t == 0 { v(0) } else { v(t) - a * v(t - 1) }).collect()
    };
    let y_q = quasi(&|t| y[t]);
    let mut z_cols = vec![quasi(&|_| 1.0)];
    if trend == TrendSpec::Trend {
        z_cols.push(quasi(&|t| (t + 1) as f64));
    }
    let refs: Vec<&[f64]> = z_cols.iter().map(Vec::as_slice).collect();
    let fit = fit_ols(&y_q, &from_columns(&refs), false)?;
    let delta = &fit.coefficients;
    Ok((0..n)
        .map(|t| {
            let mut d = delta[0];
            if trend == TrendSpec::Trend {
                d += delta[1] * (t + 1) as f64;
            }
            y[t] - d
        })
        .collect())
}

pub(crate) fn dfgls_statistic(y: &[f64], lag: usize, trend: TrendSpec) -> Result<(f64, usize)> {
    let detrended = gls_detrend(y, trend)?;
    df_regression(&detrended, lag, TrendSpec::None)
}

fn critical_values_for(test: UnitRootTest, trend: TrendSpec, n_obs: usize) -> Result<CriticalValues> {
    let cv = |l| tables::critical_value_unchecked(test, trend, n_obs, l);
    Ok(CriticalValues { one: cv(Level::OnePercent)?, five: cv(Level::FivePercent)?, ten: cv(Level::TenPercent)? })
}

fn result(
    test: UnitRootTest,
    s: &AnnualSeries,
    statistic: f64,
    lag: usize,
    trend: TrendSpec,
    n_obs: usize,
) -> Result<UnitRootResult> {
    let critical_values = critical_values_for(test, trend, n_obs)?;
    Ok(UnitRootResult {
        test,
        statistic,
        lag,
        trend,
        critical_values,
        reject_at: critical_values.strongest_rejection(statistic),
        n_obs,
        sample: (s.end_year() - n_obs as i32 + 1, s.end_year()),
    })
}

/// Augmented Dickey-Fuller test at a fixed lag.
pub fn adf_test(s: &AnnualSeries, lag: usize, trend: TrendSpec) -> Result<UnitRootResult> {
    if s.len() < lag + 8 {
        return Err(Error::DegenerateInput(format!(
            "ADF with lag {lag} needs at least {} values, got {}",
            lag + 8,
            s.len()
        )));
    }
    let (statistic, n_obs) = df_regression(s.values(), lag, trend)?;
    result(UnitRootTest::Adf, s, statistic, lag, trend, n_obs)
}

/// DF-GLS test at a fixed lag; `trend` must be constant or trend.
pub fn dfgls_test(s: &AnnualSeries, lag: usize, trend: TrendSpec) -> Result<UnitRootResult> {
    if trend == TrendSpec::None {
        return Err(Error::InvalidSpec("DF-GLS requires a constant or trend specification".into()));
    }
    if lag == 0 {
        return Err(Error::InvalidSpec("DF-GLS lag must be positive".into()));
    }
    if s.len() < lag + 10 {
        return Err(Error::DegenerateInput(format!(
            "DF-GLS with lag {lag} needs at least {} values, got {}",
            lag + 10,
            s.len()
        )));
    }
    let (statistic, n_obs) = dfgls_statistic(s.values(), lag, trend)?;
    result(UnitRootTest::DfGls, s, statistic, lag, trend, n_obs)
}

/// ADF at every lag `0..=max_lag`, one result per lag.
pub fn adf_sweep(s: &AnnualSeries, max_lag: usize, trend: TrendSpec) -> Result<Vec<UnitRootResult>> {
    (0..=max_lag).into_par_iter().map(|lag| adf_test(s, lag, trend)).collect()
}

/// DF-GLS at every lag `1..=max_lag`.
pub fn dfgls_sweep(s: &AnnualSeries, max_lag: usize, trend: TrendSpec) -> Result<Vec<UnitRootResult>> {
    (1..=max_lag).into_par_iter().map(|lag| dfgls_test(s, lag, trend)).collect()
}
