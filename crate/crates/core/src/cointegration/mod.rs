//! Cointegration: Engle-Granger residual tests, the Johansen trace test and
//! VECM estimation.

mod johansen;
mod vecm;

pub use johansen::{johansen_trace, JohansenResult};
pub use vecm::{fit_vecm, VecmFit};

use serde::{Deserialize, Serialize};

use crate::ols::{fit_ols_columns, OlsFit};
use crate::series::{require_aligned, AnnualSeries};
use crate::unit_root::{adf_sweep, dfgls_sweep, UnitRootResult};
use crate::{Error, Level, Result, TrendSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EgResult {
    /// Regression of `y` on `x` with intercept (slope first).
    pub step1: OlsFit,
    pub residuals: AnnualSeries,
    /// ADF (no deterministics) at lags `0..=max_lag`, then DF-GLS at lags
    /// `1..=max_lag`.
    pub residual_tests: Vec<UnitRootResult>,
    /// Strongest level at which every residual test rejects a unit root.
    pub cointegrated_at: Option<Level>,
}

/// Engle-Granger two-step procedure.
///
/// The residuals have zero mean by construction, so ADF runs without
/// deterministic terms. DF-GLS cannot run without detrending and uses the
/// constant specification, whose critical values coincide with the
/// no-deterministics Dickey-Fuller table.
pub fn engle_granger(y: &AnnualSeries, x: &AnnualSeries, max_lag: usize) -> Result<EgResult> {
    require_aligned(&[y.clone(), x.clone()])?;
    if y.len() < 15 {
        return Err(Error::DegenerateInput(format!("Engle-Granger needs at least 15 years, got {}", y.len())));
    }
    let step1 = fit_ols_columns(y.values(), &[x.values()], true)?;
    let scale: f64 = y.values().iter().map(|v| v * v).sum();
    if step1.rss() <= 1e-24 * scale {
        return Err(Error::SingularDesign(
            "perfect cointegration: the first-step residuals are identically zero".into(),
        ));
    }
    let residuals = AnnualSeries::new(y.start_year(), step1.residuals.clone(), y.unit())?;
    let mut residual_tests = adf_sweep(&residuals, max_lag, TrendSpec::None)?;
    if max_lag >= 1 {
        residual_tests.extend(dfgls_sweep(&residuals, max_lag, TrendSpec::Constant)?);
    }
    let cointegrated_at = Level::ALL.into_iter().find(|l| residual_tests.iter().all(|r| r.rejects_at(*l)));
    Ok(EgResult { step1, residuals, residual_tests, cointegrated_at })
}
