//! Vector autoregressions: VAR/VARX estimation by equation-wise least squares,
//! lag-order selection, companion-form stability and residual diagnostics.

mod diagnostics;
mod select;

pub use diagnostics::{
    diagnostics, lm_autocorr, var_normality, DiagnosticsReport, JointNormality, LmResult, VarNormality,
};
pub use select::{select_lag, LagCriteria, LagSelection};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::ols::{fit_ols, Estimate};
use crate::series::{require_aligned, AnnualSeries};
use crate::{Error, Result};

/// An exogenous regressor entering a VARX at the given lags (0 = contemporaneous).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exogenous {
    pub series: AnnualSeries,
    pub lags: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarFit {
    /// `coefficients[i][j][m]`: effect of variable `m` at lag `i + 1` on equation `j`.
    pub coefficients: Vec<Vec<Vec<Estimate>>>,
    /// `exogenous[j][l]`: effect of the exogenous series at `exog_lags[l]` on equation `j`.
    pub exogenous: Option<Vec<Vec<Estimate>>>,
    pub exog_lags: Vec<usize>,
    pub intercept: Vec<Estimate>,
    /// One residual column per equation, `n_obs` long.
    pub residuals: Vec<Vec<f64>>,
    pub per_equation_r2: Vec<f64>,
    pub per_equation_rmse: Vec<f64>,
    pub lag_order: usize,
    pub n_obs: usize,
    pub sample: (i32, i32),
    /// Regressors shared by every equation, column-major, without the constant.
    pub regressors: Vec<Vec<f64>>,
}

impl VarFit {
    pub fn n_vars(&self) -> usize {
        self.residuals.len()
    }

    /// Point estimates `A_1 … A_p` as `n × n` matrices.
    pub fn coefficient_matrices(&self) -> Vec<DMatrix<f64>> {
        let n = self.n_vars();
        self.coefficients.iter().map(|lag| DMatrix::from_fn(n, n, |j, m| lag[j][m].value)).collect()
    }

    pub fn intercept_vector(&self) -> DVector<f64> {
        DVector::from_iterator(self.n_vars(), self.intercept.iter().map(|e| e.value))
    }

    /// Residual covariance with divisor `T`.
    pub fn residual_covariance(&self) -> DMatrix<f64> {
        let e = self.residual_matrix();
        e.transpose() * &e / self.n_obs as f64
    }

    pub(crate) fn residual_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n_obs, self.n_vars(), |i, j| self.residuals[j][i])
    }

    pub(crate) fn regressor_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n_obs, self.regressors.len(), |i, c| self.regressors[c][i])
    }

    /// Long-run mean `(I − Σ A_i)⁻¹ c` of an endogenous-only VAR.
    pub fn unconditional_mean(&self) -> Option<DVector<f64>> {
        let n = self.n_vars();
        let mut m = DMatrix::identity(n, n);
        for a in self.coefficient_matrices() {
            m -= a;
        }
        m.try_inverse().map(|inv| inv * self.intercept_vector())
    }

    /// Iterate the fitted recursion without shocks. `history` holds the most
    /// recent `lag_order` observations, oldest first.
    pub fn forecast(&self, history: &[DVector<f64>], steps: usize) -> Vec<DVector<f64>> {
        let mats = self.coefficient_matrices();
        let c = self.intercept_vector();
        let mut window: Vec<DVector<f64>> = history.to_vec();
        let mut out = Vec::with_capacity(steps);
        for _ in 0..steps {
            let mut next = c.clone();
            for (i, a) in mats.iter().enumerate() {
                next += a * &window[window.len() - 1 - i];
            }
            window.push(next.clone());
            out.push(next);
        }
        out
    }
}

/// Estimate a VAR(`lag_order`) with intercept, optionally with an exogenous
/// regressor. The estimation sample starts after the longest lag.
pub fn fit_var(data: &[AnnualSeries], lag_order: usize, exog: Option<&Exogenous>) -> Result<VarFit> {
    let max_exog = exog.map_or(0, |e| e.lags.iter().copied().max().unwrap_or(0));
    fit_var_from(data, lag_order, exog, lag_order.max(max_exog))
}

/// As [`fit_var`] with the first regression row fixed at `first` (an index
/// into the series), so fits at different lags can share a sample.
pub(crate) fn fit_var_from(
    data: &[AnnualSeries],
    lag_order: usize,
    exog: Option<&Exogenous>,
    first: usize,
) -> Result<VarFit> {
    require_aligned(data)?;
    let n = data.len();
    let len = data[0].len();
    if len < n * lag_order + 10 {
        return Err(Error::DegenerateInput(format!(
            "{len} observations are too few for {n} series at lag {lag_order}"
        )));
    }
    let exog_values: Option<(&[f64], &[usize])> = match exog {
        Some(e) => {
            if e.lags.is_empty() {
                return Err(Error::InvalidSpec("exogenous regressor needs at least one lag".into()));
            }
            Some((e.series.covering(data[0].start_year(), len)?, e.lags.as_slice()))
        }
        None => None,
    };
    let max_exog = exog_values.map_or(0, |(_, l)| l.iter().copied().max().unwrap_or(0));
    if first < lag_order.max(max_exog) || first >= len {
        return Err(Error::InvalidSpec(format!("sample start {first} leaves no room for the lags")));
    }
    let rows = len - first;

    let mut regressors: Vec<Vec<f64>> = Vec::new();
    for lag in 1..=lag_order {
        for s in data {
            regressors.push((first..len).map(|t| s.values()[t - lag]).collect());
        }
    }
    if let Some((x, lags)) = exog_values {
        for &lag in lags {
            regressors.push((first..len).map(|t| x[t - lag]).collect());
        }
    }
    let design = DMatrix::from_fn(rows, regressors.len(), |i, c| regressors[c][i]);

    let mut coefficients = vec![vec![Vec::with_capacity(n); n]; lag_order];
    let mut exogenous = exog_values.map(|_| vec![Vec::new(); n]);
    let mut intercept = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    let mut per_equation_r2 = Vec::with_capacity(n);
    let mut per_equation_rmse = Vec::with_capacity(n);
    for (j, s) in data.iter().enumerate() {
        let fit = fit_ols(&s.values()[first..], &design, true)?;
        for c in 0..n * lag_order {
            coefficients[c / n][j].push(fit.estimate(c));
        }
        if let Some(ex) = exogenous.as_mut() {
            for c in n * lag_order..regressors.len() {
                ex[j].push(fit.estimate(c));
            }
        }
        intercept.push(fit.estimate(regressors.len()));
        per_equation_r2.push(fit.r_squared);
        per_equation_rmse.push(fit.rmse);
        residuals.push(fit.residuals);
    }

    let start = data[0].start_year() + first as i32;
    Ok(VarFit {
        coefficients,
        exogenous,
        exog_lags: exog.map(|e| e.lags.clone()).unwrap_or_default(),
        intercept,
        residuals,
        per_equation_r2,
        per_equation_rmse,
        lag_order,
        n_obs: rows,
        sample: (start, data[0].end_year()),
        regressors,
    })
}

/// Companion matrix of the fitted lag polynomial.
pub fn companion_matrix(fit: &VarFit) -> DMatrix<f64> {
    let n = fit.n_vars();
    let p = fit.lag_order.max(1);
    let mut c = DMatrix::zeros(n * p, n * p);
    for (i, a) in fit.coefficient_matrices().iter().enumerate() {
        c.view_mut((0, i * n), (n, n)).copy_from(a);
    }
    for i in n..n * p {
        c[(i, i - n)] = 1.0;
    }
    c
}

/// Moduli of the companion-matrix eigenvalues, descending. The fit is stable
/// when the first is below one.
pub fn stability(fit: &VarFit) -> Vec<f64> {
    if fit.lag_order == 0 {
        return Vec::new();
    }
    let mut moduli: Vec<f64> = companion_matrix(fit).complex_eigenvalues().iter().map(|z| z.norm()).collect();
    moduli.sort_by(|a, b| b.total_cmp(a));
    moduli
}
