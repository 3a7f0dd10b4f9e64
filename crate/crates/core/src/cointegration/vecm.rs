use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::johansen::ReducedRank;
use crate::ols::{fit_ols, Estimate};
use crate::series::AnnualSeries;
use crate::{Error, Result, TrendSpec};

/// Vector error-correction model
/// `Δy_t = α βᵀ y_{t−1} + Σ_i Γ_i Δy_{t−i} + c + u_t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VecmFit {
    /// Cointegrating vectors, `beta[k][j]` is the weight of variable `j` in
    /// relation `k`. The leading `rank × rank` block is the identity, so the
    /// first relation carries +1 on the first variable.
    pub beta: Vec<Vec<f64>>,
    /// Standard errors of `beta`; `None` on normalised entries.
    pub beta_std_errors: Vec<Vec<Option<f64>>>,
    /// `alpha[j][k]`: adjustment of equation `j` to relation `k`.
    pub alpha: Vec<Vec<Estimate>>,
    /// `short_run[i][j][m]`: effect of `Δy_{m, t−i−1}` on equation `j`.
    pub short_run: Vec<Vec<Vec<Estimate>>>,
    pub constant: Option<Vec<Estimate>>,
    pub per_equation_r2: Vec<f64>,
    pub per_equation_rmse: Vec<f64>,
    /// One residual column per equation.
    pub residuals: Vec<Vec<f64>>,
    pub rank: usize,
    pub lag_order: usize,
    pub trend: TrendSpec,
    pub n_obs: usize,
    pub sample: (i32, i32),
    pub log_likelihood: f64,
    pub sbic: f64,
    pub hqic: f64,
}

impl VecmFit {
    /// `βᵀ y_t` for relation `k` over the full span of `data`.
    pub fn error_correction_term(&self, data: &[AnnualSeries], k: usize) -> Vec<f64> {
        (0..data[0].len()).map(|t| self.beta[k].iter().zip(data).map(|(b, s)| b * s.values()[t]).sum()).collect()
    }
}

pub fn fit_vecm(data: &[AnnualSeries], rank: usize, lag_order: usize, trend: TrendSpec) -> Result<VecmFit> {
    let rrr = ReducedRank::estimate(data, lag_order, trend)?;
    let n = rrr.n_vars();
    if rank == 0 || rank >= n {
        return Err(Error::InvalidSpec(format!("cointegrating rank must lie in [1, {}], got {rank}", n - 1)));
    }
    let t = rrr.n_obs;

    let raw = rrr.eigenvectors.columns(0, rank).into_owned();
    let top = raw.rows(0, rank).into_owned();
    let top_inv =
        top.try_inverse().ok_or_else(|| Error::SingularSystem("cannot normalise the cointegrating vectors".into()))?;
    let beta = &raw * top_inv; // n × rank, identity on top

    let ec = &rrr.levels_lag * &beta; // T × rank
    let n_short = n * (lag_order - 1);
    let mut design = DMatrix::zeros(t, rank + n_short);
    design.columns_mut(0, rank).copy_from(&ec);
    design.columns_mut(rank, n_short).copy_from(&rrr.short_run.columns(0, n_short));
    let intercept = trend == TrendSpec::Constant;

    let mut alpha = vec![Vec::with_capacity(rank); n];
    let mut short_run = vec![vec![Vec::with_capacity(n); n]; lag_order - 1];
    let mut constant = intercept.then(Vec::new);
    let mut per_equation_r2 = Vec::with_capacity(n);
    let mut per_equation_rmse = Vec::with_capacity(n);
    let mut residuals = Vec::with_capacity(n);
    for j in 0..n {
        let response: Vec<f64> = rrr.dy.column(j).iter().copied().collect();
        let fit = fit_ols(&response, &design, intercept)?;
        for k in 0..rank {
            alpha[j].push(fit.estimate(k));
        }
        for c in 0..n_short {
            short_run[c / n][j].push(fit.estimate(rank + c));
        }
        if let Some(constant) = constant.as_mut() {
            constant.push(fit.estimate(rank + n_short));
        }
        per_equation_r2.push(fit.r_squared);
        per_equation_rmse.push(fit.rmse);
        residuals.push(fit.residuals);
    }

    // Var(vec B) = (αᵀ Ω⁻¹ α)⁻¹ ⊗ (Hᵀ S11 H)⁻¹ / T for the free block B of β.
    let resid = DMatrix::from_fn(t, n, |i, j| residuals[j][i]);
    let omega = resid.transpose() * &resid / t as f64;
    let alpha_m = DMatrix::from_fn(n, rank, |j, k| alpha[j][k].value);
    let mut beta_std_errors = vec![vec![None; n]; rank];
    if let (Some(omega_inv), true) = (omega.try_inverse(), n > rank) {
        let a_info = alpha_m.transpose() * omega_inv * &alpha_m;
        let h_s11_h = rrr.s11.view((rank, rank), (n - rank, n - rank)).into_owned();
        if let (Some(a_inv), Some(s_inv)) = (a_info.try_inverse(), h_s11_h.try_inverse()) {
            for k in 0..rank {
                for i in 0..n - rank {
                    let v = a_inv[(k, k)] * s_inv[(i, i)] / t as f64;
                    beta_std_errors[k][rank + i] = (v >= 0.0).then(|| v.sqrt());
                }
            }
        }
    }

    let log_likelihood = rrr.log_likelihood(rank)?;
    let k = rrr.n_params(rank) as f64;
    let tf = t as f64;
    Ok(VecmFit {
        beta: (0..rank).map(|k| beta.column(k).iter().copied().collect()).collect(),
        beta_std_errors,
        alpha,
        short_run,
        constant,
        per_equation_r2,
        per_equation_rmse,
        residuals,
        rank,
        lag_order,
        trend,
        n_obs: t,
        sample: (rrr.first_year, rrr.last_year),
        log_likelihood,
        sbic: -2.0 * log_likelihood / tf + k * tf.ln() / tf,
        hqic: -2.0 * log_likelihood / tf + 2.0 * k * tf.ln().ln() / tf,
    })
}
