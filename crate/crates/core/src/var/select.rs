use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit_var_from;
use crate::dist::chi_squared_sf;
use crate::linalg::log_det_spd;
use crate::series::{require_aligned, AnnualSeries};
use crate::{Error, Result};

/// Selection statistics for one candidate lag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagCriteria {
    pub lag: usize,
    pub log_likelihood: f64,
    /// Likelihood-ratio statistic against lag − 1, df `n²`.
    pub lr: f64,
    pub lr_df: usize,
    pub lr_p_value: f64,
    pub fpe: f64,
    pub aic: f64,
    pub hqic: f64,
    pub sbic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagSelection {
    pub rows: Vec<LagCriteria>,
    /// Largest lag whose LR test rejects at 5%; `None` if none does.
    pub lr_choice: Option<usize>,
    pub fpe_choice: usize,
    pub aic_choice: usize,
    pub hqic_choice: usize,
    pub sbic_choice: usize,
    /// Most frequent choice across the criteria, smallest lag on ties.
    pub consensus: usize,
    pub n_obs: usize,
    pub sample: (i32, i32),
}

/// Log-likelihood of a Gaussian VAR given `ln|Σ|` (divisor `T`).
pub(crate) fn gaussian_log_likelihood(n_vars: usize, n_obs: usize, log_det: f64) -> f64 {
    let n = n_vars as f64;
    -0.5 * n_obs as f64 * (n * (2.0 * std::f64::consts::PI).ln() + log_det + n)
}

/// Criteria for a VAR(`lag`) with intercept given `ln|Σ|` from the common sample.
pub(crate) fn information_criteria(n_vars: usize, n_obs: usize, lag: usize, log_det: f64) -> (f64, f64, f64, f64) {
    let t = n_obs as f64;
    let n = n_vars as f64;
    let per_eq = (n_vars * lag + 1) as f64;
    let k = n * per_eq;
    let base = -2.0 * gaussian_log_likelihood(n_vars, n_obs, log_det) / t;
    let aic = base + 2.0 * k / t;
    let hqic = base + 2.0 * k * t.ln().ln() / t;
    let sbic = base + k * t.ln() / t;
    let fpe = log_det.exp() * ((t + per_eq) / (t - per_eq)).powf(n);
    (fpe, aic, hqic, sbic)
}

fn argmin(rows: &[LagCriteria], f: impl Fn(&LagCriteria) -> f64) -> usize {
    rows.iter().min_by(|a, b| f(a).total_cmp(&f(b))).map(|r| r.lag).expect("at least one candidate lag")
}

/// Pre-estimation lag-order statistics for lags `1..=max_lag`, all fitted on
/// the sample that the largest lag leaves.
pub fn select_lag(data: &[AnnualSeries], max_lag: usize) -> Result<LagSelection> {
    require_aligned(data)?;
    if max_lag == 0 {
        return Err(Error::InvalidSpec("maximum lag must be at least 1".into()));
    }
    let n = data.len();
    let len = data[0].len();
    if len < max_lag + n * max_lag + 10 {
        return Err(Error::DegenerateInput(format!(
            "{len} observations are too few for lag selection up to {max_lag} with {n} series"
        )));
    }
    let fits = (0..=max_lag)
        .into_par_iter()
        .map(|p| {
            let fit = fit_var_from(data, p, None, max_lag)?;
            log_det_spd(&fit.residual_covariance())
        })
        .collect::<Result<Vec<f64>>>()?;
    let t = len - max_lag;
    let df = n * n;

    let rows: Vec<LagCriteria> = (1..=max_lag)
        .map(|p| {
            let log_det = fits[p];
            // small-sample correction: scale by T minus per-equation regressors
            let m = (n * p + 1) as f64;
            let lr = ((t as f64 - m) * (fits[p - 1] - log_det)).max(0.0);
            let (fpe, aic, hqic, sbic) = information_criteria(n, t, p, log_det);
            LagCriteria {
                lag: p,
                log_likelihood: gaussian_log_likelihood(n, t, log_det),
                lr,
                lr_df: df,
                lr_p_value: chi_squared_sf(lr, df as f64),
                fpe,
                aic,
                hqic,
                sbic,
            }
        })
        .collect();

    let lr_choice = rows.iter().rev().find(|r| r.lr_p_value < 0.05).map(|r| r.lag);
    let fpe_choice = argmin(&rows, |r| r.fpe);
    let aic_choice = argmin(&rows, |r| r.aic);
    let hqic_choice = argmin(&rows, |r| r.hqic);
    let sbic_choice = argmin(&rows, |r| r.sbic);
    let mut votes = vec![0usize; max_lag + 1];
    for c in [fpe_choice, aic_choice, hqic_choice, sbic_choice].into_iter().chain(lr_choice) {
        votes[c] += 1;
    }
    let best = votes.iter().copied().max().unwrap_or(0);
    let consensus = votes.iter().position(|&v| v == best && v > 0).unwrap_or(1);

    Ok(LagSelection {
        rows,
        lr_choice,
        fpe_choice,
        aic_choice,
        hqic_choice,
        sbic_choice,
        consensus,
        n_obs: t,
        sample: (data[0].start_year() + max_lag as i32, data[0].end_year()),
    })
}
