use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{stability, VarFit};
use crate::dist::chi_squared_sf;
use crate::linalg::{log_det_spd, residualize, spd_cholesky};
use crate::ols::{jarque_bera, NormalityResult};
use crate::{Error, Result};

/// Lagrange-multiplier test for residual autocorrelation at one lag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LmResult {
    pub lag: usize,
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Multivariate Jarque-Bera on Cholesky-standardised residuals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointNormality {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    /// Skewness component, chi-squared with `n` d.o.f.
    pub skewness_statistic: f64,
    /// Kurtosis component, chi-squared with `n` d.o.f.
    pub kurtosis_statistic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarNormality {
    pub joint: JointNormality,
    pub per_equation: Vec<NormalityResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub lm_by_lag: Vec<LmResult>,
    pub normality: VarNormality,
    /// Descending; the fit is stable when the first is below one.
    pub companion_moduli: Vec<f64>,
}

/// LM test of no autocorrelation at lag `lag`: the residuals are regressed on
/// the original regressors plus the residuals shifted by `lag` (zero before the
/// sample) and `(T − d − ½)·ln(|Σ̂| / |Σ̃|)` is referred to chi-squared(n²),
/// with `d` the regressors per auxiliary equation.
pub fn lm_autocorr(fit: &VarFit, lag: usize) -> Result<LmResult> {
    let n = fit.n_vars();
    let t = fit.n_obs;
    if lag == 0 {
        return Err(Error::InvalidSpec("LM lag must be positive".into()));
    }
    let base = fit.regressor_matrix();
    let d = base.ncols() + 1 + n;
    if lag >= t || t <= d + 1 {
        return Err(Error::DegenerateInput(format!("LM lag {lag} leaves too few of {t} observations")));
    }
    let e = fit.residual_matrix();
    let mut aux = DMatrix::zeros(t, d);
    aux.columns_mut(0, base.ncols()).copy_from(&base);
    aux.column_mut(base.ncols()).fill(1.0);
    for i in lag..t {
        for j in 0..n {
            aux[(i, base.ncols() + 1 + j)] = e[(i - lag, j)];
        }
    }
    let u = residualize(&e, &aux)?;
    let sigma = e.transpose() * &e / t as f64;
    let sigma_aux = u.transpose() * &u / t as f64;
    let ratio = log_det_spd(&sigma)? - log_det_spd(&sigma_aux)?;
    let statistic = ((t as f64 - d as f64 - 0.5) * ratio).max(0.0);
    let df = n * n;
    Ok(LmResult { lag, statistic, df, p_value: chi_squared_sf(statistic, df as f64) })
}

pub fn var_normality(fit: &VarFit) -> Result<VarNormality> {
    let per_equation = fit.residuals.iter().map(|e| jarque_bera(e)).collect::<Result<Vec<_>>>()?;
    let n = fit.n_vars();
    let t = fit.n_obs as f64;
    let mut e = fit.residual_matrix();
    for mut col in e.column_iter_mut() {
        let mean = col.mean();
        col.add_scalar_mut(-mean);
    }
    let sigma = e.transpose() * &e / t;
    let chol = spd_cholesky(&sigma, "residual covariance")?;
    // rows of V are P⁻¹ u_t
    let v = chol
        .l()
        .solve_lower_triangular(&e.transpose())
        .ok_or_else(|| Error::SingularSystem("residual covariance factor is singular".into()))?;
    let (mut skew, mut kurt) = (0.0, 0.0);
    for j in 0..n {
        let row = v.row(j);
        let b1 = row.iter().map(|x| x.powi(3)).sum::<f64>() / t;
        let b2 = row.iter().map(|x| x.powi(4)).sum::<f64>() / t;
        skew += b1 * b1;
        kurt += (b2 - 3.0).powi(2);
    }
    let skewness_statistic = t * skew / 6.0;
    let kurtosis_statistic = t * kurt / 24.0;
    let statistic = skewness_statistic + kurtosis_statistic;
    Ok(VarNormality {
        joint: JointNormality {
            statistic,
            df: 2 * n,
            p_value: chi_squared_sf(statistic, (2 * n) as f64),
            skewness_statistic,
            kurtosis_statistic,
        },
        per_equation,
    })
}

/// LM tests at lags `1..=max_lm_lag`, normality and companion moduli.
pub fn diagnostics(fit: &VarFit, max_lm_lag: usize) -> Result<DiagnosticsReport> {
    let lm_by_lag = (1..=max_lm_lag).map(|s| lm_autocorr(fit, s)).collect::<Result<Vec<_>>>()?;
    Ok(DiagnosticsReport { lm_by_lag, normality: var_normality(fit)?, companion_moduli: stability(fit) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::AnnualSeries;
    use crate::synthetic::{gaussian, replication_rng, simulate_var};
    use crate::var::fit_var;
    use nalgebra::DVector;
    use rayon::prelude::*;

    fn to_series(data: Vec<Vec<f64>>) -> Vec<AnnualSeries> {
        data.into_iter().map(|v| AnnualSeries::new(1800, v, "x").unwrap()).collect()
    }

    fn coef() -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[0.5, 0.1, 0.2, 0.3])
    }

    #[test]
    fn lm_size_on_correct_var1() {
        let rejections = (0..500u64)
            .into_par_iter()
            .filter(|&s| {
                let data = to_series(simulate_var(&mut replication_rng(11, s), &[coef()], &DVector::zeros(2), 500, 50));
                let fit = fit_var(&data, 1, None).unwrap();
                lm_autocorr(&fit, 1).unwrap().p_value < 0.05
            })
            .count();
        let rate = rejections as f64 / 500.0;
        assert!((0.02..=0.08).contains(&rate), "size {rate}");
    }

    #[test]
    fn lm_power_on_serially_correlated_errors() {
        let a = coef();
        let hits = (0..200u64)
            .into_par_iter()
            .filter(|&s| {
                let mut rng = replication_rng(12, s);
                let t = 200;
                let mut y = vec![DVector::zeros(2)];
                let mut u = DVector::zeros(2);
                for _ in 0..t + 50 {
                    u = &u * 0.6 + DVector::from_fn(2, |_, _| gaussian(&mut rng));
                    let next = &a * y.last().unwrap() + &u;
                    y.push(next);
                }
                let data = to_series((0..2).map(|j| y[51..].iter().map(|v| v[j]).collect()).collect());
                let fit = fit_var(&data, 1, None).unwrap();
                lm_autocorr(&fit, 1).unwrap().p_value < 0.05
            })
            .count();
        assert!(hits >= 180, "{hits}/200");
    }

    #[test]
    fn report_shapes_and_ranges() {
        let data = to_series(simulate_var(&mut replication_rng(13, 0), &[coef()], &DVector::zeros(2), 100, 50));
        let fit = fit_var(&data, 2, None).unwrap();
        let rep = diagnostics(&fit, 2).unwrap();
        assert_eq!(rep.lm_by_lag.len(), 2);
        assert!(rep.lm_by_lag.iter().all(|r| (0.0..=1.0).contains(&r.p_value) && r.df == 4));
        assert_eq!(rep.normality.per_equation.len(), 2);
        assert_eq!(rep.normality.joint.df, 4);
        assert!(rep.normality.joint.statistic >= 0.0);
        assert_eq!(rep.companion_moduli.len(), 4);
        assert!(rep.companion_moduli.windows(2).all(|w| w[0] >= w[1]));
        assert!(rep.companion_moduli[0] < 1.0);
        assert!(matches!(lm_autocorr(&fit, 0), Err(Error::InvalidSpec(_))));
        assert!(matches!(lm_autocorr(&fit, 500), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn joint_normality_reduces_to_univariate() {
        let data = to_series(simulate_var(
            &mut replication_rng(14, 0),
            &[DMatrix::from_element(1, 1, 0.4)],
            &DVector::zeros(1),
            300,
            20,
        ));
        let fit = fit_var(&data, 1, None).unwrap();
        let norm = var_normality(&fit).unwrap();
        assert!((norm.joint.statistic - norm.per_equation[0].statistic).abs() < 1e-9);
    }
}
