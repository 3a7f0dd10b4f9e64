//! Ordinary least squares with classical inference, and the Jarque-Bera
//! normality test used on regression and VAR residuals.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dist::{chi_squared_sf, student_t_two_sided};
use crate::linalg::scaled_qr;
use crate::{Error, Result};

/// Result of a least-squares fit. When an intercept was requested it is the
/// last coefficient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OlsFit {
    pub coefficients: Vec<f64>,
    pub standard_errors: Vec<f64>,
    /// `coefficient / standard_error`; NaN where the standard error is zero.
    pub t_statistics: Vec<f64>,
    /// Two-sided p-values from Student's t with `n_obs - n_params` d.o.f.
    pub p_values: Vec<f64>,
    pub r_squared: f64,
    /// `sqrt(RSS / (n - k))`.
    pub rmse: f64,
    pub residuals: Vec<f64>,
    pub n_obs: usize,
    pub n_params: usize,
    pub intercept: bool,
}

impl OlsFit {
    pub fn df_resid(&self) -> usize {
        self.n_obs - self.n_params
    }

    pub fn rss(&self) -> f64 {
        self.residuals.iter().map(|e| e * e).sum()
    }

    pub fn intercept_value(&self) -> Option<f64> {
        self.intercept.then(|| *self.coefficients.last().unwrap())
    }

    /// Fitted values `y - e`.
    pub fn fitted(&self, y: &[f64]) -> Vec<f64> {
        y.iter().zip(&self.residuals).map(|(y, e)| y - e).collect()
    }
}

/// Regress `y` on the columns of `x` (plus a trailing constant column when
/// `intercept` is set).
pub fn fit_ols(y: &[f64], x: &DMatrix<f64>, intercept: bool) -> Result<OlsFit> {
    let n = y.len();
    if x.nrows() != n {
        return Err(Error::Alignment(format!("{} design rows for {n} observations", x.nrows())));
    }
    let design = if intercept { x.clone().insert_column(x.ncols(), 1.0) } else { x.clone() };
    let k = design.ncols();
    if k == 0 {
        return Err(Error::InvalidSpec("regression has no regressors".into()));
    }
    if n <= k {
        return Err(Error::DegenerateInput(format!("{n} observations for {k} parameters")));
    }

    let yv = DMatrix::from_column_slice(n, 1, y);
    let (r, qty, scale) = scaled_qr(&design, &yv)?;
    let b_scaled =
        r.solve_upper_triangular(&qty).ok_or_else(|| Error::SingularDesign("triangular solve failed".into()))?;
    let coefficients: Vec<f64> = (0..k).map(|j| b_scaled[(j, 0)] / scale[j]).collect();

    let beta = DVector::from_column_slice(&coefficients);
    let fitted = &design * &beta;
    let residuals: Vec<f64> = y.iter().zip(fitted.iter()).map(|(y, f)| y - f).collect();
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let df = (n - k) as f64;
    let sigma2 = rss / df;

    // (XᵀX)⁻¹ = D⁻¹ R⁻¹ R⁻ᵀ D⁻¹ for the column-scaled factorisation.
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| Error::SingularDesign("cannot invert R".into()))?;
    let standard_errors: Vec<f64> = (0..k).map(|j| (sigma2 * r_inv.row(j).norm_squared()).sqrt() / scale[j]).collect();
    let t_statistics: Vec<f64> =
        coefficients.iter().zip(&standard_errors).map(|(b, se)| if *se > 0.0 { b / se } else { f64::NAN }).collect();
    let p_values = t_statistics.iter().map(|t| student_t_two_sided(*t, df)).collect();

    let tss = if intercept {
        let m = y.iter().sum::<f64>() / n as f64;
        y.iter().map(|v| (v - m).powi(2)).sum::<f64>()
    } else {
        y.iter().map(|v| v * v).sum::<f64>()
    };
    let r_squared = if tss > 0.0 { (1.0 - rss / tss).clamp(0.0, 1.0) } else { 1.0 };

    Ok(OlsFit {
        coefficients,
        standard_errors,
        t_statistics,
        p_values,
        r_squared,
        rmse: sigma2.sqrt(),
        residuals,
        n_obs: n,
        n_params: k,
        intercept,
    })
}

/// Convenience wrapper taking regressors as column slices.
pub fn fit_ols_columns(y: &[f64], columns: &[&[f64]], intercept: bool) -> Result<OlsFit> {
    if let Some(c) = columns.iter().find(|c| c.len() != y.len()) {
        return Err(Error::Alignment(format!("regressor of length {} for {} observations", c.len(), y.len())));
    }
    fit_ols(y, &crate::linalg::from_columns(columns), intercept)
}

/// One estimated coefficient with its classical inference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub t_statistic: f64,
    pub p_value: f64,
}

impl OlsFit {
    pub fn estimate(&self, j: usize) -> Estimate {
        Estimate {
            value: self.coefficients[j],
            std_error: self.standard_errors[j],
            t_statistic: self.t_statistics[j],
            p_value: self.p_values[j],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalityResult {
    pub statistic: f64,
    pub p_value: f64,
    pub skewness: f64,
    /// Raw (non-excess) kurtosis; 3 for a normal distribution.
    pub kurtosis: f64,
}

/// Sample skewness and raw kurtosis from population moments.
pub fn skewness_kurtosis(x: &[f64]) -> Result<(f64, f64)> {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in x {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if m2 == 0.0 || m2 <= (f64::EPSILON * mean).powi(2) {
        return Err(Error::DegenerateInput("sample has zero variance".into()));
    }
    Ok((m3 / m2.powf(1.5), m4 / (m2 * m2)))
}

/// Jarque-Bera test: `n/6 · (S² + (K − 3)²/4)` against chi-squared(2).
pub fn jarque_bera(residuals: &[f64]) -> Result<NormalityResult> {
    if residuals.len() < 8 {
        return Err(Error::DegenerateInput(format!("Jarque-Bera needs at least 8 values, got {}", residuals.len())));
    }
    let (skewness, kurtosis) = skewness_kurtosis(residuals)?;
    let n = residuals.len() as f64;
    let statistic = n / 6.0 * (skewness * skewness + (kurtosis - 3.0).powi(2) / 4.0);
    Ok(NormalityResult { statistic, p_value: chi_squared_sf(statistic, 2.0), skewness, kurtosis })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::from_columns;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn exact_line() {
        let x: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let fit = fit_ols_columns(&y, &[&x], true).unwrap();
        assert!((fit.coefficients[0] - 2.0).abs() < 1e-12);
        assert!((fit.coefficients[1] - 1.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert!(fit.rmse < 1e-12);
    }

    #[test]
    fn duplicated_column_is_singular() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x: Vec<f64> = (0..30).map(|_| rng.sample(StandardNormal)).collect();
        let y: Vec<f64> = (0..30).map(|_| rng.sample(StandardNormal)).collect();
        let err = fit_ols_columns(&y, &[&x, &x], true).unwrap_err();
        assert!(matches!(err, Error::SingularDesign(_)));
        // a constant regressor next to the intercept is the same defect
        let c = vec![3.0; 30];
        assert!(matches!(fit_ols_columns(&y, &[&x, &c], true), Err(Error::SingularDesign(_))));
    }

    #[test]
    fn too_few_observations() {
        let y = [1.0, 2.0];
        let x = [1.0, 3.0];
        assert!(matches!(fit_ols_columns(&y, &[&x], true), Err(Error::DegenerateInput(_))));
    }

    /// Independent route: invert the Gram matrix directly.
    fn normal_equations(y: &[f64], x: &DMatrix<f64>) -> (Vec<f64>, Vec<f64>) {
        let xtx = x.transpose() * x;
        let inv = xtx.try_inverse().unwrap();
        let b = &inv * x.transpose() * DVector::from_column_slice(y);
        let e = DVector::from_column_slice(y) - x * &b;
        let s2 = e.norm_squared() / (x.nrows() - x.ncols()) as f64;
        let se = (0..x.ncols()).map(|j| (s2 * inv[(j, j)]).sqrt()).collect();
        (b.iter().copied().collect(), se)
    }

    #[test]
    fn matches_normal_equations_on_fixed_fixture() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let x1: Vec<f64> = (0..40).map(|_| rng.sample::<f64, _>(StandardNormal) * 3.0).collect();
        let x2: Vec<f64> = (0..40).map(|i| i as f64 + rng.random::<f64>()).collect();
        let y: Vec<f64> =
            (0..40).map(|i| 1.5 * x1[i] - 0.3 * x2[i] + 4.0 + rng.sample::<f64, _>(StandardNormal)).collect();
        let fit = fit_ols_columns(&y, &[&x1, &x2], true).unwrap();
        let design = from_columns(&[&x1, &x2, &[1.0; 40]]);
        let (b, se) = normal_equations(&y, &design);
        for j in 0..3 {
            assert!((fit.coefficients[j] - b[j]).abs() < 1e-10 * b[j].abs().max(1.0));
            assert!((fit.standard_errors[j] - se[j]).abs() < 1e-10 * se[j]);
            assert!((fit.t_statistics[j] - b[j] / se[j]).abs() < 1e-8);
        }
    }

    #[test]
    fn residuals_are_orthogonal_and_reconstruct() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let n = rng.random_range(10..80);
            let x1: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal) * 1e3).collect();
            let x2: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let y: Vec<f64> = (0..n).map(|i| x1[i] * 0.2 + rng.sample::<f64, _>(StandardNormal)).collect();
            let fit = fit_ols_columns(&y, &[&x1, &x2], true).unwrap();
            let e = DVector::from_column_slice(&fit.residuals);
            let ones = vec![1.0; n];
            for col in [&x1, &x2, &ones] {
                let c = DVector::from_column_slice(col);
                assert!(c.dot(&e).abs() / (c.norm() * e.norm()) < 1e-8);
            }
            for (f, (yv, e)) in fit.fitted(&y).iter().zip(y.iter().zip(&fit.residuals)) {
                assert!((f + e - yv).abs() <= 1e-10 * yv.abs().max(1.0));
            }
        }
    }

    #[test]
    fn r_squared_invariant_under_affine_rescaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x: Vec<f64> = (0..50).map(|_| rng.sample(StandardNormal)).collect();
        let y: Vec<f64> = x.iter().map(|v| v + rng.sample::<f64, _>(StandardNormal)).collect();
        let a = fit_ols_columns(&y, &[&x], true).unwrap();
        let y2: Vec<f64> = y.iter().map(|v| -3.0 * v + 100.0).collect();
        let b = fit_ols_columns(&y2, &[&x], true).unwrap();
        assert!((a.r_squared - b.r_squared).abs() < 1e-12);
        assert!((b.coefficients[0] + 3.0 * a.coefficients[0]).abs() < 1e-10);
        assert!((b.coefficients[1] - (-3.0 * a.coefficients[1] + 100.0)).abs() < 1e-9);
    }

    #[test]
    fn no_intercept_r_squared_uses_uncentred_sum() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [1.1, 1.9, 3.2, 3.9];
        let fit = fit_ols_columns(&y, &[&x], false).unwrap();
        let rss = fit.rss();
        let tss: f64 = y.iter().map(|v| v * v).sum();
        assert!((fit.r_squared - (1.0 - rss / tss)).abs() < 1e-14);
        assert_eq!(fit.intercept_value(), None);
    }

    #[test]
    fn jarque_bera_symmetric_mesokurtic_sample() {
        // ±1 with weight 1/6 each, 0 otherwise: S = 0 and K = 1/(2·1/6) = 3
        let mut sample = Vec::new();
        for _ in 0..2 {
            sample.extend([1.0, -1.0, 0.0, 0.0, 0.0, 0.0]);
        }
        let r = jarque_bera(&sample).unwrap();
        assert!(r.skewness.abs() < 1e-15);
        assert!((r.kurtosis - 3.0).abs() < 1e-12);
        assert!(r.statistic.abs() < 1e-12);
        assert!((r.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn jarque_bera_errors() {
        assert!(matches!(jarque_bera(&[1.0; 5]), Err(Error::DegenerateInput(_))));
        assert!(matches!(jarque_bera(&[2.0; 20]), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn jarque_bera_size_on_normal_samples() {
        let mut below = 0;
        for seed in 0..500u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x: Vec<f64> = (0..1000).map(|_| rng.sample(StandardNormal)).collect();
            if jarque_bera(&x).unwrap().statistic < 5.991464547107979 {
                below += 1;
            }
        }
        assert!(below >= 450, "only {below}/500 below the 5% critical value");
    }
}
