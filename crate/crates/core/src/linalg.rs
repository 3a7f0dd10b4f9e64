//! Small dense-matrix helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Stack equal-length columns into an `n × k` matrix.
pub(crate) fn from_columns(columns: &[&[f64]]) -> DMatrix<f64> {
    let n = columns.first().map_or(0, |c| c.len());
    DMatrix::from_fn(n, columns.len(), |i, j| columns[j][i])
}

/// `AᵀB / n`.
pub(crate) fn moment(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    a.transpose() * b / a.nrows() as f64
}

/// Natural log of the determinant of a symmetric positive-definite matrix.
pub(crate) fn log_det_spd(m: &DMatrix<f64>) -> Result<f64> {
    let chol = spd_cholesky(m, "covariance matrix")?;
    Ok(2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>())
}

/// Residuals of regressing every column of `y` on `x` by least squares.
/// An empty `x` leaves `y` unchanged.
pub(crate) fn residualize(y: &DMatrix<f64>, x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if x.ncols() == 0 {
        return Ok(y.clone());
    }
    let coef = lstsq(x, y)?;
    Ok(y - x * coef)
}

/// Least-squares solution of `X B = Y` through a column-scaled QR
/// factorisation; rank deficiency is reported instead of silently regularised.
pub(crate) fn lstsq(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (r, qty, scale) = scaled_qr(x, y)?;
    let mut coef =
        r.solve_upper_triangular(&qty).ok_or_else(|| Error::SingularDesign("triangular solve failed".into()))?;
    for (j, s) in scale.iter().enumerate() {
        coef.row_mut(j).unscale_mut(*s);
    }
    Ok(coef)
}

/// QR pieces for a design with unit-norm columns: returns `(R, Qᵀy, column norms)`.
pub(crate) fn scaled_qr(x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>, DVector<f64>)> {
    let (n, k) = x.shape();
    if n < k {
        return Err(Error::DegenerateInput(format!("{n} observations for {k} regressors")));
    }
    let mut xs = x.clone();
    let mut scale = DVector::zeros(k);
    for j in 0..k {
        let norm = xs.column(j).norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::SingularDesign(format!("regressor {j} is identically zero")));
        }
        scale[j] = norm;
        xs.column_mut(j).unscale_mut(norm);
    }
    let qr = xs.qr();
    let r = qr.r();
    for j in 0..k {
        if r[(j, j)].abs() < RANK_TOL {
            return Err(Error::SingularDesign(format!(
                "regressor {j} is (numerically) a linear combination of the others"
            )));
        }
    }
    let qty = qr.q().transpose() * y;
    Ok((r, qty, scale))
}

/// Diagonal of `R` below which a unit-norm design column counts as collinear.
const RANK_TOL: f64 = 1e-10;

/// Cholesky factor of a symmetric positive-definite matrix, refusing
/// matrices whose smallest pivot is negligible against the largest.
pub(crate) fn spd_cholesky(m: &DMatrix<f64>, what: &str) -> Result<nalgebra::Cholesky<f64, nalgebra::Dyn>> {
    let chol = m.clone().cholesky().ok_or_else(|| Error::SingularSystem(format!("{what} is not positive definite")))?;
    let diag = chol.l().diagonal();
    let max = diag.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let min = diag.iter().fold(f64::INFINITY, |a, b| a.min(b.abs()));
    if !(min > 1e-7 * max) {
        return Err(Error::SingularSystem(format!("{what} is numerically singular")));
    }
    Ok(chol)
}
