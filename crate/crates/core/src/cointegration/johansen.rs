use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::linalg::{log_det_spd, moment, residualize, spd_cholesky};
use crate::series::{require_aligned, AnnualSeries};
use crate::unit_root::{TRACE_CONSTANT, TRACE_NONE};
use crate::{Error, Result, TrendSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JohansenResult {
    /// Descending, each in `[0, 1)`.
    pub eigenvalues: Vec<f64>,
    /// `trace_statistics[r]` tests `rank ≤ r` against rank `n`, for `r = 0..n`.
    pub trace_statistics: Vec<f64>,
    pub critical_values_5pct: Vec<f64>,
    pub selected_rank: usize,
    /// VAR lag order; the error-correction form uses `lag_order − 1` lagged differences.
    pub lag_order: usize,
    pub trend: TrendSpec,
    pub n_obs: usize,
    pub sample: (i32, i32),
    /// Maximised log-likelihood for each rank `0..=n`.
    pub log_likelihood: Vec<f64>,
    pub sbic: Vec<f64>,
    pub hqic: Vec<f64>,
}

/// Moment matrices and eigen-decomposition of the reduced-rank regression.
pub(crate) struct ReducedRank {
    pub n_obs: usize,
    pub first_year: i32,
    pub last_year: i32,
    /// `Δy_t`, `T × n`.
    pub dy: DMatrix<f64>,
    /// `y_{t−1}`, `T × n`.
    pub levels_lag: DMatrix<f64>,
    /// Lagged differences followed by the constant column (if any), `T × m`.
    pub short_run: DMatrix<f64>,
    pub s00: DMatrix<f64>,
    pub s11: DMatrix<f64>,
    pub eigenvalues: Vec<f64>,
    /// Columns are eigenvectors normalised by `vᵀ S11 v = 1`, matching `eigenvalues`.
    pub eigenvectors: DMatrix<f64>,
}

pub(crate) fn check_trend(trend: TrendSpec) -> Result<()> {
    if trend == TrendSpec::Trend {
        return Err(Error::InvalidSpec(
            "cointegration systems support `none` or `constant` deterministic terms".into(),
        ));
    }
    Ok(())
}

impl ReducedRank {
    pub fn estimate(data: &[AnnualSeries], lag_order: usize, trend: TrendSpec) -> Result<Self> {
        check_trend(trend)?;
        require_aligned(data)?;
        let n = data.len();
        if n < 2 {
            return Err(Error::DegenerateInput("a cointegrated system needs at least two series".into()));
        }
        if lag_order == 0 {
            return Err(Error::InvalidSpec("VAR lag order must be at least 1".into()));
        }
        let len = data[0].len();
        if len < n * (lag_order + 2) + 10 {
            return Err(Error::DegenerateInput(format!(
                "{len} observations are too few for {n} series at lag {lag_order}"
            )));
        }
        let y = |t: usize, j: usize| data[j].values()[t];
        let d = |t: usize, j: usize| y(t, j) - y(t - 1, j);
        // rows t = lag_order ..= len − 1
        let first = lag_order;
        let rows = len - first;
        let dy = DMatrix::from_fn(rows, n, |i, j| d(first + i, j));
        let levels_lag = DMatrix::from_fn(rows, n, |i, j| y(first + i - 1, j));
        let n_short = n * (lag_order - 1);
        let constant = usize::from(trend == TrendSpec::Constant);
        let short_run = DMatrix::from_fn(rows, n_short + constant, |i, c| {
            if c < n_short {
                let lag = c / n + 1;
                d(first + i - lag, c % n)
            } else {
                1.0
            }
        });

        let singular = |e: Error| match e {
            Error::SingularDesign(m) => Error::SingularSystem(format!("short-run regressors: {m}")),
            other => other,
        };
        let r0 = residualize(&dy, &short_run).map_err(singular)?;
        let r1 = residualize(&levels_lag, &short_run).map_err(singular)?;
        let s00 = moment(&r0, &r0);
        let s01 = moment(&r0, &r1);
        let s11 = moment(&r1, &r1);

        let s00_chol = spd_cholesky(&s00, "S00")?;
        let s11_chol = spd_cholesky(&s11, "S11")?;
        let l = s11_chol.l();
        let l_inv = l
            .clone()
            .solve_lower_triangular(&DMatrix::identity(n, n))
            .ok_or_else(|| Error::SingularSystem("S11 factor is singular".into()))?;
        // L⁻¹ S10 S00⁻¹ S01 L⁻ᵀ
        let s10 = s01.transpose();
        let inner = &s10 * s00_chol.solve(&s01);
        let mut c = &l_inv * inner * l_inv.transpose();
        c = (&c + c.transpose()) * 0.5;
        let eig = SymmetricEigen::new(c);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|a, b| eig.eigenvalues[*b].total_cmp(&eig.eigenvalues[*a]));
        let mut eigenvalues = Vec::with_capacity(n);
        let mut eigenvectors = DMatrix::zeros(n, n);
        for (col, &k) in order.iter().enumerate() {
            let lambda = eig.eigenvalues[k];
            if lambda >= 1.0 - 1e-12 {
                return Err(Error::SingularSystem(format!("eigenvalue {lambda} is not below one")));
            }
            eigenvalues.push(lambda.max(0.0));
            let v = l_inv.transpose() * eig.eigenvectors.column(k);
            eigenvectors.set_column(col, &v);
        }

        let first_year = data[0].start_year() + first as i32;
        Ok(Self {
            n_obs: rows,
            first_year,
            last_year: data[0].end_year(),
            dy,
            levels_lag,
            short_run,
            s00,
            s11,
            eigenvalues,
            eigenvectors,
        })
    }

    pub fn n_vars(&self) -> usize {
        self.dy.ncols()
    }

    pub fn log_likelihood(&self, rank: usize) -> Result<f64> {
        let n = self.n_vars() as f64;
        let t = self.n_obs as f64;
        let ld = log_det_spd(&self.s00)?;
        let s: f64 = self.eigenvalues[..rank].iter().map(|l| (1.0 - l).ln()).sum();
        Ok(-0.5 * t * (n * (1.0 + (2.0 * std::f64::consts::PI).ln()) + ld + s))
    }

    /// Free parameters of the rank-`r` error-correction model.
    pub fn n_params(&self, rank: usize) -> usize {
        let n = self.n_vars();
        self.short_run.ncols() * n + rank * (2 * n - rank)
    }
}

fn trace_critical_value(trend: TrendSpec, common_trends: usize) -> Result<f64> {
    let table = match trend {
        TrendSpec::None => TRACE_NONE,
        TrendSpec::Constant => TRACE_CONSTANT,
        TrendSpec::Trend => unreachable!("rejected by check_trend"),
    };
    table
        .get(common_trends - 1)
        .map(|row| row[1])
        .ok_or_else(|| Error::InvalidSpec(format!("trace critical values cover at most {} series", table.len())))
}

/// Johansen trace test with sequential rank selection from `r = 0` upward.
pub fn johansen_trace(data: &[AnnualSeries], lag_order: usize, trend: TrendSpec) -> Result<JohansenResult> {
    let rrr = ReducedRank::estimate(data, lag_order, trend)?;
    let n = rrr.n_vars();
    let t = rrr.n_obs as f64;

    // suffix sums so that trace(r) − trace(r+1) is exactly one term
    let mut trace_statistics = vec![0.0; n];
    let mut acc = 0.0;
    for r in (0..n).rev() {
        acc += -t * (1.0 - rrr.eigenvalues[r]).ln();
        trace_statistics[r] = acc;
    }
    let critical_values_5pct = (0..n).map(|r| trace_critical_value(trend, n - r)).collect::<Result<Vec<f64>>>()?;
    let selected_rank = (0..n).find(|&r| trace_statistics[r] < critical_values_5pct[r]).unwrap_or(n);

    let mut log_likelihood = Vec::with_capacity(n + 1);
    let mut sbic = Vec::with_capacity(n + 1);
    let mut hqic = Vec::with_capacity(n + 1);
    for r in 0..=n {
        let ll = rrr.log_likelihood(r)?;
        let k = rrr.n_params(r) as f64;
        log_likelihood.push(ll);
        sbic.push(-2.0 * ll / t + k * t.ln() / t);
        hqic.push(-2.0 * ll / t + 2.0 * k * t.ln().ln() / t);
    }

    Ok(JohansenResult {
        eigenvalues: rrr.eigenvalues.clone(),
        trace_statistics,
        critical_values_5pct,
        selected_rank,
        lag_order,
        trend,
        n_obs: rrr.n_obs,
        sample: (rrr.first_year, rrr.last_year),
        log_likelihood,
        sbic,
        hqic,
    })
}
