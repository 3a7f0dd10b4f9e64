//! Embedded finite-sample critical values for Dickey-Fuller type t-ratios.
//!
//! ADF: Fuller's tabulation by sample size (cases without deterministics,
//! with a constant, and with a constant and linear trend). DF-GLS with a
//! constant shares the no-deterministics Dickey-Fuller distribution; DF-GLS
//! with a trend uses the Elliott-Rothenberg-Stock tabulation.
//!
//! Between tabulated sizes values are interpolated linearly in `T`; beyond the
//! largest finite size they approach the asymptotic row linearly in `1/T`, and
//! below the smallest size they are extrapolated linearly in `1/T`.

use super::UnitRootTest;
use crate::{Error, Level, Result, TrendSpec};

/// `(T, [1%, 5%, 10%])`; `T = ∞` is encoded as `f64::INFINITY`.
type Row = (f64, [f64; 3]);

const ADF_NONE: &[Row] = &[
    (25.0, [-2.66, -1.95, -1.60]),
    (50.0, [-2.62, -1.95, -1.61]),
    (100.0, [-2.60, -1.95, -1.61]),
    (250.0, [-2.58, -1.95, -1.62]),
    (500.0, [-2.58, -1.95, -1.62]),
    (f64::INFINITY, [-2.58, -1.95, -1.62]),
];

const ADF_CONSTANT: &[Row] = &[
    (25.0, [-3.75, -3.00, -2.63]),
    (50.0, [-3.58, -2.93, -2.60]),
    (100.0, [-3.51, -2.89, -2.58]),
    (250.0, [-3.46, -2.88, -2.57]),
    (500.0, [-3.44, -2.87, -2.57]),
    (f64::INFINITY, [-3.43, -2.86, -2.57]),
];

const ADF_TREND: &[Row] = &[
    (25.0, [-4.38, -3.60, -3.24]),
    (50.0, [-4.15, -3.50, -3.18]),
    (100.0, [-4.04, -3.45, -3.15]),
    (250.0, [-3.99, -3.43, -3.13]),
    (500.0, [-3.98, -3.42, -3.13]),
    (f64::INFINITY, [-3.96, -3.41, -3.12]),
];

const DFGLS_TREND: &[Row] = &[
    (50.0, [-3.77, -3.19, -2.89]),
    (100.0, [-3.58, -3.03, -2.74]),
    (200.0, [-3.46, -2.93, -2.64]),
    (f64::INFINITY, [-3.48, -2.89, -2.57]),
];

/// 5% trace-test critical values for the Johansen procedure, indexed by the
/// number of common stochastic trends under the null (`n − r`, 1-based).
/// Columns: 90%, 95%, 99% quantiles.
pub(crate) const TRACE_NONE: &[[f64; 3]] =
    &[[2.86, 3.84, 6.51], [10.47, 12.53, 16.31], [21.63, 24.31, 29.75], [36.58, 39.89, 45.58], [54.44, 59.46, 66.52]];

/// Unrestricted constant (linear trend in the levels).
pub(crate) const TRACE_CONSTANT: &[[f64; 3]] =
    &[[2.69, 3.76, 6.65], [13.33, 15.41, 20.04], [26.79, 29.68, 35.65], [43.95, 47.21, 54.46], [64.84, 68.52, 76.07]];

fn table(test: UnitRootTest, trend: TrendSpec) -> Result<&'static [Row]> {
    match (test, trend) {
        (UnitRootTest::Adf, TrendSpec::None) => Ok(ADF_NONE),
        (UnitRootTest::Adf, TrendSpec::Constant) => Ok(ADF_CONSTANT),
        (UnitRootTest::Adf, TrendSpec::Trend) => Ok(ADF_TREND),
        (UnitRootTest::DfGls, TrendSpec::Constant) => Ok(ADF_NONE),
        (UnitRootTest::DfGls, TrendSpec::Trend) => Ok(DFGLS_TREND),
        (UnitRootTest::DfGls, TrendSpec::None) => {
            Err(Error::InvalidSpec("DF-GLS requires a constant or trend specification".into()))
        }
    }
}

fn column(level: Level) -> usize {
    match level {
        Level::OnePercent => 0,
        Level::FivePercent => 1,
        Level::TenPercent => 2,
    }
}

/// Interpolated critical value for an effective sample of `n_obs` observations.
pub fn critical_value(test: UnitRootTest, trend: TrendSpec, n_obs: usize, level: Level) -> Result<f64> {
    if n_obs < 15 {
        return Err(Error::DegenerateInput(format!(
            "critical values are tabulated for samples of at least 15 observations, got {n_obs}"
        )));
    }
    Ok(lookup(table(test, trend)?, n_obs as f64, column(level)))
}

/// Same interpolation without the sample-size floor; used by the tests
/// themselves so that very short samples still get a (rough) reference value.
pub(crate) fn critical_value_unchecked(
    test: UnitRootTest,
    trend: TrendSpec,
    n_obs: usize,
    level: Level,
) -> Result<f64> {
    Ok(lookup(table(test, trend)?, n_obs.max(1) as f64, column(level)))
}

fn lookup(rows: &[Row], t: f64, col: usize) -> f64 {
    let (t0, v0) = rows[0];
    if t <= t0 {
        let (t1, v1) = rows[1];
        let slope = (v0[col] - v1[col]) / (1.0 / t0 - 1.0 / t1);
        return v0[col] + slope * (1.0 / t - 1.0 / t0);
    }
    for w in rows.windows(2) {
        let (ta, va) = w[0];
        let (tb, vb) = w[1];
        if t <= tb {
            if tb.is_infinite() {
                let frac = (1.0 / ta - 1.0 / t) / (1.0 / ta);
                return va[col] + frac * (vb[col] - va[col]);
            }
            let frac = (t - ta) / (tb - ta);
            return va[col] + frac * (vb[col] - va[col]);
        }
    }
    rows[rows.len() - 1].1[col]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tabulated_points_are_exact() {
        let cv = critical_value(UnitRootTest::Adf, TrendSpec::Constant, 50, Level::OnePercent).unwrap();
        assert_eq!(cv, -3.58);
        let cv = critical_value(UnitRootTest::DfGls, TrendSpec::Trend, 100, Level::FivePercent).unwrap();
        assert_eq!(cv, -3.03);
    }

    #[test]
    fn interpolated_values_near_forty_observations() {
        let t41 = |test, trend| critical_value(test, trend, 41, Level::OnePercent).unwrap();
        assert!((t41(UnitRootTest::Adf, TrendSpec::Constant) + 3.65).abs() < 0.10);
        assert!((t41(UnitRootTest::Adf, TrendSpec::None) + 2.64).abs() < 0.05);
        assert!((t41(UnitRootTest::DfGls, TrendSpec::Constant) + 2.63).abs() < 0.10);
        // lags 0, 1 and 3 on a 43-value series
        let adf = |n| critical_value(UnitRootTest::Adf, TrendSpec::Constant, n, Level::OnePercent).unwrap();
        assert_eq!(format!("{:.2}", adf(40)), "-3.65");
        assert_eq!(format!("{:.2}", adf(38)), "-3.66");
        assert_eq!(format!("{:.2}", adf(37)), "-3.67");
    }

    #[test]
    fn levels_are_ordered_and_monotone_in_t() {
        for (test, trend) in [
            (UnitRootTest::Adf, TrendSpec::None),
            (UnitRootTest::Adf, TrendSpec::Constant),
            (UnitRootTest::Adf, TrendSpec::Trend),
            (UnitRootTest::DfGls, TrendSpec::Constant),
            (UnitRootTest::DfGls, TrendSpec::Trend),
        ] {
            for n in [15, 20, 33, 41, 77, 150, 400, 1000, 100_000] {
                let v: Vec<f64> = Level::ALL.iter().map(|l| critical_value(test, trend, n, *l).unwrap()).collect();
                assert!(v[0] < v[1] && v[1] < v[2], "{test:?} {trend:?} {n}: {v:?}");
            }
        }
    }

    #[test]
    fn unsupported_combinations() {
        assert!(matches!(
            critical_value(UnitRootTest::DfGls, TrendSpec::None, 50, Level::OnePercent),
            Err(Error::InvalidSpec(_))
        ));
        assert!(matches!(
            critical_value(UnitRootTest::Adf, TrendSpec::None, 14, Level::OnePercent),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn trace_value_for_last_hypothesis_under_constant() {
        assert_eq!(TRACE_CONSTANT[0][1], 3.76);
    }
}
