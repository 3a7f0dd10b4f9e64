use rayon::prelude::*;

use super::{df_regression, dfgls_statistic, CriticalValues, UnitRootTest};
use crate::synthetic::{random_walk, replication_rng};
use crate::{Error, Level, Result, TrendSpec};

/// Sorted null distribution of the test statistic over `replications`
/// driftless Gaussian random walks. Each walk has `n_obs + 1` values so the
/// Dickey-Fuller regression (without augmentation) uses `n_obs` observations.
pub fn simulate_null_distribution(
    test: UnitRootTest,
    trend: TrendSpec,
    n_obs: usize,
    replications: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if replications < 1000 {
        return Err(Error::InvalidSpec(format!("at least 1000 replications required, got {replications}")));
    }
    if n_obs < 10 {
        return Err(Error::DegenerateInput(format!("simulated samples need at least 10 observations, got {n_obs}")));
    }
    if test == UnitRootTest::DfGls && trend == TrendSpec::None {
        return Err(Error::InvalidSpec("DF-GLS requires a constant or trend specification".into()));
    }
    let mut stats = (0..replications as u64)
        .into_par_iter()
        .map(|i| {
            let y = random_walk(&mut replication_rng(seed, i), n_obs + 1);
            let (stat, _) = match test {
                UnitRootTest::Adf => df_regression(&y, 0, trend)?,
                UnitRootTest::DfGls => dfgls_statistic(&y, 0, trend)?,
            };
            Ok(stat)
        })
        .collect::<Result<Vec<f64>>>()?;
    stats.sort_by(f64::total_cmp);
    Ok(stats)
}

/// Linear-interpolation sample quantile of sorted data (Hyndman-Fan type 7).
pub(crate) fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Empirical left-tail quantile of the null distribution; deterministic in `seed`.
pub fn simulate_critical_value(
    test: UnitRootTest,
    trend: TrendSpec,
    n_obs: usize,
    level: Level,
    replications: usize,
    seed: u64,
) -> Result<f64> {
    let dist = simulate_null_distribution(test, trend, n_obs, replications, seed)?;
    Ok(quantile_sorted(&dist, level.probability()))
}

/// All three levels from a single simulation run.
pub fn simulate_critical_values(
    test: UnitRootTest,
    trend: TrendSpec,
    n_obs: usize,
    replications: usize,
    seed: u64,
) -> Result<CriticalValues> {
    let dist = simulate_null_distribution(test, trend, n_obs, replications, seed)?;
    Ok(CriticalValues {
        one: quantile_sorted(&dist, 0.01),
        five: quantile_sorted(&dist, 0.05),
        ten: quantile_sorted(&dist, 0.10),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::unit_root::critical_value;

    #[test]
    fn quantile_interpolates() {
        let v = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&v, 0.0), 0.0);
        assert_eq!(quantile_sorted(&v, 0.5), 2.0);
        assert_eq!(quantile_sorted(&v, 0.1), 0.4);
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let a = simulate_critical_value(UnitRootTest::Adf, TrendSpec::None, 41, Level::OnePercent, 2000, 9).unwrap();
        let b = simulate_critical_value(UnitRootTest::Adf, TrendSpec::None, 41, Level::OnePercent, 2000, 9).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn rejects_too_few_replications() {
        assert!(matches!(
            simulate_critical_value(UnitRootTest::Adf, TrendSpec::None, 41, Level::OnePercent, 999, 1),
            Err(Error::InvalidSpec(_))
        ));
    }

    #[test]
    fn dfgls_trend_table_agrees_with_simulation() {
        let table = critical_value(UnitRootTest::DfGls, TrendSpec::Trend, 100, Level::FivePercent).unwrap();
        let sim =
            simulate_critical_value(UnitRootTest::DfGls, TrendSpec::Trend, 100, Level::FivePercent, 20_000, 3).unwrap();
        assert!((sim - table).abs() < 0.10, "simulated {sim} vs table {table}");
    }

    #[test]
    fn adf_trend_table_agrees_with_simulation() {
        let table = critical_value(UnitRootTest::Adf, TrendSpec::Trend, 50, Level::FivePercent).unwrap();
        let sim =
            simulate_critical_value(UnitRootTest::Adf, TrendSpec::Trend, 50, Level::FivePercent, 20_000, 4).unwrap();
        assert!((sim - table).abs() < 0.10, "simulated {sim} vs table {table}");
    }
}
