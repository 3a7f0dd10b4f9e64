//! Two-component growth model.
//!
//! Real GDP per capita `G` grows by a constant annual increment `A`, so its
//! trend growth rate decays as `A / G`. Deviations of observed per-capita
//! growth `g_pc` from that trend are attributed to half the relative change of
//! the defining-age population `N9`:
//!
//! ```text
//! g_pc(t) = 0.5 · (N9(t+1) − N9(t)) / N9(t) + A / G(t)
//! N9(t+1) = N9(t) · [1 + 2 · (g_pc(t) − A / G(t))]
//! ```
//!
//! Both directions use the same one-year forward step, so they are exact
//! algebraic inverses. `g_pc(t)` is the forward ratio `(G(t+1) − G(t)) / G(t)`
//! dated at its base year `t`; it drives the step from `t` to `t + 1`.

use serde::{Deserialize, Serialize};

use crate::series::AnnualSeries;
use crate::{Error, Result};

/// Fixed ratio between population change rate and the growth deviation.
pub const POPULATION_WEIGHT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Annual increment of real GDP per capita, dollars per person per year.
    pub a: f64,
    /// Defining-age population in `initial_year`, persons.
    pub n9_initial: f64,
    pub initial_year: i32,
}

impl ModelParams {
    pub fn new(a: f64, n9_initial: f64, initial_year: i32) -> Result<Self> {
        let p = Self { a, n9_initial, initial_year };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.a.is_finite()) {
            return Err(Error::Domain(format!("trend increment A must be positive, got {}", self.a)));
        }
        if !(self.n9_initial > 0.0 && self.n9_initial.is_finite()) {
            return Err(Error::Domain(format!("initial population must be positive, got {}", self.n9_initial)));
        }
        Ok(())
    }
}

/// Calibrated parameters and the statistics of `measured − predicted`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub params: ModelParams,
    pub mean_difference: f64,
    /// Sample standard deviation (n − 1).
    pub sd_difference: f64,
    pub rms_difference: f64,
    pub first_year: i32,
    pub last_year: i32,
    pub n_obs: usize,
    pub evaluations: usize,
}

fn require_positive(s: &AnnualSeries, what: &str) -> Result<()> {
    match s.years().zip(s.values()).find(|(_, v)| **v <= 0.0) {
        Some((year, v)) => Err(Error::Domain(format!("{what} must be positive, got {v} at {year}"))),
        None => Ok(()),
    }
}

/// Trend growth rate `A / G(t)`.
pub fn trend_growth(gdp: &AnnualSeries, a: f64) -> Result<AnnualSeries> {
    if !(a > 0.0) {
        return Err(Error::Domain(format!("trend increment A must be positive, got {a}")));
    }
    require_positive(gdp, "GDP per capita")?;
    gdp.map(|g| a / g, "1/year")
}

/// Per-capita growth implied by a population path: one value per step
/// `t → t + 1`, dated at `t`. `gdp` must cover every base year.
pub fn implied_gpc(n9: &AnnualSeries, gdp: &AnnualSeries, a: f64) -> Result<AnnualSeries> {
    if n9.len() < 2 {
        return Err(Error::DegenerateInput("population path needs at least two years".into()));
    }
    if !(a > 0.0) {
        return Err(Error::Domain(format!("trend increment A must be positive, got {a}")));
    }
    let g = gdp.covering(n9.start_year(), n9.len() - 1)?;
    require_positive(n9, "population")?;
    if let Some(v) = g.iter().find(|v| **v <= 0.0) {
        return Err(Error::Domain(format!("GDP per capita must be positive, got {v}")));
    }
    let values = n9.values().windows(2).zip(g).map(|(w, g)| POPULATION_WEIGHT * (w[1] - w[0]) / w[0] + a / g).collect();
    AnnualSeries::new(n9.start_year(), values, "1/year")
}

/// Unit-seeded cumulative product of bracket factors from `initial_year`.
fn relative_path(g_pc: &AnnualSeries, gdp: &AnnualSeries, a: f64, initial_year: i32) -> Result<Vec<f64>> {
    if initial_year < g_pc.start_year() || initial_year > g_pc.end_year() {
        return Err(Error::Alignment(format!(
            "growth series {}-{} does not contain the initial year {initial_year}",
            g_pc.start_year(),
            g_pc.end_year()
        )));
    }
    let steps = (g_pc.end_year() - initial_year + 1) as usize;
    let growth = g_pc.covering(initial_year, steps)?;
    let level = gdp.covering(initial_year, steps)?;
    let mut path = Vec::with_capacity(steps + 1);
    let mut current = 1.0;
    path.push(current);
    for (i, (g, big_g)) in growth.iter().zip(level).enumerate() {
        if *big_g <= 0.0 {
            return Err(Error::Domain(format!("GDP per capita must be positive, got {big_g}")));
        }
        let factor = 1.0 + 2.0 * (g - a / big_g);
        if factor <= 0.0 {
            return Err(Error::ModelBreakdown { year: initial_year + i as i32, factor });
        }
        current *= factor;
        path.push(current);
    }
    Ok(path)
}

/// Predicted defining-age population, seeded with `params.n9_initial` in
/// `params.initial_year` and stepped forward one year per growth reading.
pub fn predict_n9(g_pc: &AnnualSeries, gdp: &AnnualSeries, params: &ModelParams) -> Result<AnnualSeries> {
    params.validate()?;
    let path = relative_path(g_pc, gdp, params.a, params.initial_year)?;
    AnnualSeries::new(params.initial_year, path.into_iter().map(|p| p * params.n9_initial).collect(), "persons")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationOptions {
    /// Search interval for `A`, dollars per person per year.
    pub a_bounds: (f64, f64),
    /// Coarse grid resolution before local refinement.
    pub grid_points: usize,
    /// Relative tolerance on `A` for the refinement.
    pub tolerance: f64,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        Self { a_bounds: (1.0, 10_000.0), grid_points: 400, tolerance: 1e-12 }
    }
}

/// Calibrate `(A, N9₀)` with the default options.
pub fn calibrate(
    g_pc: &AnnualSeries,
    gdp: &AnnualSeries,
    n9_measured: &AnnualSeries,
    initial_year: i32,
) -> Result<FitReport> {
    calibrate_with(g_pc, gdp, n9_measured, initial_year, &CalibrationOptions::default())
}

struct Objective<'a> {
    g_pc: &'a AnnualSeries,
    gdp: &'a AnnualSeries,
    measured: &'a [f64],
    initial_year: i32,
    /// Offset of the first compared year inside the predicted path.
    offset: usize,
    measured_mean: f64,
    evaluations: usize,
}

impl Objective<'_> {
    /// For a given `A`: the zero-mean seed and the RMS of the difference.
    fn eval(&mut self, a: f64) -> Result<(f64, f64)> {
        self.evaluations += 1;
        let path = relative_path(self.g_pc, self.gdp, a, self.initial_year)?;
        let p = &path[self.offset..self.offset + self.measured.len()];
        let n = p.len() as f64;
        let p_mean = p.iter().sum::<f64>() / n;
        let seed = self.measured_mean / p_mean;
        let ms = self.measured.iter().zip(p).map(|(m, p)| (m - seed * p).powi(2)).sum::<f64>() / n;
        Ok((seed, ms.sqrt()))
    }
}

/// Minimise the RMS of `measured − predicted` over `A`, with `N9₀` solved in
/// closed form at every `A` so that the mean difference is zero.
pub fn calibrate_with(
    g_pc: &AnnualSeries,
    gdp: &AnnualSeries,
    n9_measured: &AnnualSeries,
    initial_year: i32,
    options: &CalibrationOptions,
) -> Result<FitReport> {
    let (lo, hi) = options.a_bounds;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidSpec(format!("invalid bounds for A: [{lo}, {hi}]")));
    }
    require_positive(n9_measured, "measured population")?;
    let predicted_end = g_pc.end_year() + 1;
    let first = n9_measured.start_year().max(initial_year);
    let last = n9_measured.end_year().min(predicted_end);
    if last - first + 1 < 5 {
        return Err(Error::DegenerateInput(format!(
            "measured and predicted populations overlap in {} years, need at least 5",
            (last - first + 1).max(0)
        )));
    }
    let measured = n9_measured.covering(first, (last - first + 1) as usize)?;
    let mut objective = Objective {
        g_pc,
        gdp,
        measured,
        initial_year,
        offset: (first - initial_year) as usize,
        measured_mean: measured.iter().sum::<f64>() / measured.len() as f64,
        evaluations: 0,
    };

    // Largest A keeping every bracket factor positive.
    let steps = (g_pc.end_year() - initial_year + 1).max(0) as usize;
    let growth = g_pc.covering(initial_year, steps)?;
    let level = gdp.covering(initial_year, steps)?;
    let a_max = growth.iter().zip(level).map(|(g, big_g)| big_g * (g + 0.5)).fold(f64::INFINITY, f64::min);
    let upper = hi.min(a_max * (1.0 - 1e-9));
    let mut trace = vec![format!("search interval [{lo}, {upper}] (model breaks down above {a_max})")];
    if upper <= lo {
        return Err(Error::Calibration { message: "no admissible A inside the search bounds".into(), trace });
    }

    let m = options.grid_points.max(3);
    let grid: Vec<f64> = (0..m).map(|i| lo + (upper - lo) * i as f64 / (m - 1) as f64).collect();
    let mut best: Option<(usize, f64)> = None;
    for (i, a) in grid.iter().enumerate() {
        match objective.eval(*a) {
            Ok((_, rms)) if rms.is_finite() => {
                if best.is_none_or(|(_, b)| rms < b) {
                    best = Some((i, rms));
                }
            }
            Ok(_) => trace.push(format!("A={a}: non-finite objective")),
            Err(e) => trace.push(format!("A={a}: {e}")),
        }
    }
    let Some((i_best, rms_best)) = best else {
        return Err(Error::Calibration { message: "objective undefined on the whole grid".into(), trace });
    };
    trace.push(format!("grid minimum RMS {rms_best} at A={}", grid[i_best]));

    let mut left = grid[i_best.saturating_sub(1)];
    let mut right = grid[(i_best + 1).min(m - 1)];
    let a = golden_section(&mut objective, &mut left, &mut right, options.tolerance, &mut trace)?;
    let (seed, rms) = objective.eval(a)?;

    let params = ModelParams::new(a, seed, initial_year)?;
    let predicted = predict_n9(g_pc, gdp, &params)?;
    let p = predicted.covering(first, measured.len())?;
    let diffs: Vec<f64> = measured.iter().zip(p).map(|(m, p)| m - p).collect();
    let n = diffs.len() as f64;
    let mean = diffs.iter().sum::<f64>() / n;
    let sd = (diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    if mean.abs() > 0.5 {
        trace.push(format!("A={a}, N9₀={seed}: mean difference {mean}"));
        return Err(Error::Calibration { message: "could not enforce a zero mean difference".into(), trace });
    }
    Ok(FitReport {
        params,
        mean_difference: mean,
        sd_difference: sd,
        rms_difference: rms,
        first_year: first,
        last_year: last,
        n_obs: diffs.len(),
        evaluations: objective.evaluations,
    })
}

fn golden_section(
    objective: &mut Objective<'_>,
    left: &mut f64,
    right: &mut f64,
    tolerance: f64,
    trace: &mut Vec<String>,
) -> Result<f64> {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut f = |a: f64, trace: &mut Vec<String>| match objective.eval(a) {
        Ok((_, rms)) => rms,
        Err(e) => {
            trace.push(format!("refinement at A={a}: {e}"));
            f64::INFINITY
        }
    };
    let (mut a, mut b) = (*left, *right);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c, trace);
    let mut fd = f(d, trace);
    for _ in 0..200 {
        if (b - a).abs() <= tolerance * (a.abs() + b.abs()) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c, trace);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d, trace);
        }
    }
    *left = a;
    *right = b;
    let x = 0.5 * (a + b);
    if !f(x, trace).is_finite() {
        return Err(Error::Calibration {
            message: format!("refinement ended at an inadmissible A={x}"),
            trace: trace.clone(),
        });
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::growth_rate;
    use crate::synthetic::{demographic_fixture, FixtureSpec};
    use proptest::prelude::*;

    fn s(start: i32, v: &[f64]) -> AnnualSeries {
        AnnualSeries::new(start, v.to_vec(), "x").unwrap()
    }

    #[test]
    fn trend_growth_examples() {
        let t = trend_growth(&s(2000, &[10_000.0, 20_000.0]), 500.0).unwrap();
        assert_eq!(t.values(), &[0.05, 0.025]);
        assert!(matches!(trend_growth(&s(2000, &[1.0, -1.0]), 500.0), Err(Error::Domain(_))));
    }

    #[test]
    fn trend_matches_growth_of_exact_line_up_to_discretisation() {
        // G = A t + B: the forward ratio (G(t+1) − G(t)) / G(t) = A / G(t) exactly.
        let a = 547.1325;
        let g: Vec<f64> = (0..40).map(|t| a * t as f64 + 12_000.0).collect();
        let series = s(1960, &g);
        let gr = growth_rate(&series).unwrap();
        let tr = trend_growth(&series, a).unwrap();
        for (x, y) in gr.values().iter().zip(tr.values()) {
            assert!((x - y).abs() < 1e-15);
        }
        let trend = tr.values();
        assert!(trend.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn implied_growth_examples() {
        let gdp = s(2000, &[25_000.0; 4]);
        let flat = implied_gpc(&s(2000, &[4e6; 4]), &gdp, 500.0).unwrap();
        assert!(flat.values().iter().all(|v| *v == 500.0 / 25_000.0));
        let doubling = implied_gpc(&s(2000, &[1e6, 2e6]), &gdp, 500.0).unwrap();
        assert!((doubling.values()[0] - 0.52).abs() < 1e-15);
        let short_gdp = s(2001, &[25_000.0; 4]);
        assert!(matches!(implied_gpc(&s(2000, &[1e6, 2e6]), &short_gdp, 500.0), Err(Error::Alignment(_))));
    }

    #[test]
    fn prediction_on_trend_is_flat() {
        let gdp = s(1959, &[10_000.0, 11_000.0, 12_500.0, 13_000.0]);
        let a = 547.1325;
        let g = trend_growth(&gdp, a).unwrap();
        let p = predict_n9(&g, &gdp, &ModelParams::new(a, 3.9e6, 1959).unwrap()).unwrap();
        assert_eq!(p.len(), g.len() + 1);
        assert!(p.values().iter().all(|v| (v - 3.9e6).abs() < 1e-6));
    }

    #[test]
    fn breakdown_is_reported() {
        let gdp = s(2000, &[1000.0, 1000.0]);
        let g = s(2000, &[0.0]);
        // factor = 1 + 2 (0 − 600/1000) < 0
        let err = predict_n9(&g, &gdp, &ModelParams::new(600.0, 1e6, 2000).unwrap()).unwrap_err();
        assert!(matches!(err, Error::ModelBreakdown { year: 2000, .. }));
    }

    proptest! {
        #[test]
        fn prediction_inverts_implied_growth(
            n9 in prop::collection::vec(1e5f64..1e7, 5..100),
            gdp_base in 5e3f64..5e4,
            a in 10f64..1000.0,
        ) {
            let len = n9.len();
            let gdp: Vec<f64> = (0..len).map(|i| gdp_base + a * i as f64).collect();
            let n9s = s(1959, &n9);
            let gdps = s(1959, &gdp);
            let g = implied_gpc(&n9s, &gdps, a).unwrap();
            let back = predict_n9(&g, &gdps, &ModelParams::new(a, n9[0], 1959).unwrap()).unwrap();
            for (x, y) in back.values().iter().zip(&n9) {
                prop_assert!((x - y).abs() <= 1e-10 * y.abs());
            }
        }

        #[test]
        fn trend_growth_is_homogeneous(a in 1f64..1e4, c in 0.01f64..100.0) {
            let gdp = s(2000, &[9_000.0, 17_500.0, 31_000.0]);
            let t1 = trend_growth(&gdp, c * a).unwrap();
            let t2 = trend_growth(&gdp, a).unwrap();
            for (x, y) in t1.values().iter().zip(t2.values()) {
                prop_assert!((x - c * y).abs() <= 4.0 * f64::EPSILON * x.abs());
            }
        }
    }

    #[test]
    fn noiseless_calibration_recovers_parameters() {
        let fx = demographic_fixture(&FixtureSpec { noise_sd: 0.0, ..FixtureSpec::default() });
        let g = growth_rate(&fx.gdp_per_capita).unwrap();
        let report = calibrate(&g, &fx.gdp_per_capita, &fx.n9_measured, fx.spec.start_year).unwrap();
        assert!((report.params.a / fx.spec.a - 1.0).abs() < 1e-6, "{report:?}");
        assert!((report.params.n9_initial / fx.spec.n9_initial - 1.0).abs() < 1e-6);
        assert!(report.mean_difference.abs() < 0.5);
        assert!(report.rms_difference >= report.mean_difference.abs());

        // idempotent on its own noiseless prediction
        let predicted = predict_n9(&g, &fx.gdp_per_capita, &report.params).unwrap();
        let again = calibrate(&g, &fx.gdp_per_capita, &predicted, fx.spec.start_year).unwrap();
        assert!((again.params.a / report.params.a - 1.0).abs() < 1e-8);
        assert!((again.params.n9_initial / report.params.n9_initial - 1.0).abs() < 1e-8);
    }

    #[test]
    fn calibration_under_noise() {
        let mut sd_ok = 0;
        for seed in 0..100 {
            let fx = demographic_fixture(&FixtureSpec { noise_sd: 1e5, seed, ..FixtureSpec::default() });
            let g = growth_rate(&fx.gdp_per_capita).unwrap();
            let r = calibrate(&g, &fx.gdp_per_capita, &fx.n9_measured, fx.spec.start_year).unwrap();
            assert!(r.mean_difference.abs() < 0.5);
            if (r.sd_difference / 1e5 - 1.0).abs() < 0.2 {
                sd_ok += 1;
            }
        }
        assert!(sd_ok >= 90, "residual sd within 20% of the noise level in only {sd_ok}/100 runs");
    }

    #[test]
    fn calibration_needs_five_years() {
        let gdp = s(2000, &[10_000.0, 10_500.0, 11_000.0]);
        let g = growth_rate(&gdp).unwrap();
        let m = s(2000, &[1e6, 1e6, 1e6]);
        assert!(matches!(calibrate(&g, &gdp, &m, 2000), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn calibration_without_admissible_a() {
        let gdp = s(2000, &[100.0, 100.0, 100.0, 100.0, 100.0, 100.0]);
        let g = growth_rate(&gdp).unwrap();
        let m = s(2000, &[1e6; 6]);
        // any A above 50 breaks the model; demand A ≥ 60
        let opts = CalibrationOptions { a_bounds: (60.0, 100.0), ..Default::default() };
        assert!(matches!(calibrate_with(&g, &gdp, &m, 2000, &opts), Err(Error::Calibration { .. })));
    }
}
