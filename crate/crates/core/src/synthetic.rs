//! Seeded generators: the demographic fixture built by the forward model, and
//! the elementary processes (random walks, AR(1), VAR(p)) used by the
//! Monte-Carlo machinery.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::series::AnnualSeries;

/// Generator for replication `index` of a run seeded with `seed`. Each
/// replication owns an independent ChaCha stream, so results do not depend on
/// execution order.
pub fn replication_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Driftless Gaussian random walk of length `n` started at zero.
pub fn random_walk<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    let mut level = 0.0;
    for _ in 0..n {
        level += gaussian(rng);
        out.push(level);
    }
    out
}

/// Zero-mean AR(1) with unit-variance innovations, started from its
/// stationary distribution when `|phi| < 1`.
pub fn ar1<R: Rng + ?Sized>(rng: &mut R, n: usize, phi: f64) -> Vec<f64> {
    let mut x = if phi.abs() < 1.0 { gaussian(rng) / (1.0 - phi * phi).sqrt() } else { 0.0 };
    (0..n)
        .map(|_| {
            x = phi * x + gaussian(rng);
            x
        })
        .collect()
}

pub fn white_noise<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| gaussian(rng)).collect()
}

/// Simulate `y_t = c + Σ_i A_i y_{t−i} + u_t` with standard-normal
/// innovations, discarding `burn_in` leading draws. Returns one vector per
/// variable.
pub fn simulate_var<R: Rng + ?Sized>(
    rng: &mut R,
    coefficients: &[DMatrix<f64>],
    intercept: &DVector<f64>,
    n: usize,
    burn_in: usize,
) -> Vec<Vec<f64>> {
    let k = intercept.len();
    let p = coefficients.len();
    let total = n + burn_in + p;
    let mut history: Vec<DVector<f64>> = vec![DVector::zeros(k); p];
    for _ in p..total {
        let mut next = intercept.clone();
        for (i, a) in coefficients.iter().enumerate() {
            next += a * &history[history.len() - 1 - i];
        }
        for j in 0..k {
            next[j] += gaussian(rng);
        }
        history.push(next);
    }
    (0..k).map(|j| history[p + burn_in..].iter().map(|v| v[j]).collect()).collect()
}

/// Parameters of the bundled demographic fixture. Defaults echo the published
/// postcensal calibration (A = 547.1325, 3.9 million in 1959).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FixtureSpec {
    pub start_year: i32,
    pub end_year: i32,
    pub a: f64,
    pub n9_initial: f64,
    pub gdp_initial: f64,
    /// Annual drift of the log population path.
    pub drift: f64,
    /// Annual volatility of the log population path.
    pub path_volatility: f64,
    /// Standard deviation of the measurement noise on the population, persons.
    pub noise_sd: f64,
    pub seed: u64,
}

impl Default for FixtureSpec {
    fn default() -> Self {
        Self {
            start_year: 1959,
            end_year: 2002,
            a: 547.1325,
            n9_initial: 3.9e6,
            gdp_initial: 10_000.0,
            drift: 0.01,
            path_volatility: 0.015,
            noise_sd: 1.5e5,
            seed: 1960,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DemographicFixture {
    pub spec: FixtureSpec,
    pub gdp_per_capita: AnnualSeries,
    pub n9_true: AnnualSeries,
    pub n9_measured: AnnualSeries,
}

/// Build a population path (slow cycles plus a drifting random walk in logs), derive
/// GDP per capita from it through the forward model, then add Gaussian noise
/// to the population to obtain the "measured" series.
pub fn demographic_fixture(spec: &FixtureSpec) -> DemographicFixture {
    let n = (spec.end_year - spec.start_year + 1) as usize;
    let mut rng = seeded_rng(spec.seed);
    let tau = std::f64::consts::TAU;
    let mut walk = 0.0;
    let mut n9 = Vec::with_capacity(n);
    for i in 0..n {
        let t = i as f64;
        if i > 0 {
            walk += spec.drift + spec.path_volatility * gaussian(&mut rng);
        }
        let cycle = 0.08 * (tau * t / 23.0).sin() + 0.03 * (tau * t / 7.3).sin();
        n9.push(spec.n9_initial * (cycle + walk).exp());
    }

    let mut gdp = Vec::with_capacity(n);
    gdp.push(spec.gdp_initial);
    for i in 0..n - 1 {
        let g = 0.5 * (n9[i + 1] - n9[i]) / n9[i] + spec.a / gdp[i];
        gdp.push(gdp[i] * (1.0 + g));
    }

    let measured: Vec<f64> = n9.iter().map(|v| v + spec.noise_sd * gaussian(&mut rng)).collect();

    DemographicFixture {
        spec: spec.clone(),
        gdp_per_capita: AnnualSeries::new(spec.start_year, gdp, "dollars per person").unwrap(),
        n9_true: AnnualSeries::new(spec.start_year, n9, "persons").unwrap(),
        n9_measured: AnnualSeries::new(spec.start_year, measured, "persons").unwrap(),
    }
}
