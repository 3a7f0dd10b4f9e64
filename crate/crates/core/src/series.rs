//! Year-indexed series and the transforms shared by every estimator.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A contiguous run of annual readings. Element `i` belongs to year
/// `start_year + i`; every value is finite and there is at least one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSeries")]
pub struct AnnualSeries {
    start_year: i32,
    values: Vec<f64>,
    unit: String,
}

#[derive(Deserialize)]
struct RawSeries {
    start_year: i32,
    values: Vec<f64>,
    unit: String,
}

impl TryFrom<RawSeries> for AnnualSeries {
    type Error = Error;

    fn try_from(raw: RawSeries) -> Result<Self> {
        AnnualSeries::new(raw.start_year, raw.values, raw.unit)
    }
}

impl AnnualSeries {
    pub fn new(start_year: i32, values: Vec<f64>, unit: impl Into<String>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::DegenerateInput("series must hold at least one value".into()));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite value {} at year {}", values[i], start_year + i as i32)));
        }
        Ok(Self { start_year, values, unit: unit.into() })
    }

    pub fn start_year(&self) -> i32 {
        self.start_year
    }

    /// Last year covered (inclusive).
    pub fn end_year(&self) -> i32 {
        self.start_year + self.values.len() as i32 - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn unit(&self) -> &str {
        &self.unit
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for API symmetry with collections.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        (0..self.values.len()).map(move |i| self.start_year + i as i32)
    }

    pub fn get(&self, year: i32) -> Option<f64> {
        let idx = usize::try_from(year - self.start_year).ok()?;
        self.values.get(idx).copied()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn with_unit(mut self, unit: impl Into<String>) -> Self {
        self.unit = unit.into();
        self
    }

    /// Sub-series covering `[from, to]`, both inclusive.
    pub fn window(&self, from: i32, to: i32) -> Result<AnnualSeries> {
        if from < self.start_year || to > self.end_year() || from > to {
            return Err(Error::Alignment(format!(
                "window {from}-{to} is not inside {}-{}",
                self.start_year,
                self.end_year()
            )));
        }
        let lo = (from - self.start_year) as usize;
        let hi = (to - self.start_year) as usize;
        AnnualSeries::new(from, self.values[lo..=hi].to_vec(), self.unit.clone())
    }

    /// Slice of values for `len` years starting at `from`, failing when the
    /// series does not cover that span.
    pub fn covering(&self, from: i32, len: usize) -> Result<&[f64]> {
        let end = from + len as i32 - 1;
        if len == 0 || from < self.start_year || end > self.end_year() {
            return Err(Error::Alignment(format!(
                "series {}-{} does not cover {from}-{end}",
                self.start_year,
                self.end_year()
            )));
        }
        let lo = (from - self.start_year) as usize;
        Ok(&self.values[lo..lo + len])
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Sample standard deviation (n − 1 denominator); zero for a single value.
    pub fn std_dev(&self) -> f64 {
        let n = self.values.len();
        if n < 2 {
            return 0.0;
        }
        let m = self.mean();
        let ss: f64 = self.values.iter().map(|v| (v - m).powi(2)).sum();
        (ss / (n - 1) as f64).sqrt()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64, unit: impl Into<String>) -> Result<AnnualSeries> {
        AnnualSeries::new(self.start_year, self.values.iter().map(|&v| f(v)).collect(), unit)
    }
}

/// Two series over an identical year span.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignedPair {
    pub a: AnnualSeries,
    pub b: AnnualSeries,
}

impl AlignedPair {
    pub fn start_year(&self) -> i32 {
        self.a.start_year()
    }

    pub fn end_year(&self) -> i32 {
        self.a.end_year()
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// `order`-th difference. The result starts `order` years later.
pub fn diff(s: &AnnualSeries, order: usize) -> Result<AnnualSeries> {
    if order == 0 {
        return Err(Error::InvalidSpec("difference order must be positive".into()));
    }
    if order >= s.len() {
        return Err(Error::DegenerateInput(format!("difference order {order} needs more than {} values", s.len())));
    }
    let mut values = s.values.clone();
    for _ in 0..order {
        values = values.windows(2).map(|w| w[1] - w[0]).collect();
    }
    AnnualSeries::new(s.start_year + order as i32, values, s.unit.clone())
}

/// Shift by `k` years: the result at year `t` holds `s(t - k)`.
pub fn lag(s: &AnnualSeries, k: usize) -> Result<AnnualSeries> {
    if k == 0 {
        return Err(Error::InvalidSpec("lag must be positive".into()));
    }
    if k >= s.len() {
        return Err(Error::DegenerateInput(format!("lag {k} leaves no values of {}", s.len())));
    }
    AnnualSeries::new(s.start_year + k as i32, s.values[..s.len() - k].to_vec(), s.unit.clone())
}

/// Trailing moving average; each value is dated at the last year of its window.
pub fn moving_average(s: &AnnualSeries, window: usize) -> Result<AnnualSeries> {
    if window == 0 {
        return Err(Error::InvalidSpec("window must be positive".into()));
    }
    if window > s.len() {
        return Err(Error::DegenerateInput(format!("window {window} is longer than the series ({})", s.len())));
    }
    let w = window as f64;
    let values = s.values.windows(window).map(|win| win.iter().sum::<f64>() / w).collect();
    AnnualSeries::new(s.start_year + window as i32 - 1, values, s.unit.clone())
}

/// Forward growth ratio `(s[i+1] - s[i]) / s[i]`, dated at year `i`.
pub fn growth_rate(s: &AnnualSeries) -> Result<AnnualSeries> {
    if s.len() < 2 {
        return Err(Error::DegenerateInput("growth rate needs at least two values".into()));
    }
    if let Some((year, v)) = s.years().zip(s.values.iter()).find(|(_, v)| **v <= 0.0) {
        return Err(Error::Domain(format!("growth rate of non-positive value {v} at {year}")));
    }
    let values = s.values.windows(2).map(|w| (w[1] - w[0]) / w[0]).collect();
    AnnualSeries::new(s.start_year, values, "1/year")
}

/// Truncate both series to their common years.
pub fn align(a: &AnnualSeries, b: &AnnualSeries) -> Result<AlignedPair> {
    let from = a.start_year().max(b.start_year());
    let to = a.end_year().min(b.end_year());
    if to - from + 1 < 2 {
        return Err(Error::DegenerateInput(format!(
            "series {}-{} and {}-{} overlap in fewer than two years",
            a.start_year(),
            a.end_year(),
            b.start_year(),
            b.end_year()
        )));
    }
    Ok(AlignedPair { a: a.window(from, to)?, b: b.window(from, to)? })
}

/// Truncate any number of series to their common years.
pub fn align_all(series: &[AnnualSeries]) -> Result<Vec<AnnualSeries>> {
    let first = series.first().ok_or_else(|| Error::DegenerateInput("no series to align".into()))?;
    let from = series.iter().map(AnnualSeries::start_year).max().unwrap_or(first.start_year());
    let to = series.iter().map(AnnualSeries::end_year).min().unwrap_or(first.end_year());
    if to - from + 1 < 2 {
        return Err(Error::DegenerateInput("series overlap in fewer than two years".into()));
    }
    series.iter().map(|s| s.window(from, to)).collect()
}

/// Fails unless every series shares the first one's span.
pub(crate) fn require_aligned(series: &[AnnualSeries]) -> Result<()> {
    let Some(first) = series.first() else {
        return Err(Error::DegenerateInput("no series supplied".into()));
    };
    for s in &series[1..] {
        if s.start_year() != first.start_year() || s.len() != first.len() {
            return Err(Error::Alignment(format!(
                "series {}-{} is not aligned with {}-{}",
                s.start_year(),
                s.end_year(),
                first.start_year(),
                first.end_year()
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn s(start: i32, v: &[f64]) -> AnnualSeries {
        AnnualSeries::new(start, v.to_vec(), "x").unwrap()
    }

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(matches!(AnnualSeries::new(2000, vec![], "x"), Err(Error::DegenerateInput(_))));
        assert!(matches!(AnnualSeries::new(2000, vec![1.0, f64::NAN], "x"), Err(Error::Domain(_))));
        assert!(AnnualSeries::new(2000, vec![1.0, f64::INFINITY], "x").is_err());
    }

    #[test]
    fn diff_examples() {
        assert_eq!(diff(&s(2000, &[5.0, 5.0, 5.0]), 1).unwrap().values(), &[0.0, 0.0]);
        let d = diff(&s(2000, &[1.0, 3.0, 6.0, 10.0]), 1).unwrap();
        assert_eq!(d.values(), &[2.0, 3.0, 4.0]);
        assert_eq!(d.start_year(), 2001);
        assert!(matches!(diff(&s(2000, &[1.0, 2.0]), 2), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn lag_examples() {
        let l = lag(&s(2000, &[1.0, 2.0, 3.0]), 1).unwrap();
        assert_eq!(l.values(), &[1.0, 2.0]);
        assert_eq!(l.start_year(), 2001);
        assert_eq!(l.get(2002), Some(2.0));
        assert!(matches!(lag(&s(2000, &[1.0, 2.0, 3.0]), 3), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn lag_and_diff_commute() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let v: Vec<f64> = (0..50).map(|_| rng.random_range(-10.0..10.0)).collect();
        let x = s(1950, &v);
        let a = lag(&diff(&x, 1).unwrap(), 1).unwrap();
        let b = diff(&lag(&x, 1).unwrap(), 1).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn moving_average_examples() {
        let m = moving_average(&s(2000, &[1.0, 2.0, 3.0]), 2).unwrap();
        assert_eq!(m.values(), &[1.5, 2.5]);
        assert_eq!(m.start_year(), 2001);
        assert_eq!(moving_average(&s(2000, &[7.0; 4]), 3).unwrap().values(), &[7.0, 7.0]);
        assert!(matches!(moving_average(&s(2000, &[1.0]), 2), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn growth_rate_examples() {
        let g = growth_rate(&s(2000, &[1.0, 1.1, 1.21])).unwrap();
        assert!((g.values()[0] - 0.1).abs() < 1e-12);
        assert!((g.values()[1] - 0.1).abs() < 1e-12);
        assert_eq!(g.unit(), "1/year");
        assert_eq!(growth_rate(&s(2000, &[4.0; 5])).unwrap().values(), &[0.0; 4]);
        assert!(matches!(growth_rate(&s(2000, &[1.0, 0.0, 2.0])), Err(Error::Domain(_))));
    }

    #[test]
    fn align_examples() {
        let a = s(1960, &vec![1.0; 43]);
        let b = s(1962, &vec![2.0; 44]);
        let p = align(&a, &b).unwrap();
        assert_eq!((p.a.start_year(), p.a.end_year()), (1962, 2002));
        assert_eq!((p.b.start_year(), p.b.end_year()), (1962, 2002));
        let same = align(&a, &a).unwrap();
        assert_eq!(same.a, a);
        assert!(matches!(align(&s(1900, &[1.0, 2.0]), &s(1950, &[1.0, 2.0])), Err(Error::DegenerateInput(_))));
    }

    fn series_strategy() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-1e6f64..1e6, 5..200)
    }

    proptest! {
        #[test]
        fn cumulative_sum_of_diff_reconstructs(v in series_strategy()) {
            let x = s(1900, &v);
            let d = diff(&x, 1).unwrap();
            let scale = v.iter().fold(1.0f64, |m, a| m.max(a.abs()));
            let mut acc = v[0];
            for (i, dv) in d.values().iter().enumerate() {
                acc += dv;
                prop_assert!((acc - v[i + 1]).abs() <= 1e-12 * scale * (i + 1) as f64);
            }
        }

        #[test]
        fn higher_order_diff_is_iterated(v in series_strategy(), k in 1usize..4) {
            let x = s(1900, &v);
            let mut it = x.clone();
            for _ in 0..k { it = diff(&it, 1).unwrap(); }
            prop_assert_eq!(diff(&x, k).unwrap(), it);
        }

        #[test]
        fn unit_window_is_identity(v in series_strategy()) {
            let x = s(1900, &v);
            prop_assert_eq!(moving_average(&x, 1).unwrap(), x);
        }

        #[test]
        fn growth_rate_is_scale_invariant(
            v in prop::collection::vec(1e-3f64..1e6, 5..200),
            c in 1e-3f64..1e3,
        ) {
            let g1 = growth_rate(&s(1900, &v)).unwrap();
            let scaled: Vec<f64> = v.iter().map(|a| a * c).collect();
            let g2 = growth_rate(&s(1900, &scaled)).unwrap();
            for (a, b) in g1.values().iter().zip(g2.values()) {
                // relative to the ratio s[i+1]/s[i] = 1 + g, the scale of the rounding
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
            }
        }
    }
}
