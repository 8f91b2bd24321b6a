//! Core series representation and shared preprocessing: detrending,
//! sparsity measurement, weekly resampling and window iteration.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sampling frequency label. Metadata only: it never changes numeric
/// results, only labeling and resampling eligibility.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frequency {
    Daily,
    Weekly,
    Unitless,
}

impl std::fmt::Display for Frequency {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Frequency::Daily => write!(f, "daily"),
            Frequency::Weekly => write!(f, "weekly"),
            Frequency::Unitless => write!(f, "unitless"),
        }
    }
}

/// A uniformly sampled sequence of finite values with identity and
/// frequency metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    id: String,
    values: Vec<f64>,
    start_index: i64,
    frequency: Frequency,
}

impl TimeSeries {
    /// Builds a series, rejecting empty input and non-finite values.
    /// Inputs with NaN or infinities are a hard error, never imputed.
    pub fn new(
        id: impl Into<String>,
        values: Vec<f64>,
        start_index: i64,
        frequency: Frequency,
    ) -> Result<Self> {
        let id = id.into();
        if values.is_empty() {
            return Err(Error::DegenerateInput(format!("series '{id}' is empty")));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { id, index: pos });
        }
        Ok(Self {
            id,
            values,
            start_index,
            frequency,
        })
    }

    /// Convenience constructor for unlabeled data starting at index 0.
    pub fn unitless(id: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        Self::new(id, values, 0, Frequency::Unitless)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn start_index(&self) -> i64 {
        self.start_index
    }

    pub fn frequency(&self) -> Frequency {
        self.frequency
    }

    /// Same identity and metadata, different values.
    pub(crate) fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        Self::new(self.id.clone(), values, self.start_index, self.frequency)
    }
}

/// Moving-window layout over a series. Metrics computed on a window are
/// stamped at the window's last index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowPlan {
    pub window_size: usize,
    #[serde(default = "default_stride")]
    pub stride: usize,
    #[serde(default)]
    pub alignment: Alignment,
}

fn default_stride() -> usize {
    1
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alignment {
    #[default]
    WindowEnd,
}

impl WindowPlan {
    pub fn new(window_size: usize) -> Self {
        Self {
            window_size,
            stride: 1,
            alignment: Alignment::WindowEnd,
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.stride = stride;
        self
    }

    /// Number of windows produced over a series of length `len`:
    /// floor((len - window_size) / stride) + 1.
    pub fn count_for(&self, len: usize) -> usize {
        if self.window_size > len || self.window_size == 0 {
            return 0;
        }
        (len - self.window_size) / self.stride.max(1) + 1
    }
}

/// A contiguous view into a series, together with the sample index of
/// its last element (the stamp for windowed metrics).
#[derive(Debug, Clone, Copy)]
pub struct Window<'a> {
    pub values: &'a [f64],
    pub offset: usize,
    pub end_index: i64,
}

/// Yields contiguous slices `[k*stride, k*stride + W)` of the series.
pub fn iterate_windows<'a>(
    series: &'a TimeSeries,
    plan: &WindowPlan,
) -> Result<impl Iterator<Item = Window<'a>>> {
    if plan.window_size == 0 || plan.stride == 0 {
        return Err(Error::DegenerateInput(
            "window size and stride must be positive".into(),
        ));
    }
    if plan.window_size > series.len() {
        return Err(Error::WindowTooLarge {
            window: plan.window_size,
            len: series.len(),
        });
    }
    let w = plan.window_size;
    let stride = plan.stride;
    let start = series.start_index();
    let values = series.values();
    let count = plan.count_for(values.len());
    Ok((0..count).map(move |k| {
        let offset = k * stride;
        Window {
            values: &values[offset..offset + w],
            offset,
            end_index: start + (offset + w - 1) as i64,
        }
    }))
}

/// Removes the ordinary least-squares line fit over indices 0..T-1.
pub fn detrend_linear(series: &TimeSeries) -> Result<TimeSeries> {
    if series.len() < 2 {
        return Err(Error::DegenerateInput(
            "detrend needs at least 2 samples".into(),
        ));
    }
    series.with_values(detrend_slice(series.values()))
}

/// Slice-level OLS detrend used per window by the spectral pipeline.
pub(crate) fn detrend_slice(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    debug_assert!(n >= 2);
    // Constant input must come back as exact zeros: summation rounding
    // would otherwise leave an artificial residual spectrum.
    if values.windows(2).all(|w| w[0] == w[1]) {
        return vec![0.0; n];
    }
    let nf = n as f64;
    // Centered formulation: slope = sum((t - t_mean) * y) / sum((t - t_mean)^2).
    let t_mean = (nf - 1.0) / 2.0;
    let y_mean = values.iter().sum::<f64>() / nf;
    let mut num = 0.0;
    let mut den = 0.0;
    for (t, &y) in values.iter().enumerate() {
        let dt = t as f64 - t_mean;
        num += dt * (y - y_mean);
        den += dt * dt;
    }
    let slope = if den > 0.0 { num / den } else { 0.0 };
    values
        .iter()
        .enumerate()
        .map(|(t, &y)| y - (y_mean + slope * (t as f64 - t_mean)))
        .collect()
}

/// Fraction of exactly-zero entries.
pub fn sparsity_of(series: &TimeSeries) -> f64 {
    sparsity_of_slice(series.values())
}

pub(crate) fn sparsity_of_slice(values: &[f64]) -> f64 {
    let zeros = values.iter().filter(|v| **v == 0.0).count();
    zeros as f64 / values.len() as f64
}

/// Sums non-overlapping blocks of 7 consecutive daily values; the
/// trailing partial block is dropped. Result is labeled weekly with
/// ordinals restarting at 0 (week w covers days start+7w .. start+7w+6).
pub fn resample_weekly(series: &TimeSeries) -> Result<TimeSeries> {
    if series.frequency() != Frequency::Daily {
        return Err(Error::InvalidFrequency {
            expected: "daily".into(),
            got: series.frequency().to_string(),
        });
    }
    if series.len() < 7 {
        return Err(Error::DegenerateInput(format!(
            "weekly resampling needs at least 7 samples, got {}",
            series.len()
        )));
    }
    let blocks = series.len() / 7;
    let values = (0..blocks)
        .map(|b| series.values()[b * 7..(b + 1) * 7].iter().sum())
        .collect();
    TimeSeries::new(series.id(), values, 0, Frequency::Weekly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn ts(values: &[f64]) -> TimeSeries {
        TimeSeries::unitless("t", values.to_vec()).unwrap()
    }

    // Independent oracle: solve the normal equations of the line fit
    // directly (sums of powers), without the centered formulation used
    // by the implementation.
    fn detrend_normal_equations(values: &[f64]) -> Vec<f64> {
        let n = values.len() as f64;
        let sum_t: f64 = (0..values.len()).map(|t| t as f64).sum();
        let sum_tt: f64 = (0..values.len()).map(|t| (t as f64) * (t as f64)).sum();
        let sum_y: f64 = values.iter().sum();
        let sum_ty: f64 = values.iter().enumerate().map(|(t, y)| t as f64 * y).sum();
        let det = n * sum_tt - sum_t * sum_t;
        let slope = (n * sum_ty - sum_t * sum_y) / det;
        let intercept = (sum_y - slope * sum_t) / n;
        values
            .iter()
            .enumerate()
            .map(|(t, y)| y - (intercept + slope * t as f64))
            .collect()
    }

    #[test]
    fn rejects_empty_and_non_finite() {
        assert!(TimeSeries::unitless("x", vec![]).is_err());
        assert!(matches!(
            TimeSeries::unitless("x", vec![1.0, f64::NAN]),
            Err(Error::NonFiniteValue { index: 1, .. })
        ));
        assert!(TimeSeries::unitless("x", vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn detrend_exact_line_is_zero() {
        let out = detrend_linear(&ts(&[1.0, 2.0, 3.0])).unwrap();
        for v in out.values() {
            assert_abs_diff_eq!(*v, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn detrend_constant_is_zero() {
        let out = detrend_linear(&ts(&[5.0, 5.0, 5.0])).unwrap();
        for v in out.values() {
            assert_abs_diff_eq!(*v, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn detrend_alternating_matches_closed_form() {
        // Least squares on [0,1,0,1]: slope 0.2, intercept 0.2.
        let out = detrend_linear(&ts(&[0.0, 1.0, 0.0, 1.0])).unwrap();
        let expected = [-0.2, 0.6, -0.6, 0.2];
        for (got, want) in out.values().iter().zip(expected) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        let oracle = detrend_normal_equations(&[0.0, 1.0, 0.0, 1.0]);
        for (got, want) in out.values().iter().zip(oracle) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn detrend_too_short_errors() {
        assert!(detrend_linear(&ts(&[1.0])).is_err());
    }

    #[test]
    fn detrend_residuals_sum_to_zero() {
        let values: Vec<f64> = (0..200)
            .map(|t| 3.0 * t as f64 + (t as f64 * 0.7).sin() * 40.0)
            .collect();
        let max_abs = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let out = detrend_linear(&ts(&values)).unwrap();
        let sum: f64 = out.values().iter().sum();
        assert!(sum.abs() <= 1e-9 * values.len() as f64 * max_abs);
    }

    #[test]
    fn sparsity_examples() {
        assert_eq!(sparsity_of(&ts(&[0.0, 1.0, 0.0, 2.0])), 0.5);
        assert_eq!(sparsity_of(&ts(&[1.0, 2.0, 3.0])), 0.0);
        assert_eq!(sparsity_of(&ts(&[0.0, 0.0, 0.0, 0.0])), 1.0);
    }

    #[test]
    fn weekly_resample_examples() {
        let daily = |v: Vec<f64>| TimeSeries::new("d", v, 0, Frequency::Daily).unwrap();
        let one_week = resample_weekly(&daily(vec![1.0; 7])).unwrap();
        assert_eq!(one_week.values(), &[7.0]);
        assert_eq!(one_week.frequency(), Frequency::Weekly);

        let two_weeks = resample_weekly(&daily((1..=14).map(f64::from).collect())).unwrap();
        assert_eq!(two_weeks.values(), &[28.0, 77.0]);

        let partial = resample_weekly(&daily(vec![1.0; 10])).unwrap();
        assert_eq!(partial.values(), &[7.0]);
    }

    #[test]
    fn weekly_resample_errors() {
        let weekly = TimeSeries::new("w", vec![1.0; 14], 0, Frequency::Weekly).unwrap();
        assert!(matches!(
            resample_weekly(&weekly),
            Err(Error::InvalidFrequency { .. })
        ));
        let short = TimeSeries::new("d", vec![1.0; 6], 0, Frequency::Daily).unwrap();
        assert!(resample_weekly(&short).is_err());
    }

    #[test]
    fn window_iteration_offsets() {
        let s = ts(&[0.0, 1.0, 2.0, 3.0, 4.0]);
        let offsets: Vec<usize> = iterate_windows(&s, &WindowPlan::new(3))
            .unwrap()
            .map(|w| w.offset)
            .collect();
        assert_eq!(offsets, vec![0, 1, 2]);

        let single: Vec<_> = iterate_windows(&s, &WindowPlan::new(5)).unwrap().collect();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].end_index, 4);

        let s6 = ts(&[0.0; 6]);
        let strided: Vec<usize> = iterate_windows(&s6, &WindowPlan::new(3).with_stride(2))
            .unwrap()
            .map(|w| w.offset)
            .collect();
        assert_eq!(strided, vec![0, 2]);
    }

    #[test]
    fn window_too_large_errors() {
        let s = ts(&[1.0, 2.0]);
        assert!(matches!(
            iterate_windows(&s, &WindowPlan::new(3)).map(|_| ()),
            Err(Error::WindowTooLarge { .. })
        ));
    }

    proptest! {
        #[test]
        fn window_count_formula(len in 1usize..200, w in 1usize..200, stride in 1usize..10) {
            prop_assume!(w <= len);
            let s = ts(&vec![0.5; len]);
            let plan = WindowPlan::new(w).with_stride(stride);
            let n = iterate_windows(&s, &plan).unwrap().count();
            prop_assert_eq!(n, (len - w) / stride + 1);
            prop_assert_eq!(n, plan.count_for(len));
        }

        #[test]
        fn detrend_is_idempotent(values in proptest::collection::vec(-1e3f64..1e3, 2..120)) {
            let once = detrend_linear(&ts(&values)).unwrap();
            let twice = detrend_linear(&once).unwrap();
            let scale = once.values().iter().fold(1.0f64, |a, v| a.max(v.abs()));
            for (a, b) in once.values().iter().zip(twice.values()) {
                prop_assert!((a - b).abs() <= 1e-9 * scale);
            }
        }

        #[test]
        fn weekly_resample_preserves_complete_block_mass(
            values in proptest::collection::vec(-1e3f64..1e3, 7..100)
        ) {
            let daily = TimeSeries::new("d", values.clone(), 0, Frequency::Daily).unwrap();
            let weekly = resample_weekly(&daily).unwrap();
            let complete = 7 * (values.len() / 7);
            let expected: f64 = values[..complete].iter().sum();
            let got: f64 = weekly.values().iter().sum();
            prop_assert!((expected - got).abs() <= 1e-9 * (1.0 + expected.abs()));
        }
    }
}
