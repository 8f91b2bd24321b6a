//! Experiment harnesses: length-by-sparsity sensitivity sweeps with
//! replicate statistics, and segment-aware evaluation of the moving
//! metrics over the five-segment benchmark.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lyapunov::{largest_lyapunov, moving_lyapunov, EmbeddingConfig};
use crate::numfmt::{sig9, to_json_string};
use crate::spectral::{moving_spectral_predictability, spectral_predictability, SpectralConfig};
use crate::synth::{sparsify, SignalSpec};
use crate::timeseries::{TimeSeries, WindowPlan};

/// Metric computed by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMetric {
    SpectralPredictability,
    LargestLyapunov,
}

impl SweepMetric {
    pub fn name(&self) -> &'static str {
        match self {
            SweepMetric::SpectralPredictability => "spectral_predictability",
            SweepMetric::LargestLyapunov => "largest_lyapunov",
        }
    }
}

fn default_lengths() -> Vec<usize> {
    vec![50, 100, 150, 200, 250, 300]
}

fn default_sparsity_rates() -> Vec<f64> {
    let mut rates: Vec<f64> = (0..10).map(|i| i as f64 / 10.0).collect();
    rates.push(0.95);
    rates
}

fn default_replicates() -> usize {
    100
}

/// Declarative sweep over series length and sparsity rate. Replicate r
/// of any cell uses seed `base_seed + r`; sparsification reuses the
/// replicate seed, so a cell row shares its clean series across rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    /// Template whose seed and length are replaced per replicate/cell.
    pub generator: SignalSpec,
    #[serde(default = "default_lengths")]
    pub lengths: Vec<usize>,
    #[serde(default = "default_sparsity_rates")]
    pub sparsity_rates: Vec<f64>,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    pub metric: SweepMetric,
    #[serde(default)]
    pub base_seed: u64,
}

impl SweepSpec {
    fn validate(&self) -> Result<()> {
        if self.lengths.is_empty() || self.sparsity_rates.is_empty() {
            return Err(Error::InvalidConfig(
                "sweep needs at least one length and one sparsity rate".into(),
            ));
        }
        if self.replicates == 0 {
            return Err(Error::InvalidConfig("sweep needs replicates >= 1".into()));
        }
        for &rate in &self.sparsity_rates {
            if !(0.0..1.0).contains(&rate) {
                return Err(Error::InvalidConfig(format!(
                    "sparsity rate must lie in [0, 1), got {rate}"
                )));
            }
        }
        Ok(())
    }
}

/// One (length, sparsity) cell: sample mean and standard deviation
/// (n-1 denominator) over successful replicates; failures are
/// replicates where the metric raised an error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepCell {
    pub length: usize,
    pub sparsity: f64,
    pub mean: f64,
    pub std: f64,
    pub n: usize,
    pub failures: usize,
}

/// Full sweep output with the spec embedded for provenance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub cells: Vec<SweepCell>,
}

impl SweepResult {
    /// Cell lookup by exact axis values.
    pub fn cell(&self, length: usize, sparsity: f64) -> Option<&SweepCell> {
        self.cells
            .iter()
            .find(|c| c.length == length && c.sparsity == sparsity)
    }

    /// Flat CSV rendering: `length,sparsity,mean,std,n,failures`.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("length,sparsity,mean,std,n,failures\n");
        for c in &self.cells {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                c.length,
                sig9(c.sparsity),
                sig9(c.mean),
                sig9(c.std),
                c.n,
                c.failures
            ));
        }
        out
    }

    /// JSON rendering embedding the spec.
    pub fn to_json_string(&self) -> Result<String> {
        to_json_string(self)
    }
}

pub(crate) fn sample_mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

fn metric_value(
    series: &TimeSeries,
    metric: SweepMetric,
    spectral: &SpectralConfig,
    embedding: &EmbeddingConfig,
) -> Result<f64> {
    match metric {
        SweepMetric::SpectralPredictability => spectral_predictability(series, spectral),
        SweepMetric::LargestLyapunov => Ok(largest_lyapunov(series, embedding)?.lambda),
    }
}

/// Runs the sweep under default metric configurations.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    run_sweep_with(spec, &SpectralConfig::default(), &EmbeddingConfig::default())
}

/// Runs the sweep. Cells are independent and evaluated in parallel;
/// replicates within a cell run in a fixed order, so results are
/// identical across thread counts.
pub fn run_sweep_with(
    spec: &SweepSpec,
    spectral: &SpectralConfig,
    embedding: &EmbeddingConfig,
) -> Result<SweepResult> {
    spec.validate()?;
    let mut axes = Vec::with_capacity(spec.lengths.len() * spec.sparsity_rates.len());
    for &length in &spec.lengths {
        for &rate in &spec.sparsity_rates {
            axes.push((length, rate));
        }
    }
    let cells = axes
        .par_iter()
        .map(|&(length, rate)| {
            let mut outcomes = Vec::with_capacity(spec.replicates);
            let mut failures = 0usize;
            for r in 0..spec.replicates {
                let seed = spec.base_seed.wrapping_add(r as u64);
                let mut generator = spec.generator.with_seed(seed);
                generator.length = length;
                let clean = generator.generate()?;
                let series = sparsify(&clean, rate, seed)?;
                match metric_value(&series, spec.metric, spectral, embedding) {
                    Ok(v) => outcomes.push(v),
                    Err(_) => failures += 1,
                }
            }
            let (mean, std) = sample_mean_std(&outcomes);
            Ok(SweepCell {
                length,
                sparsity: rate,
                mean,
                std,
                n: outcomes.len(),
                failures,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        spec: spec.clone(),
        cells,
    })
}

/// Windows fully inside one segment: count, gaps, and sample
/// statistics of the metric over that segment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentSummary {
    pub segment: String,
    pub start: usize,
    pub end: usize,
    pub window_count: usize,
    pub gap_count: usize,
    pub mean: f64,
    pub std: f64,
}

/// Windows straddling one segment boundary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundarySummary {
    /// Sample index where the next segment begins.
    pub position: usize,
    pub window_count: usize,
    pub gap_count: usize,
    pub mean: f64,
    pub std: f64,
}

/// Segment decomposition of one moving metric.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricBreakdown {
    pub metric: SweepMetric,
    pub window_size: usize,
    pub segments: Vec<SegmentSummary>,
    pub boundaries: Vec<BoundarySummary>,
}

/// Both moving metrics decomposed over the benchmark segments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkMetrics {
    pub omega: MetricBreakdown,
    pub lambda: MetricBreakdown,
}

impl BenchmarkMetrics {
    /// Flat CSV rendering of both breakdowns. Segment rows label the
    /// containing segment and carry its sample range; boundary rows
    /// label the boundary position and leave the range empty.
    pub fn to_csv_string(&self) -> String {
        let mut out =
            String::from("metric,window_size,scope,label,start,end,window_count,gap_count,mean,std\n");
        for breakdown in [&self.omega, &self.lambda] {
            let metric = breakdown.metric.name();
            let w = breakdown.window_size;
            for s in &breakdown.segments {
                out.push_str(&format!(
                    "{metric},{w},segment,{},{},{},{},{},{},{}\n",
                    s.segment,
                    s.start,
                    s.end,
                    s.window_count,
                    s.gap_count,
                    sig9(s.mean),
                    sig9(s.std)
                ));
            }
            for b in &breakdown.boundaries {
                out.push_str(&format!(
                    "{metric},{w},boundary,{},,,{},{},{},{}\n",
                    b.position,
                    b.window_count,
                    b.gap_count,
                    sig9(b.mean),
                    sig9(b.std)
                ));
            }
        }
        out
    }

    /// JSON rendering with floats rounded to nine significant digits.
    pub fn to_json_string(&self) -> Result<String> {
        to_json_string(self)
    }
}

const SEGMENT_NAMES: [&str; 5] = [
    "sine",
    "multisine",
    "noisy_multisine",
    "lorenz",
    "white_noise",
];

/// Evaluates moving omega and lambda over a five-segment benchmark
/// series, attributing each window either to the segment that fully
/// contains it or to the boundary it straddles.
pub fn segment_metrics(
    series: &TimeSeries,
    boundaries: &[usize; 4],
    omega_plan: &WindowPlan,
    lambda_plan: &WindowPlan,
    spectral: &SpectralConfig,
    embedding: &EmbeddingConfig,
) -> Result<BenchmarkMetrics> {
    let mut edges = vec![0usize];
    edges.extend_from_slice(boundaries);
    edges.push(series.len());
    if edges.windows(2).any(|e| e[0] >= e[1]) {
        return Err(Error::InvalidConfig(
            "segment boundaries must be increasing and inside the series".into(),
        ));
    }
    let min_segment = edges.windows(2).map(|e| e[1] - e[0]).min().unwrap();
    for plan in [omega_plan, lambda_plan] {
        if plan.window_size > min_segment {
            return Err(Error::WindowTooLarge {
                window: plan.window_size,
                len: min_segment,
            });
        }
    }

    let omega_moving = moving_spectral_predictability(series, omega_plan, spectral)?;
    let omega_windows: Vec<(usize, Option<f64>)> = omega_moving
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| (omega_plan.window_size - 1 + i * omega_plan.stride, Some(*v)))
        .collect();

    let lambda_moving = moving_lyapunov(series, lambda_plan, embedding)?;
    let lambda_windows: Vec<(usize, Option<f64>)> = lambda_moving
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| (lambda_plan.window_size - 1 + i * lambda_plan.stride, *v))
        .collect();

    Ok(BenchmarkMetrics {
        omega: attribute_windows(
            SweepMetric::SpectralPredictability,
            omega_plan.window_size,
            &omega_windows,
            &edges,
        ),
        lambda: attribute_windows(
            SweepMetric::LargestLyapunov,
            lambda_plan.window_size,
            &lambda_windows,
            &edges,
        ),
    })
}

fn attribute_windows(
    metric: SweepMetric,
    window_size: usize,
    windows: &[(usize, Option<f64>)],
    edges: &[usize],
) -> MetricBreakdown {
    let segment_count = edges.len() - 1;
    let mut segment_values: Vec<Vec<f64>> = vec![Vec::new(); segment_count];
    let mut segment_gaps = vec![0usize; segment_count];
    let mut boundary_values: Vec<Vec<f64>> = vec![Vec::new(); segment_count - 1];
    let mut boundary_gaps = vec![0usize; segment_count - 1];

    for &(end, value) in windows {
        let start = end + 1 - window_size;
        let inside = (0..segment_count).find(|&s| start >= edges[s] && end < edges[s + 1]);
        if let Some(s) = inside {
            match value {
                Some(v) => segment_values[s].push(v),
                None => segment_gaps[s] += 1,
            }
            continue;
        }
        // Window size never exceeds a segment, so a window not inside
        // any segment straddles exactly one boundary.
        let b = (1..segment_count)
            .find(|&b| start < edges[b] && edges[b] <= end)
            .expect("window must straddle a boundary");
        match value {
            Some(v) => boundary_values[b - 1].push(v),
            None => boundary_gaps[b - 1] += 1,
        }
    }

    let segments = (0..segment_count)
        .map(|s| {
            let (mean, std) = sample_mean_std(&segment_values[s]);
            SegmentSummary {
                segment: SEGMENT_NAMES.get(s).copied().unwrap_or("segment").to_string(),
                start: edges[s],
                end: edges[s + 1],
                window_count: segment_values[s].len(),
                gap_count: segment_gaps[s],
                mean,
                std,
            }
        })
        .collect();
    let boundaries = (0..segment_count - 1)
        .map(|b| {
            let (mean, std) = sample_mean_std(&boundary_values[b]);
            BoundarySummary {
                position: edges[b + 1],
                window_count: boundary_values[b].len(),
                gap_count: boundary_gaps[b],
                mean,
                std,
            }
        })
        .collect();
    MetricBreakdown {
        metric,
        window_size,
        segments,
        boundaries,
    }
}
