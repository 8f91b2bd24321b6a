//! Spectral predictability: Hann windowing, power-distribution
//! extraction via FFT, spectral entropy, the omega score in [0, 1],
//! and the moving-window variant.
//!
//! omega = 1 - H_a(p) / log_a(N) over the one-sided power distribution
//! p of the (detrended, Hann-tapered) series; 1 means a fully regular
//! spectrum, 0 a flat one.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeseries::{detrend_slice, iterate_windows, TimeSeries, WindowPlan};

/// Raw spectra whose total power falls below `1e-30 * T` are flagged
/// degenerate instead of being normalized.
const DEGENERACY_FLOOR_PER_SAMPLE: f64 = 1e-30;

/// Tolerance on the mass sum of an externally supplied distribution.
const MASS_SUM_TOLERANCE: f64 = 1e-9;

/// Minimum series length for a spectral estimate.
pub const MIN_SPECTRAL_LEN: usize = 4;

/// Configuration of the spectral pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SpectralConfig {
    /// Logarithm base `a > 1`; entropy and its normalizer share it, so
    /// the omega score itself is base-invariant.
    pub log_base: f64,
    /// Taper with a Hann window before the transform.
    pub apply_hann: bool,
    /// Remove the least-squares line before windowing.
    pub apply_detrend: bool,
    /// Keep the DC bin in the distribution.
    pub include_dc: bool,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self {
            log_base: std::f64::consts::E,
            apply_hann: true,
            apply_detrend: true,
            include_dc: false,
        }
    }
}

impl SpectralConfig {
    fn validate(&self) -> Result<()> {
        if !(self.log_base > 1.0) {
            return Err(Error::InvalidConfig(format!(
                "log base must exceed 1, got {}",
                self.log_base
            )));
        }
        Ok(())
    }
}

/// Normalized per-frequency power masses summing to 1, or a flagged
/// degenerate distribution when the raw spectrum carried no power.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerDistribution {
    masses: Vec<f64>,
    degenerate: bool,
}

impl PowerDistribution {
    /// Wraps already-normalized masses; they must be non-negative and
    /// sum to 1 within 1e-9.
    pub fn from_masses(masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::DegenerateInput("empty power distribution".into()));
        }
        if masses.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::DegenerateInput(
                "power masses must be finite and non-negative".into(),
            ));
        }
        let sum: f64 = masses.iter().sum();
        if (sum - 1.0).abs() > MASS_SUM_TOLERANCE {
            return Err(Error::DegenerateInput(format!(
                "power masses sum to {sum}, expected 1"
            )));
        }
        Ok(Self {
            masses,
            degenerate: false,
        })
    }

    /// Uniform distribution over `n` bins.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::DegenerateInput("uniform over zero bins".into()));
        }
        Ok(Self {
            masses: vec![1.0 / n as f64; n],
            degenerate: false,
        })
    }

    fn from_raw_power(power: Vec<f64>, degeneracy_floor: f64) -> Self {
        let total: f64 = power.iter().sum();
        if total < degeneracy_floor {
            return Self {
                masses: vec![0.0; power.len()],
                degenerate: true,
            };
        }
        Self {
            masses: power.into_iter().map(|p| p / total).collect(),
            degenerate: false,
        }
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn bin_count(&self) -> usize {
        self.masses.len()
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }
}

/// Symmetric Hann taper: `0.5 * (1 - cos(2 pi k / (n-1)))`, endpoints 0.
/// Returns `[1.0]` for n = 1.
pub fn hann_window(n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::DegenerateInput("hann window of length 0".into()));
    }
    if n == 1 {
        return Ok(vec![1.0]);
    }
    let denom = (n - 1) as f64;
    Ok((0..n)
        .map(|k| 0.5 * (1.0 - (2.0 * std::f64::consts::PI * k as f64 / denom).cos()))
        .collect())
}

/// Reusable pipeline for one series length; moving-window evaluation
/// shares the FFT plan across windows.
struct SpectrumAnalyzer {
    fft: Arc<dyn Fft<f64>>,
    hann: Option<Vec<f64>>,
    config: SpectralConfig,
    len: usize,
}

impl SpectrumAnalyzer {
    fn new(len: usize, config: SpectralConfig) -> Result<Self> {
        config.validate()?;
        if len < MIN_SPECTRAL_LEN {
            return Err(Error::SeriesTooShort {
                needed: MIN_SPECTRAL_LEN,
                got: len,
            });
        }
        let fft = FftPlanner::new().plan_fft_forward(len);
        let hann = if config.apply_hann {
            Some(hann_window(len)?)
        } else {
            None
        };
        Ok(Self {
            fft,
            hann,
            config,
            len,
        })
    }

    fn distribution(&self, values: &[f64]) -> PowerDistribution {
        debug_assert_eq!(values.len(), self.len);
        let prepared: Vec<f64> = if self.config.apply_detrend {
            detrend_slice(values)
        } else {
            values.to_vec()
        };
        let mut buf: Vec<Complex<f64>> = match &self.hann {
            Some(w) => prepared
                .iter()
                .zip(w)
                .map(|(v, h)| Complex::new(v * h, 0.0))
                .collect(),
            None => prepared.iter().map(|v| Complex::new(*v, 0.0)).collect(),
        };
        self.fft.process(&mut buf);

        let first_bin = if self.config.include_dc { 0 } else { 1 };
        let last_bin = self.len / 2;
        let power: Vec<f64> = (first_bin..=last_bin).map(|k| buf[k].norm_sqr()).collect();
        PowerDistribution::from_raw_power(power, DEGENERACY_FLOOR_PER_SAMPLE * self.len as f64)
    }

    fn omega(&self, values: &[f64]) -> f64 {
        omega_from_distribution(&self.distribution(values), self.config.log_base)
    }
}

/// One-sided power distribution of the series under the configured
/// pipeline: optional detrend, optional Hann taper, FFT, squared
/// magnitudes of bins `1..=floor(T/2)` (DC excluded by default).
pub fn power_distribution(
    series: &TimeSeries,
    config: &SpectralConfig,
) -> Result<PowerDistribution> {
    let analyzer = SpectrumAnalyzer::new(series.len(), *config)?;
    Ok(analyzer.distribution(series.values()))
}

/// Shannon entropy of the distribution in base `a`; zero-mass bins
/// contribute zero. Errors on a degenerate distribution.
pub fn spectral_entropy(dist: &PowerDistribution, a: f64) -> Result<f64> {
    if !(a > 1.0) {
        return Err(Error::InvalidConfig(format!(
            "log base must exceed 1, got {a}"
        )));
    }
    if dist.is_degenerate() {
        return Err(Error::DegenerateSpectrum);
    }
    let ln_a = a.ln();
    let h_nats: f64 = dist
        .masses()
        .iter()
        .filter(|p| **p > 0.0)
        .map(|p| -p * p.ln())
        .sum();
    Ok(h_nats / ln_a)
}

/// Omega score of a prepared distribution: `1 - H_a(p) / log_a(N)`,
/// clamped to [0, 1]. A degenerate (zero-power) distribution maps to 1:
/// a constant series has zero spectral entropy and maximal
/// predictability.
pub fn omega_from_distribution(dist: &PowerDistribution, a: f64) -> f64 {
    if dist.is_degenerate() {
        return 1.0;
    }
    let n = dist.bin_count();
    if n < 2 {
        // A single bin carries all mass: zero entropy.
        return 1.0;
    }
    let h = match spectral_entropy(dist, a) {
        Ok(h) => h,
        Err(_) => return 1.0,
    };
    let max_h = (n as f64).ln() / a.ln();
    (1.0 - h / max_h).clamp(0.0, 1.0)
}

/// Diagnostic variant normalizing natural-log entropy by ln(2 pi), the
/// continuous-spectrum convention. Unbounded below for wide
/// distributions and therefore not clamped. None when degenerate.
pub fn omega_two_pi(dist: &PowerDistribution) -> Option<f64> {
    if dist.is_degenerate() {
        return Some(1.0);
    }
    let h = spectral_entropy(dist, std::f64::consts::E).ok()?;
    Some(1.0 - h / std::f64::consts::TAU.ln())
}

/// Spectral predictability of the whole series.
pub fn spectral_predictability(series: &TimeSeries, config: &SpectralConfig) -> Result<f64> {
    let analyzer = SpectrumAnalyzer::new(series.len(), *config)?;
    Ok(analyzer.omega(series.values()))
}

/// Per-window omega values stamped at each window's last index. Output
/// value `i` belongs to input index `start + W - 1 + i * stride`.
pub fn moving_spectral_predictability(
    series: &TimeSeries,
    plan: &WindowPlan,
    config: &SpectralConfig,
) -> Result<TimeSeries> {
    if plan.window_size < MIN_SPECTRAL_LEN {
        return Err(Error::SeriesTooShort {
            needed: MIN_SPECTRAL_LEN,
            got: plan.window_size,
        });
    }
    let analyzer = SpectrumAnalyzer::new(plan.window_size, *config)?;
    let values: Vec<f64> = iterate_windows(series, plan)?
        .map(|w| analyzer.omega(w.values))
        .collect();
    TimeSeries::new(
        series.id(),
        values,
        series.start_index() + (plan.window_size - 1) as i64,
        series.frequency(),
    )
}
