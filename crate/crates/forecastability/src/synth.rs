//! Seeded synthetic generators: sine and multisine tones, Gaussian
//! noise injection, Lorenz trajectories, white noise, sparsification,
//! and the five-segment benchmark of increasing complexity.
//!
//! Every generator is a pure function of its parameters and seed;
//! repeated invocation is bit-identical. The generator algorithm is
//! recorded in report metadata as [`RNG_IDENTITY`].

use std::f64::consts::TAU;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeseries::TimeSeries;

/// Seedable RNG used across the crate, named so replications can match
/// streams across platforms.
pub const RNG_IDENTITY: &str = "chacha8";

/// Default sine: 20 cycles per 200-sample window. At this frequency a
/// five-step divergence horizon spans exactly half a period, so the
/// delay-embedded ellipse maps onto itself and neighbor distances are
/// preserved, keeping measured lambda at zero as a periodic signal
/// demands.
pub const DEFAULT_SINE: (f64, f64) = (0.1, 1.0);

/// Default multisine mixture: on-grid, incommensurate-looking
/// frequencies with decaying amplitudes.
pub const DEFAULT_MULTISINE: [(f64, f64); 3] =
    [(5.0 / 256.0, 1.0), (13.0 / 256.0, 0.7), (31.0 / 256.0, 0.4)];

/// Default noise level for the noisy-multisine variant.
pub const DEFAULT_NOISE_SIGMA: f64 = 0.5;

/// Default white-noise standard deviation.
pub const DEFAULT_WHITE_SIGMA: f64 = 1.0;

pub(crate) fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Lorenz system parameters and integration settings. Defaults are the
/// classical chaotic regime observed on the x coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LorenzParams {
    pub sigma: f64,
    pub rho: f64,
    pub beta: f64,
    /// Integration step; also the sample spacing of the output.
    pub dt: f64,
    pub initial_state: [f64; 3],
    /// Steps discarded before sampling begins.
    pub transient_steps: usize,
    pub observed_coordinate: Coordinate,
}

impl Default for LorenzParams {
    fn default() -> Self {
        Self {
            sigma: 10.0,
            rho: 28.0,
            beta: 8.0 / 3.0,
            dt: 0.01,
            initial_state: [1.0, 1.0, 1.0],
            transient_steps: 1000,
            observed_coordinate: Coordinate::X,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coordinate {
    #[default]
    X,
    Y,
    Z,
}

/// Generator families of the five-segment benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignalKind {
    Sine,
    Multisine,
    NoisyMultisine,
    Lorenz,
    WhiteNoise,
}

impl SignalKind {
    pub fn name(&self) -> &'static str {
        match self {
            SignalKind::Sine => "sine",
            SignalKind::Multisine => "multisine",
            SignalKind::NoisyMultisine => "noisy_multisine",
            SignalKind::Lorenz => "lorenz",
            SignalKind::WhiteNoise => "white_noise",
        }
    }
}

/// Kind-specific parameters. `components` hold (frequency, amplitude)
/// pairs; phases are drawn from the `SignalSpec` seed so replicates vary.
/// An empty component list selects the kind's defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SignalParams {
    pub components: Vec<(f64, f64)>,
    pub noise_sigma: f64,
    pub sigma: f64,
    pub lorenz: LorenzParams,
}

impl Default for SignalParams {
    fn default() -> Self {
        Self {
            components: Vec::new(),
            noise_sigma: DEFAULT_NOISE_SIGMA,
            sigma: DEFAULT_WHITE_SIGMA,
            lorenz: LorenzParams::default(),
        }
    }
}

/// Declarative generator spec: identical specs produce bit-identical
/// series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalSpec {
    pub kind: SignalKind,
    pub length: usize,
    pub seed: u64,
    #[serde(default)]
    pub params: SignalParams,
}

impl SignalSpec {
    pub fn new(kind: SignalKind, length: usize, seed: u64) -> Self {
        Self {
            kind,
            length,
            seed,
            params: SignalParams::default(),
        }
    }

    /// Replica of this spec with a different seed.
    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }

    fn components(&self) -> Vec<(f64, f64)> {
        if !self.params.components.is_empty() {
            return self.params.components.clone();
        }
        match self.kind {
            SignalKind::Sine => vec![DEFAULT_SINE],
            _ => DEFAULT_MULTISINE.to_vec(),
        }
    }

    /// Generates the series. Phases, noise draws, and the Lorenz
    /// initial-state perturbation all derive from `seed`.
    pub fn generate(&self) -> Result<TimeSeries> {
        let mut rng = rng_from_seed(self.seed);
        match self.kind {
            SignalKind::Sine | SignalKind::Multisine => {
                let comps = phased_components(&self.components(), &mut rng);
                gen_multisine(self.length, &comps)
            }
            SignalKind::NoisyMultisine => {
                let comps = phased_components(&self.components(), &mut rng);
                let clean = gen_multisine(self.length, &comps)?;
                add_gaussian_noise_from(&clean, self.params.noise_sigma, &mut rng)
            }
            SignalKind::Lorenz => {
                let mut params = self.params.lorenz;
                perturb_initial_state(&mut params, &mut rng);
                gen_lorenz(self.length, &params)
            }
            SignalKind::WhiteNoise => {
                gen_white_noise_from(self.length, self.params.sigma, &mut rng)
            }
        }
    }
}

fn phased_components(comps: &[(f64, f64)], rng: &mut ChaCha8Rng) -> Vec<(f64, f64, f64)> {
    comps
        .iter()
        .map(|&(f, a)| (f, a, rng.random_range(0.0..TAU)))
        .collect()
}

/// The Lorenz flow is deterministic, so replicate seeds act through a
/// uniform perturbation of the initial state.
fn perturb_initial_state(params: &mut LorenzParams, rng: &mut ChaCha8Rng) {
    for c in &mut params.initial_state {
        *c += rng.random_range(-0.5..0.5);
    }
}

fn check_frequency(frequency: f64) -> Result<()> {
    if !(frequency > 0.0 && frequency < 0.5) {
        return Err(Error::Aliasing(frequency));
    }
    Ok(())
}

/// Pure tone `amplitude * sin(2 pi frequency t + phase)`, frequency in
/// cycles per sample within (0, 0.5).
pub fn gen_sine(length: usize, frequency: f64, amplitude: f64, phase: f64) -> Result<TimeSeries> {
    check_frequency(frequency)?;
    let values = (0..length)
        .map(|t| amplitude * (TAU * frequency * t as f64 + phase).sin())
        .collect();
    TimeSeries::unitless("sine", values)
}

/// Pointwise sum of tones given as (frequency, amplitude, phase).
pub fn gen_multisine(length: usize, components: &[(f64, f64, f64)]) -> Result<TimeSeries> {
    if components.is_empty() {
        return Err(Error::DegenerateInput("multisine needs a component".into()));
    }
    for &(f, _, _) in components {
        check_frequency(f)?;
    }
    let values = (0..length)
        .map(|t| {
            components
                .iter()
                .map(|&(f, a, p)| a * (TAU * f * t as f64 + p).sin())
                .sum()
        })
        .collect();
    TimeSeries::unitless("multisine", values)
}

/// Adds `sigma * g_t` with independent standard normal draws.
pub fn add_gaussian_noise(series: &TimeSeries, sigma: f64, seed: u64) -> Result<TimeSeries> {
    add_gaussian_noise_from(series, sigma, &mut rng_from_seed(seed))
}

fn add_gaussian_noise_from(
    series: &TimeSeries,
    sigma: f64,
    rng: &mut ChaCha8Rng,
) -> Result<TimeSeries> {
    if !(sigma >= 0.0) {
        return Err(Error::InvalidConfig(format!(
            "noise sigma must be non-negative, got {sigma}"
        )));
    }
    if sigma == 0.0 {
        return Ok(series.clone());
    }
    let values = series
        .values()
        .iter()
        .map(|v| v + sigma * rng.sample::<f64, _>(StandardNormal))
        .collect();
    series.with_values(values)
}

fn lorenz_derivative(s: [f64; 3], p: &LorenzParams) -> [f64; 3] {
    [
        p.sigma * (s[1] - s[0]),
        s[0] * (p.rho - s[2]) - s[1],
        s[0] * s[1] - p.beta * s[2],
    ]
}

/// One classical 4th-order Runge-Kutta step of size `p.dt`.
pub(crate) fn rk4_step(s: [f64; 3], p: &LorenzParams) -> [f64; 3] {
    let dt = p.dt;
    let add = |a: [f64; 3], b: [f64; 3], h: f64| [a[0] + h * b[0], a[1] + h * b[1], a[2] + h * b[2]];
    let k1 = lorenz_derivative(s, p);
    let k2 = lorenz_derivative(add(s, k1, dt / 2.0), p);
    let k3 = lorenz_derivative(add(s, k2, dt / 2.0), p);
    let k4 = lorenz_derivative(add(s, k3, dt), p);
    let mut out = s;
    for i in 0..3 {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Post-transient state sequence, sampled before each step.
pub(crate) fn lorenz_trajectory(length: usize, params: &LorenzParams) -> Result<Vec<[f64; 3]>> {
    if !(params.dt > 0.0 && params.dt.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "integration step must be positive, got {}",
            params.dt
        )));
    }
    let mut state = params.initial_state;
    for step in 0..params.transient_steps {
        state = rk4_step(state, params);
        if state.iter().any(|c| !c.is_finite()) {
            return Err(Error::DivergentTrajectory(step));
        }
    }
    let mut states = Vec::with_capacity(length);
    for step in 0..length {
        states.push(state);
        state = rk4_step(state, params);
        if state.iter().any(|c| !c.is_finite()) {
            return Err(Error::DivergentTrajectory(params.transient_steps + step));
        }
    }
    Ok(states)
}

/// Lorenz trajectory sampled on the observed coordinate after the
/// transient discard.
pub fn gen_lorenz(length: usize, params: &LorenzParams) -> Result<TimeSeries> {
    let coord = match params.observed_coordinate {
        Coordinate::X => 0,
        Coordinate::Y => 1,
        Coordinate::Z => 2,
    };
    let values = lorenz_trajectory(length, params)?
        .iter()
        .map(|s| s[coord])
        .collect();
    TimeSeries::unitless("lorenz", values)
}

/// Independent N(0, sigma^2) draws.
pub fn gen_white_noise(length: usize, sigma: f64, seed: u64) -> Result<TimeSeries> {
    gen_white_noise_from(length, sigma, &mut rng_from_seed(seed))
}

fn gen_white_noise_from(length: usize, sigma: f64, rng: &mut ChaCha8Rng) -> Result<TimeSeries> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "white noise sigma must be positive, got {sigma}"
        )));
    }
    let values = (0..length)
        .map(|_| sigma * rng.sample::<f64, _>(StandardNormal))
        .collect();
    TimeSeries::unitless("white_noise", values)
}

/// Zeroes exactly `floor(rate * T)` distinct positions chosen uniformly
/// without replacement.
pub fn sparsify(series: &TimeSeries, rate: f64, seed: u64) -> Result<TimeSeries> {
    if !(0.0..1.0).contains(&rate) {
        return Err(Error::InvalidConfig(format!(
            "sparsity rate must lie in [0, 1), got {rate}"
        )));
    }
    let count = (rate * series.len() as f64).floor() as usize;
    let mut values = series.values().to_vec();
    let mut rng = rng_from_seed(seed);
    for idx in rand::seq::index::sample(&mut rng, series.len(), count) {
        values[idx] = 0.0;
    }
    series.with_values(values)
}

fn standardize(values: &mut [f64]) -> Result<()> {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    if var <= 0.0 {
        return Err(Error::DegenerateInput(
            "cannot standardize a constant segment".into(),
        ));
    }
    let std = var.sqrt();
    for v in values {
        *v = (*v - mean) / std;
    }
    Ok(())
}

/// Observation stride for the benchmark's Lorenz segment: the
/// trajectory is integrated at the default dt and observed every k-th
/// sample, so one segment spans enough attractor orbits to read as
/// broadband rather than quasi-periodic.
pub(crate) const BENCHMARK_LORENZ_STRIDE: usize = 8;

/// Mixture for the benchmark's multisine segments. The two strong
/// tones turn the five-step divergence horizon into a half- or
/// full-period shift, an isometry of the clean embedded trajectory, so
/// the clean segment measures lambda near zero; the weak third tone
/// breaks exact periodicity. All tones sit on the bin grid of the
/// 200/300-sample windows and of one 500-sample segment.
pub(crate) const BENCHMARK_MULTISINE: [(f64, f64); 3] = [(0.1, 1.0), (0.3, 0.7), (0.41, 0.2)];

/// Noise level for the benchmark's noisy-multisine segment, set so the
/// segment's windowed metrics land between the clean multisine and the
/// coarsely observed Lorenz segment.
pub(crate) const BENCHMARK_NOISE_SIGMA: f64 = 0.1;

/// Benchmark of five equal segments with decreasing forecastability:
/// sine, multisine, noisy multisine, Lorenz, white noise. Each segment
/// is standardized to zero mean and unit variance before concatenation
/// so amplitude differences cannot dominate windowed metrics. Returns
/// the series and the four boundary indices `[L, 2L, 3L, 4L]`.
///
/// One seeded stream drives everything, drawn in segment order: sine
/// phase, multisine phases, noisy-multisine phases then noise, Lorenz
/// initial-state perturbation, white noise.
pub fn five_segment_benchmark(segment_length: usize, seed: u64) -> Result<(TimeSeries, [usize; 4])> {
    five_segment_benchmark_with(
        segment_length,
        seed,
        BENCHMARK_LORENZ_STRIDE,
        BENCHMARK_NOISE_SIGMA,
    )
}

pub(crate) fn five_segment_benchmark_with(
    segment_length: usize,
    seed: u64,
    lorenz_stride: usize,
    noise_sigma: f64,
) -> Result<(TimeSeries, [usize; 4])> {
    let length = segment_length;
    let mut rng = rng_from_seed(seed);

    let sine = {
        let phase = rng.random_range(0.0..TAU);
        gen_sine(length, DEFAULT_SINE.0, DEFAULT_SINE.1, phase)?
    };
    let multisine = gen_multisine(length, &phased_components(&BENCHMARK_MULTISINE, &mut rng))?;
    let noisy = {
        let comps = phased_components(&BENCHMARK_MULTISINE, &mut rng);
        let clean = gen_multisine(length, &comps)?;
        add_gaussian_noise_from(&clean, noise_sigma, &mut rng)?
    };
    let lorenz = {
        let mut params = LorenzParams::default();
        perturb_initial_state(&mut params, &mut rng);
        let fine = gen_lorenz(length * lorenz_stride, &params)?;
        let observed: Vec<f64> = fine
            .values()
            .iter()
            .step_by(lorenz_stride)
            .copied()
            .collect();
        TimeSeries::unitless("lorenz", observed)?
    };
    let noise = gen_white_noise_from(length, DEFAULT_WHITE_SIGMA, &mut rng)?;

    let mut values = Vec::with_capacity(5 * length);
    for segment in [sine, multisine, noisy, lorenz, noise] {
        let mut seg = segment.values().to_vec();
        standardize(&mut seg)?;
        values.extend_from_slice(&seg);
    }
    let series = TimeSeries::unitless("five_segment_benchmark", values)?;
    Ok((series, [length, 2 * length, 3 * length, 4 * length]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{spectral_predictability, SpectralConfig};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn sine_quarter_period_samples() {
        let s = gen_sine(4, 0.25, 1.0, 0.0).unwrap();
        for (got, want) in s.values().iter().zip([0.0, 1.0, 0.0, -1.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn sine_with_zero_amplitude_is_flat() {
        let s = gen_sine(32, 0.1, 0.0, 1.0).unwrap();
        assert!(s.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn sine_phase_shift_gives_cosine() {
        let s = gen_sine(64, 0.07, 2.0, PI / 2.0).unwrap();
        for (t, got) in s.values().iter().enumerate() {
            let want = 2.0 * (TAU * 0.07 * t as f64).cos();
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn sine_rejects_aliased_frequencies() {
        for f in [0.0, 0.5, 0.6, -0.1] {
            assert!(matches!(gen_sine(16, f, 1.0, 0.0), Err(Error::Aliasing(_))));
        }
    }

    #[test]
    fn multisine_single_component_equals_sine() {
        let a = gen_multisine(128, &[(0.05, 1.3, 0.4)]).unwrap();
        let b = gen_sine(128, 0.05, 1.3, 0.4).unwrap();
        assert_eq!(a.values(), b.values());
    }

    #[test]
    fn multisine_is_linear_in_components() {
        let one = gen_multisine(128, &[(0.05, 1.0, 0.4)]).unwrap();
        let two = gen_multisine(128, &[(0.05, 1.0, 0.4), (0.05, 1.0, 0.4)]).unwrap();
        for (a, b) in one.values().iter().zip(two.values()) {
            assert_abs_diff_eq!(2.0 * a, *b, epsilon = 1e-12);
        }
    }

    #[test]
    fn multisine_rejects_empty_components() {
        assert!(matches!(
            gen_multisine(16, &[]),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn two_tones_are_less_predictable_than_one() {
        let config = SpectralConfig::default();
        let single = gen_sine(256, 0.1, 1.0, 0.0).unwrap();
        let double = gen_multisine(256, &[(0.1, 1.0, 0.0), (0.4, 1.0, 0.0)]).unwrap();
        let omega_one = spectral_predictability(&single, &config).unwrap();
        let omega_two = spectral_predictability(&double, &config).unwrap();
        assert!(omega_two < omega_one);
    }

    #[test]
    fn zero_sigma_noise_is_identity() {
        let s = gen_sine(64, 0.05, 1.0, 0.0).unwrap();
        let noisy = add_gaussian_noise(&s, 0.0, 9).unwrap();
        assert_eq!(s.values(), noisy.values());
    }

    #[test]
    fn noise_is_deterministic_per_seed() {
        let s = gen_sine(64, 0.05, 1.0, 0.0).unwrap();
        let a = add_gaussian_noise(&s, 0.5, 42).unwrap();
        let b = add_gaussian_noise(&s, 0.5, 42).unwrap();
        let c = add_gaussian_noise(&s, 0.5, 43).unwrap();
        assert_eq!(a.values(), b.values());
        assert_ne!(a.values(), c.values());
    }

    #[test]
    fn noisy_sine_omega_sits_between_sine_and_noise() {
        let config = SpectralConfig::default();
        let sine = gen_sine(512, 0.05, 1.0, 0.3).unwrap();
        let omega_sine = spectral_predictability(&sine, &config).unwrap();
        let mut omega_noisy = 0.0;
        let mut omega_wn = 0.0;
        for seed in 0..100 {
            let noisy = add_gaussian_noise(&sine, 0.5, seed).unwrap();
            omega_noisy += spectral_predictability(&noisy, &config).unwrap();
            let wn = gen_white_noise(512, 1.0, seed).unwrap();
            omega_wn += spectral_predictability(&wn, &config).unwrap();
        }
        omega_noisy /= 100.0;
        omega_wn /= 100.0;
        assert!(
            omega_wn < omega_noisy && omega_noisy < omega_sine,
            "ordering violated: {omega_wn} !< {omega_noisy} !< {omega_sine}"
        );
    }

    #[test]
    fn lorenz_origin_is_an_equilibrium() {
        let params = LorenzParams {
            initial_state: [0.0, 0.0, 0.0],
            ..LorenzParams::default()
        };
        let s = gen_lorenz(100, &params).unwrap();
        assert!(s.values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn rk4_step_holds_fixed_points() {
        let params = LorenzParams {
            sigma: 0.0,
            rho: 0.0,
            beta: 0.0,
            ..LorenzParams::default()
        };
        assert_eq!(rk4_step([0.0, 0.0, 0.0], &params), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn lorenz_default_run_is_bounded_and_aperiodic() {
        let params = LorenzParams::default();
        let states = lorenz_trajectory(30000, &params).unwrap();
        let max_x = states.iter().map(|s| s[0].abs()).fold(0.0, f64::max);
        assert!(max_x < 25.0, "max |x| = {max_x}");

        let first = states[0];
        let recurred = states[1..].iter().any(|s| {
            (s[0] - first[0]).abs() < 1e-9
                && (s[1] - first[1]).abs() < 1e-9
                && (s[2] - first[2]).abs() < 1e-9
        });
        assert!(!recurred, "trajectory revisited its starting state");
    }

    #[test]
    fn lorenz_stays_bounded_for_a_million_steps() {
        let params = LorenzParams {
            transient_steps: 0,
            ..LorenzParams::default()
        };
        let states = lorenz_trajectory(1_000_000, &params).unwrap();
        let max_norm = states
            .iter()
            .map(|s| (s[0] * s[0] + s[1] * s[1] + s[2] * s[2]).sqrt())
            .fold(0.0, f64::max);
        assert!(max_norm < 100.0, "max state norm = {max_norm}");
    }

    #[test]
    fn white_noise_is_deterministic_per_seed() {
        let a = gen_white_noise(256, 1.0, 5).unwrap();
        let b = gen_white_noise(256, 1.0, 5).unwrap();
        let c = gen_white_noise(256, 1.0, 6).unwrap();
        assert_eq!(a.values(), b.values());
        assert!(a.values().iter().zip(c.values()).any(|(x, y)| x != y));
    }

    #[test]
    fn longer_white_noise_has_lower_omega() {
        let config = SpectralConfig::default();
        let mut omega_long = 0.0;
        let mut omega_short = 0.0;
        for seed in 0..100 {
            let long = gen_white_noise(8192, 1.0, seed).unwrap();
            omega_long += spectral_predictability(&long, &config).unwrap();
            let short = gen_white_noise(256, 1.0, seed).unwrap();
            omega_short += spectral_predictability(&short, &config).unwrap();
        }
        assert!(
            omega_long < omega_short,
            "mean omega {} !< {}",
            omega_long / 100.0,
            omega_short / 100.0
        );
    }

    #[test]
    fn sparsify_examples() {
        let s = gen_sine(10, 0.13, 1.0, 0.7).unwrap();
        let untouched = sparsify(&s, 0.0, 1).unwrap();
        assert_eq!(s.values(), untouched.values());

        let half = sparsify(&s, 0.5, 1).unwrap();
        assert_eq!(half.values().iter().filter(|v| **v == 0.0).count(), 5);

        let again = sparsify(&s, 0.5, 1).unwrap();
        assert_eq!(half.values(), again.values());
    }

    #[test]
    fn benchmark_layout_and_normalization() {
        let (series, boundaries) = five_segment_benchmark(400, 77).unwrap();
        assert_eq!(series.len(), 2000);
        assert_eq!(boundaries, [400, 800, 1200, 1600]);

        let mut starts = vec![0];
        starts.extend_from_slice(&boundaries);
        for &start in &starts {
            let seg = &series.values()[start..start + 400];
            let mean = seg.iter().sum::<f64>() / 400.0;
            let var = seg.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 400.0;
            assert!(mean.abs() < 1e-9, "segment at {start}: mean {mean}");
            assert!((var - 1.0).abs() < 1e-6, "segment at {start}: var {var}");
        }

        let (replay, _) = five_segment_benchmark(400, 77).unwrap();
        assert_eq!(series.values(), replay.values());
    }

    #[test]
    fn benchmark_segments_have_decreasing_omega() {
        let config = SpectralConfig::default();
        let (series, boundaries) = five_segment_benchmark(500, 3).unwrap();
        let mut starts = vec![0usize];
        starts.extend_from_slice(&boundaries);
        let omegas: Vec<f64> = starts
            .iter()
            .map(|&start| {
                let seg = TimeSeries::unitless(
                    "seg",
                    series.values()[start..start + 500].to_vec(),
                )
                .unwrap();
                spectral_predictability(&seg, &config).unwrap()
            })
            .collect();
        for pair in omegas.windows(2) {
            assert!(pair[0] > pair[1], "omega not decreasing: {omegas:?}");
        }
    }

    #[test]
    fn spec_generation_is_deterministic() {
        for kind in [
            SignalKind::Sine,
            SignalKind::Multisine,
            SignalKind::NoisyMultisine,
            SignalKind::Lorenz,
            SignalKind::WhiteNoise,
        ] {
            let spec = SignalSpec::new(kind, 64, 123);
            let a = spec.generate().unwrap();
            let b = spec.generate().unwrap();
            assert_eq!(a.values(), b.values(), "kind {kind:?}");

            let c = spec.with_seed(124).generate().unwrap();
            assert!(
                a.values().iter().zip(c.values()).any(|(x, y)| x != y),
                "kind {kind:?} ignored its seed"
            );
        }
    }

    proptest! {
        #[test]
        fn sparsify_zeroes_exactly_the_requested_count(
            rate in 0.0f64..0.99,
            seed in 0u64..500,
        ) {
            let series = gen_sine(100, 0.05, 1.0, 0.25).unwrap();
            // The sine at this phase has no exact zeros, so changed
            // positions are exactly the chosen ones.
            prop_assume!(series.values().iter().all(|v| *v != 0.0));
            let sparse = sparsify(&series, rate, seed).unwrap();
            let changed: Vec<usize> = (0..100)
                .filter(|&i| sparse.values()[i] != series.values()[i])
                .collect();
            prop_assert_eq!(changed.len(), (rate * 100.0).floor() as usize);
            for i in changed {
                prop_assert_eq!(sparse.values()[i], 0.0);
            }
        }
    }
}
