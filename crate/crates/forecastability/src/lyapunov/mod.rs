//! Largest Lyapunov exponent estimation from a scalar series: delay
//! embedding, Theiler-excluded nearest-neighbor search, single-horizon
//! divergence averaging, a moving-window variant, and data-sufficiency
//! checks.
//!
//! For each embedded state with an admissible nearest neighbor the
//! pair contributes `ln(||delta(h)|| / ||delta_0||) / h`; lambda is the
//! arithmetic mean over pairs, in per-sample-step units.

mod kdtree;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeseries::{iterate_windows, sparsity_of_slice, Frequency, TimeSeries, WindowPlan};
use kdtree::KdTree;

/// Embedded-state count below this uses exhaustive search under
/// [`NeighborSearch::Auto`]; the two paths are bit-compatible, so the
/// cutoff only affects speed.
const KD_CUTOFF: usize = 1024;

/// Distance norm for neighbor search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Norm {
    #[default]
    Euclidean,
}

/// Embedding and divergence-tracking parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EmbeddingConfig {
    /// Embedding dimension m >= 2.
    pub embedding_dim: usize,
    /// Delay tau >= 1 between embedded coordinates.
    pub delay: usize,
    /// Divergence horizon in sample steps.
    pub horizon: usize,
    /// Temporal exclusion radius for neighbor search; `None` means
    /// m * tau.
    pub theiler_window: Option<usize>,
    /// Distances below this are treated as zero and inadmissible.
    pub distance_floor: f64,
    pub norm: Norm,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        Self {
            embedding_dim: 3,
            delay: 1,
            horizon: 5,
            theiler_window: None,
            distance_floor: 1e-12,
            norm: Norm::Euclidean,
        }
    }
}

impl EmbeddingConfig {
    pub fn effective_theiler(&self) -> usize {
        self.theiler_window
            .unwrap_or(self.embedding_dim * self.delay)
    }

    /// Smallest window length on which a divergence pair can exist.
    pub fn min_window(&self) -> usize {
        (self.embedding_dim - 1) * self.delay + self.horizon + 2
    }

    fn validate(&self) -> Result<()> {
        if self.embedding_dim < 2 {
            return Err(Error::InvalidConfig(format!(
                "embedding dimension must be at least 2, got {}",
                self.embedding_dim
            )));
        }
        if self.delay < 1 {
            return Err(Error::InvalidConfig("delay must be at least 1".into()));
        }
        if self.horizon < 1 {
            return Err(Error::InvalidConfig("horizon must be at least 1".into()));
        }
        if !(self.distance_floor > 0.0 && self.distance_floor.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "distance floor must be a positive finite real, got {}",
                self.distance_floor
            )));
        }
        Ok(())
    }
}

/// Data-sufficiency verdict for a Lyapunov estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sufficiency {
    Ok,
    ShortSeries,
    HighSparsity,
}

impl std::fmt::Display for Sufficiency {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let label = match self {
            Sufficiency::Ok => "ok",
            Sufficiency::ShortSeries => "short_series",
            Sufficiency::HighSparsity => "high_sparsity",
        };
        f.write_str(label)
    }
}

/// Largest-Lyapunov estimate with pair accounting.
///
/// `pair_count + skipped_pairs` equals the number of states that had an
/// admissible neighbor with both forward trajectories in range; skipped
/// pairs are those whose separation at the horizon fell below the
/// distance floor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LyapunovEstimate {
    pub lambda: f64,
    pub pair_count: usize,
    pub skipped_pairs: usize,
    pub sufficiency: Sufficiency,
}

/// Neighbor-search strategy. All strategies return bit-identical
/// results; `Auto` switches to the spatial tree on large embeddings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeighborSearch {
    Exhaustive,
    KdTree,
    #[default]
    Auto,
}

/// Delay-embedded states in row-major flat storage.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    data: Vec<f64>,
    dim: usize,
}

impl Embedding {
    pub fn len(&self) -> usize {
        if self.dim == 0 {
            0
        } else {
            self.data.len() / self.dim
        }
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn states(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }
}

pub(crate) fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    let mut sum = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        sum += d * d;
    }
    sum
}

/// Delay embedding: state t has components `y[t + j*tau]` for
/// j = 0..m-1, giving `T - (m-1)*tau` states. m = 1 is the identity
/// embedding.
pub fn delay_embed(series: &TimeSeries, m: usize, tau: usize) -> Result<Embedding> {
    delay_embed_slice(series.values(), m, tau)
}

pub(crate) fn delay_embed_slice(values: &[f64], m: usize, tau: usize) -> Result<Embedding> {
    if m < 1 || tau < 1 {
        return Err(Error::InvalidConfig(
            "embedding dimension and delay must be at least 1".into(),
        ));
    }
    let span = (m - 1) * tau;
    if values.len() < span + 1 {
        return Err(Error::EmbeddingInfeasible {
            m,
            tau,
            needed: span + 1,
            got: values.len(),
        });
    }
    let n = values.len() - span;
    let mut data = Vec::with_capacity(n * m);
    for t in 0..n {
        for j in 0..m {
            data.push(values[t + j * tau]);
        }
    }
    Ok(Embedding { data, dim: m })
}

/// Nearest admissible neighbor of `index`: the argmin over j of the
/// Euclidean distance subject to `|index - j| > theiler_window` and
/// distance >= `distance_floor`. Ties break toward the smallest j.
pub fn nearest_neighbor(
    states: &Embedding,
    index: usize,
    theiler_window: usize,
    distance_floor: f64,
) -> Option<usize> {
    exhaustive_nearest(
        states,
        states.len(),
        index,
        theiler_window,
        distance_floor * distance_floor,
    )
}

fn exhaustive_nearest(
    states: &Embedding,
    limit: usize,
    index: usize,
    theiler: usize,
    floor_sq: f64,
) -> Option<usize> {
    let anchor = states.state(index);
    let mut best: Option<(f64, usize)> = None;
    for j in 0..limit {
        if index.abs_diff(j) <= theiler {
            continue;
        }
        let d = dist_sq(anchor, states.state(j));
        if d < floor_sq {
            continue;
        }
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, j));
        }
    }
    best.map(|(_, j)| j)
}

enum Finder<'a> {
    Exhaustive { states: &'a Embedding, limit: usize },
    Tree(KdTree<'a>),
}

impl<'a> Finder<'a> {
    fn new(states: &'a Embedding, limit: usize, search: NeighborSearch) -> Self {
        let use_tree = match search {
            NeighborSearch::Exhaustive => false,
            NeighborSearch::KdTree => true,
            NeighborSearch::Auto => limit >= KD_CUTOFF,
        };
        if use_tree {
            Finder::Tree(KdTree::build(states, limit))
        } else {
            Finder::Exhaustive { states, limit }
        }
    }

    fn nearest(&self, index: usize, theiler: usize, floor_sq: f64) -> Option<usize> {
        match self {
            Finder::Exhaustive { states, limit } => {
                exhaustive_nearest(states, *limit, index, theiler, floor_sq)
            }
            Finder::Tree(tree) => tree.nearest(index, theiler, floor_sq),
        }
    }
}

struct CoreEstimate {
    lambda: f64,
    pair_count: usize,
    skipped_pairs: usize,
    /// (anchor, neighbor) per averaged pair, in anchor order.
    #[cfg_attr(not(test), allow(dead_code))]
    pairs: Vec<(usize, usize)>,
}

fn estimate_slice(
    values: &[f64],
    config: &EmbeddingConfig,
    search: NeighborSearch,
) -> Result<CoreEstimate> {
    config.validate()?;
    let states = delay_embed_slice(values, config.embedding_dim, config.delay)?;
    let h = config.horizon;
    let n = states.len();
    if n < h + 2 {
        return Err(Error::EstimationImpossible);
    }
    // Anchors and neighbors both need their horizon image in range.
    let limit = n - h;
    let theiler = config.effective_theiler();
    let floor_sq = config.distance_floor * config.distance_floor;
    let finder = Finder::new(&states, limit, search);

    let mut sum = 0.0;
    let mut pairs = Vec::new();
    let mut skipped = 0usize;
    for t in 0..limit {
        let Some(j) = finder.nearest(t, theiler, floor_sq) else {
            continue;
        };
        let d0 = dist_sq(states.state(t), states.state(j));
        let dh = dist_sq(states.state(t + h), states.state(j + h));
        if dh < floor_sq {
            skipped += 1;
            continue;
        }
        sum += (dh.sqrt() / d0.sqrt()).ln() / h as f64;
        pairs.push((t, j));
    }
    if pairs.is_empty() {
        return Err(Error::EstimationImpossible);
    }
    Ok(CoreEstimate {
        lambda: sum / pairs.len() as f64,
        pair_count: pairs.len(),
        skipped_pairs: skipped,
        pairs,
    })
}

/// Largest Lyapunov exponent of the whole series, per sample step.
/// Conversion to per-unit-time is the caller's multiplication by 1/dt.
pub fn largest_lyapunov(series: &TimeSeries, config: &EmbeddingConfig) -> Result<LyapunovEstimate> {
    largest_lyapunov_with(series, config, NeighborSearch::default())
}

/// As [`largest_lyapunov`] with an explicit neighbor-search strategy.
pub fn largest_lyapunov_with(
    series: &TimeSeries,
    config: &EmbeddingConfig,
    search: NeighborSearch,
) -> Result<LyapunovEstimate> {
    let core = estimate_slice(series.values(), config, search)?;
    Ok(LyapunovEstimate {
        lambda: core.lambda,
        pair_count: core.pair_count,
        skipped_pairs: core.skipped_pairs,
        sufficiency: sufficiency_check(series, config),
    })
}

/// Moving-window lambda values with explicit gaps for windows where no
/// admissible pair existed (for example constant stretches).
#[derive(Debug, Clone, PartialEq)]
pub struct MovingLyapunov {
    id: String,
    values: Vec<Option<f64>>,
    start_index: i64,
    stride: usize,
    frequency: Frequency,
}

impl MovingLyapunov {
    /// Per-window lambda stamped at the window's last index; `None`
    /// marks a gap. Entry i belongs to index `start_index + i*stride`.
    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn id(&self) -> &str {
        &self.id
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

    pub fn stride(&self) -> usize {
        self.stride
    }

    pub fn frequency(&self) -> Frequency {
        self.frequency
    }

    pub fn index_of(&self, i: usize) -> i64 {
        self.start_index + (i * self.stride) as i64
    }

    pub fn gap_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    /// Indices of gap windows, as stamped positions.
    pub fn gap_indices(&self) -> Vec<i64> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_none())
            .map(|(i, _)| self.index_of(i))
            .collect()
    }
}

/// Per-window largest Lyapunov exponent stamped at window ends.
/// Windows are independent and evaluated in parallel; output order is
/// fixed, so results are identical across thread counts.
pub fn moving_lyapunov(
    series: &TimeSeries,
    plan: &WindowPlan,
    config: &EmbeddingConfig,
) -> Result<MovingLyapunov> {
    config.validate()?;
    if plan.window_size < config.min_window() {
        return Err(Error::WindowTooSmall {
            needed: config.min_window(),
            got: plan.window_size,
        });
    }
    let windows: Vec<&[f64]> = iterate_windows(series, plan)?.map(|w| w.values).collect();
    let values = windows
        .par_iter()
        .map(|values| match estimate_slice(values, config, NeighborSearch::default()) {
            Ok(core) => Ok(Some(core.lambda)),
            Err(Error::EstimationImpossible) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MovingLyapunov {
        id: series.id().to_string(),
        values,
        start_index: series.start_index() + (plan.window_size - 1) as i64,
        stride: plan.stride,
        frequency: series.frequency(),
    })
}

/// Data-sufficiency verdict: `short_series` when T < 100*m (takes
/// precedence), `high_sparsity` when the zero fraction exceeds 0.7.
pub fn sufficiency_check(series: &TimeSeries, config: &EmbeddingConfig) -> Sufficiency {
    if series.len() < 100 * config.embedding_dim {
        return Sufficiency::ShortSeries;
    }
    if sparsity_of_slice(series.values()) > 0.7 {
        return Sufficiency::HighSparsity;
    }
    Sufficiency::Ok
}
