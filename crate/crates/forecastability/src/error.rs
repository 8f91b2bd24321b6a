//! Crate-wide error type.

/// Errors produced by the analysis and ingestion pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input is too small or otherwise degenerate for the operation.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// Series shorter than the operation's minimum length.
    #[error("series too short: need at least {needed} samples, got {got}")]
    SeriesTooShort { needed: usize, got: usize },

    /// Series contains a non-finite value.
    #[error("non-finite value at position {index} of series '{id}'")]
    NonFiniteValue { id: String, index: usize },

    /// Operation requires a different sampling frequency.
    #[error("invalid frequency: expected {expected}, got {got}")]
    InvalidFrequency { expected: String, got: String },

    /// Window larger than the series it is applied to.
    #[error("window too large: window {window} exceeds series length {len}")]
    WindowTooLarge { window: usize, len: usize },

    /// Window too small for the configured embedding and horizon.
    #[error("window too small: need at least {needed}, got {got}")]
    WindowTooSmall { needed: usize, got: usize },

    /// All spectral power is (numerically) zero; entropy is undefined.
    #[error("degenerate spectrum: total power is zero")]
    DegenerateSpectrum,

    /// Series too short to form any embedded state.
    #[error("embedding infeasible: need at least {needed} samples for m={m}, tau={tau}, got {got}")]
    EmbeddingInfeasible {
        m: usize,
        tau: usize,
        needed: usize,
        got: usize,
    },

    /// No admissible neighbor pair survives the Theiler window,
    /// distance floor and horizon constraints.
    #[error("lyapunov estimation impossible: no admissible state pairs")]
    EstimationImpossible,

    /// Requested sine frequency cannot be represented at the sampling rate.
    #[error("aliasing: frequency {0} is outside (0, 0.5) cycles per sample")]
    Aliasing(f64),

    /// Numerical integration left the finite range.
    #[error("divergent trajectory: non-finite state at step {0}")]
    DivergentTrajectory(usize),

    /// WAPE denominator sum |actual| is zero.
    #[error("undefined denominator: actuals sum to zero")]
    UndefinedDenominator,

    /// Pearson correlation undefined (zero variance or too few points).
    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    /// CSV row failed to parse or validate.
    #[error("csv error at line {line}: {message}")]
    MalformedCsv { line: u64, message: String },

    /// Required column missing from the CSV header.
    #[error("unmapped column: '{0}' not found in header")]
    UnmappedColumn(String),

    /// Two records share the same (series, timestamp) key.
    #[error("duplicate key: series '{id}' timestamp {timestamp}")]
    DuplicateKey { id: String, timestamp: i64 },

    /// A series has a gap in its timestamp ordinals.
    #[error("non-contiguous timestamps in series '{id}': {prev} followed by {next}")]
    NonContiguousTimestamps { id: String, prev: i64, next: i64 },

    /// Hierarchy levels are not nested, or reference unknown dimensions.
    #[error("invalid hierarchy: {0}")]
    InvalidHierarchy(String),

    /// Series in the dataset do not share a common timestamp range.
    #[error("misaligned series: '{a}' and '{b}' cover different timestamp ranges")]
    MisalignedSeries { a: String, b: String },

    /// Invalid configuration value.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        let line = e.position().map_or(0, csv::Position::line);
        let message = e.to_string();
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            _ => Error::MalformedCsv { line, message },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
