//! Forecastability diagnostics for time series, computed before any
//! model is trained.
//!
//! Two complementary scores are provided. The spectral predictability
//! omega in [0, 1] measures how concentrated the power spectrum is: a
//! pure tone scores near 1, white noise near 0. The largest Lyapunov
//! exponent lambda measures how fast nearby trajectories in a
//! delay-embedded phase space diverge: near zero for periodic signals,
//! positive for chaotic or noisy ones.
//!
//! The crate also ships seeded synthetic generators, sweep and
//! benchmark experiment harnesses, and a report builder that joins the
//! scores against forecast errors over a series hierarchy.

pub mod error;
pub mod experiments;
pub mod ingest_report;
pub mod lyapunov;
pub(crate) mod numfmt;
pub mod spectral;
pub mod synth;
pub mod timeseries;

pub use error::{Error, Result};
