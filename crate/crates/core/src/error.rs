//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by validation, special functions, quadrature, and the
/// Monte Carlo engine.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter violated its stated range.
    #[error("invalid {field}: {reason}")]
    Violation { field: &'static str, reason: String },

    /// The scheme requires strictly more source antennas than any single
    /// eavesdropper has; otherwise the source AN null space cannot mask the
    /// information beam.
    #[error("n_s = {n_s} must exceed n_e = {n_e}: the source needs more antennas than each eavesdropper")]
    AntennaCount { n_s: usize, n_e: usize },

    /// Argument outside the mathematical domain of a function.
    #[error("domain error in {what}: {detail}")]
    Domain { what: &'static str, detail: String },

    /// Result exceeds double-precision range.
    #[error("overflow in {what}")]
    Overflow { what: &'static str },

    /// An iterative computation exhausted its budget. Carries the best
    /// estimate so callers can keep partial results.
    #[error("{what} did not converge (best estimate {best:e}, error bound {err:e})")]
    NonConverged { what: String, best: f64, err: f64 },

    /// A quantity landed outside bounds it must satisfy by construction,
    /// beyond what rounding can explain.
    #[error("numerical inconsistency in {what}: value {value:e} outside tolerance")]
    NumericalInconsistency { what: String, value: f64 },

    /// Eigenvalue iteration failed to converge on a sampled channel.
    #[error("eigenvalue iteration failed to converge")]
    DegenerateChannel,

    /// A Hermitian solve hit a non-positive-definite matrix.
    #[error("linear solve failed: matrix not positive definite")]
    SolveFailure,
}

pub type Result<T> = std::result::Result<T, Error>;
