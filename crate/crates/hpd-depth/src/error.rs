//! Error types shared across the crate.

use crate::hermitian::HpdMatrix;

/// Errors produced by matrix construction, geometry, solvers, and depth
/// computations.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Matrix or sample dimensions do not agree.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Input fails a structural invariant (non-Hermitian, non-finite entries,
    /// bad weights, invalid grid, ...).
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A document could not be parsed; carries position diagnostics.
    #[error("parse error: {0}")]
    Parse(String),

    /// Input is outside the mathematical domain of an operation
    /// (non-PD matrix for log, n <= d^2 for zonoid depth, B <= d-1 Wishart, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A numerical procedure failed (eigensolver sweep cap, simplex iteration
    /// cap, exp overflow).
    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// An iterative center solver did not reach its tolerance. Carries the
    /// last iterate and the residual at that point.
    #[error("solver did not converge after {iterations} iterations (residual {residual:.3e})")]
    Convergence {
        iterations: usize,
        residual: f64,
        last: Box<HpdMatrix>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
