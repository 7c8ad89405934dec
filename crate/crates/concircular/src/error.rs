//! Error type shared by every module.

use thiserror::Error;

/// Failures reported by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Vectors or matrices of incompatible sizes.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// An operator that is not self-adjoint for the metric.
    #[error("operator is not self-adjoint with respect to the metric")]
    NotSelfAdjoint,
    /// A metric that is singular or not symmetric.
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    /// Input outside the supported scope (signature, block shape, field).
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// Input violating a mathematical precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A point or parameter outside the domain of a map.
    #[error("outside domain: {0}")]
    Domain(String),
    /// The tensor cannot be an orthogonal concircular tensor.
    #[error("not an orthogonal concircular tensor: {0}")]
    NotOrthogonal(String),
    /// The tensor is reducible-free where a split was requested.
    #[error("not reducible: {0}")]
    NotReducible(String),
    /// A covariantly constant tensor was supplied where a nontrivial one is
    /// needed.
    #[error("trivial concircular tensor (constant multiple of the metric)")]
    Trivial,
    /// Malformed external input.
    #[error("schema error: {0}")]
    Schema(String),
    /// Exact verification of a computed object failed.
    #[error("verification failed: {0}")]
    Verification(String),
    /// Numerical precision could not be reached.
    #[error("precision unreachable: {0}")]
    Precision(String),
    /// Internal inconsistency that the classification theory rules out.
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

/// Convenience alias.
pub type Result<T> = std::result::Result<T, Error>;

impl From<crate::poly::HigherDegreeFactor> for Error {
    fn from(e: crate::poly::HigherDegreeFactor) -> Self {
        Error::Unsupported(e.to_string())
    }
}
