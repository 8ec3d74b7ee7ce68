//! Crate-wide error type.

use thiserror::Error;

/// Errors shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument {
        name: &'static str,
        reason: String,
    },

    /// A matrix failed the positive-semidefinite check beyond the jitter
    /// policy's tolerance.
    #[error("matrix is not positive semidefinite: {0}")]
    NotPositiveSemidefinite(String),

    /// An operation defined only for one Cameron-Martin model was called
    /// with another.
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    /// An operation defined only for a subset of kernels was called with
    /// a kernel outside that subset.
    #[error("unsupported kernel: {0}")]
    UnsupportedKernel(String),

    /// A simple process referenced path values after the interval it is
    /// defined on.
    #[error("adaptedness violation: {0}")]
    AdaptednessViolation(String),

    /// Tensor quadrature was requested over more coordinates than the
    /// cost limit allows.
    #[error("dimension limit exceeded: {got} active coordinates, limit {limit}")]
    DimensionLimit { limit: usize, got: usize },

    /// A chaos-expansion term would exceed the configured maximum degree.
    #[error("degree limit exceeded: multi-index of degree {got}, limit {limit}")]
    DegreeLimit { limit: u32, got: u32 },

    /// A serialized chaos expansion could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
