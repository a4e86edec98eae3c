use thiserror::Error;

/// Errors raised by every fallible operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the domain where the model is defined.
    #[error("parameter out of domain: {0}")]
    Domain(String),

    /// One of the error bounds is zero, so the difference of the two
    /// uniform variables is a point mass without a density.
    #[error("degenerate distribution: {0}")]
    Degenerate(String),

    /// The operation needs a finite a priori cap.
    #[error("unsupported in legacy (uncapped) mode: {0}")]
    Legacy(&'static str),

    /// Observed data cannot be used (too few points, non-positive values, ...).
    #[error("data error: {0}")]
    Data(String),

    /// Requested norm order or exponent is not implemented.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// A time integrator produced a non-finite state.
    #[error("integration failed at step {step}: {reason}")]
    Integration { step: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
