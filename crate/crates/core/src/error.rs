use thiserror::Error;

/// Errors produced by the sampling and geometry layers.
#[derive(Debug, Error)]
pub enum Error {
    /// The exponent p is outside [1, ∞).
    #[error("invalid exponent p = {0}: expected 1 <= p < inf")]
    InvalidExponent(f64),

    /// Input is geometrically degenerate (zero vector, lower-dimensional
    /// point set, singular covariance, ...).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A hard size cap was exceeded (dimension, subset enumeration,
    /// non-simplicial facet in a simplicial-only routine).
    #[error("capability exceeded: {0}")]
    Capability(String),

    /// A precondition on a plain argument was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
