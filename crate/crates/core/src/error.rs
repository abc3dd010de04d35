use thiserror::Error;

/// Errors surfaced by the estimation and inference pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("invalid edge value {value} for {family} family")]
    InvalidEdgeValue { value: f64, family: &'static str },

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("invalid model specification: {0}")]
    InvalidSpec(String),

    #[error("objective became non-finite at iteration {iter}; step sizes likely diverge")]
    NonFiniteObjective { iter: usize },

    /// The curvature block of a node is singular or too ill-conditioned to
    /// invert, so no variance estimate exists for it.
    #[error("inference unavailable for node {node}: {reason}")]
    InferenceUnavailable { node: usize, reason: String },

    #[error("confidence ellipses require a 2-dimensional latent space, got r = {r}")]
    EllipseDimension { r: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
