use thiserror::Error;

/// Errors raised by the geometry, registration and topology routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate body: {0}")]
    DegenerateBody(String),

    /// The apex lies inside the body or too close to its boundary for the
    /// support cone to exist.
    #[error("apex inside body (separation lower bound {gap:.3e})")]
    ApexInsideBody { gap: f64 },

    #[error("rank-deficient correspondence set: {0}")]
    RankDeficient(String),

    /// A zero (or numerically vanishing) vector on the loop around a vertex.
    #[error("indeterminate index at vertex {vertex}")]
    IndeterminateIndex { vertex: usize },

    /// The frame rule is undefined at this point.
    #[error("frame rule singular: angle to singular point {angle:.3e}")]
    Singularity { angle: f64 },

    #[error("scene invalid: {reason}")]
    SceneInvalid {
        reason: String,
        sample: Option<[f64; 3]>,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
