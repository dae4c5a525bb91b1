use thiserror::Error;

/// Errors surfaced by the exact kernel and the pipeline layers above it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("zero vector where a direction was required")]
    ZeroVector,
    #[error("cannot parse rational {0:?}: {1}")]
    ParseRational(String, String),
    #[error("malformed linear system: {0}")]
    MalformedSystem(String),
    #[error("bodies {0} and {1} are not disjoint")]
    DisjointnessViolation(usize, usize),
    #[error("general position unreachable after {0} perturbation retries")]
    GeneralPositionFailure(u32),
    #[error("circles {0} and {1} have parallel normals")]
    ParallelCircles(usize, usize),
    #[error("circles {0}, {1} and {2} pass through a common point")]
    ConcurrentCircles(usize, usize, usize),
    #[error("point lies on a circle but the arrangement has no edges there")]
    BareCirclePoint,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("unsupported dimension {0} (expected 2 or 3)")]
    BadDimension(usize),
    #[error("I/O error: {0}")]
    Io(String),
    #[error("bad instance file: {0}")]
    BadInstance(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::BadInstance(e.to_string())
    }
}
