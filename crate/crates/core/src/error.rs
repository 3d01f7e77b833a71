use thiserror::Error;

/// Errors raised by propagation, derivative extraction and the optimizers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {point:?} lies on the singular locus")]
    SingularPoint { point: Vec<f64> },

    #[error("segment from {from:?} to {to:?} passes within {clearance} of the singular locus")]
    SingularPath {
        from: Vec<f64>,
        to: Vec<f64>,
        clearance: f64,
    },

    #[error("hessian is singular to working precision (last damping {damping:e})")]
    SingularHessian { damping: f64 },

    #[error("armijo backtracking fell below the minimum step size {alpha_min:e}")]
    LineSearchFailed { alpha_min: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("empty data set")]
    EmptyData,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
