use thiserror::Error;

/// Errors raised by the walk, distance, martingale and rate routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ErwError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid state: position {s} is not reachable at time {k}")]
    InvalidState { k: u64, s: i64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported regime for p = {p}: {reason}")]
    UnsupportedRegime { p: f64, reason: &'static str },

    #[error("horizon n = {n} exceeds the exact-DP ceiling {ceiling}; raise it with --dp-ceiling")]
    ResourceLimit { n: u64, ceiling: u64 },

    #[error("{0}")]
    NoiseFloor(String),
}

pub type Result<T> = std::result::Result<T, ErwError>;
