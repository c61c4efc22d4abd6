use thiserror::Error;

use crate::scalar::Scalar;

/// Every fallible operation in the crate reports one of these.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("threshold must be positive, got {0}")]
    NonPositiveDelta(Scalar),
    #[error("tolerance must be positive, got {0}")]
    NonPositiveTolerance(Scalar),
    #[error("curve must have at least one vertex")]
    EmptyCurve,
    #[error("interval [{lo}, {hi}] has lo > hi")]
    InvertedInterval { lo: Scalar, hi: Scalar },
    #[error("set uncertainty region must be nonempty")]
    EmptySet,
    #[error("subcurve [{i}, {j}] out of range for a curve of length {len}")]
    IndexOutOfRange { i: usize, j: usize, len: usize },
    #[error("regions live in different clip boxes")]
    ClipMismatch,
    #[error("vertex {index} is a finite set; strict mode only accepts intervals")]
    SetVertexRejected { index: usize },
    #[error("vertex {index} is uncertain; a precise curve was required")]
    NotPrecise { index: usize },
    #[error("instance is infeasible at the given threshold")]
    Infeasible,
    #[error("enumeration needs {needed} items, over the cap of {cap}")]
    CapExceeded { needed: u128, cap: u128 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid formula: {0}")]
    InvalidFormula(String),
    #[error("sentinel {sentinel} must exceed {bound}")]
    SentinelTooSmall { sentinel: Scalar, bound: Scalar },
    #[error("extracted witness failed verification: {0}")]
    WitnessRejected(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
