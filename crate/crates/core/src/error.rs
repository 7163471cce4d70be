use thiserror::Error;

/// Errors produced by the analysis toolkit.
///
/// Point and block indices carried by variants are 0-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("weight {index} is not strictly positive ({value})")]
    NonPositiveWeight { index: usize, value: f64 },

    #[error("probabilities sum to {sum}, expected 1")]
    NotNormalized { sum: f64 },

    #[error("invalid size: {0}")]
    InvalidSize(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("no partition into {blocks} blocks of equal measure exists")]
    PartitionInfeasible { blocks: usize },

    #[error("partition blocks do not have equal measure")]
    UnequalPartition,

    #[error("contrast needs two distinct blocks, got {0} twice")]
    SameBlock(usize),

    #[error("block {block} out of range (partition has {blocks} blocks)")]
    BlockOutOfRange { block: usize, blocks: usize },

    #[error("infeasible design: {0}")]
    InfeasibleDesign(String),

    #[error("tuple of length {actual} in a design with n = {expected}")]
    BadTupleLength { expected: usize, actual: usize },

    #[error("point index {index} out of range for a space of {size} points")]
    BadPointIndex { index: usize, size: usize },

    #[error("explicit design has {0} atoms, more than the cap of 1000000")]
    TooManyAtoms(usize),

    #[error("components do not share the same space and point count")]
    MixedSpaces,

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error(
        "Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal mass {residual:e})"
    )]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("partition size must be at least 2, got {0}")]
    InvalidPartitionSize(usize),

    #[error("{bins} bins incompatible with this continuous design: {reason}")]
    IncompatibleBinCount { bins: usize, reason: String },

    #[error("at least {min} replications are required, got {actual}")]
    TooFewReplications { min: usize, actual: usize },

    #[error("non-finite value at index {0}")]
    NonFinite(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
