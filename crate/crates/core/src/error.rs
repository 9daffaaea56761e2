use thiserror::Error;

/// Errors produced by shape validation, operator application and the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid problem shape: {0}")]
    InvalidShape(String),
    #[error("occupation pattern does not fit the shape: {0}")]
    InvalidPattern(String),
    #[error("flat index {index} out of range for dimension {dimension}")]
    IndexOutOfRange { index: u64, dimension: u128 },
    #[error("vector length {got} does not match the expected {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("dimension {dimension} exceeds the cap {cap} (override with SBR_DIM_CAP)")]
    DimensionCap { dimension: u128, cap: u128 },
    #[error("pair list is not the nearest-neighbor chain")]
    NotAChain,
    #[error("invalid annealing schedule: {0}")]
    InvalidSchedule(String),
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("overlap metric undefined for a zero reference vector")]
    ZeroReference,
    #[error("projection failed: no positive weight to keep")]
    EmptyProjection,
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix order {order} exceeds the permanent budget {cap}")]
    PermanentBudget { order: usize, cap: usize },
    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },
    #[error("sparsity {requested} out of range 1..={max}")]
    SparsityOutOfRange { requested: u128, max: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;
