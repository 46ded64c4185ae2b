use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid Schatten exponent {0} (must be >= 1)")]
    InvalidExponent(f64),

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("trace weight must be positive and finite, got {0}")]
    InvalidTraceWeight(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operator is not Hermitian (defect {defect:.3e} > tolerance {tolerance:.3e})")]
    NotHermitian { defect: f64, tolerance: f64 },

    #[error("operator lies outside the group algebra (reconstruction defect {defect:.3e})")]
    OutsideGroupAlgebra { defect: f64 },

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("invalid length function: {0}")]
    InvalidLength(String),

    #[error("invalid cocycle: {0}")]
    InvalidCocycle(String),

    #[error("length function is not conditionally negative (certificate {certificate:.3e})")]
    NotConditionallyNegative { certificate: f64 },

    #[error("group order {order} exceeds the configured cap {cap}")]
    GroupTooLarge { order: usize, cap: usize },

    #[error("invalid semigroup: {0}")]
    InvalidSemigroup(String),

    #[error("incompatible semigroup species for tensor product")]
    IncompatibleSpecies,

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("symbol cannot be evaluated: {0}")]
    UnevaluableSymbol(String),

    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("eigen/singular value decomposition failed to converge")]
    Decomposition,
}

pub type Result<T> = std::result::Result<T, Error>;
