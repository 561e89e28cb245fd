use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix must be square with order >= 1 (got {rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is singular to working precision")]
    Singular,

    #[error("zero diagonal entry at index {0}; the splitting matrix is singular")]
    ZeroDiagonal(usize),

    #[error("nonpositive diagonal entry {value} at index {index}")]
    NonPositiveDiagonal { index: usize, value: f64 },

    #[error("diagonal entry {value} at index {index} is not 1")]
    NonUnitDiagonal { index: usize, value: f64 },

    #[error("matrix has a negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("eigen-solve did not converge after {iterations} iterations (best estimate {estimate})")]
    NoConvergence { iterations: usize, estimate: f64 },

    #[error("Perron vector of an irreducible matrix has a non-positive entry {value} at {index}")]
    PerronPositivity { index: usize, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("sign precondition violated: {0}")]
    SignPrecondition(String),

    #[error("preconditioner {0} is identically zero")]
    ZeroPreconditioner(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("unknown theorem tag `{0}`")]
    UnknownTheorem(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("matrix market: {0}")]
    MatrixMarket(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
