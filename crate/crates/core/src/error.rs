use thiserror::Error;

/// Errors produced by the library. Column indices in messages are 1-based.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix shape mismatch: {0}")]
    Shape(String),

    #[error("matrix entry at ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("rows are not orthonormal: max |AA^T - I| = {deviation:e} exceeds tolerance {tol:e}")]
    NotOrthonormal { deviation: f64, tol: f64 },

    #[error("row {row} is linearly dependent on previous rows (residual norm {residual:e})")]
    RankDeficient { row: usize, residual: f64 },

    #[error("matrix is not symmetric: |S[{row},{col}] - S[{col},{row}]| = {gap:e}")]
    NotSymmetric { row: usize, col: usize, gap: f64 },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("subset is empty")]
    EmptySubset,

    #[error("column index {index} is out of range 1..={m}")]
    IndexOutOfRange { index: usize, m: usize },

    #[error("column index {index} appears more than once")]
    DuplicateIndex { index: usize },

    #[error("M = {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),

    #[error("epsilon must lie in (0, 1), got {0}")]
    InvalidEpsilon(f64),

    #[error("parent subset of size {0} cannot be halved (need at least 2)")]
    ParentTooSmall(usize),

    #[error("no Bernoulli draw accepted within {retries} retries")]
    RetriesExhausted { retries: usize },

    #[error("subset size {size} is out of range 1..={m}")]
    SizeOutOfRange { size: usize, m: usize },

    #[error("sign vector invalid: {0}")]
    BadSignVector(String),

    #[error("weights invalid: {0}")]
    BadWeights(String),

    #[error("vector lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("could not populate quasimetric ball: {0}")]
    SamplingFailed(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("full index set does not certify epsilon {epsilon}: achieved {achieved:e}")]
    Uncertifiable { epsilon: f64, achieved: f64 },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
