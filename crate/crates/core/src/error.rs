use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("mode index {mode} out of range for a space with {modes} modes")]
    ModeOutOfRange { mode: usize, modes: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: expected {expected} entries, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("closed form requires β=0 (got β={0}); the parity symmetry of the total system is broken")]
    ClosedFormRequiresZeroBeta(f64),

    #[error("operator is not a Riccati solution: residual {residual:e} exceeds tolerance {tolerance:e}")]
    NotRiccatiSolution { residual: f64, tolerance: f64 },

    #[error("similarity transform is numerically singular")]
    SingularTransform,

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("truncation too small: {0}")]
    Truncation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
