use thiserror::Error;

/// Errors raised by the enumerator library.
///
/// The variants are grouped by how a caller is expected to react: input
/// problems (`Invalid*`, `*Mismatch`, `Parse`), resource limits (`CapExceeded`)
/// and internal consistency failures (`Inconsistent`).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("local dimension {0} is not a supported prime")]
    UnsupportedDimension(u32),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("weight scheme mismatch: {0} vs {1}")]
    SchemeMismatch(String, String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid stabilizer group: {0}")]
    InvalidGroup(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("polynomial is not homogeneous of the required degree: {0}")]
    NotHomogeneous(String),

    #[error("{what} exceeds the configured cap ({size} > {cap})")]
    CapExceeded { what: String, size: u128, cap: u128 },

    #[error("contraction step {step} exceeds the memory cap ({estimate} bytes > {cap} bytes)")]
    MemoryCap { step: usize, estimate: u128, cap: u128 },

    #[error("coefficient is not rational: {0}")]
    NonRational(String),

    #[error("unknown leg `{0}`")]
    UnknownLeg(String),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;
