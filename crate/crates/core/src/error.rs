use thiserror::Error;

/// Errors produced by the spin-frame toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unsupported dimension {0} (only single-spin operators are supported here)")]
    UnsupportedDimension(usize),

    #[error("{requested} spins exceeds the active cap of {cap}")]
    CapExceeded { requested: usize, cap: usize },

    #[error("pair enumeration would produce {count} pairs, above the cap of {cap}")]
    EnumerationTooLarge { count: u128, cap: usize },

    #[error("angle undefined for a zero-length Bloch vector")]
    UndefinedAngle,

    #[error("signatures are not comparable: {0}")]
    IncomparableSignatures(String),

    #[error("numerical consistency check failed: {0}")]
    NumericalConsistency(String),

    #[error("malformed document: {0}")]
    MalformedDocument(String),

    #[error("amplitude count {found} does not match 2^{num_spins} = {expected}")]
    LengthMismatch {
        num_spins: usize,
        expected: usize,
        found: usize,
    },

    #[error("state norm {norm} deviates from 1 by more than {tolerance}")]
    NormViolation { norm: f64, tolerance: f64 },
}

impl Error {
    /// True for errors caused by caller-supplied input (as opposed to a
    /// failed numerical invariant).
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::NumericalConsistency(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
