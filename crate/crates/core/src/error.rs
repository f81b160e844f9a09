use thiserror::Error;

/// Errors raised by the library. Check failures are never errors; they are
/// reported as witnesses inside a [`crate::report::CheckReport`].
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("series order must be at least {min}, got {got}")]
    OrderTooSmall { min: usize, got: usize },

    #[error("series orders differ: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("argument `{0}` must be positive")]
    NonPositive(&'static str),

    #[error("prime factor {prime} exceeds the tau oracle limit {limit}")]
    PrimeBeyondLimit { prime: u64, limit: u64 },

    #[error("residue {residue} is out of range for modulus {modulus}")]
    ResidueOutOfRange { residue: u64, modulus: u64 },

    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),

    #[error("degenerate Lucas pair: {0}")]
    DegenerateLucas(String),

    #[error("Lucas index must be at least {min}, got {got}")]
    IndexTooSmall { min: u64, got: u64 },

    #[error("square root of a negative number")]
    NegativeSqrt,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("continued fraction of 2cos(2*pi*{k}/{p}) is unstable at {digits} digits")]
    PrecisionInstability { p: u64, k: u64, digits: u32 },

    #[error("unsupported modulus {0}: expected one of 3, 5, 7, 691")]
    UnsupportedEll(u64),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
