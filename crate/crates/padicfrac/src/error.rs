use num_bigint::BigInt;
use thiserror::Error;

/// Errors surfaced by the library. Internal precision management never
/// produces an error; callers only see input-validation failures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("D = {0} must be positive")]
    NonPositiveD(BigInt),
    #[error("D = {0} is a perfect square")]
    SquareD(BigInt),
    #[error("sqrt({d}) does not lie in Q_{p}")]
    NotInQp { p: u64, d: BigInt },
    #[error("denominator Q must be nonzero")]
    ZeroDenominator,
    #[error("operation undefined for the zero value")]
    ZeroValue,
    #[error("operation requires a quadratic irrational (D != 0)")]
    RationalInput,
    #[error("algorithm {0} requires a quadratic irrational input")]
    QuadraticOnly(String),
    #[error("block length r must be at least 3, got {0}")]
    BlockTooShort(u32),
    #[error("value {0} is not an element of Z[1/p]")]
    NotPAdicInteger(String),
    #[error("max_steps must be at least 1")]
    BadStepCap,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
