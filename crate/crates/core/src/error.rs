use thiserror::Error;

/// Failures surfaced by the library. Every variant carries enough context to
/// reproduce the offending call.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{d} is not a fundamental discriminant: divisible by the square {square}")]
    NotFundamental { d: i64, square: i64 },
    #[error("{d} is not a discriminant (must be 0 or 1 mod 4)")]
    NotDiscriminant { d: i64 },
    #[error("not a positive 2-plane")]
    NotPositivePlane,
    #[error("cycle is closed (non-split); no rational endpoints")]
    NonSplit,
    #[error("q(x) = {0} is not positive")]
    NotPositive(String),
    #[error("no primitive: jump has highest-weight component")]
    HighestWeightComponent,
    #[error("index {index} out of range {lo}..={hi}")]
    IndexOutOfRange { index: i64, lo: i64, hi: i64 },
    #[error("weight mismatch: {0} vs {1}")]
    WeightMismatch(u32, u32),
    #[error("enumeration region is unbounded: {0}")]
    Unbounded(String),
    #[error("comparison up to {requested} exceeds truncation {available}")]
    Truncation { requested: String, available: String },
    #[error("comparison target not implemented: {0}")]
    NotImplemented(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
