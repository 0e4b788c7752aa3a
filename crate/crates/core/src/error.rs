use thiserror::Error;

/// Errors raised by the exact and numeric layers of the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    /// An operation would need three or more independent square roots.
    #[error("incompatible tower: radicands {0:?} span more than two independent square roots")]
    IncompatibleTower(Vec<i64>),

    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("series offsets {0} and {1} do not differ by an integer")]
    IncompatibleOffsets(String, String),

    #[error("expected an integer q-offset, found {0}")]
    FractionalOffset(String),

    #[error("series is not a unit: {0}")]
    NotAUnit(String),

    #[error("series has a nonzero constant term")]
    NonzeroConstant,

    #[error("leading coefficient is {0}, expected 1")]
    LeadingNotOne(String),

    #[error("insufficient truncation: need {needed} input terms, have {have}")]
    InsufficientTruncation { needed: usize, have: usize },

    #[error("level {0} is not supported")]
    UnsupportedLevel(u64),

    #[error("cusp {0} is not a cusp of level {1}")]
    CuspNotOfLevel(String, u64),

    #[error("form [{0}, {1}, {2}] is not positive definite")]
    NotPositiveDefinite(i64, i64, i64),

    #[error("-{d} is not congruent to {beta}^2 modulo {modulus}")]
    InconsistentSquareCondition { d: i64, beta: i64, modulus: i64 },

    #[error("no integer coprime to {0} represented by [{1}, {2}, {3}] inside the search box")]
    SearchExhausted(i64, i64, i64, i64),

    #[error("precision loss: {0}")]
    PrecisionLoss(String),

    #[error("recognition failed: value {value} has residual {residual}")]
    RecognitionFailed { value: String, residual: String },

    #[error("invalid form specification: {0}")]
    InvalidSpec(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
