use thiserror::Error;

/// Errors raised by set construction, arithmetic and the checkers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("arithmetic overflow: {0}")]
    Overflow(String),

    #[error("operation requires a nonempty set")]
    EmptySet,

    #[error("set too small: need at least {needed} elements, got {got}")]
    TooSmall { needed: usize, got: usize },

    #[error("gcd of {{0}} is undefined for normalization")]
    ZeroSet,

    #[error("invalid multiplier/modulus {value}: {reason}")]
    InvalidModulus { value: i64, reason: &'static str },

    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: usize, right: usize },

    #[error("residue {value} out of range for modulus {modulus}")]
    ResidueOutOfRange { value: i64, modulus: usize },

    #[error("class index {index} out of range 1..={count}")]
    IndexOutOfRange { index: usize, count: usize },

    #[error("hypothesis not met: {0}")]
    Hypothesis(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown lemma id `{0}`")]
    UnknownLemma(String),

    #[error("search enumerated no sets (diameter too small for size?)")]
    EmptyEnumeration,

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn overflow(what: impl Into<String>) -> Error {
    Error::Overflow(what.into())
}
