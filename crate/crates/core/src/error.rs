use thiserror::Error;

/// Errors reported by the expansion, audit, and verification operations.
///
/// Numeric payloads are rendered to decimal strings at construction so the
/// error type stays independent of the scalar the caller picked.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("denominator must be at least 1")]
    ZeroDenominator,

    #[error("numerator must be at least 1")]
    ZeroNumerator,

    #[error("input must satisfy p >= q >= 1, got p={p}, q={q}")]
    ImproperRatio { p: String, q: String },

    #[error("expansion must contain at least one term")]
    EmptyExpansion,

    #[error("malformed trace at step {index}: {detail}")]
    MalformedTrace { index: usize, detail: String },

    #[error("invalid {name}: {detail}")]
    InvalidParameter { name: &'static str, detail: String },

    #[error("empty range: {detail}")]
    EmptyRange { detail: String },

    #[error("range too large: {detail}")]
    RangeTooLarge { detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
