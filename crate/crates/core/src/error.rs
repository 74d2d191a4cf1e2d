use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus is reducible over GF({p})")]
    Reducible { p: u64 },
    #[error("invalid field parameters: {0}")]
    InvalidField(String),
    #[error("no primitive element found")]
    NoPrimitiveFound,
    #[error("element is not primitive: {0}")]
    NotPrimitive(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },
    #[error("matrix is rank deficient")]
    RankDeficient,
    #[error("code has no parity-check matrix")]
    NoParityCheck,
    #[error("invalid code: {0}")]
    InvalidCode(String),
    #[error("index set has {got} entries, expected {expected}")]
    BadCardinality { expected: usize, got: usize },
    #[error("{what}: estimated {estimate} exceeds budget {budget}")]
    BudgetExceeded {
        what: &'static str,
        estimate: String,
        budget: u64,
    },
    #[error("generator matrix is not delay-free")]
    NotDelayFree,
    #[error("received symbols are not a corrupted codeword (inconsistent at block {block})")]
    InconsistentStream { block: usize },
    #[error("divisibility violated: {0}")]
    DivisibilityViolated(String),
    #[error("required extension degree {0} exceeds the configured cap")]
    FieldTooLarge(String),
    #[error("random search exhausted after {0} attempts")]
    SearchExhausted(u64),
    #[error("parse error at {position}: {message}")]
    Parse { position: String, message: String },
    #[error("length mismatch: {0}")]
    LengthMismatch(String),
    #[error("message coefficients are not uniquely determined")]
    NonUnique,
    #[error("{0}")]
    Incomplete(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable identifier, used by the CLI error JSON.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotPrime(_) => "not_prime",
            Error::Reducible { .. } => "reducible",
            Error::InvalidField(_) => "invalid_field",
            Error::NoPrimitiveFound => "no_primitive_found",
            Error::NotPrimitive(_) => "not_primitive",
            Error::DivisionByZero => "division_by_zero",
            Error::FieldMismatch => "field_mismatch",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::RankDeficient => "rank_deficient",
            Error::NoParityCheck => "no_parity_check",
            Error::InvalidCode(_) => "invalid_code",
            Error::BadCardinality { .. } => "bad_cardinality",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::NotDelayFree => "not_delay_free",
            Error::InconsistentStream { .. } => "inconsistent_stream",
            Error::DivisibilityViolated(_) => "divisibility_violated",
            Error::FieldTooLarge(_) => "field_too_large",
            Error::SearchExhausted(_) => "search_exhausted",
            Error::Parse { .. } => "parse_error",
            Error::LengthMismatch(_) => "length_mismatch",
            Error::NonUnique => "non_unique",
            Error::Incomplete(_) => "incomplete",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }

    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }

    pub(crate) fn parse(position: impl ToString, message: impl Into<String>) -> Self {
        Error::Parse {
            position: position.to_string(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
