use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("nonconvergent factor: exponent {0} is not a nonzero nonnegative vector")]
    NonconvergentFactor(String),
    #[error("intersection matrix is not unimodular (det = {0})")]
    NotUnimodular(String),
    #[error("not the dual graph of a sequence of point blow-ups: {0}")]
    NotABlowupGraph(String),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("valuation of the zero function is undefined")]
    UndefinedValuation,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("blow-up center not found: {0}")]
    CenterNotFound(String),
    #[error("corner is ambiguous: {0}")]
    CornerAmbiguous(String),
    #[error("zero polynomial has no multiplicity")]
    ZeroPolynomial,
    #[error("non-reduced input: {0}")]
    NonreducedInput(String),
    #[error("schema error: {0}")]
    Schema(String),
}

impl Error {
    /// Validation-type errors (bad input, broken graph invariants).
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::PrecisionExhausted(_) | Error::InternalInconsistency(_)
        )
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Schema(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
