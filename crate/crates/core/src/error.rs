use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The requested degree window needs degrees the object was not built on.
    #[error("insufficient truncation: {0}")]
    InsufficientTruncation(String),

    #[error("d^2 != 0 in degree {degree}: {detail}")]
    DifferentialSquare { degree: i64, detail: String },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("algebra is not connected: {0}")]
    NotConnected(String),

    /// Word enumeration in some total degree would not terminate.
    #[error("unbounded word length: {0}")]
    UnboundedWords(String),

    #[error("coalgebra not conilpotent within bound {0}")]
    NotConilpotent(usize),

    #[error("finiteness condition violated: {0}")]
    Finiteness(String),

    #[error("coefficients are not a bimodule algebra")]
    NotAlgebraCoefficients,

    #[error("coefficient mismatch: {0}")]
    CoefficientMismatch(String),

    #[error("invalid group model: {0}")]
    InvalidModel(String),
}
