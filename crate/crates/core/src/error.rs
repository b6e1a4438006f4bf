use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("division by zero at point {point:?}")]
    DivisionByZero { point: Vec<f64> },

    #[error("non-finite value at point {point:?}")]
    NonFinite { point: Vec<f64> },

    #[error("cost guard: {0}")]
    CostGuard(String),

    #[error("method mismatch: {0}")]
    MethodMismatch(String),

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("box too small: {0}")]
    BoxTooSmall(String),

    #[error("estimate did not converge: {0}")]
    Unconverged(String),

    #[error("tail guard: |z| = {norm} exceeds {limit}")]
    TailGuard { norm: f64, limit: f64 },

    #[error("quadrature unconverged: {0}")]
    QuadratureUnconverged(String),

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("malformed data: {0}")]
    Format(String),
}

impl Error {
    /// True for errors raised while parsing symbol text.
    pub fn is_parse_error(&self) -> bool {
        matches!(self, Error::Syntax { .. } | Error::UnknownIdentifier(_) | Error::DimensionMismatch(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
