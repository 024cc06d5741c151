use thiserror::Error;

/// Failure while evaluating a field or an operator at a point.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("domain violation in `{op}` at value {value}")]
    Domain { op: &'static str, value: f64 },
    #[error("non-finite value produced")]
    NonFinite,
    #[error("point has dimension {found}, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("the origin is excluded (|x| must be positive)")]
    Origin,
    #[error("dimension {0} is outside the supported range 1..=9")]
    UnsupportedDimension(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("invalid field parameter: {0}")]
    InvalidParameter(String),
    #[error("cannot parse field spec `{spec}`: {reason}")]
    Parse { spec: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error("expression needs derivatives of order {order}, at most 2 are available")]
    OrderOverflow { order: usize },
    #[error("n ≥ {min} required, got n = {n}")]
    Dimension { n: usize, min: usize },
    #[error("unsupported operator composition: {0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("Newton iteration did not converge for N = {order} after {iterations} iterations")]
    NoConvergence { order: usize, iterations: usize },
    #[error("unsupported quadrature request: {0}")]
    Unsupported(String),
    #[error("evaluation failed at x = {location:?}: {source}")]
    Eval {
        location: Vec<f64>,
        #[source]
        source: EvalError,
    },
    #[error("non-finite partial sum in term {term}")]
    NonFinite { term: usize },
    #[error("malformed rule file: {0}")]
    Parse(String),
}

/// Library-level error.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("inconsistent input: {0}")]
    Inconsistent(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
