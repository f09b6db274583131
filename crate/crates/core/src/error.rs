use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("polynomials live over different generator tables")]
    TableMismatch,
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("generator `{0}` has no registered variational differential")]
    MissingDifferential(String),
    #[error("expected an odd coordinate, `{0}` is even")]
    EvenCoordinate(String),
    #[error("input must have form degree 0")]
    FormDegree,
    #[error("quadratic core is degenerate; kernel vector {kernel:?} over {coords:?}")]
    DegenerateQuadraticCore { coords: Vec<String>, kernel: Vec<String> },
    #[error("integrand is not polynomial after gauge fixing: {0}")]
    NonPolynomial(String),
    #[error("logarithm undefined: {0}")]
    LogDomain(String),
    #[error("gauge-fixed partition function vanishes")]
    DegenerateGauge,
    #[error("structural check failed: {0}")]
    Structure(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
