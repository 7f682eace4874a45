use thiserror::Error;

/// Errors raised by the spline, analysis, codec, adversary and simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("abscissae must be strictly increasing and lie in [0, 1]: {0}")]
    InvalidAbscissae(String),
    #[error("need at least {required} points, got {actual}")]
    TooFewPoints { required: usize, actual: usize },
    #[error("points and values differ in length ({points} vs {values})")]
    LengthMismatch { points: usize, values: usize },
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("point {0} lies outside the domain [0, 1]")]
    OutOfDomain(f64),
    #[error("smoothing parameter {0} out of range")]
    InvalidLambda(f64),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("bandwidth too narrow: N * lambda^(1/4) = {0} must exceed 1")]
    BandwidthTooNarrow(f64),
    #[error("hypothesis not met: ||f||_2 / ||f'||_2 = {0} is not below 1")]
    HypothesisNotMet(f64),
    #[error("exponent a = {0} must lie in [0, 1)")]
    InvalidExponent(f64),
    #[error("response {index} component {component} = {value} outside [-{bound}, {bound}]")]
    ResponseOutOfRange {
        index: usize,
        component: usize,
        value: f64,
        bound: f64,
    },
    #[error("corruption budget {gamma} exceeds worker count {workers}")]
    BudgetExceeded { gamma: usize, workers: usize },
    #[error("ill-conditioned attack polynomial: {0}")]
    IllConditioned(String),
    #[error("unknown compute function `{0}`")]
    NotFound(String),
    #[error("invalid task: {0}")]
    InvalidTask(String),
    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("slope undefined: {0}")]
    SlopeUndefined(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn config(field: &str, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
