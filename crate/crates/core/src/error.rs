use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),

    /// The radicand of the objective went negative beyond rounding noise.
    #[error("radicand {value:e} is negative at beta = {beta}")]
    NumericalDomain { beta: f64, value: f64 },

    /// Derivatives are undefined where the radicand vanishes.
    #[error("derivative is singular at beta = {beta}")]
    Singular { beta: f64 },

    #[error("config error at {location}: {message}")]
    Config { location: String, message: String },

    #[error("usage: {0}")]
    Usage(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
