use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("infeasible construction: {0}")]
    Infeasible(String),

    /// The quantizer could not reach its distortion target. Carries the best
    /// attempt so the caller can decide whether to accept it.
    #[error("quantizer shortfall: best distortion {best:.5} exceeds target {target:.5} + tolerance {tolerance:.5}")]
    QuantizerShortfall {
        best: f64,
        target: f64,
        tolerance: f64,
        result: Box<crate::quantizer::QuantizationResult>,
    },

    #[error("decode chain error: {0}")]
    Chain(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("in trial {trial}, link {link}: {source}")]
    Trial {
        trial: usize,
        link: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
