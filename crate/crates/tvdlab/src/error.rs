use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown limiter `{0}`")]
    UnknownLimiter(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("grid too small: need at least {min} cells, got {got}")]
    GridTooSmall { min: usize, got: usize },
    #[error("flux `{flux}` cannot be used with `{kind}`: {reason}")]
    IncompatibleFlux {
        flux: String,
        kind: String,
        reason: String,
    },
    #[error("CFL estimate {estimate:.6} exceeds stability bound {bound:.6}")]
    CflRefusal { estimate: f64, bound: f64 },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
