use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected n = {expected}, got n = {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("constraint is not graphical")]
    NotGraphical,

    #[error("invalid constraint: {0}")]
    InvalidConstraint(String),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("calibration did not converge after {iterations} iterations (residual {residual:.3e})")]
    CalibrationDiverged { iterations: usize, residual: f64 },

    #[error(
        "eigensolver did not converge after {iterations} iterations \
         (residual {residual:.3e}, best estimate {estimate})"
    )]
    NotConverged {
        iterations: usize,
        residual: f64,
        estimate: f64,
    },

    #[error("degree ratio is undefined for a graph without edges")]
    EmptyGraph,

    #[error("pairing sampler exceeded {0} rejections")]
    TooManyRejections(usize),

    #[error("enumeration is limited to n <= {cap}, got n = {n}")]
    EnumerationCap { n: usize, cap: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
