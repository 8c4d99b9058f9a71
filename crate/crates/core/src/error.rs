use thiserror::Error;

pub type Result<T, E = WicksellError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum WicksellError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument outside domain: {0}")]
    Domain(String),

    #[error("moment of order {order} diverges")]
    DivergentMoment { order: u32 },

    #[error("section density is infinite at x = {x}")]
    SingularDensity { x: f64 },

    #[error("quadrature did not converge at x = {abscissa} (estimate {value}, error {error})")]
    Quadrature { abscissa: f64, value: f64, error: f64 },

    #[error("cdf underflows at s = {s}")]
    Underflow { s: f64 },

    #[error("degenerate threshold: {0}")]
    DegenerateThreshold(String),

    #[error("resource budget exceeded: {0}")]
    Resource(String),

    #[error("degenerate normalizing scale: {0}")]
    Scale(String),

    #[error("unsupported case: {0}")]
    Unsupported(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
