use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate polygon: {0}")]
    DegeneratePolygon(String),

    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    #[error("invalid rectangle ({x_min}, {y_min}, {x_max}, {y_max})")]
    InvalidRect {
        x_min: f64,
        y_min: f64,
        x_max: f64,
        y_max: f64,
    },

    #[error("sliding line at {position} does not meet the polygon boundary")]
    EncodingFailure { position: f64 },

    #[error("restored polygon is degenerate")]
    DegenerateRestoration,

    #[error("quadrilateral fit failed: {0}")]
    FitFailure(String),

    #[error("size mismatch: expected {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("invalid shape spec: {0}")]
    InvalidSpec(String),

    #[error("line does not intersect the shape")]
    NoIntersection,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
