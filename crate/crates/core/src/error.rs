use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-range input.
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("resolution too coarse: {feature} is {size} but must be at least 4h = {min}")]
    TooCoarse { feature: String, size: f64, min: f64 },

    #[error("domain mask is empty")]
    EmptyMask,

    #[error("projection is ambiguous: distance {distance} is not below the reach estimate {reach}; {} near minimizers", near.len())]
    Ambiguous {
        point: Vec<f64>,
        distance: f64,
        reach: f64,
        near: Vec<Vec<f64>>,
    },

    #[error("matrix is singular or ill conditioned (condition number {0:e})")]
    Singular(f64),

    #[error("point {0:?} is outside the chart slab")]
    OutsideSlab(Vec<f64>),

    #[error("cubes are not connected in the adjacency graph")]
    Disconnected,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
