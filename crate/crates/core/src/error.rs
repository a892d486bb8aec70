use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("site count {0} is not a power of two")]
    NotPowerOfTwo(usize),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("length mismatch: grid has {expected} sites, got {actual} values")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("grids differ: {0}")]
    GridMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("aliasing: {0}")]
    Aliasing(String),

    #[error("numerical blow-up at time {time}: {detail}")]
    Blowup { time: f64, detail: String },

    #[error("snapshot spacing {spacing} too coarse; need at most {required}")]
    SpacingTooCoarse { spacing: f64, required: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
