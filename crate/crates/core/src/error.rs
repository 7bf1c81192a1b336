use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ambient size mismatch: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix of size {rows}x{cols} exceeds the dense limit of {limit}x{limit}")]
    TooLarge {
        rows: usize,
        cols: usize,
        limit: usize,
    },

    #[error("cannot parse subset {input:?}: {reason}")]
    SubsetParse { input: String, reason: String },

    /// Exact division by m_K failed while multiplying basis classes.
    #[error("non-integral structure constant: pi{j} * pi{k} has coefficient {coeff} at pi{at}, not divisible by m = {m}")]
    NonIntegral {
        j: String,
        k: String,
        at: String,
        coeff: String,
        m: String,
    },

    #[error("pi classes are not a basis of degree {degree} (n = {n}): {reason}")]
    PiNotBasis {
        n: usize,
        degree: usize,
        reason: String,
    },

    #[error("no integral coordinates: {0}")]
    NoIntegralSolution(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("cache I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("cache format error: {0}")]
    Json(#[from] serde_json::Error),
}
