use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("value {value:e} overflows format {format} (max finite {max:e})")]
    Overflow {
        value: f64,
        format: String,
        max: f64,
    },

    #[error("non-finite input {0}")]
    NonFinite(f64),

    #[error("invalid precision format: {0}")]
    InvalidFormat(String),

    #[error("invalid scheme: {0}")]
    InvalidScheme(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty operand")]
    Empty,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// `|b|^T |c| = 0`; the adaptive grouping is undefined.
    #[error("zero magnitude sum")]
    ZeroMagnitude,

    #[error("rank-deficient sketch (|r_kk| = {0:e})")]
    DegenerateSketch(f64),

    #[error("{0} did not converge")]
    NoConvergence(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported geometry: {0}")]
    UnsupportedGeometry(String),

    #[error("subspace is not orthonormal (residual {0:e})")]
    NotOrthonormal(f64),

    #[error("DOA sampling infeasible after {0} rejections")]
    Infeasible(u64),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
