use thiserror::Error;

/// Errors raised by the reconstruction pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("probability {value} at ({row}, {col}) outside [0, 1]")]
    Domain { row: usize, col: usize, value: f64 },
    #[error("statistics table is empty ({rows}x{cols})")]
    EmptyTable { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("rank deficiency: {0}")]
    RankDeficiency(String),
    #[error("invalid mixture weights: {0}")]
    Weight(String),
    #[error("pairing is degenerate: {0}")]
    DegeneratePairing(String),
    #[error("element is not a projection (residual {residual:.3e})")]
    NotAProjection { residual: f64 },
    #[error("unsupported model: {0}")]
    UnsupportedModel(String),
    #[error("unsupported size: {0}")]
    Size(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for this error: 1 for bad input, 2 for pipeline
    /// failures, 3 for internal faults.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_)
            | Error::Domain { .. }
            | Error::EmptyTable { .. }
            | Error::Size(_)
            | Error::Config(_)
            | Error::Io(_) => 1,
            Error::RankDeficiency(_)
            | Error::DegeneratePairing(_)
            | Error::InvalidModel(_)
            | Error::UnsupportedModel(_) => 2,
            Error::DimensionMismatch { .. } | Error::Weight(_) | Error::NotAProjection { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
