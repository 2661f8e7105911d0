use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("derivative order p must be odd and >= 1, got {0}")]
    InvalidDerivativeOrder(i64),

    #[error("series has nonzero constant term; formal exponential requires w[0] = 0")]
    NonzeroConstantTerm,

    #[error("series has constant term != 1; formal logarithm requires m[0] = 1")]
    ConstantTermNotOne,

    #[error("moment table too shallow: need n_max >= {need}, have {have}")]
    InsufficientDepth { need: usize, have: usize },

    #[error("numerical non-convergence: {0}")]
    NonConvergence(String),

    #[error("rank-deficient design matrix in least-squares fit")]
    RankDeficient,

    #[error("no root found in bracket [{lo}, {hi}]")]
    NoRoot { lo: String, hi: String },

    #[error("cache error: {0}")]
    Cache(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
