use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("cycle graph needs at least 3 vertices, got {0}")]
    CycleTooShort(usize),

    #[error("not a valid Laplacian: {0}")]
    InvalidLaplacian(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("invalid support: {0}")]
    InvalidSupport(String),

    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("zero signal has no bandwidth")]
    ZeroSignal,

    #[error("zero coefficient supplied for frequency pair {0:?}")]
    ZeroCoefficient((usize, usize)),

    #[error("rank deficiency in {step}: rank {rank}, expected {expected}")]
    RankDeficient {
        step: &'static str,
        rank: usize,
        expected: usize,
    },

    #[error("sampling set is not qualified: rank {rank} < bandwidth {k}")]
    Unqualified { rank: usize, k: usize },

    #[error("sampled system is ill-conditioned (condition estimate {0:e})")]
    IllConditioned(f64),

    #[error("enumeration guard exceeded: {0}")]
    GuardExceeded(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
