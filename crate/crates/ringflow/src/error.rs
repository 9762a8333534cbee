use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("value out of range: {0}")]
    Range(String),

    #[error("singularity: {0}")]
    Singularity(String),

    #[error("root bracketing failed: {0}")]
    Bracket(String),

    #[error("invalid ring domain: {0}")]
    InvalidDomain(String),

    #[error("singular assembly: {0}")]
    SingularAssembly(String),

    #[error("linear solver did not converge: {0}")]
    NoConvergence(String),

    #[error("fit failure: {0}")]
    Fit(String),

    #[error("sign-scan anomaly for k = {k}: found {crossings} sign changes")]
    SignScan { k: u32, crossings: usize },

    #[error("threshold case: {0}")]
    Threshold(String),

    #[error("inconsistent classification: {0}")]
    Inconsistent(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("newton divergence: {0}")]
    Newton(String),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
