use thiserror::Error;

use crate::train::TrainReport;

pub type Result<T> = std::result::Result<T, PaucError>;

#[derive(Debug, Error)]
pub enum PaucError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("dataset has {positives} positive and {negatives} negative instances; both classes are required")]
    EmptyClass { positives: usize, negatives: usize },

    #[error("dimension mismatch: expected at most {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid FPR interval [{alpha}, {beta}]: {reason}")]
    InvalidInterval { alpha: f64, beta: f64, reason: String },

    #[error(
        "FPR interval [{alpha}, {beta}] is degenerate for n = {n} negatives (j_alpha = {j_alpha}, j_beta = {j_beta})"
    )]
    DegenerateInterval {
        alpha: f64,
        beta: f64,
        n: usize,
        j_alpha: usize,
        j_beta: usize,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("instance too large for exhaustive search: {0}")]
    SizeGuard(String),

    #[error("training did not converge within {iterations} iterations")]
    NotConverged {
        iterations: usize,
        report: Box<TrainReport>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
