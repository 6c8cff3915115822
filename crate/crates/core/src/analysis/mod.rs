//! Win ratios, rank correlation and the residualized capability matrix.

mod capability;
mod pairwise;
mod stats;
pub mod leaderboard;

use thiserror::Error;

pub use capability::{residual_capability_matrix, CapabilityMatrix};
pub use pairwise::{alignment, read_annotations, win_ratios, write_matrix_csv, Alignment, Outcome, PairRecord, PairwiseTable};
pub use stats::{average_ranks, pearson, spearman};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("model `{0}` never appears in the table")]
    UndefinedRatio(String),
    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("invalid pairwise record: {0}")]
    InvalidRecord(String),
    #[error("input: {0}")]
    Input(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
