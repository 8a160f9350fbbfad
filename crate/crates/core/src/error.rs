use thiserror::Error;

/// Errors raised anywhere in the benchmark engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    Shape {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("label {label} out of range at row {row} (expected 0 or 1)")]
    LabelOutOfRange { row: usize, label: usize },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("non-finite training loss at epoch {epoch}, batch {batch}")]
    Diverged { epoch: usize, batch: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph {id}: {}", violations.join("; "))]
    InvalidGraph { id: String, violations: Vec<String> },

    #[error("no graphs")]
    NoGraphs,

    #[error("empty {0}")]
    Empty(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
