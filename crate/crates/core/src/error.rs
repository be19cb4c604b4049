use thiserror::Error;

/// Errors raised across the packing, evaluation and analysis pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error in `{source_id}` at line {line}: {message}")]
    Parse {
        source_id: String,
        line: usize,
        message: String,
    },

    #[error("invalid instance `{id}`: {message}")]
    Validation { id: String, message: String },

    #[error("count mismatch in `{source_id}`: expected {expected} {what}, found {found}")]
    CountMismatch {
        source_id: String,
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("contract violation by {heuristic} at step {step}: {message}")]
    ContractViolation {
        heuristic: String,
        step: usize,
        message: String,
    },

    #[error("heuristic {0} has no transcribed scoring body")]
    NotImplemented(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unknown heuristic `{0}`")]
    UnknownHeuristic(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
