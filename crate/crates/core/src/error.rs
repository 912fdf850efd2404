use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("element {element} is outside the ground set of size {n}")]
    ElementOutOfRange { element: usize, n: usize },

    #[error("label {label} is outside 0..{k}")]
    LabelOutOfRange { label: usize, k: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("infeasible allocation: {0}")]
    InfeasibleAllocation(String),

    #[error("problem is infeasible: {0}")]
    Infeasible(String),

    #[error("instance too large: {0}")]
    TooLarge(String),

    #[error("{0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
