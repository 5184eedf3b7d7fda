use thiserror::Error;

#[derive(Debug, Error)]
pub enum IdncError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid transmission plan: {0}")]
    InvalidPlan(String),

    #[error("reception outcome does not match the plan's targeted set: {0}")]
    OutcomeMismatch(String),

    #[error("graph has {vertices} vertices, above the exact-solver limit of {limit}; use the greedy solver")]
    ExactSizeLimit { vertices: usize, limit: usize },

    #[error("invalid expectation input: {0}")]
    InvalidExpectationInput(String),

    #[error("config file error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, IdncError>;
