use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid Schreier graph: {0}")]
    InvalidSchreier(String),

    #[error("empty graph has no neighborhood statistics")]
    EmptyGraph,

    #[error("mismatched parameters: {0}")]
    Mismatch(String),

    #[error("resource cap exceeded: {what} (cap {cap})")]
    CapExceeded { what: String, cap: usize },

    #[error("invalid word: {0}")]
    InvalidWord(String),

    #[error("not a pseudo-subgroup: {0}")]
    NotPseudoSubgroup(String),

    #[error("invalid local test: {0}")]
    InvalidTest(String),

    #[error("ball radius {have} is smaller than required {need}")]
    RadiusTooSmall { have: usize, need: usize },

    #[error("window radius {have} is smaller than required {need}")]
    WindowTooSmall { have: usize, need: usize },

    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
