use alloc::boxed::Box;
use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    #[error("non-finite state for particle {particle} after {context}")]
    Diverged {
        particle: usize,
        context: &'static str,
    },

    #[error("singular matrix: smallest singular value {smallest:e} vs largest {largest:e}")]
    Singular { smallest: f64, largest: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(&'static str),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("node {node}: {source}")]
    AtNode { node: usize, source: Box<Error> },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn at_node(self, node: usize) -> Self {
        Error::AtNode {
            node,
            source: Box::new(self),
        }
    }
}

pub(crate) fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}
