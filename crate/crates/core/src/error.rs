use thiserror::Error;

/// Errors raised anywhere in the planning pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain of a mathematical operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A scenario (or a value derived from one) violated an invariant.
    #[error("invalid scenario: {0}")]
    Validation(String),

    /// Inverse dynamics could not recover a state at a trajectory node.
    #[error("degenerate trajectory at node {node}: {reason}")]
    Degenerate { node: usize, reason: String },

    #[error("failed to parse scenario: {0}")]
    Parse(#[from] toml::de::Error),

    #[error("failed to serialize: {0}")]
    Serialize(#[from] toml::ser::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// Attach a node index to a domain error raised while sampling.
    pub(crate) fn at_node(self, node: usize) -> Self {
        match self {
            Error::Domain(reason) | Error::Degenerate { reason, .. } => {
                Error::Degenerate { node, reason }
            }
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
