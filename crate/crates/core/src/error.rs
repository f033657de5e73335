use thiserror::Error;

/// Failure modes shared by every module.
///
/// The variants map onto the CLI exit codes: `Argument` and `Precondition`
/// are validation failures, the rest are numeric failures.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("outside the domain: {0}")]
    Domain(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("decomposition failed: {0}")]
    Decomposition(String),
    #[error("iterate left the cone at node {node} (step floor reached)")]
    ConeExit { node: usize },
    #[error("continuation failed at level {level} (epsilon = {epsilon}): {source}")]
    Continuation {
        level: usize,
        epsilon: f64,
        source: Box<Error>,
    },
}

impl Error {
    /// True for errors caused by bad input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Argument(_) | Error::Precondition(_) => true,
            Error::Continuation { source, .. } => source.is_validation(),
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
