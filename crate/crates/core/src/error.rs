use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The regularized normal matrix could not be factored.
    #[error("singular normal matrix (condition estimate {condition:.3e})")]
    Singular { condition: f64 },

    /// An iterative procedure ran past its configured cap.
    #[error("iteration cap of {cap} exceeded: {context}")]
    IterationCap { cap: usize, context: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
