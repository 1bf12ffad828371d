use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid level scheme, pulse list, protocol or run configuration.
    #[error("configuration error: {0}")]
    Config(String),
    /// Propagator or integrator failure.
    #[error("numerical error: {0}")]
    Numerical(String),
    /// Argument outside the domain where a closed form is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// Input data does not satisfy an operation's precondition.
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
