use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid scaling: {0}")]
    InvalidScaling(String),

    /// A configured size or work budget would be exceeded.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("dimension error: need a {need_labels}x{need_moves} matrix, have {have_labels}x{have_moves}")]
    Dimension { need_labels: u64, need_moves: u64, have_labels: u64, have_moves: u64 },

    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    NonConvergence { iterations: u64, residual: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }
}
