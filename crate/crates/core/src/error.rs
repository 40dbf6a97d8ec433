use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error in {func}: {msg}")]
    Domain { func: &'static str, msg: String },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid data: {0}")]
    Data(String),

    #[error("{0}")]
    Degenerate(String),

    #[error(
        "optimizer did not converge after {iterations} iterations (|grad|_inf = {grad_norm:e})"
    )]
    NonConvergence { iterations: usize, grad_norm: f64 },

    #[error("inconsistent fits: {0}")]
    InconsistentFits(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, msg: impl Into<String>) -> Error {
    Error::Domain {
        func,
        msg: msg.into(),
    }
}
