use thiserror::Error;

/// Errors raised by the library. Every fallible operation returns [`Result`].
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("size limit exceeded: {requested} > {limit}")]
    SizeLimit { requested: usize, limit: usize },

    #[error("singular local filter: Schmidt coefficient {coefficient:e} at index {index} inside the support")]
    SingularFilter { index: usize, coefficient: f64 },

    #[error("projection onto the witness support has trace {0:e}")]
    DegenerateProjection(f64),

    #[error("state has a positive partial transpose (min eigenvalue {min_eigenvalue:e})")]
    NotNpt { min_eigenvalue: f64 },

    #[error("no sign change on [{lo}, {hi}] (values {f_lo:e}, {f_hi:e})")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
