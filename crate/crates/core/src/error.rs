use thiserror::Error;

/// Errors shared by the arithmetic, code construction and cryptosystem layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("element is not invertible")]
    NotInvertible,
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("generation failed: {0}")]
    Generation(String),
    #[error("no error weight satisfies the requested failure rate: {0}")]
    Selection(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_check(ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Dimension(what()))
    }
}
