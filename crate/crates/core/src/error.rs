use thiserror::Error;

use crate::lp::LpError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("broken structure: {0}")]
    Structural(String),
    #[error("invalid region: {0}")]
    Region(String),
    #[error("invalid weight: {0}")]
    Sigma(String),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
