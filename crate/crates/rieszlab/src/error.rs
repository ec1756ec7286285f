//! Error taxonomy shared by the whole laboratory.
//!
//! The split matters to callers: `Domain` means the request itself was outside
//! an operation's contract (wrong parity, exponent out of range), `Numerical`
//! means the request was legal but a tolerance could not be met (an iteration
//! cap, an unconverged extrapolation), and `Structural` means two objects that
//! must agree did not (grid mismatch, incompatible dimensions).  `Config` and
//! `Io` belong to the CLI surface.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    /// Arguments outside an operation's documented domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A tolerance or iteration budget was exhausted before convergence.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Two objects that must be compatible (grids, dimensions) are not.
    #[error("structural error: {0}")]
    Structural(String),

    /// A run configuration failed validation.
    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;

impl LabError {
    pub fn domain(msg: impl Into<String>) -> Self {
        LabError::Domain(msg.into())
    }
    pub fn numerical(msg: impl Into<String>) -> Self {
        LabError::Numerical(msg.into())
    }
    pub fn structural(msg: impl Into<String>) -> Self {
        LabError::Structural(msg.into())
    }
    pub fn config(msg: impl Into<String>) -> Self {
        LabError::Config(msg.into())
    }
}
