use thiserror::Error;

use crate::diagnostics::lp::LpError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {got}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("unsupported instance: {0}")]
    Unsupported(String),

    #[error("feasible region is empty")]
    Infeasible,

    #[error("objective is not convex; reference optimum undefined")]
    NonConvex,

    #[error("instance generation failed: {0}")]
    Generation(String),

    #[error("certificate mismatch: {0}")]
    CertificateMismatch(String),

    #[error(transparent)]
    Lp(#[from] LpError),
}

pub(crate) fn check_dim(context: &'static str, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected,
            got,
        })
    }
}
