//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("time {t} outside trajectory domain ({min}, {max})")]
    OutOfDomain { t: f64, min: f64, max: f64 },

    #[error("point outside the instantaneous wall: {0}")]
    OutsideWall(String),

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("incompatible grid: {0}")]
    IncompatibleGrid(String),

    #[error("grid too coarse: {0}")]
    UnderResolved(String),

    #[error("tridiagonal solve breakdown: {0}")]
    SolveBreakdown(String),

    #[error("table parse error: {0}")]
    TableFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
