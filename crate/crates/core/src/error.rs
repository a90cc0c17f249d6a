use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("size error: {0}")]
    Size(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} did not converge after {iterations} iterations (last iterate {last}, residual {residual:e})")]
    Convergence {
        what: &'static str,
        iterations: usize,
        last: Complex64,
        residual: f64,
    },

    #[error("QR iteration did not converge after {iterations} iterations; undeflated block rows {lo}..={hi}")]
    EigenConvergence { iterations: usize, lo: usize, hi: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("postcondition failed: {0}")]
    Postcondition(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("unknown gate {0:?}")]
    UnknownGate(String),
}
