//! Crate-wide error type. Numeric routines that can return a partial answer
//! (root solver, IRLS) carry the best iterate in the error so callers can
//! inspect or log it.

use num_complex::Complex;
use thiserror::Error;

use crate::num::Real;

#[derive(Debug, Error)]
pub enum Error<R: Real> {
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("unsupported: {0}")]
    Capability(String),

    #[error("rank breakdown at degree {degree} (residual norm {residual:e})")]
    RankBreakdown { degree: usize, residual: R },

    #[error("{context}: iteration limit reached (residual {residual:e})")]
    IterationLimit {
        context: String,
        residual: R,
        best: Vec<Complex<R>>,
    },

    #[error("root solver stalled after {sweeps} sweeps (max correction {max_correction:e})")]
    RootsUnconverged {
        sweeps: usize,
        max_correction: R,
        best: Vec<Complex<R>>,
    },

    #[error("undefined statistic: {0}")]
    UndefinedStatistic(String),

    #[error("config: {0}")]
    Config(String),

    #[error("run degraded: {0}")]
    Run(String),

    #[error("schema: {0}")]
    Schema(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, R> = std::result::Result<T, Error<R>>;
