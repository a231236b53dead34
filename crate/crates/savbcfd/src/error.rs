use thiserror::Error;

/// Numerical failures surfaced by solvers, steppers and drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("linear solver did not converge: {iters} iterations, relative residual {rel_residual:.3e}")]
    SolverDiverged { iters: usize, rel_residual: f64 },

    #[error("non-finite value encountered in {context}")]
    NonFinite { context: &'static str },

    #[error("rank-one correction denominator too small: {denom:.3e}")]
    DegenerateRankOne { denom: f64 },

    #[error("dense assembly refused: {n} unknowns exceeds the {max} guard")]
    DenseTooLarge { n: usize, max: usize },

    #[error(
        "adaptive controller failed: e = {e:.3e} > tol after {retries} retries at dt = {dt:.3e}"
    )]
    ControllerFailed { retries: usize, e: f64, dt: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
