//! Adaptive time stepping: a first-order reference step and a
//! Crank-Nicolson step are compared, the relative m-norm difference drives
//! the update `A_dp(e, dt) = rho * sqrt(tol / e) * dt`, clamped to
//! `[dt_min, dt_max]`. Rejected steps are retried at the reduced size;
//! a step already at `dt_min` is accepted regardless and flagged.

use crate::error::{Error, Result};
use crate::grid::{norm_m, Grid};
use crate::linsolve::LinearSolverConfig;
use crate::model::{EnergyModel, SavState};
use crate::stepper::{step_be, step_cn, StepReport};

#[derive(Debug, Clone, Copy)]
pub struct AdaptiveConfig {
    pub dt_min: f64,
    pub dt_max: f64,
    /// Reference tolerance on the relative step difference.
    pub tol: f64,
    /// Safety coefficient in the update formula.
    pub rho: f64,
    /// Cap on rejected retries of a single step.
    pub max_retries: usize,
}

impl AdaptiveConfig {
    /// # Panics
    /// Panics if the bounds or coefficients are out of range.
    pub fn new(dt_min: f64, dt_max: f64, tol: f64, rho: f64, max_retries: usize) -> Self {
        assert!(dt_min > 0.0 && dt_min <= dt_max, "need 0 < dt_min <= dt_max");
        assert!(tol > 0.0, "tol must be positive");
        assert!(rho > 0.0 && rho <= 1.0, "need 0 < rho <= 1");
        assert!(max_retries >= 1);
        AdaptiveConfig { dt_min, dt_max, tol, rho, max_retries }
    }

    pub fn clamp(&self, dt: f64) -> f64 {
        dt.max(self.dt_min).min(self.dt_max)
    }
}

impl Default for AdaptiveConfig {
    fn default() -> Self {
        AdaptiveConfig::new(1e-5, 1e-2, 1e-3, 0.9, 50)
    }
}

/// Unclamped step update `rho * sqrt(tol / e) * dt`. A vanishing error
/// (below `1e-14 * tol`) means maximal growth; infinity is returned and the
/// caller's clamp turns it into `dt_max`.
pub fn a_dp(e: f64, dt: f64, cfg: &AdaptiveConfig) -> f64 {
    assert!(dt > 0.0);
    if e < 1e-14 * cfg.tol {
        return f64::INFINITY;
    }
    cfg.rho * (cfg.tol / e).sqrt() * dt
}

/// Result of one accepted adaptive step.
#[derive(Debug, Clone)]
pub struct AdaptiveOutcome {
    pub state: SavState,
    pub accepted_dt: f64,
    /// Clamped proposal for the next step.
    pub next_dt: f64,
    pub retries: usize,
    /// Relative error estimate of the accepted step.
    pub e: f64,
    /// True when the step was accepted at `dt_min` with `e > tol`.
    pub forced: bool,
    pub report: StepReport,
}

/// One step of the adaptive procedure: compute the first-order reference
/// and the Crank-Nicolson solution at `dt`, accept or shrink-and-retry,
/// and propose the next step size. The controller always advances with the
/// Crank-Nicolson solution; the reference is only used for the estimate.
///
/// `dt` normally lies in `[dt_min, dt_max]`; a caller may pass a smaller
/// value to land on a requested output time, and such a step (like one at
/// `dt_min`) is accepted unconditionally.
pub fn adaptive_step(
    state: &SavState,
    dt: f64,
    model: &EnergyModel,
    grid: &Grid,
    cfg: &AdaptiveConfig,
    solver: &LinearSolverConfig,
) -> Result<AdaptiveOutcome> {
    let mut dt_cur = dt.min(cfg.dt_max);
    let mut retries = 0;
    loop {
        let (ref_state, _, _) = step_be(state, dt_cur, model, grid, solver)?;
        let (cn_state, _, report) = step_cn(state, dt_cur, model, grid, solver)?;

        let mut diff = ref_state.z.clone();
        diff.axpy(-1.0, &cn_state.z);
        let denom = norm_m(&cn_state.z, grid);
        let e = if denom > 0.0 { norm_m(&diff, grid) / denom } else { norm_m(&diff, grid) };

        let proposal = cfg.clamp(a_dp(e, dt_cur, cfg));
        let at_floor = dt_cur <= cfg.dt_min * (1.0 + 1e-12);
        if e > cfg.tol && !at_floor {
            if retries >= cfg.max_retries {
                return Err(Error::ControllerFailed { retries, e, dt: dt_cur });
            }
            retries += 1;
            dt_cur = proposal;
            continue;
        }
        return Ok(AdaptiveOutcome {
            state: cn_state,
            accepted_dt: dt_cur,
            next_dt: proposal,
            retries,
            e,
            forced: e > cfg.tol,
            report,
        });
    }
}
