//! One time step of the SAV scheme with block-centered differences.
//!
//! Both flows share the same structure. With `L = -Laplacian + lambda I`,
//! `G = -I` (L2 flow) or `G = Laplacian` (H^-1 flow), `b = F'(base)` and
//! `s = 1/sqrt(E1^h(base))`, substituting the scalar update into the
//! discrete equations leaves one constant-coefficient operator
//! `A = I - kappa G L` and a rank-one coupling:
//!
//! `A z_new = c + gamma (b, z_new)_m G (s b)`
//!
//! Two solves with the same `A` (for `c` and for `G(s b)`) plus a scalar
//! recovery give the exact coupled solution. Crank-Nicolson uses
//! `kappa = dt M / 2` with `base` extrapolated to the half step; the
//! first-order backward-Euler variant used as the adaptive reference uses
//! `kappa = dt M` with `base = z_n`.

use crate::error::{Error, Result};
use crate::grid::{self, CellField, Grid};
use crate::linsolve::{solve_dense, solve_spd, LinearSolverConfig, SolveMethod};
use crate::model::{discrete_energy, e1_h, energy_of, EnergyModel, FlowType, SavState};
use crate::spectral::NeumannSpectral;

/// If the rank-one denominator falls below this, the step fails loudly.
pub const RANK_ONE_GUARD: f64 = 1e-12;

/// Discrete chemical potential approximation returned by a step (at the
/// half step for Crank-Nicolson, at the new level for backward Euler).
pub type WField = CellField;

/// Per-step diagnostics.
#[derive(Debug, Clone)]
pub struct StepReport {
    /// Step size actually taken.
    pub dt: f64,
    pub energy_before: f64,
    pub energy_after: f64,
    /// `(E_d(new) - E_d(old)) / dt`
    pub dissipation_lhs: f64,
    /// `-M ||dW||_TM^2` (H^-1) or `-M ||W||_m^2` (L2)
    pub dissipation_rhs: f64,
    /// `(z_new, 1)_m`
    pub mass: f64,
    pub solver_iters_1: usize,
    pub solver_iters_2: usize,
    /// Max-norm residual of the three discrete equations, normalized by
    /// `max(1, ||z_new||_inf)`.
    pub residual_scheme: f64,
    /// Scale factor such that `residual_scheme <= rel_tol * cond_factor`
    /// for a solve meeting its tolerance.
    pub cond_factor: f64,
    pub e1_clamped: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    CrankNicolson,
    BackwardEuler,
}

/// Second-order explicit predictor for the half step: `(3 z - z_prev) / 2`.
/// With `z_prev = z` (first step) this reduces to `z`.
pub fn extrapolate_half(state: &SavState) -> CellField {
    CellField::lin_comb(1.5, &state.z, -0.5, &state.z_prev)
}

/// Crank-Nicolson SAV step. Returns the advanced state, the half-step
/// chemical potential `W^{n+1/2}`, and diagnostics.
pub fn step_cn(
    state: &SavState,
    dt: f64,
    model: &EnergyModel,
    grid: &Grid,
    solver: &LinearSolverConfig,
) -> Result<(SavState, WField, StepReport)> {
    step_impl(Scheme::CrankNicolson, state, dt, model, grid, solver)
}

/// First-order SAV backward-Euler step (adaptive reference scheme): all
/// averages replaced by the new level, `F'` evaluated at `z_n`. Returns
/// `W^{n+1}`.
pub fn step_be(
    state: &SavState,
    dt: f64,
    model: &EnergyModel,
    grid: &Grid,
    solver: &LinearSolverConfig,
) -> Result<(SavState, WField, StepReport)> {
    step_impl(Scheme::BackwardEuler, state, dt, model, grid, solver)
}

fn step_impl(
    scheme: Scheme,
    state: &SavState,
    dt: f64,
    model: &EnergyModel,
    grid: &Grid,
    solver: &LinearSolverConfig,
) -> Result<(SavState, WField, StepReport)> {
    assert!(dt > 0.0, "step: dt must be positive");
    assert!(state.z.conforms(grid) && state.z_prev.conforms(grid));

    let base = match scheme {
        Scheme::CrankNicolson => extrapolate_half(state),
        Scheme::BackwardEuler => state.z.clone(),
    };
    let e1 = e1_h(&base, model, grid);
    let s = 1.0 / e1.value.sqrt();
    let b = model.f_prime_field(&base);
    let mut bhat = b.clone();
    bhat.scale(s);

    let lambda = model.lambda();
    let mob = model.mobility;
    let kappa = match scheme {
        Scheme::CrankNicolson => 0.5 * dt * mob,
        Scheme::BackwardEuler => dt * mob,
    };
    let gamma = 0.5 * kappa * s;

    let g_b = apply_g(&bhat, model.flow, grid);

    // c = z_n [+ kappa G L z_n for CN] + (dt M r_n - gamma (b, z_n)_m) G bhat
    let b_dot_zn = grid::inner_m(&b, &state.z, grid);
    let mut c = state.z.clone();
    if scheme == Scheme::CrankNicolson {
        let lz = apply_l(&state.z, lambda, grid);
        let glz = apply_g(&lz, model.flow, grid);
        c.axpy(kappa, &glz);
    }
    c.axpy(dt * mob * state.r - gamma * b_dot_zn, &g_b);

    let (u, v, iters1, iters2) =
        solve_pair(model.flow, lambda, kappa, &c, &g_b, solver, grid)?;

    let denom = 1.0 - gamma * grid::inner_m(&b, &v, grid);
    if denom.abs() < RANK_ONE_GUARD {
        return Err(Error::DegenerateRankOne { denom });
    }
    let theta = grid::inner_m(&b, &u, grid) / denom;

    let mut z_new = u;
    z_new.axpy(gamma * theta, &v);
    if !z_new.is_finite() {
        return Err(Error::NonFinite { context: "phase field after step" });
    }

    let b_dot_znew = grid::inner_m(&b, &z_new, grid);
    let r_new = state.r + 0.5 * s * (b_dot_znew - b_dot_zn);
    if !r_new.is_finite() {
        return Err(Error::NonFinite { context: "auxiliary scalar after step" });
    }

    // Chemical potential at the scheme's natural level.
    let w = match scheme {
        Scheme::CrankNicolson => {
            let z_mid = CellField::lin_comb(0.5, &state.z, 0.5, &z_new);
            let mut w = apply_l(&z_mid, lambda, grid);
            w.axpy(0.5 * (state.r + r_new), &bhat);
            w
        }
        Scheme::BackwardEuler => {
            let mut w = apply_l(&z_new, lambda, grid);
            w.axpy(r_new, &bhat);
            w
        }
    };

    let energy_before = discrete_energy(state, model, grid);
    let energy_after = energy_of(&z_new, r_new, model, grid);
    let dissipation_rhs = match model.flow {
        FlowType::Hm1 => {
            let wx = grid::dx(&w, grid);
            let wy = grid::dy(&w, grid);
            -mob * (grid::inner_x(&wx, &wx, grid) + grid::inner_y(&wy, &wy, grid))
        }
        FlowType::L2 => -mob * grid::inner_m(&w, &w, grid),
    };

    let new_state = SavState {
        z_prev: state.z.clone(),
        z: z_new,
        r: r_new,
        t: state.t + dt,
        dt_prev: dt,
    };
    let residual = residual_check(scheme, &new_state.z, r_new, &w, state, dt, model, grid);
    let zscale = new_state.z.max_abs().max(1.0);
    let cond_factor = (grid::norm_m(&c, grid) + (gamma * theta).abs() * grid::norm_m(&g_b, grid))
        / (grid.cell_area().sqrt() * dt * zscale)
        + 1.0;

    let report = StepReport {
        dt,
        energy_before,
        energy_after,
        dissipation_lhs: (energy_after - energy_before) / dt,
        dissipation_rhs,
        mass: grid::mass(&new_state.z, grid),
        solver_iters_1: iters1,
        solver_iters_2: iters2,
        residual_scheme: residual,
        cond_factor,
        e1_clamped: e1.clamped,
    };
    Ok((new_state, w, report))
}

/// `L g = -Laplacian g + lambda g`
fn apply_l(g: &CellField, lambda: f64, grid: &Grid) -> CellField {
    let mut out = grid::laplacian(g, grid);
    for (o, v) in out.data.iter_mut().zip(&g.data) {
        *o = lambda * v - *o;
    }
    out
}

fn apply_g(g: &CellField, flow: FlowType, grid: &Grid) -> CellField {
    match flow {
        FlowType::Hm1 => grid::laplacian(g, grid),
        FlowType::L2 => {
            let mut out = g.clone();
            out.scale(-1.0);
            out
        }
    }
}

/// Two solves with the shared operator `A = I - kappa G L`.
fn solve_pair(
    flow: FlowType,
    lambda: f64,
    kappa: f64,
    c: &CellField,
    g_b: &CellField,
    solver: &LinearSolverConfig,
    grid: &Grid,
) -> Result<(CellField, CellField, usize, usize)> {
    match solver.method {
        SolveMethod::FastDiag => {
            let mut sp = NeumannSpectral::new(grid);
            let symbol = |mu: f64| {
                let g = match flow {
                    FlowType::Hm1 => mu,
                    FlowType::L2 => -1.0,
                };
                1.0 - kappa * g * (lambda - mu)
            };
            let u = sp.solve_symbol(symbol, c);
            let v = sp.solve_symbol(symbol, g_b);
            Ok((u, v, 1, 1))
        }
        SolveMethod::Cg => {
            let (u, i1) = solve_spd(make_apply(flow, lambda, kappa, grid), c, solver, grid)?;
            let (v, i2) = solve_spd(make_apply(flow, lambda, kappa, grid), g_b, solver, grid)?;
            Ok((u, v, i1, i2))
        }
        SolveMethod::Dense => {
            let (u, i1) = solve_dense(make_apply(flow, lambda, kappa, grid), c, grid)?;
            let (v, i2) = solve_dense(make_apply(flow, lambda, kappa, grid), g_b, grid)?;
            Ok((u, v, i1, i2))
        }
    }
}

/// Matrix-free application of `A = I - kappa G L`, symmetric in `(.,.)_m`
/// and positive definite for `kappa > 0`, `lambda >= 0`.
pub fn make_apply(
    flow: FlowType,
    lambda: f64,
    kappa: f64,
    grid: &Grid,
) -> impl FnMut(&CellField, &mut CellField) + '_ {
    let mut lx = CellField::zeros(grid);
    move |x: &CellField, out: &mut CellField| {
        grid::laplacian_into(x, grid, &mut lx);
        for (l, v) in lx.data.iter_mut().zip(&x.data) {
            *l = lambda * v - *l;
        }
        match flow {
            FlowType::L2 => {
                // A x = x + kappa L x
                for ((o, xv), lv) in out.data.iter_mut().zip(&x.data).zip(&lx.data) {
                    *o = xv + kappa * lv;
                }
            }
            FlowType::Hm1 => {
                // A x = x - kappa Laplacian(L x)
                grid::laplacian_into(&lx, grid, out);
                for (o, xv) in out.data.iter_mut().zip(&x.data) {
                    *o = xv - kappa * *o;
                }
            }
        }
    }
}

/// Max-norm residual of the three discrete equations at the computed
/// solution, normalized by `max(1, ||z_new||_inf)`. The time-derivative
/// equations carry their natural `1/dt` scale.
#[allow(clippy::too_many_arguments)]
pub fn residual_check(
    scheme: Scheme,
    z_new: &CellField,
    r_new: f64,
    w: &CellField,
    state: &SavState,
    dt: f64,
    model: &EnergyModel,
    grid: &Grid,
) -> f64 {
    let base = match scheme {
        Scheme::CrankNicolson => extrapolate_half(state),
        Scheme::BackwardEuler => state.z.clone(),
    };
    let e1 = e1_h(&base, model, grid);
    let s = 1.0 / e1.value.sqrt();
    let b = model.f_prime_field(&base);

    // eq 1: (z_new - z_n)/dt = M G W
    let gw = apply_g(w, model.flow, grid);
    let mut res1 = 0.0_f64;
    for k in 0..z_new.data.len() {
        let lhs = (z_new.data[k] - state.z.data[k]) / dt;
        res1 = res1.max((lhs - model.mobility * gw.data[k]).abs());
    }

    // eq 2: W = L z_ref + r_ref * s * b at the scheme's level
    let (z_ref, r_ref) = match scheme {
        Scheme::CrankNicolson => {
            (CellField::lin_comb(0.5, &state.z, 0.5, z_new), 0.5 * (state.r + r_new))
        }
        Scheme::BackwardEuler => (z_new.clone(), r_new),
    };
    let lz = apply_l(&z_ref, model.lambda(), grid);
    let mut res2 = 0.0_f64;
    for k in 0..w.data.len() {
        res2 = res2.max((w.data[k] - lz.data[k] - r_ref * s * b.data[k]).abs());
    }

    // eq 3: (r_new - r_n)/dt = (s/2) (b, (z_new - z_n)/dt)_m
    let mut dz = z_new.clone();
    dz.axpy(-1.0, &state.z);
    let res3 = ((r_new - state.r) - 0.5 * s * grid::inner_m(&b, &dz, grid)).abs() / dt;

    res1.max(res2).max(res3) / z_new.max_abs().max(1.0)
}
