//! Experiment drivers: Cauchy-error convergence studies between grid
//! halvings and coarsening runs with fixed or adaptive time steps.
//!
//! Cross-grid comparison restricts the fine solution to the coarse grid by
//! averaging each 2x2 block of fine cells. The restriction is conservative
//! and second-order, so it does not disturb the measured convergence rate.

use std::collections::BTreeMap;

use crate::adaptive::{adaptive_step, AdaptiveConfig};
use crate::error::Result;
use crate::grid::{self, CellField, Grid};
use crate::linsolve::LinearSolverConfig;
use crate::model::{discrete_energy, roughness, EnergyModel, FlowType, SavState};
use crate::rng::CounterRng;
use crate::stepper::step_cn;

/// Which solution quantity a Cauchy error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Field,
    Gradient,
    W,
    DW,
    R,
}

/// Average each 2x2 block of fine cells onto the coarse grid.
///
/// # Panics
/// Panics unless the fine grid has exactly twice the cells per axis.
pub fn restrict_to_coarse(fine: &CellField, fine_grid: &Grid, coarse_grid: &Grid) -> CellField {
    assert!(fine.conforms(fine_grid));
    assert_eq!(fine_grid.nx, 2 * coarse_grid.nx, "grid ratio must be exactly 2");
    assert_eq!(fine_grid.ny, 2 * coarse_grid.ny, "grid ratio must be exactly 2");
    let mut out = CellField::zeros(coarse_grid);
    for j in 0..coarse_grid.ny {
        for i in 0..coarse_grid.nx {
            let s = fine.at(2 * i, 2 * j)
                + fine.at(2 * i + 1, 2 * j)
                + fine.at(2 * i, 2 * j + 1)
                + fine.at(2 * i + 1, 2 * j + 1);
            *out.at_mut(i, j) = 0.25 * s;
        }
    }
    out
}

/// Cauchy error between a coarse-grid field and the restriction of the
/// fine-grid field: m-norm for value quantities, TM-norm of the difference
/// of coarse-grid discrete gradients for gradient quantities.
pub fn cauchy_error(
    quantity: Quantity,
    coarse: &CellField,
    fine: &CellField,
    coarse_grid: &Grid,
    fine_grid: &Grid,
) -> f64 {
    let restricted = restrict_to_coarse(fine, fine_grid, coarse_grid);
    let mut d = coarse.clone();
    d.axpy(-1.0, &restricted);
    match quantity {
        Quantity::Field | Quantity::W => grid::norm_m(&d, coarse_grid),
        Quantity::Gradient | Quantity::DW => grid::grad_norm_sq(&d, coarse_grid).sqrt(),
        Quantity::R => panic!("R is a scalar; compare directly"),
    }
}

/// `log2(e_coarse / e_fine)`; undefined when either error is nonpositive.
pub fn compute_rate(e_coarse: f64, e_fine: f64) -> Option<f64> {
    if e_coarse > 0.0 && e_fine > 0.0 {
        Some((e_coarse / e_fine).log2())
    } else {
        None
    }
}

/// Names of the tracked Cauchy quantities, in output order: max-over-time
/// m/TM norms of the phase field and its gradient, the max scalar gap, and
/// both max and dt-weighted l2 time norms of the potential.
pub const QUANTITIES: [&str; 6] = ["Z_inf2", "dZ_inf2", "R_inf", "W_inf2", "W_22", "dW_22"];

/// One resolution row of a convergence table.
#[derive(Debug, Clone)]
pub struct ConvergenceRow {
    pub h: f64,
    pub errors: BTreeMap<String, f64>,
    /// Rate against the previous row; absent on the first row or when an
    /// error vanishes.
    pub rates: BTreeMap<String, f64>,
}

struct CauchyTracker {
    max_z: f64,
    max_dz: f64,
    max_r: f64,
    max_w: f64,
    sum_w2: f64,
    sum_dw2: f64,
}

impl CauchyTracker {
    fn new() -> Self {
        CauchyTracker { max_z: 0.0, max_dz: 0.0, max_r: 0.0, max_w: 0.0, sum_w2: 0.0, sum_dw2: 0.0 }
    }

    fn update(&mut self, dt: f64, coarse: Level<'_>, fine: Level<'_>) {
        let (cg, fg) = (coarse.grid, fine.grid);
        self.max_z = self.max_z.max(cauchy_error(Quantity::Field, coarse.z, fine.z, cg, fg));
        self.max_dz = self.max_dz.max(cauchy_error(Quantity::Gradient, coarse.z, fine.z, cg, fg));
        self.max_r = self.max_r.max((coarse.r - fine.r).abs());
        let ew = cauchy_error(Quantity::W, coarse.w, fine.w, cg, fg);
        let edw = cauchy_error(Quantity::DW, coarse.w, fine.w, cg, fg);
        self.max_w = self.max_w.max(ew);
        self.sum_w2 += dt * ew * ew;
        self.sum_dw2 += dt * edw * edw;
    }

    fn finalize(self) -> BTreeMap<String, f64> {
        let mut m = BTreeMap::new();
        m.insert("Z_inf2".into(), self.max_z);
        m.insert("dZ_inf2".into(), self.max_dz);
        m.insert("R_inf".into(), self.max_r);
        m.insert("W_inf2".into(), self.max_w);
        m.insert("W_22".into(), self.sum_w2.sqrt());
        m.insert("dW_22".into(), self.sum_dw2.sqrt());
        m
    }
}

struct Level<'a> {
    grid: &'a Grid,
    z: &'a CellField,
    w: &'a CellField,
    r: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceConfig {
    pub flow: FlowType,
    /// Cell counts of the rows; each is compared against its doubling, so
    /// one extra run at `2 * grids.last()` is performed internally.
    pub grids: Vec<usize>,
    pub dt: f64,
    pub t_final: f64,
    pub epsilon: f64,
    pub beta: f64,
    pub mobility: f64,
    pub solver: LinearSolverConfig,
}

impl ConvergenceConfig {
    /// Allen-Cahn accuracy test: `T=0.5, M=0.01, eps=0.08, beta=0, dt=5e-4`,
    /// initial data `cos(pi x) cos(pi y)`.
    pub fn allen_cahn() -> Self {
        ConvergenceConfig {
            flow: FlowType::L2,
            grids: vec![10, 20, 40, 80],
            dt: 5e-4,
            t_final: 0.5,
            epsilon: 0.08,
            beta: 0.0,
            mobility: 0.01,
            solver: LinearSolverConfig::default(),
        }
    }

    /// Cahn-Hilliard accuracy test: as [`Self::allen_cahn`] with `eps=0.2`.
    pub fn cahn_hilliard() -> Self {
        ConvergenceConfig { flow: FlowType::Hm1, epsilon: 0.2, ..Self::allen_cahn() }
    }

    fn model(&self) -> EnergyModel {
        EnergyModel::shifted_double_well(self.epsilon, self.beta, self.mobility, self.flow)
    }
}

/// Smooth accuracy-test initial data `cos(pi x) cos(pi y)`.
pub fn initial_cosine(grid: &Grid) -> CellField {
    let pi = std::f64::consts::PI;
    CellField::from_fn(grid, |x, y| (pi * x).cos() * (pi * y).cos())
}

/// Seeded uniform random initial data in `[lo, hi)`, filled in row-major
/// cell order so it is identical across platforms and thread counts.
pub fn initial_random(grid: &Grid, seed: u64, lo: f64, hi: f64) -> CellField {
    let mut rng = CounterRng::new(seed);
    CellField::from_fn(grid, |_, _| rng.uniform(lo, hi))
}

/// Run all resolutions in lockstep with a shared `dt` and accumulate the
/// Cauchy time-norms between each adjacent pair.
pub fn run_convergence(cfg: &ConvergenceConfig) -> Result<Vec<ConvergenceRow>> {
    assert!(!cfg.grids.is_empty());
    for w in cfg.grids.windows(2) {
        assert_eq!(w[1], 2 * w[0], "grids must be consecutive halvings of h");
    }
    let model = cfg.model();
    let n_steps = (cfg.t_final / cfg.dt).round() as usize;

    let mut resolutions = cfg.grids.clone();
    resolutions.push(2 * *cfg.grids.last().unwrap());
    let grids: Vec<Grid> = resolutions.iter().map(|&n| Grid::unit_square(n, n)).collect();
    let mut states: Vec<SavState> =
        grids.iter().map(|g| SavState::from_initial(initial_cosine(g), &model, g)).collect();
    let mut trackers: Vec<CauchyTracker> = cfg.grids.iter().map(|_| CauchyTracker::new()).collect();

    for _ in 0..n_steps {
        let mut ws = Vec::with_capacity(grids.len());
        for (state, g) in states.iter_mut().zip(&grids) {
            let (next, w, _) = step_cn(state, cfg.dt, &model, g, &cfg.solver)?;
            *state = next;
            ws.push(w);
        }
        for (k, tracker) in trackers.iter_mut().enumerate() {
            tracker.update(
                cfg.dt,
                Level { grid: &grids[k], z: &states[k].z, w: &ws[k], r: states[k].r },
                Level { grid: &grids[k + 1], z: &states[k + 1].z, w: &ws[k + 1], r: states[k + 1].r },
            );
        }
    }

    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for (k, tracker) in trackers.into_iter().enumerate() {
        let errors = tracker.finalize();
        let mut rates = BTreeMap::new();
        if let Some(prev) = rows.last() {
            for (name, &e) in &errors {
                if let Some(rate) = compute_rate(prev.errors[name], e) {
                    rates.insert(name.clone(), rate);
                }
            }
        }
        rows.push(ConvergenceRow { h: grids[k].hx, errors, rates });
    }
    Ok(rows)
}

/// Fixed or adaptive time stepping for a coarsening run.
#[derive(Debug, Clone)]
pub enum StepMode {
    Fixed(f64),
    Adaptive(AdaptiveConfig),
}

/// Initial phase field of a simulation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialData {
    /// Seeded uniform values in `[lo, hi)`.
    Random { lo: f64, hi: f64 },
    /// `cos(pi x) cos(pi y)`.
    Cosine,
}

#[derive(Debug, Clone)]
pub struct CoarseningConfig {
    pub flow: FlowType,
    pub nx: usize,
    pub ny: usize,
    /// Domain `[x0, x1] x [y0, y1]`.
    pub bounds: (f64, f64, f64, f64),
    pub epsilon: f64,
    pub beta: f64,
    pub mobility: f64,
    pub c0: f64,
    pub t_final: f64,
    pub mode: StepMode,
    pub seed: u64,
    pub init: InitialData,
    pub snapshot_times: Vec<f64>,
    pub solver: LinearSolverConfig,
}

impl CoarseningConfig {
    /// Spinodal-decomposition setup: Cahn-Hilliard with
    /// `M=0.002, eps=0.01, beta=6`, random data in `[-0.05, 0.05]`,
    /// adaptive steps in `[1e-5, 1e-2]` with `tol=1e-3`, `rho=0.9`.
    pub fn spinodal(nx: usize, ny: usize, seed: u64) -> Self {
        CoarseningConfig {
            flow: FlowType::Hm1,
            nx,
            ny,
            bounds: (0.0, 1.0, 0.0, 1.0),
            epsilon: 0.01,
            beta: 6.0,
            mobility: 0.002,
            c0: 0.0,
            t_final: 1.0,
            mode: StepMode::Adaptive(AdaptiveConfig::new(1e-5, 1e-2, 1e-3, 0.9, 50)),
            seed,
            init: InitialData::Random { lo: -0.05, hi: 0.05 },
            snapshot_times: vec![],
            solver: LinearSolverConfig::fast_diag(),
        }
    }

    pub fn model(&self) -> EnergyModel {
        EnergyModel::shifted_double_well(self.epsilon, self.beta, self.mobility, self.flow)
            .with_c0(self.c0)
    }
}

/// Aligned per-step records of a run. Index 0 is the initial state with
/// `dt = 0`.
#[derive(Debug, Clone, Default)]
pub struct RunHistory {
    pub times: Vec<f64>,
    pub dts: Vec<f64>,
    pub energies: Vec<f64>,
    pub roughness: Vec<f64>,
    pub masses: Vec<f64>,
    /// True for steps whose size was clipped to land on a requested time
    /// rather than chosen by the controller.
    pub clipped: Vec<bool>,
    pub total_retries: usize,
    pub forced_accepts: usize,
}

impl RunHistory {
    fn record(&mut self, t: f64, dt: f64, e: f64, r: f64, m: f64, clipped: bool) {
        self.times.push(t);
        self.dts.push(dt);
        self.energies.push(e);
        self.roughness.push(r);
        self.masses.push(m);
        self.clipped.push(clipped);
    }

    /// (min, max) accepted step size over controller-chosen steps.
    pub fn dt_range(&self) -> Option<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0_f64;
        for k in 1..self.dts.len() {
            if self.clipped[k] {
                continue;
            }
            lo = lo.min(self.dts[k]);
            hi = hi.max(self.dts[k]);
        }
        (hi > 0.0).then_some((lo, hi))
    }

    pub fn mass_drift(&self) -> f64 {
        let m0 = self.masses.first().copied().unwrap_or(0.0);
        self.masses.iter().fold(0.0_f64, |acc, &m| acc.max((m - m0).abs()))
    }

    /// Energy linearly interpolated at time `t`; clamped at the ends.
    pub fn energy_at(&self, t: f64) -> f64 {
        match self.times.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(k) => self.energies[k],
            Err(k) => {
                if k == 0 {
                    self.energies[0]
                } else if k >= self.times.len() {
                    *self.energies.last().unwrap()
                } else {
                    let (t0, t1) = (self.times[k - 1], self.times[k]);
                    let a = (t - t0) / (t1 - t0);
                    (1.0 - a) * self.energies[k - 1] + a * self.energies[k]
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub t: f64,
    pub field: CellField,
}

/// Largest relative deviation of this run's energy from a reference run,
/// with the reference interpolated at this run's time points.
pub fn max_energy_deviation(run: &RunHistory, reference: &RunHistory) -> f64 {
    let mut worst = 0.0_f64;
    for (&t, &e) in run.times.iter().zip(&run.energies) {
        let e_ref = reference.energy_at(t);
        worst = worst.max((e - e_ref).abs() / e_ref.abs().max(f64::MIN_POSITIVE));
    }
    worst
}

/// Advance the phase field to `t_final`, recording history and snapshots.
/// An adaptive run starts at `dt_min`; steps are clipped (and marked) to
/// land exactly on snapshot times and on `t_final`.
pub fn run_coarsening(cfg: &CoarseningConfig) -> Result<(RunHistory, Vec<Snapshot>)> {
    let (x0, x1, y0, y1) = cfg.bounds;
    let grid = Grid::new(cfg.nx, cfg.ny, x0, x1, y0, y1);
    let model = cfg.model();
    let z0 = match cfg.init {
        InitialData::Random { lo, hi } => initial_random(&grid, cfg.seed, lo, hi),
        InitialData::Cosine => initial_cosine(&grid),
    };
    let mut state = SavState::from_initial(z0, &model, &grid);

    let mut events: Vec<f64> = cfg
        .snapshot_times
        .iter()
        .copied()
        .filter(|&t| t > 0.0 && t < cfg.t_final)
        .collect();
    events.push(cfg.t_final);
    events.sort_by(|a, b| a.partial_cmp(b).unwrap());
    events.dedup();

    let mut history = RunHistory::default();
    history.record(
        0.0,
        0.0,
        discrete_energy(&state, &model, &grid),
        roughness(&state.z, &grid),
        grid::mass(&state.z, &grid),
        false,
    );
    let mut snapshots = Vec::new();
    if cfg.snapshot_times.contains(&0.0) {
        snapshots.push(Snapshot { t: 0.0, field: state.z.clone() });
    }

    let mut dt_next = match &cfg.mode {
        StepMode::Fixed(dt) => *dt,
        StepMode::Adaptive(a) => a.dt_min,
    };

    let mut event_iter = events.into_iter();
    let mut next_event = event_iter.next().unwrap();
    while state.t < cfg.t_final {
        let remaining = next_event - state.t;
        // Clip to land on the event; the tolerance also swallows the
        // sub-ulp crumb that accumulated rounding of t would otherwise
        // leave as a spurious final micro-step.
        let want_clip = dt_next + 1e-9 * next_event.max(1.0) >= remaining;
        let dt_use = if want_clip { remaining } else { dt_next };

        let (accepted_dt, report) = match &cfg.mode {
            StepMode::Fixed(_) => {
                let (next, _, report) = step_cn(&state, dt_use, &model, &grid, &cfg.solver)?;
                state = next;
                (dt_use, report)
            }
            StepMode::Adaptive(acfg) => {
                let out = adaptive_step(&state, dt_use, &model, &grid, acfg, &cfg.solver)?;
                history.total_retries += out.retries;
                history.forced_accepts += out.forced as usize;
                dt_next = out.next_dt;
                state = out.state;
                (out.accepted_dt, out.report)
            }
        };
        let clipped_step = want_clip && accepted_dt == dt_use;
        history.record(
            state.t,
            accepted_dt,
            report.energy_after,
            roughness(&state.z, &grid),
            report.mass,
            clipped_step,
        );
        if (state.t - next_event).abs() <= 1e-12 * next_event.max(1.0) {
            state.t = next_event;
            *history.times.last_mut().unwrap() = next_event;
            if cfg.snapshot_times.contains(&next_event) {
                snapshots.push(Snapshot { t: next_event, field: state.z.clone() });
            }
            if next_event >= cfg.t_final {
                break;
            }
            next_event = event_iter.next().unwrap_or(cfg.t_final);
        }
    }
    Ok((history, snapshots))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn restriction_identities() {
        let cg = Grid::unit_square(4, 4);
        let fg = Grid::unit_square(8, 8);

        let fine = CellField::constant(&fg, 2.5);
        let r = restrict_to_coarse(&fine, &fg, &cg);
        assert!(r.data.iter().all(|&v| (v - 2.5).abs() < 1e-15));

        // injection of a coarse field into fine blocks restricts back exactly
        let coarse = initial_random(&cg, 5, -1.0, 1.0);
        let mut injected = CellField::zeros(&fg);
        for j in 0..fg.ny {
            for i in 0..fg.nx {
                *injected.at_mut(i, j) = coarse.at(i / 2, j / 2);
            }
        }
        assert!(cauchy_error(Quantity::Field, &coarse, &injected, &cg, &fg) < 1e-15);
    }

    #[test]
    fn sampled_smooth_field_has_second_order_cauchy_error() {
        let pi = std::f64::consts::PI;
        let err = |n: usize| {
            let cg = Grid::unit_square(n, n);
            let fg = Grid::unit_square(2 * n, 2 * n);
            let f = |x: f64, y: f64| (pi * x).cos() * (pi * y).cos();
            let coarse = CellField::from_fn(&cg, f);
            let fine = CellField::from_fn(&fg, f);
            cauchy_error(Quantity::Field, &coarse, &fine, &cg, &fg)
        };
        let (e1, e2, e3) = (err(16), err(32), err(64));
        assert!(((e1 / e2).log2() - 2.0).abs() < 0.1);
        assert!(((e2 / e3).log2() - 2.0).abs() < 0.1);
    }

    #[test]
    fn rate_helper() {
        assert!((compute_rate(4e-3, 1e-3).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(compute_rate(1e-3, 1e-3).unwrap(), 0.0);
        assert!(compute_rate(0.0, 1e-3).is_none());
        assert!(compute_rate(1e-3, 0.0).is_none());
        assert!((compute_rate(6.36e-3, 1.59e-3).unwrap() - 2.0).abs() < 5e-3);
    }

    #[test]
    fn tiny_convergence_study_shows_second_order() {
        let mut cfg = ConvergenceConfig::allen_cahn();
        cfg.grids = vec![8, 16];
        cfg.t_final = 0.05;
        cfg.dt = 1e-3;
        cfg.solver = LinearSolverConfig::fast_diag();
        let rows = run_convergence(&cfg).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows[0].rates.is_empty());
        let rate = rows[1].rates["Z_inf2"];
        assert!((rate - 2.0).abs() < 0.25, "rate {rate}");
    }

    #[test]
    fn fixed_step_history_is_monotone_and_conservative() {
        let mut cfg = CoarseningConfig::spinodal(24, 24, 3);
        cfg.t_final = 2e-4;
        cfg.mode = StepMode::Fixed(1e-5);
        let (h, _) = run_coarsening(&cfg).unwrap();
        assert_eq!(h.times.len(), 21);
        for k in 1..h.energies.len() {
            assert!(h.energies[k] <= h.energies[k - 1] + 1e-10 * h.energies[k - 1].max(1.0));
            assert!(h.times[k] > h.times[k - 1]);
        }
        assert!(h.mass_drift() < 1e-10);
    }

    #[test]
    fn adaptive_run_grows_steps_and_lands_on_snapshots() {
        let mut cfg = CoarseningConfig::spinodal(16, 16, 9);
        cfg.t_final = 5e-3;
        cfg.snapshot_times = vec![1e-3, 5e-3];
        let (h, snaps) = run_coarsening(&cfg).unwrap();
        assert_eq!(snaps.len(), 2);
        assert_eq!(snaps[0].t, 1e-3);
        assert_eq!(snaps[1].t, 5e-3);
        assert_eq!(*h.times.last().unwrap(), 5e-3);
        let (lo, hi) = h.dt_range().unwrap();
        assert!(lo >= 1e-5 && hi <= 1e-2);
        assert!(hi > lo);
    }

    #[test]
    fn adaptive_tracks_reference_better_than_large_steps() {
        let base = CoarseningConfig::spinodal(48, 48, 21);
        let mut ref_cfg = base.clone();
        ref_cfg.t_final = 0.05;
        ref_cfg.mode = StepMode::Fixed(1e-5);
        let (reference, _) = run_coarsening(&ref_cfg).unwrap();

        let mut ad_cfg = base.clone();
        ad_cfg.t_final = 0.05;
        let (adaptive, _) = run_coarsening(&ad_cfg).unwrap();

        let mut big_cfg = base.clone();
        big_cfg.t_final = 0.05;
        big_cfg.mode = StepMode::Fixed(1e-3);
        let (big, _) = run_coarsening(&big_cfg).unwrap();

        let dev_adaptive = max_energy_deviation(&adaptive, &reference);
        let dev_big = max_energy_deviation(&big, &reference);
        assert!(dev_adaptive < 0.02, "adaptive deviation {dev_adaptive:.3e}");
        assert!(
            dev_big > 2.0 * dev_adaptive,
            "large uniform steps should deviate visibly: {dev_big:.3e} vs {dev_adaptive:.3e}"
        );
    }

    #[test]
    fn fixed_step_run_has_no_trailing_micro_step() {
        // accumulated rounding of t must not leave a crumb step at T
        let mut cfg = CoarseningConfig::spinodal(8, 8, 1);
        cfg.t_final = 1e-2;
        cfg.mode = StepMode::Fixed(1e-5);
        let (h, _) = run_coarsening(&cfg).unwrap();
        assert_eq!(h.times.len(), 1001);
        assert_eq!(*h.times.last().unwrap(), 1e-2);
        let min_dt = h.dts[1..].iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(min_dt > 0.9e-5, "min dt {min_dt:.3e}");
    }

    #[test]
    fn histories_are_reproducible_for_fixed_seed() {
        let mut cfg = CoarseningConfig::spinodal(16, 16, 4);
        cfg.t_final = 1e-3;
        let (h1, _) = run_coarsening(&cfg).unwrap();
        let (h2, _) = run_coarsening(&cfg).unwrap();
        assert_eq!(h1.times, h2.times);
        assert_eq!(h1.energies, h2.energies);
        assert_eq!(h1.masses, h2.masses);
    }

    #[test]
    fn energy_interpolation() {
        let mut h = RunHistory::default();
        h.record(0.0, 0.0, 10.0, 0.0, 0.0, false);
        h.record(1.0, 1.0, 8.0, 0.0, 0.0, false);
        h.record(2.0, 1.0, 7.0, 0.0, 0.0, false);
        assert_eq!(h.energy_at(0.5), 9.0);
        assert_eq!(h.energy_at(2.0), 7.0);
        assert_eq!(h.energy_at(-1.0), 10.0);
        assert_eq!(h.energy_at(3.0), 7.0);
    }
}
