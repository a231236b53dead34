//! Symmetric-positive-definite solves for the time stepper.
//!
//! The default path is matrix-free conjugate gradients in the `(.,.)_m`
//! inner product, so symmetry of the half-step operator is exact at the
//! discrete level even for `hx != hy`. A dense assembly path backs the
//! oracle tests, and a cosine-transform fast-diagonalization backend (see
//! [`crate::spectral`]) offers the same contract for uniform grids.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::grid::{inner_m, norm_m, CellField, Grid};

/// Largest unknown count the dense path will assemble.
pub const DENSE_GUARD: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    /// Matrix-free conjugate gradients (default).
    Cg,
    /// Dense assembly + LU; oracle/testing path, guarded by [`DENSE_GUARD`].
    Dense,
    /// Fast diagonalization by even-reflection cosine transforms.
    FastDiag,
}

impl SolveMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveMethod::Cg => "cg",
            SolveMethod::Dense => "dense",
            SolveMethod::FastDiag => "fastdiag",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LinearSolverConfig {
    pub method: SolveMethod,
    pub rel_tol: f64,
    /// Iteration cap; `None` means `10 * nx * ny`.
    pub max_iters: Option<usize>,
}

impl Default for LinearSolverConfig {
    fn default() -> Self {
        LinearSolverConfig { method: SolveMethod::Cg, rel_tol: 1e-11, max_iters: None }
    }
}

impl LinearSolverConfig {
    pub fn fast_diag() -> Self {
        LinearSolverConfig { method: SolveMethod::FastDiag, ..Default::default() }
    }

    pub fn cg(rel_tol: f64) -> Self {
        LinearSolverConfig { method: SolveMethod::Cg, rel_tol, max_iters: None }
    }

    pub fn max_iters_for(&self, grid: &Grid) -> usize {
        self.max_iters.unwrap_or(10 * grid.n_cells())
    }
}

/// Conjugate gradients on `A x = rhs` where `apply_a` is linear, symmetric
/// in `(.,.)_m` and positive definite. Returns the solution and the
/// iteration count; declared convergence is re-checked against the true
/// residual (with restart) so the returned `x` really satisfies
/// `||A x - rhs||_m <= rel_tol * ||rhs||_m`.
pub fn solve_spd(
    mut apply_a: impl FnMut(&CellField, &mut CellField),
    rhs: &CellField,
    cfg: &LinearSolverConfig,
    grid: &Grid,
) -> Result<(CellField, usize)> {
    assert!(rhs.conforms(grid), "solve_spd: rhs does not conform to grid");
    let rhs_norm = norm_m(rhs, grid);
    if rhs_norm == 0.0 {
        return Ok((CellField::zeros(grid), 0));
    }
    let tol = cfg.rel_tol * rhs_norm;
    let max_iters = cfg.max_iters_for(grid);

    let mut x = CellField::zeros(grid);
    let mut r = rhs.clone();
    let mut p = r.clone();
    let mut ap = CellField::zeros(grid);
    let mut rr = inner_m(&r, &r, grid);
    let mut iters = 0;

    while iters < max_iters {
        if rr.sqrt() <= tol {
            // Guard against recursive-residual drift before declaring victory.
            apply_a(&x, &mut ap);
            let mut true_r = rhs.clone();
            true_r.axpy(-1.0, &ap);
            let true_rr = inner_m(&true_r, &true_r, grid);
            if true_rr.sqrt() <= tol {
                return Ok((x, iters));
            }
            r = true_r;
            p = r.clone();
            rr = true_rr;
        }
        apply_a(&p, &mut ap);
        let pap = inner_m(&p, &ap, grid);
        if !pap.is_finite() || pap <= 0.0 {
            return Err(Error::NonFinite { context: "cg curvature (operator not SPD?)" });
        }
        let alpha = rr / pap;
        x.axpy(alpha, &p);
        r.axpy(-alpha, &ap);
        let rr_new = inner_m(&r, &r, grid);
        let beta = rr_new / rr;
        for (pv, rv) in p.data.iter_mut().zip(&r.data) {
            *pv = rv + beta * *pv;
        }
        rr = rr_new;
        iters += 1;
    }
    if rr.sqrt() <= tol {
        return Ok((x, iters));
    }
    Err(Error::SolverDiverged { iters, rel_residual: rr.sqrt() / rhs_norm })
}

/// Assemble the matrix of a linear operator by applying it to the canonical
/// basis fields. Oracle-test path only.
pub fn assemble_dense(
    mut apply_a: impl FnMut(&CellField, &mut CellField),
    grid: &Grid,
) -> Result<DMatrix<f64>> {
    let n = grid.n_cells();
    if n > DENSE_GUARD {
        return Err(Error::DenseTooLarge { n, max: DENSE_GUARD });
    }
    let mut a = DMatrix::zeros(n, n);
    let mut e = CellField::zeros(grid);
    let mut col = CellField::zeros(grid);
    for k in 0..n {
        e.data[k] = 1.0;
        apply_a(&e, &mut col);
        for (row, &v) in col.data.iter().enumerate() {
            a[(row, k)] = v;
        }
        e.data[k] = 0.0;
    }
    Ok(a)
}

/// Dense LU solve of the assembled operator; same contract as [`solve_spd`].
pub fn solve_dense(
    apply_a: impl FnMut(&CellField, &mut CellField),
    rhs: &CellField,
    grid: &Grid,
) -> Result<(CellField, usize)> {
    let a = assemble_dense(apply_a, grid)?;
    let b = nalgebra::DVector::from_column_slice(&rhs.data);
    let x = a
        .lu()
        .solve(&b)
        .ok_or(Error::NonFinite { context: "dense LU solve (singular operator)" })?;
    let mut out = CellField::zeros(grid);
    out.data.copy_from_slice(x.as_slice());
    Ok((out, 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::laplacian_into;
    use crate::rng::CounterRng;

    fn random_field(grid: &Grid, seed: u64) -> CellField {
        let mut rng = CounterRng::new(seed);
        CellField { nx: grid.nx, ny: grid.ny, data: (0..grid.n_cells()).map(|_| rng.uniform(-1.0, 1.0)).collect() }
    }

    // shifted Neumann Laplacian: SPD for sigma > 0
    fn apply_helmholtz(sigma: f64, grid: &Grid) -> impl FnMut(&CellField, &mut CellField) + '_ {
        move |x, out| {
            laplacian_into(x, grid, out);
            for (o, v) in out.data.iter_mut().zip(&x.data) {
                *o = sigma * v - *o;
            }
        }
    }

    #[test]
    fn identity_converges_immediately() {
        let g = Grid::unit_square(6, 6);
        let rhs = random_field(&g, 1);
        let (x, iters) =
            solve_spd(|v, out| out.data.copy_from_slice(&v.data), &rhs, &Default::default(), &g).unwrap();
        assert!(iters <= 1);
        for (a, b) in x.data.iter().zip(&rhs.data) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_rhs_returns_zero() {
        let g = Grid::unit_square(5, 4);
        let rhs = CellField::zeros(&g);
        let (x, iters) = solve_spd(apply_helmholtz(2.0, &g), &rhs, &Default::default(), &g).unwrap();
        assert_eq!(iters, 0);
        assert!(x.data.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn cg_matches_dense_on_stencil_problem() {
        let g = Grid::unit_square(8, 8);
        let rhs = random_field(&g, 3);
        let cfg = LinearSolverConfig::cg(1e-13);
        let (x_cg, _) = solve_spd(apply_helmholtz(1.5, &g), &rhs, &cfg, &g).unwrap();
        let (x_dense, _) = solve_dense(apply_helmholtz(1.5, &g), &rhs, &g).unwrap();
        for (a, b) in x_cg.data.iter().zip(&x_dense.data) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn cg_error_decreases_monotonically_in_a_norm() {
        // Track ||x_k - x*||_A against the dense solution: the defining
        // optimality property of CG, allowed 1e-12 slack for roundoff.
        let g = Grid::unit_square(6, 5);
        let rhs = random_field(&g, 11);
        let (x_star, _) = solve_dense(apply_helmholtz(1.0, &g), &rhs, &g).unwrap();

        let mut apply = apply_helmholtz(1.0, &g);
        let mut x = CellField::zeros(&g);
        let mut r = rhs.clone();
        let mut p = r.clone();
        let mut ap = CellField::zeros(&g);
        let mut rr = inner_m(&r, &r, &g);
        let a_err = |x: &CellField, apply: &mut dyn FnMut(&CellField, &mut CellField)| {
            let mut e = x.clone();
            e.axpy(-1.0, &x_star);
            let mut ae = CellField::zeros(&g);
            apply(&e, &mut ae);
            inner_m(&e, &ae, &g).sqrt()
        };
        let mut prev = a_err(&x, &mut apply);
        for _ in 0..30 {
            apply(&p, &mut ap);
            let alpha = rr / inner_m(&p, &ap, &g);
            x.axpy(alpha, &p);
            r.axpy(-alpha, &ap);
            let rr_new = inner_m(&r, &r, &g);
            let beta = rr_new / rr;
            for (pv, rv) in p.data.iter_mut().zip(&r.data) {
                *pv = rv + beta * *pv;
            }
            rr = rr_new;
            let cur = a_err(&x, &mut apply);
            assert!(cur <= prev + 1e-12, "A-norm error rose: {prev} -> {cur}");
            prev = cur;
        }
    }

    #[test]
    fn iteration_cap_reports_failure() {
        let g = Grid::unit_square(16, 16);
        let rhs = random_field(&g, 5);
        let cfg = LinearSolverConfig { method: SolveMethod::Cg, rel_tol: 1e-13, max_iters: Some(2) };
        match solve_spd(apply_helmholtz(1.0, &g), &rhs, &cfg, &g) {
            Err(Error::SolverDiverged { iters, rel_residual }) => {
                assert_eq!(iters, 2);
                assert!(rel_residual > 1e-13);
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn assemble_identity_and_guard() {
        let g = Grid::unit_square(3, 3);
        let a = assemble_dense(|v, out| out.data.copy_from_slice(&v.data), &g).unwrap();
        assert_eq!(a, DMatrix::identity(9, 9));

        let big = Grid::unit_square(65, 65);
        assert!(matches!(
            assemble_dense(|v, out| out.data.copy_from_slice(&v.data), &big),
            Err(Error::DenseTooLarge { .. })
        ));
    }

    #[test]
    fn helmholtz_operator_is_spd() {
        let g = Grid::unit_square(6, 6);
        let a = assemble_dense(apply_helmholtz(0.7, &g), &g).unwrap();
        let at = a.transpose();
        let asym = (&a - &at).abs().max();
        assert!(asym <= 1e-12, "asymmetry {asym}");
        let eig = a.symmetric_eigen();
        let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(min > 0.0, "smallest eigenvalue {min}");
    }
}
