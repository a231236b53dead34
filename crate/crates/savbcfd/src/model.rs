//! Free-energy model: shifted double-well density, discrete energies, and
//! the roughness diagnostic.
//!
//! The total discrete energy tracked by the scheme is
//! `E_d(Z) = lambda/2 ||Z||_m^2 + 1/2 ||dZ||_TM^2 + R^2`,
//! where `R` approximates `r(t) = sqrt(E1(phi))` and
//! `E1^h(Z) = sum hx hy F(Z_ij) + C0`.

use std::fmt;
use std::sync::Arc;

use crate::grid::{self, CellField, Grid};

/// Which gradient flow the chemical potential drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowType {
    /// `G = -1`: Allen-Cahn.
    L2,
    /// `G = laplacian`: Cahn-Hilliard.
    Hm1,
}

impl FlowType {
    pub fn as_str(&self) -> &'static str {
        match self {
            FlowType::L2 => "ac",
            FlowType::Hm1 => "ch",
        }
    }
}

/// Nonlinear free-energy density `F` and its derivative.
pub trait Potential: Send + Sync {
    fn density(&self, phi: f64) -> f64;
    fn derivative(&self, phi: f64) -> f64;
}

/// `F(phi) = (phi^2 - 1 - beta)^2 / (4 eps^2)`. The additive constant
/// `-(beta^2 + 2 beta)/(4 eps^2)` of the rewritten double well is dropped;
/// it cancels in every dissipation check.
#[derive(Debug, Clone, Copy)]
pub struct ShiftedDoubleWell {
    pub epsilon: f64,
    pub beta: f64,
}

impl Potential for ShiftedDoubleWell {
    fn density(&self, phi: f64) -> f64 {
        let w = phi * phi - 1.0 - self.beta;
        w * w / (4.0 * self.epsilon * self.epsilon)
    }

    fn derivative(&self, phi: f64) -> f64 {
        phi * (phi * phi - 1.0 - self.beta) / (self.epsilon * self.epsilon)
    }
}

/// Model parameters for one gradient-flow problem.
///
/// `F`/`F'` are pluggable through [`Potential`]; the shipped instance is the
/// shifted double well built by [`EnergyModel::shifted_double_well`].
#[derive(Clone)]
pub struct EnergyModel {
    pub epsilon: f64,
    pub beta: f64,
    pub c0: f64,
    pub mobility: f64,
    pub flow: FlowType,
    /// Positive guard under `E1^h`; prevents division by zero in the
    /// `1/sqrt(E1^h)` factors when the field sits exactly at the well minima.
    pub e1_floor: f64,
    potential: Arc<dyn Potential>,
}

impl fmt::Debug for EnergyModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EnergyModel")
            .field("epsilon", &self.epsilon)
            .field("beta", &self.beta)
            .field("c0", &self.c0)
            .field("mobility", &self.mobility)
            .field("flow", &self.flow)
            .field("e1_floor", &self.e1_floor)
            .finish()
    }
}

pub const DEFAULT_E1_FLOOR: f64 = 1e-12;

impl EnergyModel {
    /// Standard shifted double-well model.
    ///
    /// # Panics
    /// Panics on non-positive `epsilon` or `mobility`, or negative `beta`.
    pub fn shifted_double_well(epsilon: f64, beta: f64, mobility: f64, flow: FlowType) -> Self {
        assert!(epsilon > 0.0, "epsilon must be positive");
        assert!(beta >= 0.0, "beta must be nonnegative");
        assert!(mobility > 0.0, "mobility must be positive");
        EnergyModel {
            epsilon,
            beta,
            c0: 0.0,
            mobility,
            flow,
            e1_floor: DEFAULT_E1_FLOOR,
            potential: Arc::new(ShiftedDoubleWell { epsilon, beta }),
        }
    }

    /// Same contract with a caller-supplied `F`/`F'` pair.
    pub fn with_potential(
        epsilon: f64,
        beta: f64,
        mobility: f64,
        flow: FlowType,
        potential: Arc<dyn Potential>,
    ) -> Self {
        assert!(epsilon > 0.0 && mobility > 0.0 && beta >= 0.0);
        EnergyModel { epsilon, beta, c0: 0.0, mobility, flow, e1_floor: DEFAULT_E1_FLOOR, potential }
    }

    pub fn with_c0(mut self, c0: f64) -> Self {
        self.c0 = c0;
        self
    }

    /// Linear stabilization coefficient `lambda = beta / epsilon^2`.
    #[inline]
    pub fn lambda(&self) -> f64 {
        self.beta / (self.epsilon * self.epsilon)
    }

    #[inline]
    pub fn f_density(&self, phi: f64) -> f64 {
        self.potential.density(phi)
    }

    #[inline]
    pub fn f_prime(&self, phi: f64) -> f64 {
        self.potential.derivative(phi)
    }

    /// `F'` applied pointwise.
    pub fn f_prime_field(&self, z: &CellField) -> CellField {
        let data = z.data.iter().map(|&p| self.f_prime(p)).collect();
        CellField { nx: z.nx, ny: z.ny, data }
    }
}

/// Discrete nonlinear energy with the positivity guard applied.
#[derive(Debug, Clone, Copy)]
pub struct E1h {
    pub value: f64,
    /// True when the raw sum fell below the floor and was clamped.
    pub clamped: bool,
}

/// `E1^h(Z) = sum hx hy F(Z_ij) + C0`, clamped below by `e1_floor`.
pub fn e1_h(z: &CellField, model: &EnergyModel, grid: &Grid) -> E1h {
    assert!(z.conforms(grid), "e1_h: field does not conform to grid");
    let mut s = 0.0;
    for &p in &z.data {
        s += model.f_density(p);
    }
    let raw = s * grid.cell_area() + model.c0;
    if raw < model.e1_floor {
        E1h { value: model.e1_floor, clamped: true }
    } else {
        E1h { value: raw, clamped: false }
    }
}

/// Phase field, auxiliary scalar, and the previous level used by the
/// half-step extrapolation.
#[derive(Debug, Clone)]
pub struct SavState {
    pub z: CellField,
    pub r: f64,
    pub z_prev: CellField,
    pub t: f64,
    pub dt_prev: f64,
}

impl SavState {
    /// Initial state: `R0 = sqrt(E1^h(Z0))` and `Z_prev = Z0` (so the first
    /// extrapolated half step equals `Z0`).
    pub fn from_initial(z0: CellField, model: &EnergyModel, grid: &Grid) -> Self {
        assert!(z0.conforms(grid));
        let r0 = e1_h(&z0, model, grid).value.sqrt();
        SavState { z_prev: z0.clone(), z: z0, r: r0, t: 0.0, dt_prev: 0.0 }
    }
}

/// `E_d(Z, R) = lambda/2 ||Z||_m^2 + 1/2 ||dZ||_TM^2 + R^2`.
pub fn discrete_energy(state: &SavState, model: &EnergyModel, grid: &Grid) -> f64 {
    energy_of(&state.z, state.r, model, grid)
}

pub fn energy_of(z: &CellField, r: f64, model: &EnergyModel, grid: &Grid) -> f64 {
    assert!(z.conforms(grid));
    0.5 * model.lambda() * grid::inner_m(z, z, grid) + 0.5 * grid::grad_norm_sq(z, grid) + r * r
}

/// Root-mean-square deviation from the cell mean:
/// `sqrt( (1/|Omega|) * ||Z - mean(Z)||_m^2 )`.
pub fn roughness(z: &CellField, grid: &Grid) -> f64 {
    assert!(z.conforms(grid));
    let area = grid.area();
    let mean = grid::mass(z, grid) / area;
    let mut s = 0.0;
    for &v in &z.data {
        let d = v - mean;
        s += d * d;
    }
    (s * grid.cell_area() / area).sqrt()
}
