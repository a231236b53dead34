//! Energy-stable solver for L2 (Allen-Cahn) and H^-1 (Cahn-Hilliard)
//! gradient flows on rectangular domains, combining a scalar-auxiliary-
//! variable Crank-Nicolson time discretization with block-centered finite
//! differences on a staggered grid.
//!
//! Every step costs two constant-coefficient SPD solves plus a scalar
//! correction, is unconditionally energy stable, and (for the H^-1 flow)
//! conserves mass. The [`harness`] module drives Cauchy-error convergence
//! studies and coarsening experiments with adaptive time stepping; the
//! `savbcfd` binary exposes them on the command line.

pub mod adaptive;
pub mod cli;
pub mod error;
pub mod grid;
pub mod harness;
pub mod io;
pub mod linsolve;
pub mod model;
pub mod rng;
pub mod spectral;
pub mod stepper;

pub use error::{Error, Result};
