//! Numerical laboratory for the two-component b-family
//!
//! ```text
//! u_t - u_txx + (b+1) u u_x = b u_x u_xx + u u_xxx + rho rho_x
//! rho_t + (rho u)_x = 0
//! ```
//!
//! on a periodic interval `[0, L)`. The crate carries two independent solvers:
//!
//! * [`flow`] integrates the flow map `phi` of `u` as a second order ODE
//!   `phi_tt = F(phi, phi_t, rho_0)` on the group of circle diffeomorphisms and
//!   reconstructs `(u, rho)` by inversion and composition.
//! * [`euler`] is a plain pseudo-spectral method-of-lines solver of the
//!   nonlocal form of the system and serves as an oracle for the first.
//!
//! On top of these, [`probe`] builds the moving-hump sequences that exhibit
//! non-uniform dependence of the solution map on the initial data.
//!
//! The crate is `no_std` (it needs `alloc`); file formats, configuration and
//! the command line live in the companion `bfamily-lab` crate.
#![no_std]
#![warn(missing_debug_implementations)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod diffeo;
pub mod error;
pub mod euler;
pub mod fft;
pub mod field;
pub mod flow;
pub mod grid;
pub mod presets;
pub mod probe;
pub mod spectral;
pub mod spline;

mod math;

pub use diffeo::{compose, conjugated_derivative, invert, Diffeo, Validity};
pub use error::{Error, Result};
pub use euler::{euler_integrate, euler_rhs, euler_step, EulerState};
pub use field::ScalarField;
pub use flow::{
    directional_derivative_psi, integrate, psi, reconstruct, rhs_f, solution_map,
    LagrangianState, SolutionRoute, SolverConfig, Trajectory,
};
pub use grid::Grid;
pub use spectral::{derivative, helmholtz_inverse, multiply_dealiased, sobolev_norm, SobolevIndex};
