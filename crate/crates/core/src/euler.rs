//! Eulerian pseudo-spectral solver of the nonlocal system
//!
//! ```text
//! u_t   = -u u_x + (1 - d_xx)^{-1} ( -b u u_x + (b - 3) u_x u_xx + rho rho_x )
//! rho_t = -(rho u)_x
//! ```
//!
//! Same grid, two-thirds dealiasing and RK4 as the Lagrangian solver, so that
//! any disagreement between the two measures formulation error only.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fft::Complex;
use crate::field::ScalarField;
use crate::flow::SolverConfig;
use crate::spectral::{SpectralFilter, Spectrum};

#[derive(Debug, Clone, PartialEq)]
pub struct EulerState {
    pub u: ScalarField,
    pub rho: ScalarField,
    pub t: f64,
}

impl EulerState {
    pub fn new(u: ScalarField, rho: ScalarField, t: f64) -> Result<Self> {
        if !u.grid().same_as(rho.grid()) {
            return Err(Error::GridMismatch);
        }
        Ok(EulerState { u, rho, t })
    }

    pub fn is_finite(&self) -> bool {
        self.u.is_finite() && self.rho.is_finite()
    }

    /// `∫ (u^2 + u_x^2 - rho^2) dx`; invariant of the `b = 2` system.
    pub fn energy(&self) -> f64 {
        let ux = Spectrum::of(&self.u).derivative(1).to_field();
        let h = self.u.grid().spacing();
        self.u
            .values()
            .iter()
            .zip(ux.values())
            .zip(self.rho.values())
            .map(|((u, ux), r)| u * u + ux * ux - r * r)
            .sum::<f64>()
            * h
    }
}

/// `(u_t, rho_t)` of the nonlocal system, every product dealiased.
pub fn euler_rhs(state: &EulerState, b: f64) -> Result<(ScalarField, ScalarField)> {
    let grid = state.u.grid().clone();
    if !grid.same_as(state.rho.grid()) {
        return Err(Error::GridMismatch);
    }
    let (su, srho) = Spectrum::of_pair(&state.u, &state.rho);
    let (u_x, u_xx) = Spectrum::to_field_pair(&su.derivative(1), &su.derivative(2));
    let rho_x = srho.derivative(1).to_field();

    let n = grid.n_points();
    let (u, rho) = (state.u.values(), state.rho.values());
    let mut advect = Vec::with_capacity(n);
    let mut nonlocal = Vec::with_capacity(n);
    let mut flux = Vec::with_capacity(n);
    for j in 0..n {
        let (ux, uxx) = (u_x.values()[j], u_xx.values()[j]);
        advect.push(-u[j] * ux);
        nonlocal.push(-b * u[j] * ux + (b - 3.0) * ux * uxx + rho[j] * rho_x.values()[j]);
        flux.push(rho[j] * u[j]);
    }
    let (sa, sn) = Spectrum::of_pair(
        &ScalarField::from_raw(&grid, advect),
        &ScalarField::from_raw(&grid, nonlocal),
    );
    let sflux = Spectrum::of(&ScalarField::from_raw(&grid, flux));
    let cut = grid.dealias_cutoff();
    let nyq = grid.nyquist();
    let xi = grid.wavenumbers();
    let mut du = Vec::with_capacity(n);
    let mut drho = Vec::with_capacity(n);
    for k in 0..n {
        if grid.mode(k).abs() > cut {
            du.push(Complex::ZERO);
            drho.push(Complex::ZERO);
            continue;
        }
        du.push(sa.coeffs()[k] + sn.coeffs()[k].scale(1.0 / (1.0 + xi[k] * xi[k])));
        drho.push(if Some(k) == nyq {
            Complex::ZERO
        } else {
            -(sflux.coeffs()[k].mul_i().scale(xi[k]))
        });
    }
    let (ut, rhot) = Spectrum::to_field_pair(
        &Spectrum::from_coeffs(&grid, du),
        &Spectrum::from_coeffs(&grid, drho),
    );
    if !ut.is_finite() || !rhot.is_finite() {
        return Err(Error::BlowUp { t: state.t });
    }
    Ok((ut, rhot))
}

/// One RK4 step of size `h`; negative `h` integrates backwards.
pub fn euler_step(
    state: &EulerState,
    b: f64,
    h: f64,
    filter: Option<&SpectralFilter>,
) -> Result<EulerState> {
    let stage = |u: ScalarField, rho: ScalarField, t: f64| EulerState { u, rho, t };
    let (k1u, k1r) = euler_rhs(state, b)?;
    let s2 = stage(state.u.axpy(0.5 * h, &k1u), state.rho.axpy(0.5 * h, &k1r), state.t + 0.5 * h);
    let (k2u, k2r) = euler_rhs(&s2, b)?;
    let s3 = stage(state.u.axpy(0.5 * h, &k2u), state.rho.axpy(0.5 * h, &k2r), state.t + 0.5 * h);
    let (k3u, k3r) = euler_rhs(&s3, b)?;
    let s4 = stage(state.u.axpy(h, &k3u), state.rho.axpy(h, &k3r), state.t + h);
    let (k4u, k4r) = euler_rhs(&s4, b)?;
    let w = h / 6.0;
    let combine = |x: &ScalarField, a: &ScalarField, b2: &ScalarField, c: &ScalarField, d: &ScalarField| {
        let vals = (0..x.len())
            .map(|j| {
                x.values()[j]
                    + w * (a.values()[j] + 2.0 * b2.values()[j] + 2.0 * c.values()[j] + d.values()[j])
            })
            .collect();
        ScalarField::from_raw(x.grid(), vals)
    };
    let mut u = combine(&state.u, &k1u, &k2u, &k3u, &k4u);
    let mut rho = combine(&state.rho, &k1r, &k2r, &k3r, &k4r);
    if let Some(f) = filter {
        u = f.apply(&u);
        rho = f.apply(&rho);
    }
    let next = EulerState {
        u,
        rho,
        t: state.t + h,
    };
    if !next.is_finite() {
        return Err(Error::BlowUp { t: next.t });
    }
    Ok(next)
}

/// Integrates from `(u0, rho0)` up to `cfg.t_final`; returns the initial
/// state, every `cfg.stride`-th step and the final state.
pub fn euler_integrate(
    u0: &ScalarField,
    rho0: &ScalarField,
    b: f64,
    cfg: &SolverConfig,
) -> Result<Vec<EulerState>> {
    cfg.validate()?;
    if !b.is_finite() {
        return Err(Error::param("b", b, "finite"));
    }
    let mut state = EulerState::new(u0.clone(), rho0.clone(), 0.0)?;
    let n = cfg.n_steps();
    let h = cfg.step();
    let mut out = Vec::with_capacity(n / cfg.stride + 2);
    out.push(state.clone());
    for step in 1..=n {
        state = euler_step(&state, b, h, cfg.filter.as_ref())?;
        state.t = step as f64 * h;
        if step % cfg.stride == 0 || step == n {
            out.push(state.clone());
        }
    }
    Ok(out)
}
