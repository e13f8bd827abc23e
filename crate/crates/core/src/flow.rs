//! Lagrangian solver: the flow map `phi` of `u` as a second order ODE
//!
//! ```text
//! phi_tt = F(phi, phi_t, rho_0),   phi(0) = id,   phi_t(0) = u_0,
//! F = [ (1 - d_xx)^{-1} ( -b u u_x + (b - 3) u_x u_xx + rho rho_x ) ] ∘ phi
//! u = phi_t ∘ phi^{-1},   rho = (rho_0 / phi_x) ∘ phi^{-1}
//! ```
//!
//! integrated with classical fixed-step RK4 on the pair `(phi, phi_t)`.

use alloc::vec::Vec;

use crate::diffeo::{self, validity_of, Diffeo, DEFAULT_VALIDITY_MARGIN};
use crate::error::{Error, Result};
use crate::euler::EulerState;
use crate::fft::Complex;
use crate::field::ScalarField;
use crate::math;
use crate::spectral::{SpectralFilter, Spectrum};
use crate::spline::{sample_many, PeriodicSpline};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Integrator {
    #[default]
    Rk4,
}

/// Time stepping parameters shared by both solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_final: f64,
    pub integrator: Integrator,
    pub validity_margin: f64,
    /// Keep every `stride`-th step (the first and last are always kept).
    pub stride: usize,
    /// Optional spectral filter; only the Eulerian solver applies it.
    pub filter: Option<SpectralFilter>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dt: 5e-4,
            t_final: 1.0,
            integrator: Integrator::Rk4,
            validity_margin: DEFAULT_VALIDITY_MARGIN,
            stride: 100,
            filter: None,
        }
    }
}

impl SolverConfig {
    pub fn new(dt: f64, t_final: f64) -> Result<Self> {
        let cfg = SolverConfig {
            dt,
            t_final,
            ..SolverConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_t_final(&self, t_final: f64) -> Self {
        SolverConfig {
            t_final,
            ..self.clone()
        }
    }

    pub fn with_dt(&self, dt: f64) -> Self {
        SolverConfig { dt, ..self.clone() }
    }

    pub fn with_stride(&self, stride: usize) -> Self {
        SolverConfig {
            stride,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::param("dt", self.dt, "> 0"));
        }
        if !(self.t_final.is_finite() && self.t_final > 0.0) {
            return Err(Error::param("t_final", self.t_final, "> 0"));
        }
        if self.dt > self.t_final * (1.0 + 1e-12) {
            return Err(Error::param("dt", self.dt, "<= t_final"));
        }
        if !(self.validity_margin.is_finite() && self.validity_margin >= 0.0) {
            return Err(Error::param(
                "validity_margin",
                self.validity_margin,
                ">= 0",
            ));
        }
        if self.stride == 0 {
            return Err(Error::param("stride", 0.0, ">= 1"));
        }
        Ok(())
    }

    /// Number of uniform steps covering `[0, t_final]`.
    pub fn n_steps(&self) -> usize {
        let r = self.t_final / self.dt;
        let nearest = math::round(r);
        let n = if math::abs(r - nearest) <= 1e-9 * r {
            nearest
        } else {
            math::ceil(r)
        };
        (n as usize).max(1)
    }

    /// The step actually taken, `t_final / n_steps`.
    pub fn step(&self) -> f64 {
        self.t_final / self.n_steps() as f64
    }
}

/// `(phi, v = phi_t)` with the frozen Lagrangian density.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianState {
    pub phi: Diffeo,
    pub v: ScalarField,
    pub rho0: ScalarField,
    pub b: f64,
    pub t: f64,
}

impl LagrangianState {
    /// `phi = id`, `v = u0`.
    pub fn initial(u0: &ScalarField, rho0: &ScalarField, b: f64) -> Result<Self> {
        if !u0.grid().same_as(rho0.grid()) {
            return Err(Error::GridMismatch);
        }
        if !b.is_finite() {
            return Err(Error::param("b", b, "finite"));
        }
        Ok(LagrangianState {
            phi: Diffeo::identity(u0.grid()),
            v: u0.clone(),
            rho0: rho0.clone(),
            b,
            t: 0.0,
        })
    }
}

/// Snapshots of one Lagrangian run, in increasing time.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub snapshots: Vec<LagrangianState>,
    pub dt: f64,
    pub stride: usize,
}

impl Trajectory {
    pub fn last(&self) -> &LagrangianState {
        self.snapshots.last().expect("trajectory is never empty")
    }

    pub fn into_last(mut self) -> LagrangianState {
        self.snapshots.pop().expect("trajectory is never empty")
    }
}

/// `F(phi, v, rho0)`.
///
/// The Eulerian fields `u = v ∘ phi^{-1}` and `rho = (rho0/phi_x) ∘ phi^{-1}`
/// are formed once; `rho_x` is taken in Lagrangian variables as
/// `((rho0/phi_x)_x / phi_x) ∘ phi^{-1}`.
pub fn rhs_f(state: &LagrangianState) -> Result<ScalarField> {
    rhs(&state.phi, &state.v, &state.rho0, state.b, DEFAULT_VALIDITY_MARGIN)
}

fn rhs(phi: &Diffeo, v: &ScalarField, rho0: &ScalarField, b: f64, margin: f64) -> Result<ScalarField> {
    let grid = phi.grid().clone();
    if !grid.same_as(v.grid()) || !grid.same_as(rho0.grid()) {
        return Err(Error::GridMismatch);
    }
    let sd = Spectrum::of(phi.displacement());
    let (spline_d, d_x) = PeriodicSpline::from_spectrum_with(&sd, &sd.derivative(1));
    let phi_x = d_x.map(|p| 1.0 + p);
    let validity = validity_of(&phi_x, margin);
    if !validity.valid {
        return Err(Error::InvalidDiffeo {
            min_phi_x: validity.min_phi_x,
            at: validity.at,
        });
    }
    let psi = diffeo::invert_with_spline(phi, &spline_d)?;

    let q = rho0.zip_map(&phi_x, |r, p| r / p);
    let (sv, sq) = Spectrum::of_pair(v, &q);
    let (spline_q, q_x) = PeriodicSpline::from_spectrum_with(&sq, &sq.derivative(1));
    let rho_x_lag = q_x.zip_map(&phi_x, |a, p| a / p);
    let (spline_v, spline_rx) = PeriodicSpline::from_spectra(&sv, &Spectrum::of(&rho_x_lag));
    let [u, rho, rho_x] = sample_many([&spline_v, &spline_q, &spline_rx], &psi.grid_images())
        .map(|vals| ScalarField::from_raw(&grid, vals));

    let su = Spectrum::of(&u);
    let (u_x, u_xx) = Spectrum::to_field_pair(&su.derivative(1), &su.derivative(2));

    let integrand: Vec<f64> = (0..grid.n_points())
        .map(|j| {
            let (uj, ux, uxx) = (u.values()[j], u_x.values()[j], u_xx.values()[j]);
            -b * uj * ux + (b - 3.0) * ux * uxx + rho.values()[j] * rho_x.values()[j]
        })
        .collect();
    let integrand = ScalarField::from_raw(&grid, integrand);
    let cut = grid.dealias_cutoff();
    let g = Spectrum::of(&integrand).map(|k, xi| {
        if grid.mode(k).abs() > cut {
            Complex::ZERO
        } else {
            Complex::new(1.0 / (1.0 + xi * xi), 0.0)
        }
    });
    let f = diffeo::compose_unchecked(&PeriodicSpline::from_spectrum(&g), phi);
    if !f.is_finite() {
        return Err(Error::BlowUp { t: f64::NAN });
    }
    Ok(f)
}

fn at_time(err: Error, t: f64) -> Error {
    match err {
        Error::InvalidDiffeo { min_phi_x, at } => Error::Breakdown { t, min_phi_x, at },
        Error::BlowUp { .. } => Error::BlowUp { t },
        other => other,
    }
}

/// One RK4 step of size `h` (any sign).
pub fn rk4_step(state: &LagrangianState, h: f64, margin: f64) -> Result<LagrangianState> {
    let (rho0, b, t) = (&state.rho0, state.b, state.t);
    let d0 = state.phi.displacement();
    let v0 = &state.v;
    let eval = |d: &ScalarField, v: &ScalarField, tt: f64| {
        rhs(&Diffeo::from_displacement(d.clone()), v, rho0, b, margin).map_err(|e| at_time(e, tt))
    };

    let k1 = eval(d0, v0, t)?;
    let d2 = d0.axpy(0.5 * h, v0);
    let v2 = v0.axpy(0.5 * h, &k1);
    let k2 = eval(&d2, &v2, t + 0.5 * h)?;
    let d3 = d0.axpy(0.5 * h, &v2);
    let v3 = v0.axpy(0.5 * h, &k2);
    let k3 = eval(&d3, &v3, t + 0.5 * h)?;
    let d4 = d0.axpy(h, &v3);
    let v4 = v0.axpy(h, &k3);
    let k4 = eval(&d4, &v4, t + h)?;

    let w = h / 6.0;
    let n = d0.len();
    let mut d = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    for j in 0..n {
        d.push(d0.values()[j] + w * (v0.values()[j] + 2.0 * v2.values()[j] + 2.0 * v3.values()[j] + v4.values()[j]));
        v.push(v0.values()[j] + w * (k1.values()[j] + 2.0 * k2.values()[j] + 2.0 * k3.values()[j] + k4.values()[j]));
    }
    let grid = d0.grid();
    Ok(LagrangianState {
        phi: Diffeo::from_displacement(ScalarField::from_raw(grid, d)),
        v: ScalarField::from_raw(grid, v),
        rho0: rho0.clone(),
        b,
        t: t + h,
    })
}

/// Integrates `phi_tt = F(phi, phi_t, rho0)` from `phi = id`, `phi_t = u0`
/// up to `cfg.t_final`.
pub fn integrate(u0: &ScalarField, rho0: &ScalarField, b: f64, cfg: &SolverConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let initial = LagrangianState::initial(u0, rho0, b)?;
    integrate_from(initial, cfg)
}

/// Continues an existing state for `cfg.t_final` time units.
pub fn integrate_from(initial: LagrangianState, cfg: &SolverConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let n = cfg.n_steps();
    let h = cfg.step();
    let t0 = initial.t;
    let mut snapshots = Vec::with_capacity(n / cfg.stride + 2);
    let mut state = initial;
    snapshots.push(state.clone());
    for step in 1..=n {
        let mut next = rk4_step(&state, h, cfg.validity_margin)?;
        next.t = t0 + step as f64 * h;
        if !next.v.is_finite() || !next.phi.displacement().is_finite() {
            return Err(Error::BlowUp { t: next.t });
        }
        let v = next.phi.validate(cfg.validity_margin);
        if !v.valid {
            return Err(Error::Breakdown {
                t: next.t,
                min_phi_x: v.min_phi_x,
                at: v.at,
            });
        }
        state = next;
        if step % cfg.stride == 0 || step == n {
            snapshots.push(state.clone());
        }
    }
    Ok(Trajectory {
        snapshots,
        dt: h,
        stride: cfg.stride,
    })
}

/// `u = v ∘ phi^{-1}`, `rho = (rho0 / phi_x) ∘ phi^{-1}`.
pub fn reconstruct(state: &LagrangianState) -> Result<EulerState> {
    let phi_x = state.phi.require_valid(DEFAULT_VALIDITY_MARGIN)?;
    let q = state.rho0.zip_map(&phi_x, |r, p| r / p);
    if state.phi.displacement().values().iter().all(|&d| d == 0.0) {
        return Ok(EulerState {
            u: state.v.clone(),
            rho: q,
            t: state.t,
        });
    }
    let psi = diffeo::invert_unchecked(&state.phi)?;
    let (sv, sq) = PeriodicSpline::new_pair(&state.v, &q);
    Ok(EulerState {
        u: diffeo::compose_unchecked(&sv, &psi),
        rho: diffeo::compose_unchecked(&sq, &psi),
        t: state.t,
    })
}

/// Time-one flow map `Psi(u0, rho0) = phi(1; u0, rho0)`.
pub fn psi(u0: &ScalarField, rho0: &ScalarField, b: f64, cfg: &SolverConfig) -> Result<Diffeo> {
    let cfg = cfg.with_t_final(1.0).with_stride(usize::MAX);
    Ok(integrate(u0, rho0, b, &cfg)?.into_last().phi)
}

/// How [`solution_map`] reaches time `T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionRoute {
    /// Integrate `(u0, rho0)` up to `T` with step `cfg.dt`.
    Direct,
    /// Integrate `(T u0, T rho0)` up to 1 with step `cfg.dt / T` and divide by `T`.
    Scaled,
}

/// `Phi_T(u0, rho0) = (u(T), rho(T))`.
pub fn solution_map(
    t_end: f64,
    u0: &ScalarField,
    rho0: &ScalarField,
    b: f64,
    cfg: &SolverConfig,
    route: SolutionRoute,
) -> Result<EulerState> {
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::param("T", t_end, "> 0"));
    }
    match route {
        SolutionRoute::Direct => {
            let cfg = cfg.with_t_final(t_end).with_stride(usize::MAX);
            reconstruct(&integrate(u0, rho0, b, &cfg)?.into_last())
        }
        SolutionRoute::Scaled => {
            let cfg = cfg
                .with_t_final(1.0)
                .with_dt(cfg.dt / t_end)
                .with_stride(usize::MAX);
            let end = integrate(&u0.scale(t_end), &rho0.scale(t_end), b, &cfg)?.into_last();
            let scaled = reconstruct(&end)?;
            Ok(EulerState {
                u: scaled.u.scale(1.0 / t_end),
                rho: scaled.rho.scale(1.0 / t_end),
                t: t_end,
            })
        }
    }
}

/// Finite-difference settings for [`directional_derivative_psi`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DerivativeOptions {
    /// Step along the direction; `None` picks `1e-4` relative to the size of
    /// the base point and the direction.
    pub eps: Option<f64>,
    /// Combine steps `eps` and `eps/2` by Richardson extrapolation.
    pub richardson: bool,
}

/// Default finite-difference step: `1e-4 * max(1, |base|_inf) / |direction|_inf`.
pub fn default_eps(u0: &ScalarField, rho0: &ScalarField, w: (&ScalarField, &ScalarField)) -> f64 {
    let base = u0.sup_norm().max(rho0.sup_norm()).max(1.0);
    let dir = w.0.sup_norm().max(w.1.sup_norm());
    if dir == 0.0 {
        1e-4 * base
    } else {
        1e-4 * base / dir
    }
}

/// Central difference `(Psi(x + eps w) - Psi(x - eps w)) / (2 eps)` on the
/// displacement fields.
pub fn directional_derivative_psi(
    u0: &ScalarField,
    rho0: &ScalarField,
    w: (&ScalarField, &ScalarField),
    b: f64,
    cfg: &SolverConfig,
    opts: DerivativeOptions,
) -> Result<ScalarField> {
    if w.0.sup_norm() == 0.0 && w.1.sup_norm() == 0.0 {
        return Ok(ScalarField::zeros(u0.grid()));
    }
    let eps = opts.eps.unwrap_or_else(|| default_eps(u0, rho0, w));
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::param("eps", eps, "> 0"));
    }
    let central = |e: f64| -> Result<ScalarField> {
        let plus = psi(&u0.axpy(e, w.0), &rho0.axpy(e, w.1), b, cfg)?;
        let minus = psi(&u0.axpy(-e, w.0), &rho0.axpy(-e, w.1), b, cfg)?;
        Ok((plus.displacement() - minus.displacement()).scale(0.5 / e))
    };
    let coarse = central(eps)?;
    if !opts.richardson {
        return Ok(coarse);
    }
    let fine = central(0.5 * eps)?;
    Ok(fine.zip_map(&coarse, |f, c| (4.0 * f - c) / 3.0))
}

/// Per-snapshot invariants of a Lagrangian run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagnostics {
    pub t: f64,
    pub min_phi_x: f64,
    /// `max_j |phi_x (rho ∘ phi) - rho0|` with `rho` the reconstructed density.
    pub conservation_residual: f64,
    /// `∫ rho dx`
    pub mass: f64,
    /// `∫ (u^2 + u_x^2 - rho^2) dx`, conserved for `b = 2`.
    pub energy: f64,
}

pub fn diagnostics(state: &LagrangianState) -> Result<Diagnostics> {
    let phi_x = state.phi.require_valid(DEFAULT_VALIDITY_MARGIN)?;
    let min_phi_x = validity_of(&phi_x, 0.0).min_phi_x;
    let euler = reconstruct(state)?;
    let rho_back = diffeo::compose_unchecked(&PeriodicSpline::new(&euler.rho), &state.phi);
    let residual = rho_back
        .values()
        .iter()
        .zip(phi_x.values())
        .zip(state.rho0.values())
        .map(|((r, p), r0)| math::abs(p * r - r0))
        .fold(0.0, f64::max);
    Ok(Diagnostics {
        t: state.t,
        min_phi_x,
        conservation_residual: residual,
        mass: euler.rho.integral(),
        energy: euler.energy(),
    })
}

/// Observed temporal order of the Lagrangian solver.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy {
    pub dts: Vec<f64>,
    /// `|phi(T) - phi_ref(T)|_inf` per step size.
    pub errors: Vec<f64>,
    pub reference_dt: f64,
    /// Least-squares slope of `log error` against `log dt`.
    pub slope: f64,
}

pub fn time_convergence(
    u0: &ScalarField,
    rho0: &ScalarField,
    b: f64,
    cfg: &SolverConfig,
    dts: &[f64],
    reference_dt: f64,
) -> Result<ConvergenceStudy> {
    let run = |dt: f64| -> Result<Diffeo> {
        let c = cfg.with_dt(dt).with_stride(usize::MAX);
        Ok(integrate(u0, rho0, b, &c)?.into_last().phi)
    };
    let reference = run(reference_dt)?;
    let mut errors = Vec::with_capacity(dts.len());
    for &dt in dts {
        let phi = run(dt)?;
        errors.push((phi.displacement() - reference.displacement()).sup_norm());
    }
    let lx: Vec<f64> = dts.iter().map(|d| math::ln(*d)).collect();
    let ly: Vec<f64> = errors.iter().map(|e| math::ln(*e)).collect();
    Ok(ConvergenceStudy {
        dts: dts.to_vec(),
        slope: math::ls_slope(&lx, &ly),
        errors,
        reference_dt,
    })
}
