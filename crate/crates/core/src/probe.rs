//! Moving-hump experiment on the solution map.
//!
//! Around a base point `(u•, rho•)` two sequences of initial data are built,
//!
//! ```text
//! (u•,          rho• + rho_n)
//! (u• + w1 / n, rho• + rho_n)
//! ```
//!
//! whose distance is `|w1|_{H^s} / n`. The density hump `rho_n` sits at
//! `a*`, has `H^{s-1}` norm `R / 4` and half-width `r_n / L` with
//! `r_n = m |w1|_{H^s} / (8 n)`. Both members are transported to `t = 1`;
//! the hump centers end up roughly `|dPsi(w1, 0)(a*)| / n` apart while the
//! humps themselves have width at most `2 r_n`, so the final densities stay
//! a fixed distance apart even though the data converge.
//!
//! `m` and the bi-Lipschitz constant `L` are measured at the base point
//! rather than derived from a priori bounds.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::diffeo::Diffeo;
use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::flow::{self, DerivativeOptions, SolutionRoute, SolverConfig};
use crate::grid::Grid;
use crate::math;
use crate::presets::{bump, plateau};
use crate::spectral::{sobolev_norm, SobolevIndex};

/// Relative threshold defining the numerical support of a field.
pub const SUPPORT_THRESHOLD: f64 = 1e-13;
/// Minimal distance of every support from the periodic seam.
pub const SEAM_CLEARANCE: f64 = 5.0;
/// Minimal distance of `a*` from the support of `rho•`.
pub const HUMP_CLEARANCE: f64 = 2.0;
/// Grid points required per hump half-width.
pub const HUMP_MIN_POINTS: f64 = 4.0;

/// Inputs of the non-uniformity experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSpec {
    pub base_u: ScalarField,
    pub base_rho: ScalarField,
    /// First component of the direction `w• = (w1, 0)`.
    pub w1: ScalarField,
    pub a_star: f64,
    /// Ball radius `R`; the humps have `H^{s-1}` norm `R / 4`.
    pub radius: f64,
    pub n_list: Vec<usize>,
    pub b: f64,
    pub s: SobolevIndex,
    pub cfg: SolverConfig,
    pub derivative: DerivativeOptions,
}

impl ProbeSpec {
    /// The default experiment: 4096 points on `[0, 40)`, `dt = 2.5e-4`.
    pub fn default_experiment() -> Self {
        let grid = Grid::new(4096, 40.0).expect("valid grid");
        let mut spec = ProbeSpec::default_on(&grid).expect("default data fit the default grid");
        spec.cfg = spec.cfg.with_dt(2.5e-4);
        spec
    }

    /// Default data sampled on `grid`, whose length should be 40.
    ///
    /// | field  | definition                                   |
    /// |--------|----------------------------------------------|
    /// | `u•`   | `0.08 bump((x - 7.5) / 2)`                   |
    /// | `rho•` | `0.02 bump((x - 7.5) / 1.5)`                 |
    /// | `w1`   | `26 plateau(x; 10, 35, ramps 3 and 20)`      |
    /// | `a*`   | `14`                                         |
    ///
    /// with `R = 0.1`, `n in {4, 8, 16, 32}`, `b = 2`, `s = 2`, `dt = 5e-4`.
    pub fn default_on(grid: &Grid) -> Result<Self> {
        Ok(ProbeSpec {
            base_u: ScalarField::from_fn(grid, |x| 0.08 * bump((x - 7.5) / 2.0))?,
            base_rho: ScalarField::from_fn(grid, |x| 0.02 * bump((x - 7.5) / 1.5))?,
            w1: ScalarField::from_fn(grid, |x| 26.0 * plateau(x, 10.0, 35.0, 3.0, 20.0))?,
            a_star: 14.0,
            radius: 0.1,
            n_list: alloc::vec![4, 8, 16, 32],
            b: 2.0,
            s: SobolevIndex::default(),
            cfg: SolverConfig::default().with_stride(usize::MAX),
            derivative: DerivativeOptions::default(),
        })
    }

    pub fn grid(&self) -> &Grid {
        self.base_u.grid()
    }

    /// Checks the geometric requirements on the data.
    pub fn validate(&self) -> Result<()> {
        let grid = self.grid();
        if !grid.same_as(self.base_rho.grid()) || !grid.same_as(self.w1.grid()) {
            return Err(Error::GridMismatch);
        }
        self.cfg.validate()?;
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::param("R", self.radius, "> 0"));
        }
        if !self.b.is_finite() {
            return Err(Error::param("b", self.b, "finite"));
        }
        if self.n_list.is_empty() || self.n_list.contains(&0) {
            return Err(Error::ProbeSpec("n_list must be non-empty and positive"));
        }
        if self.n_list.windows(2).any(|p| p[0] >= p[1]) {
            return Err(Error::ProbeSpec("n_list must be strictly increasing"));
        }
        let l = grid.length();
        if !(self.a_star.is_finite() && self.a_star >= 0.0 && self.a_star < l) {
            return Err(Error::param("a_star", self.a_star, "inside [0, L)"));
        }
        if math::abs(self.w1.eval(self.a_star)) == 0.0 {
            return Err(Error::ProbeSpec("w1 must not vanish at a_star"));
        }
        for field in [&self.base_u, &self.base_rho, &self.w1] {
            if let Some((lo, hi)) = field.numerical_support(SUPPORT_THRESHOLD) {
                if lo < SEAM_CLEARANCE || hi > l - SEAM_CLEARANCE {
                    return Err(Error::ProbeSpec("supports must stay 5 units away from the seam"));
                }
            }
        }
        if self.a_star < SEAM_CLEARANCE || self.a_star > l - SEAM_CLEARANCE {
            return Err(Error::ProbeSpec("a_star must stay 5 units away from the seam"));
        }
        if let Some((lo, hi)) = self.base_rho.numerical_support(SUPPORT_THRESHOLD) {
            let dist = if self.a_star < lo {
                lo - self.a_star
            } else if self.a_star > hi {
                self.a_star - hi
            } else {
                0.0
            };
            if dist < HUMP_CLEARANCE {
                return Err(Error::ProbeSpec("a_star must be at distance >= 2 from supp rho"));
            }
        }
        Ok(())
    }
}

/// Quantities measured once at the base point.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseMeasurement {
    /// `|w1|_{H^s}`
    pub w1_norm: f64,
    /// `dPsi_{(u•, rho•)}(w1, 0)` evaluated at `a*`.
    pub transversality: f64,
    /// `|transversality| / (2 |w1|_{H^s})`
    pub m: f64,
    pub min_phi_x: f64,
    pub max_phi_x: f64,
    /// `max(max phi_x, 1 / min phi_x)` of `Psi(u•, rho•)`.
    pub lipschitz: f64,
}

pub fn measure_base(spec: &ProbeSpec) -> Result<BaseMeasurement> {
    spec.validate()?;
    let s = spec.s.get();
    let w1_norm = sobolev_norm(&spec.w1, s)?;
    let psi = flow::psi(&spec.base_u, &spec.base_rho, spec.b, &spec.cfg)?;
    let phi_x = psi.phi_x();
    let (min_phi_x, max_phi_x) = (phi_x.min(), phi_x.max());
    let zero = ScalarField::zeros(spec.grid());
    let d = flow::directional_derivative_psi(
        &spec.base_u,
        &spec.base_rho,
        (&spec.w1, &zero),
        spec.b,
        &spec.cfg,
        spec.derivative,
    )?;
    let transversality = d.eval(spec.a_star);
    Ok(BaseMeasurement {
        w1_norm,
        transversality,
        m: math::abs(transversality) / (2.0 * w1_norm),
        min_phi_x,
        max_phi_x,
        lipschitz: max_phi_x.max(1.0 / min_phi_x),
    })
}

/// `r_n = m |w1|_{H^s} / (8 n)`
pub fn hump_radius(n: usize, m: f64, w1_norm: f64) -> f64 {
    m * w1_norm / (8.0 * n as f64)
}

/// Density hump `c * bump((x - a*) L / r_n)` with `|rho_n|_{H^{s-1}} = R / 4`.
#[allow(clippy::too_many_arguments)]
pub fn build_hump(
    n: usize,
    m: f64,
    w1_norm: f64,
    radius: f64,
    a_star: f64,
    lipschitz: f64,
    s: SobolevIndex,
    grid: &Grid,
) -> Result<ScalarField> {
    if n == 0 {
        return Err(Error::param("n", 0.0, ">= 1"));
    }
    for (name, v) in [("m", m), ("w1_norm", w1_norm), ("R", radius), ("L", lipschitz)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::param(name, v, "> 0"));
        }
    }
    let half_width = hump_radius(n, m, w1_norm) / lipschitz;
    if half_width < HUMP_MIN_POINTS * grid.spacing() {
        return Err(Error::UnderResolved {
            half_width,
            spacing: grid.spacing(),
            min_points: HUMP_MIN_POINTS,
        });
    }
    let l = grid.length();
    let profile = ScalarField::from_fn(grid, |x| bump(math::periodic_offset(x, a_star, l) / half_width))?;
    let norm = sobolev_norm(&profile, s.density())?;
    Ok(profile.scale(0.25 * radius / norm))
}

/// Closed interval on the unwrapped line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// Gap between two intervals; negative when they overlap.
    pub fn gap(&self, other: &Interval) -> f64 {
        (other.lo - self.hi).max(self.lo - other.hi)
    }

    fn image(&self, phi: &Diffeo) -> Interval {
        Interval {
            lo: phi.eval(self.lo),
            hi: phi.eval(self.hi),
        }
    }
}

/// Outcome of one sequence index.
#[derive(Debug, Clone, PartialEq)]
pub struct MemberRecord {
    pub n: usize,
    /// `|u0 - u0~|_{H^s}` as measured on the constructed fields.
    pub initial_u_distance: f64,
    /// `|w1|_{H^s} / n`
    pub expected_u_distance: f64,
    pub initial_rho_distance: f64,
    pub hump_radius: f64,
    pub hump_half_width: f64,
    pub result: core::result::Result<MemberOutcome, Error>,
}

/// Measurements at `t = 1` for a member whose two runs both succeeded.
#[derive(Debug, Clone, PartialEq)]
pub struct MemberOutcome {
    /// `H^s` distance of the velocities.
    pub final_u_distance: f64,
    /// `H^{s-1}` distance of the densities.
    pub final_rho_distance: f64,
    /// `|phi~_n(a*) - phi_n(a*)|`
    pub hump_center_gap: f64,
    /// `phi_n(supp rho•)`
    pub support_a: Interval,
    /// `phi_n(supp rho_n)`
    pub support_b: Interval,
    /// `phi~_n(supp rho•)`
    pub support_c: Interval,
    /// `phi~_n(supp rho_n)`
    pub support_d: Interval,
    /// `|(rho_n / phi_x) ∘ phi^{-1}|_{H^{s-1}} / |rho_n|_{H^{s-1}}`, an
    /// empirical value of the norm-equivalence constant.
    pub pushforward_ratio: f64,
}

impl MemberOutcome {
    pub fn n_times_gap(&self, n: usize) -> f64 {
        n as f64 * self.hump_center_gap
    }
}

fn support_interval(f: &ScalarField) -> Option<Interval> {
    f.numerical_support(SUPPORT_THRESHOLD)
        .map(|(lo, hi)| Interval { lo, hi })
}

/// Runs both members for sequence index `n`. Failures to build the hump or
/// to integrate are recorded in the returned record.
pub fn run_member(spec: &ProbeSpec, base: &BaseMeasurement, n: usize) -> Result<MemberRecord> {
    let grid = spec.grid();
    let s = spec.s;
    let r_n = hump_radius(n, base.m, base.w1_norm);
    let half_width = r_n / base.lipschitz;
    let u0 = spec.base_u.clone();
    let u0_tilde = spec.base_u.axpy(1.0 / n as f64, &spec.w1);
    let initial_u_distance = sobolev_norm(&(&u0_tilde - &u0), s.get())?;

    let outcome = build_hump(
        n,
        base.m,
        base.w1_norm,
        spec.radius,
        spec.a_star,
        base.lipschitz,
        s,
        grid,
    )
    .and_then(|rho_n| {
        let rho0 = &spec.base_rho + &rho_n;
        member_outcome(spec, &u0, &u0_tilde, &rho0, &rho_n, half_width)
    });
    Ok(MemberRecord {
        n,
        initial_u_distance,
        expected_u_distance: base.w1_norm / n as f64,
        initial_rho_distance: 0.0,
        hump_radius: r_n,
        hump_half_width: half_width,
        result: outcome,
    })
}

fn member_outcome(
    spec: &ProbeSpec,
    u0: &ScalarField,
    u0_tilde: &ScalarField,
    rho0: &ScalarField,
    rho_n: &ScalarField,
    half_width: f64,
) -> Result<MemberOutcome> {
    let s = spec.s.get();
    let cfg = spec.cfg.with_t_final(1.0).with_stride(usize::MAX);
    let end = flow::integrate(u0, rho0, spec.b, &cfg)?.into_last();
    let end_tilde = flow::integrate(u0_tilde, rho0, spec.b, &cfg)?.into_last();
    let e = flow::reconstruct(&end)?;
    let e_tilde = flow::reconstruct(&end_tilde)?;

    let hump = Interval {
        lo: spec.a_star - half_width,
        hi: spec.a_star + half_width,
    };
    let base_support = support_interval(&spec.base_rho).unwrap_or(Interval {
        lo: spec.a_star,
        hi: spec.a_star,
    });
    let pushed = flow::reconstruct(&flow::LagrangianState {
        rho0: rho_n.clone(),
        ..end.clone()
    })?;
    Ok(MemberOutcome {
        final_u_distance: sobolev_norm(&(&e.u - &e_tilde.u), s)?,
        final_rho_distance: sobolev_norm(&(&e.rho - &e_tilde.rho), s - 1.0)?,
        hump_center_gap: math::abs(end_tilde.phi.eval(spec.a_star) - end.phi.eval(spec.a_star)),
        support_a: base_support.image(&end.phi),
        support_b: hump.image(&end.phi),
        support_c: base_support.image(&end_tilde.phi),
        support_d: hump.image(&end_tilde.phi),
        pushforward_ratio: sobolev_norm(&pushed.rho, s - 1.0)? / sobolev_norm(rho_n, s - 1.0)?,
    })
}

/// Pass/fail summary of the experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeChecks {
    /// Measured initial distances equal `|w1|_{H^s} / n` to 1e-12 relative.
    pub initial_distances_exact: bool,
    /// `n * gap` within a factor 2 of `|dPsi(w•)(a*)|` for every `n >= 8`.
    pub gap_within_factor_two: bool,
    /// `min_n final_rho_distance >= 0.25 max_n final_rho_distance`.
    pub rho_distance_floor: bool,
    /// Least-squares slope of `log final_rho_distance` against `log n`.
    pub log_slope: f64,
    pub log_slope_ok: bool,
    /// The transported humps `B_n`, `D_n` are disjoint.
    pub humps_disjoint: bool,
    /// `dist(A_n, B_n) >= 1/L - 2 max hump width`.
    pub supports_separated: bool,
    /// `|B_n|, |D_n| <= 2 r_n` up to one grid spacing.
    pub hump_width_bounded: bool,
    /// Every member integrated successfully.
    pub all_members_ok: bool,
}

impl ProbeChecks {
    /// The acceptance checks: exact initial distances, gap consistency and
    /// non-decay of the final density distance.
    pub fn passed(&self) -> bool {
        self.all_members_ok
            && self.initial_distances_exact
            && self.gap_within_factor_two
            && self.rho_distance_floor
            && self.log_slope_ok
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub a_star: f64,
    pub radius: f64,
    pub s: f64,
    pub b: f64,
    pub base: BaseMeasurement,
    pub members: Vec<MemberRecord>,
    pub checks: ProbeChecks,
}

/// Measures the base point and runs every member sequentially.
pub fn run_nonuniformity_probe(spec: &ProbeSpec) -> Result<ProbeReport> {
    let base = measure_base(spec)?;
    let members = spec
        .n_list
        .iter()
        .map(|&n| run_member(spec, &base, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble_report(spec, base, members))
}

/// Deterministic reduction of member records, independent of their origin.
pub fn assemble_report(spec: &ProbeSpec, base: BaseMeasurement, mut members: Vec<MemberRecord>) -> ProbeReport {
    members.sort_by_key(|m| m.n);
    let checks = evaluate_checks(&base, &members, spec.grid().spacing());
    ProbeReport {
        a_star: spec.a_star,
        radius: spec.radius,
        s: spec.s.get(),
        b: spec.b,
        base,
        members,
        checks,
    }
}

fn evaluate_checks(base: &BaseMeasurement, members: &[MemberRecord], spacing: f64) -> ProbeChecks {
    let ok: Vec<(usize, &MemberOutcome, f64)> = members
        .iter()
        .filter_map(|m| m.result.as_ref().ok().map(|o| (m.n, o, m.hump_radius)))
        .collect();
    let all_members_ok = !members.is_empty() && ok.len() == members.len();
    let initial_distances_exact = members.iter().all(|m| {
        math::abs(m.initial_u_distance - m.expected_u_distance) <= 1e-12 * m.expected_u_distance
            && m.initial_rho_distance == 0.0
    });
    let target = math::abs(base.transversality);
    let gap_within_factor_two = ok
        .iter()
        .filter(|(n, _, _)| *n >= 8)
        .all(|(n, o, _)| {
            let v = o.n_times_gap(*n);
            v >= 0.5 * target && v <= 2.0 * target
        });
    let dists: Vec<f64> = ok.iter().map(|(_, o, _)| o.final_rho_distance).collect();
    let max = dists.iter().cloned().fold(0.0, f64::max);
    let min = dists.iter().cloned().fold(f64::INFINITY, f64::min);
    let rho_distance_floor = !dists.is_empty() && min >= 0.25 * max;
    let log_slope = if ok.len() >= 2 {
        let xs: Vec<f64> = ok.iter().map(|(n, _, _)| math::ln(*n as f64)).collect();
        let ys: Vec<f64> = dists.iter().map(|d| math::ln(*d)).collect();
        math::ls_slope(&xs, &ys)
    } else {
        f64::NAN
    };
    let max_width = ok
        .iter()
        .map(|(_, o, _)| o.support_b.width().max(o.support_d.width()))
        .fold(0.0, f64::max);
    ProbeChecks {
        initial_distances_exact,
        gap_within_factor_two,
        rho_distance_floor,
        log_slope,
        log_slope_ok: log_slope >= -0.2,
        humps_disjoint: ok.iter().all(|(_, o, _)| o.support_b.gap(&o.support_d) > 0.0),
        supports_separated: ok
            .iter()
            .all(|(_, o, _)| o.support_a.gap(&o.support_b) >= 1.0 / base.lipschitz - 2.0 * max_width),
        hump_width_bounded: ok.iter().all(|(_, o, r)| {
            o.support_b.width() <= 2.0 * r + spacing && o.support_d.width() <= 2.0 * r + spacing
        }),
        all_members_ok,
    }
}

/// One sample of the transversality scan.
#[derive(Debug, Clone, PartialEq)]
pub struct TransversalitySample {
    pub t: f64,
    /// `dPsi_{t (u•, rho•)}(w1, 0)(a*)`, or the failure at this `t`.
    pub value: core::result::Result<f64, Error>,
}

/// Scans `t -> dPsi_{t (u•, rho•)}(w1, 0)(a*)` over `t_grid`.
#[allow(clippy::too_many_arguments)]
pub fn measure_transversality(
    base_u: &ScalarField,
    base_rho: &ScalarField,
    w1: &ScalarField,
    a_star: f64,
    b: f64,
    cfg: &SolverConfig,
    opts: DerivativeOptions,
    t_grid: &[f64],
) -> Result<Vec<TransversalitySample>> {
    if !base_u.grid().same_as(base_rho.grid()) || !base_u.grid().same_as(w1.grid()) {
        return Err(Error::GridMismatch);
    }
    if let Some(&t) = t_grid.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(Error::param("t", t, "in [0, 1]"));
    }
    let zero = ScalarField::zeros(w1.grid());
    Ok(t_grid
        .iter()
        .map(|&t| TransversalitySample {
            t,
            value: flow::directional_derivative_psi(
                &base_u.scale(t),
                &base_rho.scale(t),
                (w1, &zero),
                b,
                cfg,
                opts,
            )
            .map(|d| d.eval(a_star)),
        })
        .collect())
}

/// Direct against scaled evaluation of `Phi_T` for one `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleCheck {
    pub t_end: f64,
    /// `(|u_d - u_s|_{H^s} + |rho_d - rho_s|_{H^{s-1}}) / (|u_d|_{H^s} + |rho_d|_{H^{s-1}})`,
    /// zero when both routes return zero.
    pub discrepancy: core::result::Result<f64, Error>,
}

pub fn check_scale_invariance(
    u0: &ScalarField,
    rho0: &ScalarField,
    b: f64,
    t_list: &[f64],
    cfg: &SolverConfig,
    s: SobolevIndex,
) -> Vec<ScaleCheck> {
    t_list
        .iter()
        .map(|&t_end| ScaleCheck {
            t_end,
            discrepancy: scale_discrepancy(u0, rho0, b, t_end, cfg, s),
        })
        .collect()
}

fn scale_discrepancy(
    u0: &ScalarField,
    rho0: &ScalarField,
    b: f64,
    t_end: f64,
    cfg: &SolverConfig,
    s: SobolevIndex,
) -> Result<f64> {
    let direct = flow::solution_map(t_end, u0, rho0, b, cfg, SolutionRoute::Direct)?;
    let scaled = flow::solution_map(t_end, u0, rho0, b, cfg, SolutionRoute::Scaled)?;
    let (s1, s0) = (s.get(), s.density());
    let diff = sobolev_norm(&(&direct.u - &scaled.u), s1)? + sobolev_norm(&(&direct.rho - &scaled.rho), s0)?;
    let size = sobolev_norm(&direct.u, s1)? + sobolev_norm(&direct.rho, s0)?;
    Ok(if diff == 0.0 { 0.0 } else { diff / size })
}

/// Short human-readable status of a member.
pub fn member_status(m: &MemberRecord) -> String {
    match &m.result {
        Ok(_) => "ok".to_string(),
        Err(e) => e.to_string(),
    }
}
