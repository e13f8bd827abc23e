//! Serializable views of the core results.

use bfamily_core::flow::{ConvergenceStudy, Diagnostics};
use bfamily_core::probe::{
    BaseMeasurement, Interval, MemberRecord, ProbeChecks, ProbeReport, ScaleCheck, TransversalitySample,
};
use bfamily_core::{Error, Grid};
use serde::Serialize;

#[derive(Debug, Clone, Serialize)]
pub struct GridInfo {
    pub n_points: usize,
    pub length: f64,
}

impl From<&Grid> for GridInfo {
    fn from(g: &Grid) -> Self {
        GridInfo {
            n_points: g.n_points(),
            length: g.length(),
        }
    }
}

/// A value or the error that prevented it.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Outcome<T> {
    Value(T),
    Failed { error: String },
}

impl<T: Clone> From<&Result<T, Error>> for Outcome<T> {
    fn from(r: &Result<T, Error>) -> Self {
        match r {
            Ok(v) => Outcome::Value(v.clone()),
            Err(e) => Outcome::Failed { error: e.to_string() },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SnapshotEntry {
    pub index: usize,
    pub t: f64,
    pub files: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_phi_x: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub conservation_residual: Option<f64>,
    pub mass: f64,
    pub energy: f64,
}

impl SnapshotEntry {
    pub fn lagrangian(index: usize, files: Vec<String>, d: &Diagnostics) -> Self {
        SnapshotEntry {
            index,
            t: d.t,
            files,
            min_phi_x: Some(d.min_phi_x),
            conservation_residual: Some(d.conservation_residual),
            mass: d.mass,
            energy: d.energy,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryManifest {
    pub solver: &'static str,
    pub b: f64,
    pub dt: f64,
    pub t_final: f64,
    pub stride: usize,
    pub grid: GridInfo,
    pub snapshots: Vec<SnapshotEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareEntry {
    pub t: f64,
    pub sup_diff_u: f64,
    pub sup_diff_rho: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareReport {
    pub b: f64,
    pub dt: f64,
    pub t_final: f64,
    pub grid: GridInfo,
    pub snapshots: Vec<CompareEntry>,
    pub max_sup_diff_u: f64,
    pub max_sup_diff_rho: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BaseJson {
    pub w1_norm: f64,
    pub transversality: f64,
    pub m: f64,
    pub min_phi_x: f64,
    pub max_phi_x: f64,
    pub lipschitz: f64,
}

impl From<&BaseMeasurement> for BaseJson {
    fn from(b: &BaseMeasurement) -> Self {
        BaseJson {
            w1_norm: b.w1_norm,
            transversality: b.transversality,
            m: b.m,
            min_phi_x: b.min_phi_x,
            max_phi_x: b.max_phi_x,
            lipschitz: b.lipschitz,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct IntervalJson {
    pub lo: f64,
    pub hi: f64,
}

impl From<Interval> for IntervalJson {
    fn from(i: Interval) -> Self {
        IntervalJson { lo: i.lo, hi: i.hi }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MemberOutcomeJson {
    pub final_u_distance: f64,
    pub final_rho_distance: f64,
    pub hump_center_gap: f64,
    pub n_times_gap: f64,
    pub support_a: IntervalJson,
    pub support_b: IntervalJson,
    pub support_c: IntervalJson,
    pub support_d: IntervalJson,
    pub pushforward_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MemberJson {
    pub n: usize,
    pub initial_u_distance: f64,
    pub expected_u_distance: f64,
    pub initial_rho_distance: f64,
    pub hump_radius: f64,
    pub hump_half_width: f64,
    pub status: String,
    pub outcome: Option<MemberOutcomeJson>,
}

impl From<&MemberRecord> for MemberJson {
    fn from(m: &MemberRecord) -> Self {
        MemberJson {
            n: m.n,
            initial_u_distance: m.initial_u_distance,
            expected_u_distance: m.expected_u_distance,
            initial_rho_distance: m.initial_rho_distance,
            hump_radius: m.hump_radius,
            hump_half_width: m.hump_half_width,
            status: bfamily_core::probe::member_status(m),
            outcome: m.result.as_ref().ok().map(|o| MemberOutcomeJson {
                final_u_distance: o.final_u_distance,
                final_rho_distance: o.final_rho_distance,
                hump_center_gap: o.hump_center_gap,
                n_times_gap: o.n_times_gap(m.n),
                support_a: o.support_a.into(),
                support_b: o.support_b.into(),
                support_c: o.support_c.into(),
                support_d: o.support_d.into(),
                pushforward_ratio: o.pushforward_ratio,
            }),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ChecksJson {
    pub initial_distances_exact: bool,
    pub gap_within_factor_two: bool,
    pub rho_distance_floor: bool,
    pub log_slope: f64,
    pub log_slope_ok: bool,
    pub humps_disjoint: bool,
    pub supports_separated: bool,
    pub hump_width_bounded: bool,
    pub all_members_ok: bool,
    pub passed: bool,
}

impl From<&ProbeChecks> for ChecksJson {
    fn from(c: &ProbeChecks) -> Self {
        ChecksJson {
            initial_distances_exact: c.initial_distances_exact,
            gap_within_factor_two: c.gap_within_factor_two,
            rho_distance_floor: c.rho_distance_floor,
            log_slope: c.log_slope,
            log_slope_ok: c.log_slope_ok,
            humps_disjoint: c.humps_disjoint,
            supports_separated: c.supports_separated,
            hump_width_bounded: c.hump_width_bounded,
            all_members_ok: c.all_members_ok,
            passed: c.passed(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeJson {
    pub a_star: f64,
    pub radius: f64,
    pub s: f64,
    pub b: f64,
    pub grid: GridInfo,
    pub dt: f64,
    pub base: BaseJson,
    pub members: Vec<MemberJson>,
    pub checks: ChecksJson,
}

impl ProbeJson {
    pub fn new(r: &ProbeReport, grid: &Grid, dt: f64) -> Self {
        ProbeJson {
            a_star: r.a_star,
            radius: r.radius,
            s: r.s,
            b: r.b,
            grid: grid.into(),
            dt,
            base: (&r.base).into(),
            members: r.members.iter().map(MemberJson::from).collect(),
            checks: (&r.checks).into(),
        }
    }
}

/// Rows of the flat probe table, one per `n`.
pub fn probe_table_rows(r: &ProbeReport) -> Vec<[String; 8]> {
    let num = |v: f64| format!("{v:.16e}");
    r.members
        .iter()
        .map(|m| match &m.result {
            Ok(o) => [
                m.n.to_string(),
                num(m.initial_u_distance),
                num(o.final_u_distance),
                num(o.final_rho_distance),
                num(o.hump_center_gap),
                num(o.n_times_gap(m.n)),
                format!(
                    "A=[{:.6}:{:.6}] B=[{:.6}:{:.6}] C=[{:.6}:{:.6}] D=[{:.6}:{:.6}]",
                    o.support_a.lo,
                    o.support_a.hi,
                    o.support_b.lo,
                    o.support_b.hi,
                    o.support_c.lo,
                    o.support_c.hi,
                    o.support_d.lo,
                    o.support_d.hi
                ),
                "ok".to_string(),
            ],
            Err(e) => [
                m.n.to_string(),
                num(m.initial_u_distance),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                e.to_string(),
            ],
        })
        .collect()
}

pub const PROBE_TABLE_HEADER: [&str; 8] = [
    "n",
    "init_dist_u",
    "final_dist_u",
    "final_dist_rho",
    "hump_gap",
    "n_times_gap",
    "supports",
    "status",
];

#[derive(Debug, Clone, Serialize)]
pub struct ScaleEntry {
    pub t_end: f64,
    pub discrepancy: Outcome<f64>,
}

impl From<&ScaleCheck> for ScaleEntry {
    fn from(c: &ScaleCheck) -> Self {
        ScaleEntry {
            t_end: c.t_end,
            discrepancy: (&c.discrepancy).into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScaleReport {
    pub b: f64,
    pub s: f64,
    pub dt: f64,
    pub grid: GridInfo,
    pub checks: Vec<ScaleEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TransversalityEntry {
    pub t: f64,
    pub value: Outcome<f64>,
}

impl From<&TransversalitySample> for TransversalityEntry {
    fn from(s: &TransversalitySample) -> Self {
        TransversalityEntry {
            t: s.t,
            value: (&s.value).into(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TransversalityReport {
    pub a_star: f64,
    pub w1_at_a_star: f64,
    pub b: f64,
    pub dt: f64,
    pub grid: GridInfo,
    pub samples: Vec<TransversalityEntry>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceReport {
    pub b: f64,
    pub grid: GridInfo,
    pub t_final: f64,
    pub reference_dt: f64,
    pub dts: Vec<f64>,
    pub errors: Vec<f64>,
    pub slope: f64,
}

impl ConvergenceReport {
    pub fn new(study: &ConvergenceStudy, b: f64, grid: &Grid, t_final: f64) -> Self {
        ConvergenceReport {
            b,
            grid: grid.into(),
            t_final,
            reference_dt: study.reference_dt,
            dts: study.dts.clone(),
            errors: study.errors.clone(),
            slope: study.slope,
        }
    }
}
