//! Command execution.

use std::path::{Path, PathBuf};
use std::time::Instant;

use bfamily_core::flow::{self, DerivativeOptions};
use bfamily_core::presets::Preset;
use bfamily_core::probe::{self, ProbeSpec};
use bfamily_core::spectral::SpectralFilter;
use bfamily_core::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{Command, RunConfig, RANDOM_PRESET};
use crate::error::{LabError, LabResult};
use crate::io::{create_dir, read_field, write_diffeo, write_field, write_json};
use crate::report::*;

pub const MANIFEST: &str = "manifest.json";

#[derive(Serialize)]
struct Manifest<'a> {
    version: &'static str,
    command: &'static str,
    config: &'a RunConfig,
    outputs: &'a [String],
    timing: Timing,
}

#[derive(Serialize)]
struct Timing {
    wall_seconds: f64,
}

/// Summary of a finished run.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub output: PathBuf,
    /// Files written besides the manifest, relative to `output`.
    pub outputs: Vec<String>,
}

/// Runs `cfg.command`, writing reports and `manifest.json` under `cfg.output`.
pub fn run(cfg: &RunConfig) -> LabResult<RunSummary> {
    cfg.validate()?;
    let start = Instant::now();
    let dir = cfg.output.clone();
    create_dir(&dir)?;
    let grid = Grid::new(cfg.n_points, cfg.length)?;
    let mut outputs = match cfg.command {
        Command::SolveLagrangian => solve_lagrangian(cfg, &grid, &dir)?,
        Command::SolveEuler => solve_euler(cfg, &grid, &dir)?,
        Command::Compare => compare(cfg, &grid, &dir)?,
        Command::Probe => run_probe(cfg, &grid, &dir)?,
        Command::ScaleCheck => scale_check(cfg, &grid, &dir)?,
        Command::Transversality => transversality(cfg, &grid, &dir)?,
        Command::Convergence => convergence(cfg, &grid, &dir)?,
    };
    outputs.sort();
    write_json(
        &dir.join(MANIFEST),
        &Manifest {
            version: env!("CARGO_PKG_VERSION"),
            command: cfg.command.name(),
            config: cfg,
            outputs: &outputs,
            timing: Timing {
                wall_seconds: start.elapsed().as_secs_f64(),
            },
        },
    )?;
    Ok(RunSummary { output: dir, outputs })
}

/// `(u0, rho0)` from the preset, with field files taking precedence.
pub fn initial_data(cfg: &RunConfig, grid: &Grid) -> LabResult<(ScalarField, ScalarField)> {
    let (mut u0, mut rho0) = if cfg.preset == RANDOM_PRESET {
        random_data(grid, cfg.seed)?
    } else {
        let preset: Preset = cfg
            .preset
            .parse()
            .map_err(|_| LabError::config("preset", format!("unknown preset `{}`", cfg.preset)))?;
        preset.fields(grid)?
    };
    if let Some(path) = &cfg.u0_file {
        u0 = read_field(path, grid)?;
    }
    if let Some(path) = &cfg.rho0_file {
        rho0 = read_field(path, grid)?;
    }
    Ok((u0, rho0))
}

/// Trigonometric polynomials with modes 1 to 6 drawn from `seed`.
pub fn random_data(grid: &Grid, seed: u64) -> LabResult<(ScalarField, ScalarField)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |sup: f64| -> LabResult<ScalarField> {
        let coeffs: Vec<(f64, f64)> = (0..6)
            .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let l = grid.length();
        let f = ScalarField::from_fn(grid, |x| {
            coeffs
                .iter()
                .enumerate()
                .map(|(k, (a, b))| {
                    let t = 2.0 * std::f64::consts::PI * (k + 1) as f64 * x / l;
                    a * t.cos() + b * t.sin()
                })
                .sum()
        })?;
        let m = f.sup_norm();
        Ok(if m > 0.0 { f.scale(sup / m) } else { f })
    };
    let u0 = draw(0.5)?;
    let rho0 = draw(0.25)?;
    Ok((u0, rho0))
}

fn solver_config(cfg: &RunConfig) -> LabResult<SolverConfig> {
    Ok(SolverConfig::new(cfg.dt, cfg.t_final)?.with_stride(cfg.stride))
}

fn sobolev(cfg: &RunConfig) -> LabResult<SobolevIndex> {
    SobolevIndex::new(cfg.s).map_err(|_| LabError::config("s", format!("{} is out of range (expected > 3/2)", cfg.s)))
}

fn snapshot_name(kind: &str, index: usize) -> String {
    format!("{kind}_{index:04}")
}

fn solve_lagrangian(cfg: &RunConfig, grid: &Grid, dir: &Path) -> LabResult<Vec<String>> {
    let (u0, rho0) = initial_data(cfg, grid)?;
    let sc = solver_config(cfg)?;
    let traj = flow::integrate(&u0, &rho0, cfg.b, &sc)?;
    let sub = dir.join("trajectory");
    create_dir(&sub)?;
    let mut outputs = Vec::new();
    let mut entries = Vec::new();
    for (k, state) in traj.snapshots.iter().enumerate() {
        let e = flow::reconstruct(state)?;
        let phi = snapshot_name("phi", k);
        write_diffeo(&sub, &phi, &state.phi)?;
        let u = format!("{}.csv", snapshot_name("u", k));
        let rho = format!("{}.csv", snapshot_name("rho", k));
        write_field(&sub.join(&u), &e.u)?;
        write_field(&sub.join(&rho), &e.rho)?;
        let files = vec![format!("{phi}.csv"), format!("{phi}.json"), u, rho];
        outputs.extend(files.iter().map(|f| format!("trajectory/{f}")));
        entries.push(SnapshotEntry::lagrangian(k, files, &flow::diagnostics(state)?));
    }
    write_json(
        &sub.join("trajectory.json"),
        &TrajectoryManifest {
            solver: "lagrangian",
            b: cfg.b,
            dt: sc.step(),
            t_final: cfg.t_final,
            stride: cfg.stride,
            grid: grid.into(),
            snapshots: entries,
        },
    )?;
    outputs.push("trajectory/trajectory.json".to_string());
    Ok(outputs)
}

fn euler_config(cfg: &RunConfig) -> LabResult<SolverConfig> {
    let mut sc = solver_config(cfg)?;
    if cfg.filter {
        sc.filter = Some(SpectralFilter::default());
    }
    Ok(sc)
}

fn solve_euler(cfg: &RunConfig, grid: &Grid, dir: &Path) -> LabResult<Vec<String>> {
    let (u0, rho0) = initial_data(cfg, grid)?;
    let sc = euler_config(cfg)?;
    let states = euler_integrate(&u0, &rho0, cfg.b, &sc)?;
    let sub = dir.join("trajectory");
    create_dir(&sub)?;
    let mut outputs = Vec::new();
    let mut entries = Vec::new();
    for (k, s) in states.iter().enumerate() {
        let u = format!("{}.csv", snapshot_name("u", k));
        let rho = format!("{}.csv", snapshot_name("rho", k));
        write_field(&sub.join(&u), &s.u)?;
        write_field(&sub.join(&rho), &s.rho)?;
        outputs.push(format!("trajectory/{u}"));
        outputs.push(format!("trajectory/{rho}"));
        entries.push(SnapshotEntry {
            index: k,
            t: s.t,
            files: vec![u, rho],
            min_phi_x: None,
            conservation_residual: None,
            mass: s.rho.integral(),
            energy: s.energy(),
        });
    }
    write_json(
        &sub.join("trajectory.json"),
        &TrajectoryManifest {
            solver: "euler",
            b: cfg.b,
            dt: sc.step(),
            t_final: cfg.t_final,
            stride: cfg.stride,
            grid: grid.into(),
            snapshots: entries,
        },
    )?;
    outputs.push("trajectory/trajectory.json".to_string());
    Ok(outputs)
}

/// Sup-norm differences of the two solvers at every shared snapshot.
pub fn compare_solvers(
    u0: &ScalarField,
    rho0: &ScalarField,
    b: f64,
    sc: &SolverConfig,
) -> LabResult<Vec<CompareEntry>> {
    let lag = flow::integrate(u0, rho0, b, sc)?;
    let eul = euler_integrate(u0, rho0, b, sc)?;
    lag.snapshots
        .iter()
        .zip(&eul)
        .map(|(l, e)| {
            let r = flow::reconstruct(l)?;
            Ok(CompareEntry {
                t: e.t,
                sup_diff_u: (&r.u - &e.u).sup_norm(),
                sup_diff_rho: (&r.rho - &e.rho).sup_norm(),
            })
        })
        .collect()
}

fn compare(cfg: &RunConfig, grid: &Grid, dir: &Path) -> LabResult<Vec<String>> {
    let (u0, rho0) = initial_data(cfg, grid)?;
    let sc = solver_config(cfg)?;
    let snapshots = compare_solvers(&u0, &rho0, cfg.b, &sc)?;
    let report = CompareReport {
        b: cfg.b,
        dt: sc.step(),
        t_final: cfg.t_final,
        grid: grid.into(),
        max_sup_diff_u: snapshots.iter().map(|s| s.sup_diff_u).fold(0.0, f64::max),
        max_sup_diff_rho: snapshots.iter().map(|s| s.sup_diff_rho).fold(0.0, f64::max),
        snapshots,
    };
    write_json(&dir.join("compare.json"), &report)?;
    Ok(vec!["compare.json".to_string()])
}

/// The default probe data on `grid` with the run's model and solver
/// parameters.
pub fn probe_spec(cfg: &RunConfig, grid: &Grid) -> LabResult<ProbeSpec> {
    let mut spec = ProbeSpec::default_on(grid)?;
    spec.b = cfg.b;
    spec.s = sobolev(cfg)?;
    spec.cfg = spec.cfg.with_dt(cfg.dt);
    spec.n_list = cfg.n_list.clone();
    spec.radius = cfg.radius;
    Ok(spec)
}

fn run_probe(cfg: &RunConfig, grid: &Grid, dir: &Path) -> LabResult<Vec<String>> {
    let spec = probe_spec(cfg, grid)?;
    let report = probe::run_nonuniformity_probe(&spec)?;
    write_json(&dir.join("probe_report.json"), &ProbeJson::new(&report, grid, spec.cfg.step()))?;
    let path = dir.join("probe_table.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| csv_io(&path, e))?;
    w.write_record(PROBE_TABLE_HEADER).map_err(|e| csv_io(&path, e))?;
    for row in probe_table_rows(&report) {
        w.write_record(&row).map_err(|e| csv_io(&path, e))?;
    }
    w.flush().map_err(|e| LabError::io(&path, e))?;
    Ok(vec!["probe_report.json".to_string(), "probe_table.csv".to_string()])
}

fn csv_io(path: &Path, e: csv::Error) -> LabError {
    LabError::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

fn scale_check(cfg: &RunConfig, grid: &Grid, dir: &Path) -> LabResult<Vec<String>> {
    let (u0, rho0) = initial_data(cfg, grid)?;
    let sc = solver_config(cfg)?;
    let checks = probe::check_scale_invariance(&u0, &rho0, cfg.b, &cfg.t_list, &sc, sobolev(cfg)?);
    let report = ScaleReport {
        b: cfg.b,
        s: cfg.s,
        dt: sc.step(),
        grid: grid.into(),
        checks: checks.iter().map(ScaleEntry::from).collect(),
    };
    write_json(&dir.join("scale_check.json"), &report)?;
    Ok(vec!["scale_check.json".to_string()])
}

fn transversality(cfg: &RunConfig, grid: &Grid, dir: &Path) -> LabResult<Vec<String>> {
    let spec = probe_spec(cfg, grid)?;
    let sc = solver_config(cfg)?.with_t_final(1.0).with_stride(usize::MAX);
    let samples = probe::measure_transversality(
        &spec.base_u,
        &spec.base_rho,
        &spec.w1,
        spec.a_star,
        spec.b,
        &sc,
        DerivativeOptions::default(),
        &cfg.t_grid,
    )?;
    let report = TransversalityReport {
        a_star: spec.a_star,
        w1_at_a_star: spec.w1.eval(spec.a_star),
        b: spec.b,
        dt: sc.step(),
        grid: grid.into(),
        samples: samples.iter().map(TransversalityEntry::from).collect(),
    };
    write_json(&dir.join("transversality.json"), &report)?;
    Ok(vec!["transversality.json".to_string()])
}

fn convergence(cfg: &RunConfig, grid: &Grid, dir: &Path) -> LabResult<Vec<String>> {
    let (u0, rho0) = initial_data(cfg, grid)?;
    let sc = solver_config(cfg)?;
    let study = flow::time_convergence(&u0, &rho0, cfg.b, &sc, &cfg.dts, cfg.reference_dt)?;
    write_json(
        &dir.join("convergence.json"),
        &ConvergenceReport::new(&study, cfg.b, grid, cfg.t_final),
    )?;
    Ok(vec!["convergence.json".to_string()])
}
