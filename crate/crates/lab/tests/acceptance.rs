//! End-to-end acceptance suite. Prints one line per criterion and exits
//! with a failure status if any criterion fails.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::time::Instant;

use bfamily_core::flow::{self, DerivativeOptions};
use bfamily_core::presets::{bump, Preset};
use bfamily_core::probe::{self, ProbeSpec};
use bfamily_core::{
    compose, conjugated_derivative, derivative, euler_integrate, helmholtz_inverse, invert, sobolev_norm, Diffeo,
    EulerState, Grid, ScalarField, SobolevIndex, SolverConfig, Trajectory,
};
use bfamily_lab::config::{Command, PartialConfig};
use bfamily_lab::run;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = Result<(bool, String), String>;

fn main() {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("spectral exactness", spectral_exactness),
        ("diffeo calculus", diffeo_calculus),
        ("cross-solver oracle", cross_solver),
        ("conservation", conservation),
        ("RK4 order", rk4_order),
        ("scaling identity", scaling_identity),
        ("derivative of Psi at the origin", derivative_at_origin),
        ("non-uniformity probe", nonuniformity_probe),
        ("transversality scan", transversality_scan),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        let secs = start.elapsed().as_secs_f64();
        println!(
            "criterion {:>2} {:<32} {}  ({secs:.1} s) {detail}",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" }
        );
        if !pass {
            failures += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn grid(n: usize) -> Result<Grid, String> {
    Grid::new(n, 40.0).map_err(err)
}

fn rel(a: &ScalarField, b: &ScalarField) -> f64 {
    (a - b).sup_norm() / b.sup_norm()
}

fn cfg(dt: f64, t_final: f64, stride: usize) -> Result<SolverConfig, String> {
    Ok(SolverConfig::new(dt, t_final).map_err(err)?.with_stride(stride))
}

/// `amp sin(xi_k x_j + phase)` with the angle reduced exactly: `xi_k x_j =
/// 2 pi (k j mod n) / n`.
fn mode(g: &Grid, k: usize, amp: f64, phase: f64) -> Result<ScalarField, String> {
    let n = g.n_points();
    let values = (0..n)
        .map(|j| amp * (2.0 * PI * ((k * j) % n) as f64 / n as f64 + phase).sin())
        .collect();
    ScalarField::new(g, values).map_err(err)
}

fn spectral_exactness() -> Verdict {
    let g = grid(2048)?;
    let (a, theta) = (1.3, 0.4);
    let mut worst: f64 = 0.0;
    for k in [1usize, 7, 64, 300, 1000] {
        let xi = 2.0 * PI * k as f64 / g.length();
        let f = mode(&g, k, a, theta)?;
        worst = worst.max(rel(&helmholtz_inverse(&f), &mode(&g, k, a / (1.0 + xi * xi), theta)?));
        for m in 1..=3 {
            let exact = mode(&g, k, a * xi.powi(m), theta + m as f64 * PI / 2.0)?;
            worst = worst.max(rel(&derivative(&f, m).map_err(err)?, &exact));
        }
        let c = mode(&g, k, a, PI / 2.0)?;
        for s in [0.0, 1.0, 2.0, 2.5] {
            let exact = a * (g.length() / 2.0).sqrt() * (1.0 + xi * xi).powf(s / 2.0);
            let got = sobolev_norm(&c, s).map_err(err)?;
            worst = worst.max((got - exact).abs() / exact);
        }
    }
    Ok((
        worst <= 1e-12,
        format!("modes 1..1000, derivative orders 1-3, s in [0, 2.5]: max relative error {worst:.2e} (tol 1e-12)"),
    ))
}

/// Random trigonometric polynomial on modes `1..=modes`.
fn trig(g: &Grid, modes: usize, rng: &mut ChaCha8Rng) -> Result<ScalarField, String> {
    let c: Vec<(f64, f64)> = (0..modes)
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    ScalarField::from_fn(g, |x| {
        c.iter()
            .enumerate()
            .map(|(k, (p, q))| {
                let t = 2.0 * PI * (k + 1) as f64 * x / g.length();
                p * t.cos() + q * t.sin()
            })
            .sum()
    })
    .map_err(err)
}

fn diffeo_calculus() -> Verdict {
    let g = grid(2048)?;
    let (mut round_trip, mut two_route, mut min_slope): (f64, f64, f64) = (0.0, 0.0, f64::INFINITY);
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = trig(&g, 4, &mut rng)?;
        let target = rng.gen_range(0.2..0.9);
        let px_min = derivative(&p, 1).map_err(err)?.min();
        let d = p.scale((1.0 - target) / -px_min);
        let phi = Diffeo::from_displacement(d);
        let v = phi.validate(0.0);
        min_slope = min_slope.min(v.min_phi_x);
        let psi = invert(&phi).map_err(err)?;
        let f = trig(&g, 6, &mut rng)?;
        let back = compose(&compose(&f, &psi).map_err(err)?, &phi).map_err(err)?;
        let forth = compose(&compose(&f, &phi).map_err(err)?, &psi).map_err(err)?;
        round_trip = round_trip.max(rel(&back, &f)).max(rel(&forth, &f));
        let w = trig(&g, 6, &mut rng)?;
        let long = compose(&derivative(&compose(&w, &psi).map_err(err)?, 1).map_err(err)?, &phi).map_err(err)?;
        let short = conjugated_derivative(&w, &phi).map_err(err)?;
        two_route = two_route.max(rel(&long, &short));
    }
    Ok((
        round_trip <= 1e-7 && two_route <= 1e-7 && min_slope >= 0.2 - 1e-12,
        format!("20 cases, min phi_x {min_slope:.3}: round trip {round_trip:.2e}, two routes {two_route:.2e} (tol 1e-7)"),
    ))
}

/// Lagrangian and Eulerian bump-pair runs to `T = 1` with snapshots every
/// 0.1; shared by the cross-solver and conservation criteria.
struct PairRun {
    lagrangian: Trajectory,
    euler: Vec<EulerState>,
}

fn pair_run(n: usize, dt: f64) -> Result<PairRun, String> {
    let g = grid(n)?;
    let (u0, rho0) = Preset::BumpPair.fields(&g).map_err(err)?;
    let c = cfg(dt, 1.0, (0.1 / dt).round() as usize)?;
    Ok(PairRun {
        lagrangian: flow::integrate(&u0, &rho0, 2.0, &c).map_err(err)?,
        euler: euler_integrate(&u0, &rho0, 2.0, &c).map_err(err)?,
    })
}

thread_local! {
    static PAIR_RUNS: std::cell::RefCell<Option<(PairRun, PairRun)>> = const { std::cell::RefCell::new(None) };
}

fn with_pair_runs<T>(f: impl FnOnce(&PairRun, &PairRun) -> T) -> Result<T, String> {
    PAIR_RUNS.with(|cell| {
        if cell.borrow().is_none() {
            let coarse = pair_run(2048, 5e-4)?;
            let fine = pair_run(4096, 2.5e-4)?;
            *cell.borrow_mut() = Some((coarse, fine));
        }
        let runs = cell.borrow();
        let (coarse, fine) = runs.as_ref().unwrap();
        Ok(f(coarse, fine))
    })
}

fn final_gap(run: &PairRun) -> Result<f64, String> {
    let e = flow::reconstruct(run.lagrangian.last()).map_err(err)?;
    Ok((&e.u - &run.euler.last().unwrap().u).sup_norm())
}

fn cross_solver() -> Verdict {
    with_pair_runs(|coarse, fine| {
        let (a, b) = (final_gap(coarse)?, final_gap(fine)?);
        let ratio = a / b;
        Ok((
            a <= 1e-5 && ratio >= 4.0,
            format!("sup |u_L - u_E|(1) = {a:.2e} at 2048 (tol 1e-5), {b:.2e} at 4096, ratio {ratio:.1} (>= 4)"),
        ))
    })?
}

fn conservation() -> Verdict {
    with_pair_runs(|coarse, fine| {
        let residual = |run: &PairRun| -> Result<f64, String> {
            let mut worst: f64 = 0.0;
            for s in &run.lagrangian.snapshots {
                worst = worst.max(flow::diagnostics(s).map_err(err)?.conservation_residual);
            }
            Ok(worst)
        };
        let (a, b) = (residual(coarse)?, residual(fine)?);
        let m0 = coarse.euler[0].rho.integral();
        let drift = coarse
            .euler
            .iter()
            .skip(1)
            .map(|s| (s.rho.integral() - m0).abs() / s.t)
            .fold(0.0, f64::max);
        Ok((
            a <= 1e-6 && b < a && drift <= 1e-10,
            format!("residual {a:.2e} -> {b:.2e} under refinement (tol 1e-6); Euler mass drift {drift:.2e} per unit time (tol 1e-10)"),
        ))
    })?
}

fn rk4_order() -> Verdict {
    let g = grid(1024)?;
    let (u0, rho0) = Preset::MomentumBump.fields(&g).map_err(err)?;
    let study = flow::time_convergence(
        &u0,
        &rho0,
        2.0,
        &cfg(5e-4, 1.0, 1)?,
        &[4e-3, 2e-3, 1e-3, 5e-4],
        6.25e-5,
    )
    .map_err(err)?;
    let errors: Vec<String> = study.errors.iter().map(|e| format!("{e:.2e}")).collect();
    Ok((
        (3.7..=4.3).contains(&study.slope),
        format!("momentum-bump, 1024 points: errors [{}], slope {:.3} (in [3.7, 4.3])", errors.join(", "), study.slope),
    ))
}

fn scaling_identity() -> Verdict {
    let g = grid(2048)?;
    let (u0, rho0) = Preset::BumpPair.fields(&g).map_err(err)?;
    let (u0, rho0) = (u0.scale(0.5), rho0.scale(0.5));
    let checks = probe::check_scale_invariance(
        &u0,
        &rho0,
        2.0,
        &[0.5, 2.0],
        &cfg(5e-4, 1.0, 1)?,
        SobolevIndex::default(),
    );
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for c in &checks {
        let d = c.discrepancy.clone().map_err(err)?;
        worst = worst.max(d);
        parts.push(format!("T={}: {d:.2e}", c.t_end));
    }
    Ok((worst <= 1e-10, format!("half-amplitude bump-pair, {} (tol 1e-10)", parts.join(", "))))
}

fn derivative_at_origin() -> Verdict {
    let g = grid(2048)?;
    let z = ScalarField::zeros(&g);
    let v1 = ScalarField::from_fn(&g, |x| 2.0 * bump((x - 20.0) / 4.0) + 0.5 * (2.0 * PI * x / 40.0).sin())
        .map_err(err)?;
    let v2 = ScalarField::from_fn(&g, |x| bump((x - 14.0) / 3.0)).map_err(err)?;
    let d = flow::directional_derivative_psi(&z, &z, (&v1, &v2), 2.0, &cfg(5e-4, 1.0, 1)?, DerivativeOptions::default())
        .map_err(err)?;
    let e = sobolev_norm(&(&d - &v1), 2.0).map_err(err)?;
    Ok((e <= 1e-6, format!("|dPsi(v) - v1|_H2 = {e:.2e} (tol 1e-6)")))
}

fn nonuniformity_probe() -> Verdict {
    let start = Instant::now();
    let spec = ProbeSpec::default_experiment();
    let report = probe::run_nonuniformity_probe(&spec).map_err(err)?;
    let secs = start.elapsed().as_secs_f64();
    let target = report.base.transversality.abs();
    let mut ok = report.checks.all_members_ok;
    let mut init = Vec::new();
    let mut frho = Vec::new();
    let mut ngap = Vec::new();
    let mut exact = true;
    for m in &report.members {
        exact &= (m.initial_u_distance - m.expected_u_distance).abs() <= 1e-12 * m.expected_u_distance
            && m.initial_rho_distance == 0.0;
        init.push(m.initial_u_distance);
        match &m.result {
            Ok(o) => {
                frho.push(o.final_rho_distance);
                ngap.push((m.n, o.n_times_gap(m.n)));
            }
            Err(_) => ok = false,
        }
    }
    let gap_ok = ngap
        .iter()
        .filter(|(n, _)| *n >= 8)
        .all(|(_, v)| (0.5 * target..=2.0 * target).contains(v));
    let max = frho.iter().cloned().fold(0.0, f64::max);
    let min = frho.iter().cloned().fold(f64::INFINITY, f64::min);
    let fall = init[0] / init[init.len() - 1];
    let floor_ok = min >= 0.25 * max && (fall - 8.0).abs() <= 1e-9;
    let pass = ok && exact && gap_ok && floor_ok && secs <= 900.0;
    let gaps: Vec<String> = ngap.iter().map(|(n, v)| format!("{n}:{v:.2}")).collect();
    Ok((
        pass,
        format!(
            "(a) exact {exact}; (b) |dPsi(w)(a)| = {target:.3}, n*gap [{}]; (c) rho distance min/max {:.3}, initial fall {fall:.3}; {secs:.0} s (<= 900)",
            gaps.join(", "),
            min / max
        ),
    ))
}

fn transversality_args(out: &Path) -> PartialConfig {
    PartialConfig {
        command: Some(Command::Transversality),
        n_points: Some(1024),
        dt: Some(2e-3),
        output: Some(out.to_path_buf()),
        ..Default::default()
    }
}

fn scratch_dir() -> Result<tempfile::TempDir, String> {
    tempfile::tempdir().map_err(err)
}

thread_local! {
    static WORK: tempfile::TempDir = tempfile::tempdir().expect("temporary directory");
}

fn work_dir() -> std::path::PathBuf {
    WORK.with(|d| d.path().to_path_buf())
}

fn transversality_scan() -> Verdict {
    let out = work_dir().join("transversality");
    let cfg = transversality_args(&out).resolve().map_err(err)?;
    run(&cfg).map_err(err)?;
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("transversality.json")).map_err(err)?).map_err(err)?;
    let w1a = json["w1_at_a_star"].as_f64().ok_or("missing w1_at_a_star")?;
    let samples = json["samples"].as_array().ok_or("missing samples")?;
    let mut t0_err = f64::INFINITY;
    let mut described = Vec::new();
    let mut complete = samples.len() == 5;
    for s in samples {
        let t = s["t"].as_f64().unwrap_or(f64::NAN);
        match s["value"].as_f64() {
            Some(v) => {
                complete &= v.is_finite();
                if t == 0.0 {
                    t0_err = (v - w1a).abs();
                }
                described.push(format!("{t}:{v:.3}"));
            }
            None => {
                complete &= s["value"]["error"].is_string();
                described.push(format!("{t}:failed"));
            }
        }
    }
    Ok((
        complete && t0_err <= 1e-6,
        format!("t=0 error {t0_err:.2e} (tol 1e-6); scan [{}]", described.join(", ")),
    ))
}

fn determinism() -> Verdict {
    let first = work_dir().join("transversality");
    if !first.join(run::MANIFEST).is_file() {
        run(&transversality_args(&first).resolve().map_err(err)?).map_err(err)?;
    }
    let again = scratch_dir()?;
    let mut compared = 0;
    let mut identical = true;
    let mut runs = vec![(first.clone(), again.path().join("transversality"))];

    let small = PartialConfig {
        command: Some(Command::SolveLagrangian),
        n_points: Some(256),
        dt: Some(0.01),
        stride: Some(20),
        preset: Some("random".to_string()),
        seed: Some(11),
        output: Some(work_dir().join("solve")),
        ..Default::default()
    };
    run(&small.resolve().map_err(err)?).map_err(err)?;
    runs.push((work_dir().join("solve"), again.path().join("solve")));

    for (original, copy) in &runs {
        let manifest = original.join(run::MANIFEST);
        let from_manifest = PartialConfig::from_path(&manifest).map_err(err)?.overlay(PartialConfig {
            output: Some(copy.clone()),
            ..Default::default()
        });
        let summary = run(&from_manifest.resolve().map_err(err)?).map_err(err)?;
        for file in &summary.outputs {
            let a = fs::read(original.join(file)).map_err(err)?;
            let b = fs::read(copy.join(file)).map_err(err)?;
            identical &= a == b;
            compared += 1;
        }
    }
    Ok((
        identical && compared > 0,
        format!("{compared} report files re-created from manifests, all byte-identical: {identical}"),
    ))
}
