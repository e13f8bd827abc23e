use std::fs;
use std::path::Path;
use std::process::Command;

use bfamily_core::presets::Preset;
use bfamily_core::{Grid, ScalarField};
use bfamily_lab::io::{read_field, write_field};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bfamily"))
}

fn run_in(dir: &Path, args: &[&str]) -> (i32, String) {
    let out = bin().current_dir(dir).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn field_csv_round_trip_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let g = Grid::new(64, 40.0).unwrap();
    let f = ScalarField::from_fn(&g, |x| (0.3 * x).sin() / 3.0 + 1e-300).unwrap();
    let path = dir.path().join("f.csv");
    write_field(&path, &f).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("x,value\n"));
    assert_eq!(text.lines().count(), 65);
    assert_eq!(read_field(&path, &g).unwrap(), f);
    let other = Grid::new(32, 40.0).unwrap();
    assert!(read_field(&path, &other).is_err());
}

#[test]
fn solve_lagrangian_writes_snapshots_and_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let (code, err) = run_in(
        dir.path(),
        &["solve-lagrangian", "--n-points", "256", "--dt", "0.01", "--stride", "25", "--output", "run"],
    );
    assert_eq!(code, 0, "{err}");
    let traj = json(&dir.path().join("run/trajectory/trajectory.json"));
    let snaps = traj["snapshots"].as_array().unwrap();
    assert_eq!(snaps.len(), 5);
    assert_eq!(traj["grid"]["n_points"], 256);
    for s in snaps {
        assert!(s["conservation_residual"].as_f64().unwrap() < 1e-3);
        assert!(s["min_phi_x"].as_f64().unwrap() > 0.0);
    }
    let sidecar = json(&dir.path().join("run/trajectory/phi_0004.json"));
    assert_eq!(sidecar["n_points"], 256);
    assert_eq!(sidecar["length"], 40.0);
    let manifest = json(&dir.path().join("run/manifest.json"));
    assert_eq!(manifest["config"]["stride"], 25);
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 5 * 4 + 1);
    assert!(manifest["timing"]["wall_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn solve_euler_and_compare() {
    let dir = tempfile::tempdir().unwrap();
    let common = ["--n-points", "256", "--dt", "0.01", "--stride", "50"];
    let (code, err) = run_in(dir.path(), &[&["solve-euler", "--output", "e"][..], &common].concat());
    assert_eq!(code, 0, "{err}");
    let traj = json(&dir.path().join("e/trajectory/trajectory.json"));
    let mass: Vec<f64> = traj["snapshots"].as_array().unwrap().iter().map(|s| s["mass"].as_f64().unwrap()).collect();
    assert!(mass.iter().all(|m| (m - mass[0]).abs() < 1e-12));
    let (code, err) = run_in(dir.path(), &[&["compare", "--output", "c"][..], &common].concat());
    assert_eq!(code, 0, "{err}");
    let c = json(&dir.path().join("c/compare.json"));
    assert_eq!(c["snapshots"].as_array().unwrap().len(), 3);
    assert_eq!(c["snapshots"][0]["sup_diff_u"], 0.0);
    assert!(c["max_sup_diff_u"].as_f64().unwrap() < 5e-2);
}

#[test]
fn file_initial_data_override_the_preset() {
    let dir = tempfile::tempdir().unwrap();
    let g = Grid::new(128, 40.0).unwrap();
    let (u0, r0) = Preset::BumpPair.fields(&g).unwrap();
    write_field(&dir.path().join("u0.csv"), &u0.scale(3.0)).unwrap();
    write_field(&dir.path().join("r0.csv"), &r0.scale(3.0)).unwrap();
    let (code, err) = run_in(
        dir.path(),
        &[
            "solve-lagrangian", "--n-points", "128", "--dt", "0.005", "--preset", "constant",
            "--u0-file", "u0.csv", "--rho0-file", "r0.csv", "--output", "b",
        ],
    );
    assert_eq!(code, 3, "{err}");
    assert!(err.contains("breakdown"));
    let (code, _) = run_in(dir.path(), &["solve-lagrangian", "--n-points", "256", "--u0-file", "u0.csv", "--output", "m"]);
    assert_eq!(code, 6);
}

#[test]
fn exit_codes_for_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let (code, err) = run_in(dir.path(), &["compare", "--dt", "-1"]);
    assert_eq!(code, 2);
    assert!(err.contains("`dt`"), "{err}");
    let (code, _) = run_in(dir.path(), &[]);
    assert_eq!(code, 2);
    fs::write(dir.path().join("c.toml"), "command = \"compare\"\nwidth = 3\n").unwrap();
    let (code, err) = run_in(dir.path(), &["--config", "c.toml"]);
    assert_eq!(code, 2);
    assert!(err.contains("width"));
    let (code, _) = run_in(dir.path(), &["--config", "missing.toml"]);
    assert_eq!(code, 6);
}

#[test]
fn under_resolved_probe_reports_members() {
    let dir = tempfile::tempdir().unwrap();
    let (code, err) = run_in(
        dir.path(),
        &["probe", "--n-points", "512", "--dt", "0.01", "--n-list", "4,64", "--output", "p"],
    );
    assert_eq!(code, 0, "{err}");
    let table = fs::read_to_string(dir.path().join("p/probe_table.csv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,init_dist_u,final_dist_u,final_dist_rho,hump_gap,n_times_gap,supports,status"
    );
    assert!(lines.next().unwrap().ends_with(",ok"));
    assert!(lines.next().unwrap().contains("under-resolved"));
    let report = json(&dir.path().join("p/probe_report.json"));
    assert_eq!(report["checks"]["all_members_ok"], false);
    assert!(report["members"][1]["outcome"].is_null());
}

#[test]
fn random_preset_depends_on_seed_only() {
    let g = Grid::new(64, 40.0).unwrap();
    let (a, _) = bfamily_lab::run::random_data(&g, 3).unwrap();
    let (b, rb) = bfamily_lab::run::random_data(&g, 3).unwrap();
    let (c, _) = bfamily_lab::run::random_data(&g, 4).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!((a.sup_norm() - 0.5).abs() < 1e-15);
    assert!((rb.sup_norm() - 0.25).abs() < 1e-15);
}

#[test]
fn rerun_from_manifest_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (code, err) = run_in(
        dir.path(),
        &["scale-check", "--n-points", "128", "--dt", "0.015625", "--preset", "random", "--seed", "5", "--output", "a"],
    );
    assert_eq!(code, 0, "{err}");
    let (code, err) = run_in(dir.path(), &["--config", "a/manifest.json", "--output", "b"]);
    assert_eq!(code, 0, "{err}");
    let a = fs::read(dir.path().join("a/scale_check.json")).unwrap();
    let b = fs::read(dir.path().join("b/scale_check.json")).unwrap();
    assert_eq!(a, b);
    let ma = json(&dir.path().join("a/manifest.json"));
    let mb = json(&dir.path().join("b/manifest.json"));
    assert_eq!(ma["config"]["seed"], mb["config"]["seed"]);
    assert_eq!(ma["outputs"], mb["outputs"]);
}
