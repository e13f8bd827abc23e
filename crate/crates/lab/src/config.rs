//! Flat key-value run configuration.
//!
//! A config file is a TOML document without tables. Every key is optional;
//! command line flags override file values and documented defaults fill the
//! rest.
//!
//! | key            | default                    | bounds                              |
//! |----------------|----------------------------|-------------------------------------|
//! | `command`      | required                   | one of the [`Command`] names         |
//! | `n_points`     | 2048 (probe: 4096)         | 16 ..= 2^22                         |
//! | `length`       | 40                         | > 0                                 |
//! | `b`            | 2                          | finite                              |
//! | `s`            | 2                          | > 3/2                               |
//! | `dt`           | 5e-4 (probe: 2.5e-4)       | 0 < dt <= t_final                   |
//! | `t_final`      | 1                          | > 0                                 |
//! | `stride`       | 100                        | >= 1                                |
//! | `preset`       | `bump-pair`                | a preset name or `random`           |
//! | `u0_file`      | none                       | existing CSV, overrides the preset  |
//! | `rho0_file`    | none                       | existing CSV, overrides the preset  |
//! | `output`       | `out`                      | directory                           |
//! | `seed`         | 0                          | seed of the `random` preset         |
//! | `filter`       | false                      | spectral filter in `solve-euler`    |
//! | `t_list`       | `[0.5, 2]`                 | scale-check times, > 0              |
//! | `t_grid`       | `[0, 0.25, 0.5, 0.75, 1]`  | transversality times in [0, 1]      |
//! | `dts`          | `[4e-3, 2e-3, 1e-3, 5e-4]` | convergence steps, > reference_dt   |
//! | `reference_dt` | 6.25e-5                    | > 0                                 |
//! | `n_list`       | `[4, 8, 16, 32]`           | strictly increasing, >= 1           |
//! | `radius`       | 0.1                        | probe ball radius, > 0              |
//!
//! The `random` preset draws trigonometric polynomials with modes 1 to 6
//! from `seed`, scaled to sup norms 0.5 (`u0`) and 0.25 (`rho0`).

use std::path::{Path, PathBuf};

use bfamily_core::presets::Preset;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, LabResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    SolveLagrangian,
    SolveEuler,
    Compare,
    Probe,
    ScaleCheck,
    Transversality,
    Convergence,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::SolveLagrangian => "solve-lagrangian",
            Command::SolveEuler => "solve-euler",
            Command::Compare => "compare",
            Command::Probe => "probe",
            Command::ScaleCheck => "scale-check",
            Command::Transversality => "transversality",
            Command::Convergence => "convergence",
        }
    }
}

pub const RANDOM_PRESET: &str = "random";

pub const KEYS: [&str; 20] = [
    "command",
    "n_points",
    "length",
    "b",
    "s",
    "dt",
    "t_final",
    "stride",
    "preset",
    "u0_file",
    "rho0_file",
    "output",
    "seed",
    "filter",
    "t_list",
    "t_grid",
    "dts",
    "reference_dt",
    "n_list",
    "radius",
];

/// Fully resolved and validated configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub n_points: usize,
    pub length: f64,
    pub b: f64,
    pub s: f64,
    pub dt: f64,
    pub t_final: f64,
    pub stride: usize,
    pub preset: String,
    pub u0_file: Option<PathBuf>,
    pub rho0_file: Option<PathBuf>,
    pub output: PathBuf,
    pub seed: u64,
    pub filter: bool,
    pub t_list: Vec<f64>,
    pub t_grid: Vec<f64>,
    pub dts: Vec<f64>,
    pub reference_dt: f64,
    pub n_list: Vec<usize>,
    pub radius: f64,
}

/// A configuration layer: every key optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub command: Option<Command>,
    pub n_points: Option<usize>,
    pub length: Option<f64>,
    pub b: Option<f64>,
    pub s: Option<f64>,
    pub dt: Option<f64>,
    pub t_final: Option<f64>,
    pub stride: Option<usize>,
    pub preset: Option<String>,
    pub u0_file: Option<PathBuf>,
    pub rho0_file: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    pub filter: Option<bool>,
    pub t_list: Option<Vec<f64>>,
    pub t_grid: Option<Vec<f64>>,
    pub dts: Option<Vec<f64>>,
    pub reference_dt: Option<f64>,
    pub n_list: Option<Vec<usize>>,
    pub radius: Option<f64>,
}

impl PartialConfig {
    /// Parses a flat TOML document.
    pub fn from_toml_str(text: &str, origin: &Path) -> LabResult<Self> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| LabError::Parse {
            path: origin.to_path_buf(),
            message: e.message().to_string(),
        })?;
        check_keys(table.iter().map(|(k, v)| (k.as_str(), v.is_table())))?;
        PartialConfig::deserialize(toml::Value::Table(table)).map_err(|e| LabError::Parse {
            path: origin.to_path_buf(),
            message: e.message().to_string(),
        })
    }

    /// Reads the `config` object of a manifest written by a previous run.
    pub fn from_manifest_str(text: &str, origin: &Path) -> LabResult<Self> {
        let parse_err = |message: String| LabError::Parse {
            path: origin.to_path_buf(),
            message,
        };
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
        let config = value
            .get("config")
            .and_then(|c| c.as_object())
            .ok_or_else(|| parse_err("manifest has no `config` object".to_string()))?;
        check_keys(config.iter().map(|(k, v)| (k.as_str(), v.is_object())))?;
        PartialConfig::deserialize(serde_json::Value::Object(config.clone())).map_err(|e| parse_err(e.to_string()))
    }

    /// Loads a config file; `.json` files are read as manifests.
    pub fn from_path(path: &Path) -> LabResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        if path.extension().is_some_and(|e| e == "json") {
            PartialConfig::from_manifest_str(&text, path)
        } else {
            PartialConfig::from_toml_str(&text, path)
        }
    }

    /// Values set in `other` win.
    pub fn overlay(self, other: PartialConfig) -> PartialConfig {
        PartialConfig {
            command: other.command.or(self.command),
            n_points: other.n_points.or(self.n_points),
            length: other.length.or(self.length),
            b: other.b.or(self.b),
            s: other.s.or(self.s),
            dt: other.dt.or(self.dt),
            t_final: other.t_final.or(self.t_final),
            stride: other.stride.or(self.stride),
            preset: other.preset.or(self.preset),
            u0_file: other.u0_file.or(self.u0_file),
            rho0_file: other.rho0_file.or(self.rho0_file),
            output: other.output.or(self.output),
            seed: other.seed.or(self.seed),
            filter: other.filter.or(self.filter),
            t_list: other.t_list.or(self.t_list),
            t_grid: other.t_grid.or(self.t_grid),
            dts: other.dts.or(self.dts),
            reference_dt: other.reference_dt.or(self.reference_dt),
            n_list: other.n_list.or(self.n_list),
            radius: other.radius.or(self.radius),
        }
    }

    /// Fills defaults and validates every key.
    pub fn resolve(self) -> LabResult<RunConfig> {
        let command = self
            .command
            .ok_or_else(|| LabError::config("command", "missing; give it in the file or on the command line"))?;
        let probe = command == Command::Probe;
        let cfg = RunConfig {
            command,
            n_points: self.n_points.unwrap_or(if probe { 4096 } else { 2048 }),
            length: self.length.unwrap_or(40.0),
            b: self.b.unwrap_or(2.0),
            s: self.s.unwrap_or(2.0),
            dt: self.dt.unwrap_or(if probe { 2.5e-4 } else { 5e-4 }),
            t_final: self.t_final.unwrap_or(1.0),
            stride: self.stride.unwrap_or(100),
            preset: self.preset.unwrap_or_else(|| Preset::BumpPair.name().to_string()),
            u0_file: self.u0_file,
            rho0_file: self.rho0_file,
            output: self.output.unwrap_or_else(|| PathBuf::from("out")),
            seed: self.seed.unwrap_or(0),
            filter: self.filter.unwrap_or(false),
            t_list: self.t_list.unwrap_or_else(|| vec![0.5, 2.0]),
            t_grid: self.t_grid.unwrap_or_else(|| vec![0.0, 0.25, 0.5, 0.75, 1.0]),
            dts: self.dts.unwrap_or_else(|| vec![4e-3, 2e-3, 1e-3, 5e-4]),
            reference_dt: self.reference_dt.unwrap_or(6.25e-5),
            n_list: self.n_list.unwrap_or_else(|| vec![4, 8, 16, 32]),
            radius: self.radius.unwrap_or(0.1),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn check_keys<'a>(keys: impl Iterator<Item = (&'a str, bool)>) -> LabResult<()> {
    for (key, nested) in keys {
        if !KEYS.contains(&key) {
            return Err(LabError::UnknownKey(key.to_string()));
        }
        if nested {
            return Err(LabError::config(key, "nested tables are not supported"));
        }
    }
    Ok(())
}

fn positive(key: &str, v: f64) -> LabResult<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(LabError::config(key, format!("{v} is out of range (expected finite and > 0)")))
    }
}

impl RunConfig {
    pub fn validate(&self) -> LabResult<()> {
        if !(16..=1 << 22).contains(&self.n_points) {
            return Err(LabError::config(
                "n_points",
                format!("{} is out of range (expected 16 ..= 4194304)", self.n_points),
            ));
        }
        positive("length", self.length)?;
        if !self.b.is_finite() {
            return Err(LabError::config("b", format!("{} is not finite", self.b)));
        }
        if !(self.s.is_finite() && self.s > 1.5) {
            return Err(LabError::config("s", format!("{} is out of range (expected > 3/2)", self.s)));
        }
        positive("dt", self.dt)?;
        positive("t_final", self.t_final)?;
        if self.dt > self.t_final {
            return Err(LabError::config("dt", format!("{} exceeds t_final = {}", self.dt, self.t_final)));
        }
        if self.stride == 0 {
            return Err(LabError::config("stride", "0 is out of range (expected >= 1)"));
        }
        if self.preset != RANDOM_PRESET && self.preset.parse::<Preset>().is_err() {
            let names: Vec<&str> = Preset::ALL.iter().map(|p| p.name()).collect();
            return Err(LabError::config(
                "preset",
                format!("unknown preset `{}` (expected one of {}, {RANDOM_PRESET})", self.preset, names.join(", ")),
            ));
        }
        for (key, file) in [("u0_file", &self.u0_file), ("rho0_file", &self.rho0_file)] {
            if let Some(path) = file {
                if !path.is_file() {
                    return Err(LabError::config(key, format!("field file {} does not exist", path.display())));
                }
            }
        }
        if self.t_list.is_empty() {
            return Err(LabError::config("t_list", "must not be empty"));
        }
        for &t in &self.t_list {
            positive("t_list", t)?;
        }
        if self.t_grid.is_empty() || self.t_grid.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(LabError::config("t_grid", "entries must lie in [0, 1]"));
        }
        positive("reference_dt", self.reference_dt)?;
        if self.dts.len() < 2 {
            return Err(LabError::config("dts", "needs at least two steps"));
        }
        for &dt in &self.dts {
            positive("dts", dt)?;
            if dt <= self.reference_dt {
                return Err(LabError::config("dts", format!("{dt} is not larger than reference_dt")));
            }
        }
        if self.n_list.is_empty() || self.n_list[0] == 0 || self.n_list.windows(2).any(|p| p[0] >= p[1]) {
            return Err(LabError::config("n_list", "must be non-empty, positive and strictly increasing"));
        }
        positive("radius", self.radius)?;
        Ok(())
    }
}
