use std::path::PathBuf;

use clap::Parser;

use crate::config::{Command, PartialConfig};
use crate::error::LabResult;

/// Numerical laboratory for the two-component b-family.
///
/// Values are taken from flags first, then from the config file, then from
/// the documented defaults. A `manifest.json` from an earlier run is accepted
/// as a config file.
#[derive(Debug, Parser)]
#[command(name = "bfamily", version)]
pub struct Cli {
    /// Command to run; may instead be given as `command` in the config file.
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// Flat TOML config file or a previous run's manifest.json.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of grid points.
    #[arg(long)]
    pub n_points: Option<usize>,
    /// Period length L.
    #[arg(long)]
    pub length: Option<f64>,
    /// Model parameter b.
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Sobolev exponent s of the velocity.
    #[arg(long)]
    pub s: Option<f64>,
    /// Time step.
    #[arg(long, allow_negative_numbers = true)]
    pub dt: Option<f64>,
    /// Final time.
    #[arg(long, allow_negative_numbers = true)]
    pub t_final: Option<f64>,
    /// Snapshot every this many steps.
    #[arg(long)]
    pub stride: Option<usize>,
    /// Initial-data preset (bump-pair, constant, single-mode, momentum-bump, random).
    #[arg(long)]
    pub preset: Option<String>,
    /// CSV with the initial velocity; overrides the preset.
    #[arg(long)]
    pub u0_file: Option<PathBuf>,
    /// CSV with the initial density; overrides the preset.
    #[arg(long)]
    pub rho0_file: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Seed of the random preset.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Enable the spectral filter in solve-euler.
    #[arg(long)]
    pub filter: Option<bool>,
    /// Scale-check times T, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub t_list: Option<Vec<f64>>,
    /// Transversality scan times in [0, 1], comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub t_grid: Option<Vec<f64>>,
    /// Convergence time steps, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub dts: Option<Vec<f64>>,
    /// Reference time step of the convergence study.
    #[arg(long, allow_negative_numbers = true)]
    pub reference_dt: Option<f64>,
    /// Probe sequence indices, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    /// Probe ball radius R.
    #[arg(long, allow_negative_numbers = true)]
    pub radius: Option<f64>,
}

impl Cli {
    /// Config file values overlaid with the flags.
    pub fn into_partial(self) -> LabResult<PartialConfig> {
        let file = match &self.config {
            Some(path) => PartialConfig::from_path(path)?,
            None => PartialConfig::default(),
        };
        Ok(file.overlay(PartialConfig {
            command: self.command,
            n_points: self.n_points,
            length: self.length,
            b: self.b,
            s: self.s,
            dt: self.dt,
            t_final: self.t_final,
            stride: self.stride,
            preset: self.preset,
            u0_file: self.u0_file,
            rho0_file: self.rho0_file,
            output: self.output,
            seed: self.seed,
            filter: self.filter,
            t_list: self.t_list,
            t_grid: self.t_grid,
            dts: self.dts,
            reference_dt: self.reference_dt,
            n_list: self.n_list,
            radius: self.radius,
        }))
    }
}
