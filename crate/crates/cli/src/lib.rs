//! Experiment runner behind the `sbs` binary.

pub mod config;
pub mod run;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

pub use config::ToolkitConfig;
pub use run::{run_experiment, write_outputs, Manifest, Output};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure in {context}: {source}")]
    Numerical {
        context: String,
        #[source]
        source: sbs_core::Error,
    },
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Numerical { .. } => 3,
            Self::Io { .. } => 1,
        }
    }

    pub(crate) fn numerical(context: &str) -> impl FnOnce(sbs_core::Error) -> Self + '_ {
        move |source| Self::Numerical { context: context.to_string(), source }
    }
}

#[derive(Debug, Parser)]
#[command(name = "sbs", version, about = "Sensing base station experiments")]
pub struct Cli {
    /// Configuration file; the shipped default.cfg when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Master seed, overrides `mc.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Joint FDB/DCB weights: pattern.csv and summary.csv.
    Beamform(BeamformArgs),
    /// Range and capacity sweeps: ranges.csv and capacity.csv.
    Linkbudget,
    /// Radar Monte Carlo against theory: rmse.csv.
    RadarMc(RadarMcArgs),
    /// FDB scan period over widths and power splits: scan.csv.
    ScanPeriod,
    /// Frame timeline and user allocation: allocation.csv and violations.csv.
    FramePlan(FramePlanArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Beamform(_) => "beamform",
            Self::Linkbudget => "linkbudget",
            Self::RadarMc(_) => "radar-mc",
            Self::ScanPeriod => "scan-period",
            Self::FramePlan(_) => "frame-plan",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GridArg {
    Cut,
    Full,
}

#[derive(Debug, Clone, Default, Args)]
pub struct BeamformArgs {
    #[arg(long, value_enum)]
    pub grid: Option<GridArg>,
    /// Desired-response grid step, degrees.
    #[arg(long)]
    pub step: Option<f64>,
    /// Pattern read-out step, degrees.
    #[arg(long)]
    pub pattern_step: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct RadarMcArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub gamma_start: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma_stop: Option<f64>,
    #[arg(long)]
    pub gamma_step: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// OFDM symbols.
    #[arg(long)]
    pub m: Option<usize>,
    /// Subcarriers.
    #[arg(long)]
    pub n: Option<usize>,
    /// Transform lengths equal to M and N.
    #[arg(long)]
    pub unpadded: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct FramePlanArgs {
    /// CSV with columns user_id,beam_id,demand.
    #[arg(long)]
    pub requests: PathBuf,
}
