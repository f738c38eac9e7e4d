//! Command line definitions.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "protocol-lab",
    version,
    about = "Build, verify and sweep coherent-state transport protocols"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a protocol and print its schedule, total time and constraint flags.
    Protocol(ProtocolArgs),
    /// Run the fidelity oracles on a protocol schedule.
    Simulate(SimulateArgs),
    /// Sweep the DSBBB time advantage over (omega2, t2).
    Scan(ScanArgs),
    /// Tabulate the BBB time against the quantum speed limits.
    Qsl(QslArgs),
    /// Convert between physical units and dimensionless trap quantities.
    Convert(ConvertArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Bb,
    Bbb,
    Sbbb,
    Dsbbb,
    ForwardSearch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleChoice {
    Gaussian,
    Grid,
    Both,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON config file; command line flags take precedence over its keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write the structured output here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Seed for randomized searches.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Suppress the human-readable summary.
    #[arg(long)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Default, Args)]
pub struct ProtocolParams {
    #[arg(long, value_enum)]
    pub kind: Option<Kind>,
    /// Transport distance in units of the reference frame.
    #[arg(long = "D")]
    pub d: Option<f64>,
    /// First BBB displacement.
    #[arg(long = "R")]
    pub r: Option<f64>,
    /// Trap frequency of single-frequency protocols.
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub omega0: Option<f64>,
    #[arg(long)]
    pub omega1: Option<f64>,
    #[arg(long)]
    pub omega2: Option<f64>,
    /// Dwell under omega1 before and after the omega2 window.
    #[arg(long)]
    pub t2: Option<f64>,
    /// Delay of the BBB shifts inside the omega2 window.
    #[arg(long)]
    pub offset: Option<f64>,
    /// Accepted samples for the forward-only search.
    #[arg(long)]
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ProtocolArgs {
    #[command(flatten)]
    pub params: ProtocolParams,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub params: ProtocolParams,
    #[arg(long, value_enum)]
    pub oracle: Option<OracleChoice>,
    /// Stop the schedule at this time.
    #[arg(long)]
    pub truncate_at: Option<f64>,
    #[arg(long)]
    pub x_min: Option<f64>,
    #[arg(long)]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub n_points: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    /// Write grid wavefunction snapshots (t, x, Re psi, Im psi) to this file.
    #[arg(long)]
    pub dump: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    #[arg(long)]
    pub omega1: Option<f64>,
    #[arg(long)]
    pub n_omega2: Option<usize>,
    #[arg(long)]
    pub n_t2: Option<usize>,
    #[arg(long = "D")]
    pub d: Option<f64>,
    #[arg(long = "R")]
    pub r: Option<f64>,
    /// Also write a gnuplot script for the CSV given by --out.
    #[arg(long)]
    pub gnuplot: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct QslArgs {
    #[arg(long = "D")]
    pub d: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub r_min: Option<f64>,
    #[arg(long)]
    pub r_max: Option<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ConvertArgs {
    #[arg(long)]
    pub mass: Option<f64>,
    /// amu or kg.
    #[arg(long)]
    pub mass_unit: Option<String>,
    #[arg(long)]
    pub freq: Option<f64>,
    /// hz, khz, mhz or rad-per-s.
    #[arg(long)]
    pub freq_unit: Option<String>,
    /// Treat an hz/khz/mhz value as angular frequency rather than omega / 2 pi.
    #[arg(long)]
    pub angular: bool,
    #[arg(long)]
    pub distance: Option<f64>,
    /// m, um or nm.
    #[arg(long)]
    pub distance_unit: Option<String>,
    /// Dimensionless distance to express in meters.
    #[arg(long)]
    pub target_d: Option<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}
