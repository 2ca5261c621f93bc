//! `naqtur`: collision simulation, bound evaluation and verification from
//! the command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage/config error,
//! 3 I/O error.

mod bound;
mod config_file;
mod report;
mod simulate;
mod verify;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use naqtur_core::Error;

/// Fallback master seed when neither flags, config file nor NAQTUR_SEED
/// provide one. Printed at startup either way.
pub const DEFAULT_SEED: u64 = 0x6e61_7174_7572_0001;

#[derive(Parser)]
#[command(name = "naqtur", version, about = "One-shot qubit collision thermodynamics: simulate, bound, verify")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full identity/property suite and print a pass/fail table.
    Verify(VerifyArgs),
    /// Simulate collisions; write a records CSV and a summary JSON.
    Simulate(SimulateArgs),
    /// Evaluate the bound on external (dq, V, V') rows of a CSV.
    Bound(BoundArgs),
    /// Emit plot-ready TSV files from a records CSV.
    Report(ReportArgs),
}

#[derive(Args)]
pub struct VerifyArgs {
    /// Master seed (falls back to NAQTUR_SEED, then a printed default).
    #[arg(long)]
    seed: Option<u64>,
    /// Quadrature order of the divergence-integral checks; lower orders
    /// relax their printed tolerances.
    #[arg(long, default_value_t = 64)]
    quadrature_order: usize,
    /// Sample count for the statistical checks.
    #[arg(long, default_value_t = 1000)]
    samples: usize,
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Flat key = value config file; flags override file entries.
    #[arg(long)]
    config: Option<std::path::PathBuf>,
    /// Master seed (priority: flag, config file, NAQTUR_SEED, default).
    #[arg(long)]
    seed: Option<u64>,
    /// Number of samples.
    #[arg(long = "n", visible_alias = "samples")]
    n_samples: Option<usize>,
    /// monte-carlo | stratified | saturation-hunt
    #[arg(long)]
    strategy: Option<String>,
    /// haar-isospectral | small-isospectral | independent-random
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    r_min: Option<f64>,
    #[arg(long)]
    r_max: Option<f64>,
    #[arg(long)]
    phi_min: Option<f64>,
    #[arg(long)]
    phi_max: Option<f64>,
    #[arg(long)]
    eps_min: Option<f64>,
    #[arg(long)]
    eps_max: Option<f64>,
    /// Number of charges (this artifact supports 2).
    #[arg(long)]
    k: Option<usize>,
    /// Rotate the charge frame by a uniform random rotation per sample.
    #[arg(long)]
    random_frame: Option<bool>,
    /// Compose the partial swap with the bath-adapted fixed-point unitary.
    #[arg(long)]
    fixed_point: Option<bool>,
    /// s_simple | bound_B
    #[arg(long)]
    strat_axis: Option<String>,
    #[arg(long)]
    n_bins: Option<usize>,
    #[arg(long)]
    hunt_rounds: Option<usize>,
    #[arg(long)]
    hunt_keep_fraction: Option<f64>,
    #[arg(long)]
    quadrature_order: Option<usize>,
    /// Output directory; records/summary paths are resolved inside it.
    #[arg(long)]
    out_dir: Option<std::path::PathBuf>,
    /// Records CSV path (relative to --out-dir if both are given).
    #[arg(long)]
    records: Option<std::path::PathBuf>,
    /// Summary JSON path.
    #[arg(long)]
    summary: Option<std::path::PathBuf>,
    /// Worker threads (default: rayon's choice). Output bytes do not
    /// depend on this.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
pub struct BoundArgs {
    /// Input CSV with columns dq_1..dq_m, V_ij, Vp_ij (i <= j).
    #[arg(long)]
    input: std::path::PathBuf,
    /// Output CSV; defaults to "<input>.bound.csv".
    #[arg(long)]
    output: Option<std::path::PathBuf>,
    #[arg(long, default_value_t = 64)]
    quadrature_order: usize,
}

#[derive(Args)]
pub struct ReportArgs {
    /// Records CSV produced by `simulate`.
    #[arg(long)]
    records: std::path::PathBuf,
    /// Directory for the emitted TSV files.
    #[arg(long, default_value = ".")]
    out_dir: std::path::PathBuf,
    /// Bins of the Fig.-2-style running average.
    #[arg(long, default_value_t = 25)]
    n_bins: usize,
}

fn exit_code_for(err: &Error) -> ExitCode {
    match err {
        Error::Io { .. } | Error::Parse { .. } | Error::Empty(_) => ExitCode::from(3),
        Error::Config(_) | Error::InvalidParameter(_) | Error::Unsupported(_) => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

/// Seed resolution shared by subcommands: flag, then config file, then the
/// NAQTUR_SEED environment variable, then the built-in default.
pub fn resolve_seed(flag: Option<u64>, from_file: Option<u64>) -> naqtur_core::Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Some(s) = from_file {
        return Ok(s);
    }
    match std::env::var("NAQTUR_SEED") {
        Ok(text) => text
            .trim()
            .parse::<u64>()
            .map_err(|e| Error::Config(format!("NAQTUR_SEED must be a u64: {e}"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Verify(args) => verify::cmd_verify(&args),
        Command::Simulate(args) => simulate::cmd_simulate(&args),
        Command::Bound(args) => bound::cmd_bound(&args),
        Command::Report(args) => report::cmd_report(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}
