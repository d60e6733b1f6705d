//! `taylor-ibvp` command-line front end.

mod config;
mod problem;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use config::SchemeName;
use problem::Overrides;

#[derive(Parser)]
#[command(name = "taylor-ibvp", version, about = "Time-Taylor series solutions of initial-boundary value problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the series, write the report and snapshots.
    Solve(Args),
    /// Derive the forcing of a given solution and check the round trip.
    Manufacture(Args),
    /// Compare the series against a classical time stepper.
    Compare(Args),
    /// Sweep truncation orders and grids.
    Study(Args),
    /// Write the bump function of the domain.
    Bump(Args),
}

#[derive(clap::Args)]
struct Args {
    /// Problem configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Fixed truncation order, replacing the configured policy.
    #[arg(long)]
    order: Option<usize>,
    /// Snapshot times, comma separated.
    #[arg(long, value_delimiter = ',')]
    snapshots: Option<Vec<f64>>,
    /// Oracle scheme: crank_nicolson, theta_method, central_difference_wave or maxwell_leapfrog.
    #[arg(long)]
    oracle: Option<SchemeName>,
    /// Oracle time step.
    #[arg(long)]
    dt: Option<f64>,
}

fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var("TAYLOR_IBVP_THREADS") else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .with_context(|| format!("TAYLOR_IBVP_THREADS must be a positive integer, got `{raw}`"))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn execute(cli: Cli) -> Result<()> {
    init_threads()?;
    type Handler = fn(&config::Config, &Overrides, &Path) -> Result<()>;
    let (args, handler): (Args, Handler) = match cli.command {
        Command::Solve(a) => (a, run::cmd_solve),
        Command::Manufacture(a) => (a, run::cmd_manufacture),
        Command::Compare(a) => (a, run::cmd_compare),
        Command::Study(a) => (a, run::cmd_study),
        Command::Bump(a) => (a, run::cmd_bump),
    };
    let cfg = config::load(&args.config)?;
    let ov = Overrides { order: args.order, snapshots: args.snapshots, oracle: args.oracle, dt: args.dt, counts: None };
    handler(&cfg, &ov, &args.out)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
