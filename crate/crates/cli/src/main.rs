mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use darkpol::Error;

use crate::config::Config;

/// Dark-state polariton scenarios: adiabatic transport, Maxwell–Bloch
/// integration, validity estimates and the few-atom oracle.
#[derive(Parser)]
#[command(name = "darkpol", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML configuration; omitted sections use the built-in storage scenario defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Also run the full Maxwell–Bloch integrator (fig2).
    #[arg(long, global = true)]
    full_bloch: bool,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Mixing-angle schedule, adiabatic polariton surface and its components.
    Fig2,
    /// Full Maxwell–Bloch trajectory with diagnostics.
    Propagate,
    /// Stop-and-retrieve report: fidelity, energy ratio, adiabaticity.
    Store,
    /// Loss-free distance, adiabaticity, storage bound and residuals.
    Validity,
    /// Dark-state residuals, commutators and transfer fidelities.
    Oracle,
    /// One parameter varied over the `[sweep]` values.
    Sweep,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.chain().find_map(|e| e.downcast_ref::<Error>()) {
        Some(
            Error::InvalidParameter { .. }
            | Error::Config(_)
            | Error::GridMismatch { .. }
            | Error::UnsupportedRegime(_)
            | Error::DimensionOverflow { .. },
        ) => 2,
        Some(Error::OutOfDomain { .. } | Error::DomainOverflow(_)) => 4,
        Some(_) => 3,
        None => 1,
    }
}

fn run(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(Error::Config("--workers must be at least 1".into()).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let cfg = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    match cli.command {
        Command::Fig2 => commands::fig2(&cfg, &cli.out, cli.full_bloch),
        Command::Propagate => commands::propagate(&cfg, &cli.out),
        Command::Store => commands::store(&cfg, &cli.out),
        Command::Validity => commands::validity_report(&cfg, &cli.out),
        Command::Oracle => commands::oracle_report(&cfg, &cli.out),
        Command::Sweep => commands::sweep(&cfg, &cli.out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
