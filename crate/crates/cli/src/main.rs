//! `adgap`: batch front end for spectral-gap analyses.
//!
//! Exit codes: 0 pass, 1 usage or runtime error, 2 bound/verdict failure.

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CliError, Outcome};
use config::RunConfig;

#[derive(Parser)]
#[command(
    name = "adgap",
    version,
    about = "Spectral gaps of interpolation-path Hamiltonians"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// JSON run configuration; flags override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    run: RunConfig,
}

#[derive(Subcommand)]
enum Command {
    /// Four lowest eigenvalues of the 16-value instance with bracket lines
    Fig1(Common),
    /// Lowest pair and gap on a uniform grid
    Gap(Common),
    /// Minimum gap and its location
    Mingap(Common),
    /// Exponential gap bound check
    Bounds(Common),
    /// Crossing abscissas and sandwich check
    Crossing(Common),
    /// Budget (and optionally evolution) over a qubit range
    Sweep(Common),
    /// Schrödinger evolution along the path
    Evolve(Common),
    /// Structural equivalence checks
    Equiv(Common),
}

type Handler = fn(&RunConfig) -> Result<Outcome, CliError>;

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let (common, handler): (Common, Handler) = match cli.command {
        Command::Fig1(c) => (c, commands::cmd_fig1),
        Command::Gap(c) => (c, commands::cmd_gap),
        Command::Mingap(c) => (c, commands::cmd_mingap),
        Command::Bounds(c) => (c, commands::cmd_bounds),
        Command::Crossing(c) => (c, commands::cmd_crossing),
        Command::Sweep(c) => (c, commands::cmd_sweep),
        Command::Evolve(c) => (c, commands::cmd_evolve),
        Command::Equiv(c) => (c, commands::cmd_equiv),
    };
    let cfg = match &common.config {
        Some(path) => common
            .run
            .or(RunConfig::load(path).map_err(CliError::Usage)?),
        None => common.run,
    };
    let outcome = handler(&cfg)?;
    match &cfg.out {
        Some(path) => std::fs::write(path, &outcome.body)
            .map_err(|e| CliError::Run(adiabatic_gap::Error::Io(e)))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout
                .write_all(outcome.body.as_bytes())
                .and_then(|_| stdout.flush())
            {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    return Err(CliError::Run(adiabatic_gap::Error::Io(e)))
                }
                _ => {}
            }
        }
    }
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(outcome) if outcome.passed => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(2),
        Err(e @ CliError::Usage(_)) => {
            eprintln!("{e}");
            eprintln!("run `adgap <command> --help` for the accepted flags");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(1)
        }
    }
}
