//! Batch front-end: certification reports, width tables, projections and spline checks.

mod commands;
mod config;
mod kernel_arg;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use shiftapprox::certify::Verdict;

use config::{Common, RunConfig};

pub const EXIT_PASS: u8 = 0;
pub const EXIT_ERROR: u8 = 1;
pub const EXIT_FAIL: u8 = 2;
pub const EXIT_INCONCLUSIVE: u8 = 3;
pub const EXIT_USAGE: u8 = 64;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or input; exit 64.
    Usage(String),
    Runtime(String),
}

impl From<shiftapprox::Error> for CliError {
    fn from(e: shiftapprox::Error) -> Self {
        use shiftapprox::Error as E;
        match e {
            E::InvalidParameter(_) | E::TruncationTooSmall { .. } | E::BoundaryViolation(_) => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Runtime(other.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "shiftapprox", version, about = "Optimal shift spaces: certificates, widths, projections and splines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum Command {
    /// Check the coefficient conditions of a theorem for a generator; exit 0 pass, 2 fail, 3 inconclusive.
    Certify,
    /// Tabulate ellipsoid widths against worst-case error ratios of the optimal spaces.
    Widths,
    /// Project a sampled function on a segment and compare with the Jackson bound.
    Project,
    /// Dimension, boundary and knot checks for the spline spaces.
    Splines,
    /// Generator catalog.
    Kernels {
        #[arg(value_enum, default_value = "list")]
        action: KernelsAction,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KernelsAction {
    List,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(text) = std::env::var("SHIFTAPPROX_THREADS") else {
        return Ok(());
    };
    let threads: usize = text
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Usage(format!("SHIFTAPPROX_THREADS must be a positive integer, got {text:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Runtime(format!("cannot start worker pool: {e}")))
}

fn run(cli: Cli) -> Result<u8, CliError> {
    configure_threads()?;
    let cfg = RunConfig::resolve(cli.common).map_err(CliError::Usage)?;
    let (table, verdict) = match cli.command {
        Command::Certify => commands::certify(&cfg)?,
        Command::Widths => commands::widths(&cfg)?,
        Command::Project => commands::project(&cfg)?,
        Command::Splines => commands::splines(&cfg)?,
        Command::Kernels { action: KernelsAction::List } => (commands::kernels_list(), Verdict::Pass),
    };
    match table.write(cfg.format(), cfg.out.as_deref()) {
        // A closed pipe downstream (`| head`) is not an error of ours.
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
        Err(e) => return Err(CliError::Runtime(format!("cannot write output: {e}"))),
        Ok(()) => {}
    }
    Ok(match verdict {
        Verdict::Pass => EXIT_PASS,
        Verdict::Fail => EXIT_FAIL,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
