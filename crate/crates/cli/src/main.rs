//! `platoon`: connectivity analysis and resilient-algorithm experiments on
//! k-nearest-neighbor platoons.

mod commands;
mod output;
mod scenario;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::{analyze, consensus, estimate, formation, sweep};

#[derive(Debug, Parser)]
#[command(
    name = "platoon",
    version,
    about = "Platoon network analysis and resilient-algorithm experiments"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Directory for artifacts and the run manifest.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Seed for every random draw; overrides the scenario's seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn as_str(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Connectivity measures of a platoon or a graph file.
    Analyze(analyze::AnalyzeArgs),
    /// Fault-tolerant initial-state recovery at one observer.
    Estimate(estimate::EstimateArgs),
    /// W-MSR consensus against adversarial vehicles.
    Consensus(consensus::ConsensusArgs),
    /// Formation-control simulation and H-infinity analysis.
    Formation(formation::FormationArgs),
    /// Closed-form H-infinity norm over a range of platoons.
    Sweep(sweep::SweepArgs),
}

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad input: arguments, schema or values (exit 2).
    Validation(String),
    /// Exhaustive computation over its limit (exit 3).
    Refused(String),
    /// Anything else, such as failing to write artifacts (exit 1).
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Runtime(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Refused(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Refused(m) | CliError::Runtime(m) => m,
        }
    }
}

impl From<platoon::Error> for CliError {
    fn from(e: platoon::Error) -> Self {
        match e {
            platoon::Error::ExhaustiveRefused { .. } => CliError::Refused(e.to_string()),
            platoon::Error::Io(_) => CliError::Runtime(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(args) => analyze::run(&cli.common, &args),
        Command::Estimate(args) => estimate::run(&cli.common, &args),
        Command::Consensus(args) => consensus::run(&cli.common, &args),
        Command::Formation(args) => formation::run(&cli.common, &args),
        Command::Sweep(args) => sweep::run(&cli.common, &args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
