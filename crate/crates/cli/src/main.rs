//! `packbench`: benchmark, evolve, tune and project online bin packing
//! heuristics. Exit codes: 0 ok, 2 usage, 3 I/O, 4 contract violation.

mod commands;
mod data;
mod settings;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Contract(String),
    Other(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            Self::Usage(_) => 2,
            Self::Io(_) => 3,
            Self::Contract(_) => 4,
            Self::Other(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(m) | Self::Io(m) | Self::Contract(m) | Self::Other(m) => f.write_str(m),
        }
    }
}

impl From<packbench::Error> for CliError {
    fn from(e: packbench::Error) -> Self {
        use packbench::Error as E;
        let msg = e.to_string();
        match e {
            E::Parse { .. } | E::Validation { .. } | E::CountMismatch { .. } => Self::Io(msg),
            E::ContractViolation { .. } => Self::Contract(msg),
            E::Precondition(_) | E::NotImplemented(_) | E::Config(_) | E::UnknownHeuristic(_) => Self::Usage(msg),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "packbench", version, about = "Online bin packing heuristic benchmark")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Base seed for every random stream.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// key=value settings file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Use ceil(L1) as the excess-bins baseline.
    #[arg(long, global = true)]
    pub ceil_lb: bool,
    /// Exponent of the Falkenauer fitness.
    #[arg(long, global = true)]
    pub falkenauer_k: Option<f64>,
    /// Candidate bins offered to score-based heuristics: fresh or no-fit.
    #[arg(long, global = true)]
    pub candidates: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Regenerate benchmark datasets as BPPLib files plus a manifest.
    Generate(commands::GenerateArgs),
    /// Evaluate a portfolio on every dataset of a manifest.
    Bench(commands::BenchArgs),
    /// Evolve instances won outright by a target heuristic.
    Evolve(commands::EvolveArgs),
    /// Tune the constants of an evolved heuristic.
    Tune(commands::TuneArgs),
    /// Extract instance features.
    Features(commands::FeaturesArgs),
    /// Select features and project instances to two dimensions.
    Project(commands::ProjectArgs),
    /// Generalisation profile and boxplot statistics from bench output.
    Report(commands::ReportArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::run(&cli.common, cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
