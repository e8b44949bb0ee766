//! `torus-cauchy`: batch front end for the spectral solver and
//! well-posedness classifier.
//!
//! Exit codes: 0 success, 1 schema error, 2 unclassifiable structure,
//! 3 solver failure, 4 oracle-check failure.

mod commands;
mod output;
mod schema;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug)]
pub enum CliError {
    Schema(String),
    Unclassifiable(String),
    Solver(String),
    OracleCheck(String),
}

impl CliError {
    pub fn schema(msg: impl Into<String>) -> Self {
        CliError::Schema(msg.into())
    }

    pub fn unclassifiable(msg: impl Into<String>) -> Self {
        CliError::Unclassifiable(msg.into())
    }

    pub fn solver(msg: impl Into<String>) -> Self {
        CliError::Solver(msg.into())
    }

    pub fn io(msg: impl Into<String>) -> Self {
        CliError::Solver(msg.into())
    }

    pub fn oracle_check(msg: impl Into<String>) -> Self {
        CliError::OracleCheck(msg.into())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Schema(_) => 1,
            CliError::Unclassifiable(_) => 2,
            CliError::Solver(_) => 3,
            CliError::OracleCheck(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Schema(m) => write!(f, "schema error: {m}"),
            CliError::Unclassifiable(m) => write!(f, "unclassifiable: {m}"),
            CliError::Solver(m) => write!(f, "solver error: {m}"),
            CliError::OracleCheck(m) => write!(f, "oracle check failed:\n{m}"),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "torus-cauchy",
    about = "Spectral solver and well-posedness classifier for periodic Cauchy problems",
    version
)]
struct Cli {
    /// Seed for randomized suites (recorded in manifests).
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify well-posedness from the declared structure block.
    Classify {
        /// Problem file (JSON).
        spec: PathBuf,
    },
    /// Solve the Cauchy problem and emit one field CSV per requested time.
    Solve {
        spec: PathBuf,
        /// Output directory for field CSVs and the manifest.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a blow-up probe and emit the probe CSV and report.
    Witness {
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cross-check the closed-form propagator against the RK4 oracle.
    OracleCheck {
        spec: PathBuf,
        /// Number of trials (the first uses the file's own operator).
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Gauss-Legendre nodes per unit time for the closed-form side.
        #[arg(long, default_value_t = 4096)]
        nodes_per_unit: usize,
    },
    /// Fit a Gevrey decay model to a field CSV.
    FitDecay {
        /// Field CSV produced by the solve command.
        csv: PathBuf,
    },
}

fn read_input(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::schema(format!("cannot read {}: {e}", path.display())))
}

fn configure_threads() {
    if let Ok(raw) = std::env::var("TORUS_CAUCHY_THREADS") {
        if let Ok(n) = raw.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
}

fn run(cli: Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Classify { spec } => commands::cmd_classify(&read_input(spec)?),
        Command::Solve { spec, out } => commands::cmd_solve(&read_input(spec)?, out, cli.seed),
        Command::Witness { spec, out } => commands::cmd_witness(&read_input(spec)?, out, cli.seed),
        Command::OracleCheck {
            spec,
            trials,
            nodes_per_unit,
        } => commands::cmd_oracle_check(&read_input(spec)?, *trials, *nodes_per_unit, cli.seed),
        Command::FitDecay { csv } => commands::cmd_fit_decay(&read_input(csv)?),
    }
}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    match run(cli) {
        Ok(output) => {
            println!("{output}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
