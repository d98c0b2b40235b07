//! The `delsarte` command-line tool.

pub mod certificate;
pub mod commands;
pub mod config;
pub mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::Arith;

pub const EXIT_OK: u8 = 0;
pub const EXIT_IO: u8 = 1;
pub const EXIT_INVALID_INPUT: u8 = 2;
pub const EXIT_THEOREM_VIOLATION: u8 = 3;
pub const EXIT_INVALID_CERTIFICATE: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "delsarte", version, about = "Primal/dual solver and certificate checker for Delsarte-type problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, value_enum)]
    pub arith: Option<Arith>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated ε schedule, e.g. `1/2,1/4,0`.
    #[arg(long)]
    pub epsilon: Option<String>,
    #[arg(long)]
    pub truncation: Option<usize>,
    #[arg(long)]
    pub verify_grid_multiplier: Option<usize>,
    #[arg(long)]
    pub dump_tableau: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve primal and dual, write report, CSV row and certificate.
    Solve(CommonArgs),
    /// Solve the dual only and emit its certificate.
    Certify(CommonArgs),
    /// Re-check a certificate against a configuration without solving.
    Verify {
        #[arg(long)]
        certificate: PathBuf,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Exact strong-duality fuzzing over random symmetric regions.
    Fuzz {
        #[arg(long, default_value_t = 500)]
        trials: usize,
        /// Enumerate every region pair instead of sampling.
        #[arg(long)]
        exhaustive: bool,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// One run per value of the config's `[sweep]` parameter.
    Sweep(CommonArgs),
}

/// A failed command with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    pub fn new(code: u8, error: impl Into<anyhow::Error>) -> Self {
        Failure { code, error: error.into() }
    }

    /// Unreadable inputs map to 1, everything else to 2.
    pub fn input(error: anyhow::Error) -> Self {
        let io = error.chain().any(|e| e.is::<config::ReadError>() || e.is::<std::io::Error>());
        Failure { code: if io { EXIT_IO } else { EXIT_INVALID_INPUT }, error }
    }

    pub fn io(error: impl Into<anyhow::Error>) -> Self {
        Failure::new(EXIT_IO, error)
    }
}

pub fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Solve(args) => commands::solve(&args),
        Command::Certify(args) => commands::certify(&args),
        Command::Verify { certificate, common } => commands::verify(&certificate, &common),
        Command::Fuzz { trials, exhaustive, common } => commands::fuzz(&common, trials, exhaustive),
        Command::Sweep(args) => commands::sweep(&args),
    }
}
