//! Batch front door: JSON/CSV in and out, orchestrating construction,
//! verification, boundary-problem solves and parameter sweeps.
//!
//! Exit codes: 0 ok, 1 parse, 2 invalid seed, 3 verification failure,
//! 4 index obstruction, 5 no regular solution.

mod commands;
mod config;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{error::ErrorKind, Parser, Subcommand};

use config::Tolerances;

#[derive(Debug)]
pub enum CliErrorKind {
    Parse,
    InvalidSeed,
    VerificationFailed,
    IndexObstruction,
    NoRegularSolution,
}

/// Command failure with its exit-code category.
#[derive(Debug)]
pub struct CliError {
    kind: CliErrorKind,
    message: String,
}

impl CliError {
    pub fn parse(message: String) -> Self {
        CliError { kind: CliErrorKind::Parse, message }
    }

    pub fn invalid_seed(message: String) -> Self {
        CliError { kind: CliErrorKind::InvalidSeed, message }
    }

    pub fn verification_failed(message: String) -> Self {
        CliError { kind: CliErrorKind::VerificationFailed, message }
    }

    pub fn index_obstruction(message: String) -> Self {
        CliError { kind: CliErrorKind::IndexObstruction, message }
    }

    pub fn no_regular_solution(message: String) -> Self {
        CliError { kind: CliErrorKind::NoRegularSolution, message }
    }

    pub fn code(&self) -> u8 {
        match self.kind {
            CliErrorKind::Parse => 1,
            CliErrorKind::InvalidSeed => 2,
            CliErrorKind::VerificationFailed => 3,
            CliErrorKind::IndexObstruction => 4,
            CliErrorKind::NoRegularSolution => 5,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "isomono",
    about = "Explicit rational Schlesinger solutions, their verification, and \
             numerical Riemann-Hilbert factorization on circles",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Input file (JSON).
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Output file (JSON or CSV depending on the command).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Override a named tolerance, NAME=VALUE (repeatable).
    #[arg(long = "tol-override", global = true)]
    tol_override: Vec<String>,
    /// Override the contour node count for sweep families (even, >= 16).
    #[arg(long, global = true)]
    nodes: Option<usize>,
    /// Seed for randomized sample generation.
    #[arg(long = "rng-seed", global = true, default_value_t = 42)]
    rng_seed: u64,
    /// Process sweep grid rows in parallel.
    #[arg(long, global = true, default_value_t = false, action = clap::ArgAction::Set)]
    parallel: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Build the explicit solution from a seed file and write it out.
    Construct,
    /// Check conservation, structure preservation and the deformation
    /// equations along a path of parameter samples.
    Verify {
        /// Path specification file; defaults to seeded random samples
        /// around the initial point.
        #[arg(long)]
        path: Option<PathBuf>,
        /// Also check that every monodromy generator stays trivial.
        #[arg(long)]
        isomonodromy: bool,
    },
    /// Solve the regular boundary problem for sampled boundary data.
    Rh,
    /// Sweep a family over a parameter grid and emit CSV.
    Sweep,
    /// Pretty-print any artifact produced by the other commands.
    Report,
}

fn require_input(cli: &Cli) -> Result<&PathBuf, CliError> {
    cli.input
        .as_ref()
        .ok_or_else(|| CliError::parse("--input is required".into()))
}

fn require_output(cli: &Cli) -> Result<&PathBuf, CliError> {
    cli.output
        .as_ref()
        .ok_or_else(|| CliError::parse("--output is required".into()))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let mut tol = Tolerances::default();
    tol.apply_overrides(&cli.tol_override)?;
    let nodes_override = match cli.nodes {
        Some(n) => Some(config::validate_nodes(n)?),
        None => None,
    };
    match &cli.command {
        Command::Construct => commands::construct(require_input(cli)?, require_output(cli)?),
        Command::Verify { path, isomonodromy } => commands::verify(
            require_input(cli)?,
            path.as_deref(),
            cli.output.as_deref(),
            &tol,
            &commands::VerifyOptions {
                isomonodromy: *isomonodromy,
                rng_seed: cli.rng_seed,
            },
        ),
        Command::Rh => commands::rh(require_input(cli)?, require_output(cli)?, &tol),
        Command::Sweep => commands::sweep(
            require_input(cli)?,
            require_output(cli)?,
            &tol,
            &commands::SweepOptions { parallel: cli.parallel, nodes_override },
        ),
        Command::Report => commands::report(require_input(cli)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code())
        }
    }
}
