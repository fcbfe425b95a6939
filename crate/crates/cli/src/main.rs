//! `rdmgeo` command-line frontend.

mod commands;
mod config;
mod error;

use std::env;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use config::{RunArgs, RunConfig};
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "rdmgeo", version, about = "Exposed faces of reduced-state sets for collective spin models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lowest levels of one Hamiltonian as JSON
    Spectrum(RunArgs),
    /// Boundary, face and jump CSVs over a direction grid for each N
    Sweep(RunArgs),
    /// 2D projection, its hull and the large-N outline
    Project(RunArgs),
    /// Large-N body as OBJ and JSON with its flat and ruled regions
    Meanfield(RunArgs),
    /// Scan a coupling family over t and N and classify it
    Scaling(RunArgs),
    /// Classify a series CSV written by `scaling`
    Classify(RunArgs),
    /// Compare the pipeline with the full-space oracle and closed forms
    Verify(RunArgs),
    /// Dense CSV of an operator or Hamiltonian
    OpsDump(RunArgs),
}

impl Command {
    fn args(&self) -> &RunArgs {
        match self {
            Command::Spectrum(a)
            | Command::Sweep(a)
            | Command::Project(a)
            | Command::Meanfield(a)
            | Command::Scaling(a)
            | Command::Classify(a)
            | Command::Verify(a)
            | Command::OpsDump(a) => a,
        }
    }
}

fn thread_count(args: &RunArgs) -> Result<Option<usize>, CliError> {
    let count = match (args.threads, env::var("RDMGEO_THREADS")) {
        (Some(k), _) => k,
        (None, Ok(value)) if !value.trim().is_empty() => value
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("RDMGEO_THREADS must be a positive integer, got '{value}'")))?,
        _ => return Ok(None),
    };
    if count == 0 {
        return Err(CliError::Config("thread count must be at least 1".into()));
    }
    Ok(Some(count))
}

fn run(command: &Command) -> Result<(), CliError> {
    let args = command.args();
    if let Some(threads) = thread_count(args)? {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(format!("cannot size the worker pool: {e}")))?;
    }
    let config = RunConfig::resolve(args)?;
    match command {
        Command::Spectrum(_) => commands::spectrum(&config),
        Command::Sweep(_) => commands::sweep(&config),
        Command::Project(_) => commands::project(&config),
        Command::Meanfield(_) => commands::meanfield(&config),
        Command::Scaling(_) => commands::scaling(&config),
        Command::Classify(_) => commands::classify(&config),
        Command::Verify(_) => commands::verify(&config),
        Command::OpsDump(_) => commands::ops_dump(&config),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rdmgeo: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
