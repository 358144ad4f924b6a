use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use stardeform::cli::{check_suite, run_file, CliError, Report, RunOptions, Suite};

#[derive(Parser)]
#[command(name = "stardeform", version, about = "Exact verification of deformed projective modules over star products")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the tasks of a scenario file.
    Run {
        file: PathBuf,
        /// Truncation order, overriding the scenario.
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write the JSON report here instead of standard output.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Record wall-clock time per task (makes reports non-reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Run a built-in property suite.
    Check {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        timing: bool,
    },
}

fn emit(report: &Report, path: Option<PathBuf>) -> Result<(), CliError> {
    match path {
        Some(p) => {
            std::fs::write(&p, report.to_json()).map_err(|e| CliError::Io { path: p.display().to_string(), message: e.to_string() })?;
            print!("{}", report.summary());
        }
        None => print!("{}", report.to_json()),
    }
    Ok(())
}

fn execute(args: Args) -> Result<i32, CliError> {
    let (report, path) = match args.command {
        Command::Run { file, order, seed, report, timing } => {
            let opts = RunOptions { order, seed, max_order: None, timing }.with_env_cap()?;
            (run_file(&file, &opts)?, report)
        }
        Command::Check { suite, seed, report, timing } => {
            let opts = RunOptions { order: None, seed, max_order: None, timing }.with_env_cap()?;
            (check_suite(suite, &opts)?, report)
        }
    };
    emit(&report, path)?;
    Ok(report.exit_code())
}

fn main() -> ExitCode {
    match execute(Args::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
