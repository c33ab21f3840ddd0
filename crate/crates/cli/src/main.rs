//! `geobeam`: run beam and rigid-body scenarios and summarize their
//! conservation diagnostics.

mod config;
mod error;
mod report;
mod run;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "geobeam", version, about = "Geometrically exact beam and rigid-body simulations on SE(3)")]
struct Cli {
    /// Directory for output files (overrides the scenario's `output.dir`).
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    /// Suppress progress messages.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a scenario file and write its time series.
    Run { config: PathBuf },
    /// Recompute diagnostics for a finished run and write diagnostics.json.
    Report { dir: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { config } => run::run(config, cli.output_dir.as_deref(), cli.quiet).map(|_| ()),
        Command::Report { dir } => report::report(dir, cli.output_dir.as_deref(), cli.quiet).map(|_| ()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
