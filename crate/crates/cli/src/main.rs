use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use frictionless::{execute, Scenario};

#[derive(Parser)]
#[command(
    version,
    about = "Run stroke, shortcut-design, Otto-cycle, sweep and counterdiabatic scenarios"
)]
struct Cli {
    scenario: Scenario,
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output file; overrides the config's output path. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for parallel evaluation.
    #[arg(long, default_value_t = default_jobs(), value_parser = clap::value_parser!(u16).range(1..))]
    jobs: u16,
}

fn default_jobs() -> u16 {
    std::thread::available_parallelism().map_or(1, |n| n.get().min(u16::MAX as usize) as u16)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(
        cli.scenario,
        &cli.config,
        cli.out.as_deref(),
        cli.jobs as usize,
    ) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
