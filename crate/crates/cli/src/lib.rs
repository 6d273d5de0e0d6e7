//! Configuration-driven runner for frequency strokes, shortcut design, quantum
//! Otto cycles, parameter sweeps and counterdiabatic driving.

pub mod config;
pub mod output;
pub mod scenarios;
pub mod sweep;

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};

pub use config::{RunConfig, Scenario};
pub use output::{Format, Table, Value};
pub use scenarios::Outcome;

/// Runs `scenario` with its block from `config`, using `jobs` worker threads for
/// the parallel parts (sweep points, counterdiabatic measurement times).
pub fn run(scenario: Scenario, config: &RunConfig, jobs: usize) -> Result<Outcome> {
    if let Some(declared) = config.scenario {
        if declared != scenario {
            bail!(
                "config declares scenario `{}` but `{}` was requested",
                declared.name(),
                scenario.name()
            );
        }
    }
    let missing = || {
        anyhow!(
            "config has no `{}` block",
            scenario.name().replace('-', "_")
        )
    };
    let settings = config.solver.settings()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .context("cannot start worker threads")?;
    let outcome = pool.install(|| -> Result<Outcome> {
        Ok(match scenario {
            Scenario::Stroke => {
                scenarios::stroke(config.stroke.as_ref().ok_or_else(missing)?, &settings)?.into()
            }
            Scenario::StaDesign => {
                scenarios::sta_design(config.sta_design.as_ref().ok_or_else(missing)?, &settings)?
            }
            Scenario::Cycle => {
                scenarios::cycle(config.cycle.as_ref().ok_or_else(missing)?, &settings)?.into()
            }
            Scenario::Sweep => {
                sweep::sweep(config.sweep.as_ref().ok_or_else(missing)?, &settings)?.into()
            }
            Scenario::Cd => scenarios::cd(config.cd.as_ref().ok_or_else(missing)?)?.into(),
        })
    });
    outcome.with_context(|| format!("{} scenario", scenario.name()))
}

/// Loads the config, runs the scenario and writes the table to `out` (or the
/// config's output path, or stdout). Diagnostics go to stderr.
pub fn execute(
    scenario: Scenario,
    config_path: &Path,
    out: Option<&Path>,
    jobs: usize,
) -> Result<()> {
    let config = RunConfig::load(config_path)?;
    let outcome = run(scenario, &config, jobs)?;
    let path = out.or(config.output.path.as_deref());
    let format = config
        .output
        .format
        .or_else(|| path.map(Format::from_path))
        .unwrap_or(Format::Csv);
    let bytes = output::render(&outcome.table, format)?;
    match path {
        Some(p) => output::write_atomic(p, &bytes)?,
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(&bytes)
                .context("writing to stdout")?;
        }
    }
    for line in &outcome.diagnostics {
        eprintln!("{line}");
    }
    match outcome.failure {
        Some(msg) => Err(anyhow!(msg)),
        None => Ok(()),
    }
}
