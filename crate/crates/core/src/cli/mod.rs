//! Command-line front end: config parsing, output writers and the
//! acceptance suites behind `verify`.

pub mod config;
pub mod output;
pub mod verify;

pub use config::{Observable, RunConfig};
pub use output::{render_csv, render_report, write_outputs, WrittenFiles};

use crate::analysis::{extract_echo_metrics, EchoReport};
use crate::ensemble::{simulate_ensemble, EnsembleTimeSeries};
use crate::error::Result;

/// Result of [`run`].
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub series: EnsembleTimeSeries,
    pub report: EchoReport,
    pub files: WrittenFiles,
}

/// Simulates the configured ensemble, then writes the CSV and the report.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    let series = simulate_ensemble(&config.protocol, &config.ensemble, config.sample_dt)?;
    let report = extract_echo_metrics(&series, &config.protocol)?;
    let files = write_outputs(
        &config.output_path,
        &config.name,
        &render_csv(&series, &config.outputs),
        &render_report(&report, config),
    )?;
    Ok(RunOutcome { series, report, files })
}
