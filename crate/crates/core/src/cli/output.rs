//! CSV time series and key=value echo reports.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;

use super::config::{Observable, RunConfig};
use crate::analysis::EchoReport;
use crate::ensemble::EnsembleTimeSeries;
use crate::error::{Error, Result};

/// Twelve significant digits.
fn num(v: f64) -> String {
    format!("{v:.11e}")
}

/// Header row plus one row per sample.
pub fn render_csv(run: &EnsembleTimeSeries, outputs: &[Observable]) -> String {
    let mut out = String::from("time_us");
    for o in outputs {
        for c in o.columns() {
            out.push(',');
            out.push_str(&c);
        }
    }
    out.push('\n');
    for (t, rho) in run.times.iter().zip(&run.mean_rho) {
        out.push_str(&num(*t));
        for o in outputs {
            match *o {
                Observable::Coherence(a, b) => {
                    let z = rho.get(a, b);
                    let _ = write!(out, ",{},{}", num(z.re), num(z.im));
                }
                Observable::Population(a) => {
                    let _ = write!(out, ",{}", num(rho.population(a)));
                }
            }
        }
        out.push('\n');
    }
    out
}

/// Echo report and run parameters as `key=value` lines.
pub fn render_report(report: &EchoReport, config: &RunConfig) -> String {
    let opt = |v: Option<f64>| v.map_or_else(|| "none".to_string(), num);
    let flag = |v: Option<bool>| v.map_or_else(|| "none".to_string(), |b| b.to_string());
    let coh = |z: Option<Complex64>| (opt(z.map(|z| z.re)), opt(z.map(|z| z.im)));
    let p = &config.protocol;
    let (echo_re, echo_im) = coh(report.echo_coherence());
    let obs = p.observables;
    let lines = [
        ("protocol", report.protocol.clone()),
        ("access", p.access.map_or("none", |a| a.as_str()).to_string()),
        ("map", report.map.as_str().to_string()),
        ("groups", config.ensemble.n_groups.to_string()),
        ("spacing_khz", num(config.ensemble.spacing)),
        ("fwhm_khz", num(config.ensemble.fwhm)),
        ("sample_dt_us", num(config.sample_dt)),
        ("data_element", format!("rho{}{}", obs.data.lower, obs.data.upper)),
        ("echo_element", format!("rho{}{}", obs.echo.lower, obs.echo.upper)),
        ("data_time_us", num(report.data_time)),
        ("data_coherence_re", num(report.data_coherence.re)),
        ("data_coherence_im", num(report.data_coherence.im)),
        ("echo_time_us", opt(report.echo_time())),
        ("echo_coherence_re", echo_re),
        ("echo_coherence_im", echo_im),
        ("inversion_ratio", opt(report.inversion_ratio)),
        ("excited_pop_at_data", num(report.excited_pop_at_data)),
        ("excited_pop_at_echo", num(report.excited_pop_at_echo)),
        ("ground_pop_at_echo", num(report.ground_pop_at_echo)),
        ("inverted", report.population_inverted.to_string()),
        ("emissive", flag(report.emissive)),
    ];
    lines.iter().fold(String::new(), |mut s, (k, v)| {
        let _ = writeln!(s, "{k}={v}");
        s
    })
}

/// Paths written by [`write_outputs`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WrittenFiles {
    pub csv: PathBuf,
    pub report: PathBuf,
}

/// Writes `<dir>/<name>.csv` and `<dir>/<name>.report`.
pub fn write_outputs(dir: &Path, name: &str, csv: &str, report: &str) -> Result<WrittenFiles> {
    fs::create_dir_all(dir).map_err(|e| Error::config(format!("cannot create {}: {e}", dir.display())))?;
    let files = WrittenFiles {
        csv: dir.join(format!("{name}.csv")),
        report: dir.join(format!("{name}.report")),
    };
    for (path, body) in [(&files.csv, csv), (&files.report, report)] {
        fs::write(path, body).map_err(|e| Error::config(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(files)
}
