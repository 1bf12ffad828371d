use num_complex::Complex64;

use crate::ensemble::EnsembleTimeSeries;
use crate::error::{Error, Result};
use crate::protocols::{EchoMap, Protocol};

/// Length of the echo search window after t_C, μs.
pub const ECHO_WINDOW: f64 = 2.0;
/// Peak |Im| below this is reported as no echo.
pub const NULL_ECHO_THRESHOLD: f64 = 1e-6;

/// The strongest echo sample found in the search window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EchoPeak {
    pub time: f64,
    /// Ensemble-mean echo coherence at `time`.
    pub coherence: Complex64,
}

/// Echo metrics of one ensemble run.
#[derive(Debug, Clone, PartialEq)]
pub struct EchoReport {
    pub protocol: String,
    pub map: EchoMap,
    /// End of the data excitation (t_A⁺).
    pub data_time: f64,
    /// Ensemble-mean data coherence at `data_time`.
    pub data_coherence: Complex64,
    /// `None` when no echo rises above [`NULL_ECHO_THRESHOLD`].
    pub echo: Option<EchoPeak>,
    /// Im(echo) / Im(data).
    pub inversion_ratio: Option<f64>,
    pub excited_pop_at_data: f64,
    /// Excited-state population at the t_e probe.
    pub excited_pop_at_echo: f64,
    /// Population of the echo transition's ground level at t_e.
    pub ground_pop_at_echo: f64,
    pub population_inverted: bool,
    /// Im(echo) has the opposite sign of Im(data).
    pub emissive: Option<bool>,
}

impl EchoReport {
    pub fn echo_time(&self) -> Option<f64> {
        self.echo.map(|e| e.time)
    }

    pub fn echo_coherence(&self) -> Option<Complex64> {
        self.echo.map(|e| e.coherence)
    }

    /// |Im echo| / |data|.
    pub fn retrieval_ratio(&self) -> Option<f64> {
        self.echo.map(|e| e.coherence.im.abs() / self.data_coherence.norm())
    }
}

/// Reads the data coherence at t_A⁺ and the largest |Im| of the echo
/// coherence in `[t_C, t_C + 2 μs]`, then classifies the echo.
pub fn extract_echo_metrics(run: &EnsembleTimeSeries, protocol: &Protocol) -> Result<EchoReport> {
    let obs = protocol.observables;
    let n = protocol.scheme.n_levels();
    if run.mean_rho.first().map(|r| r.dim()) != Some(n) {
        return Err(Error::Precondition(format!(
            "run does not match the {n}-level protocol `{}`",
            protocol.label
        )));
    }
    let t_c = protocol.probes.t_c;
    let last = *run.times.last().expect("non-empty run");
    if last < t_c {
        return Err(Error::Precondition(format!("run ends at {last} μs, before t_C = {t_c} μs")));
    }

    let data_time = protocol.data_time();
    let data = run.at(data_time);
    let data_coherence = data.get(obs.data.lower, obs.data.upper);

    let tol = 1e-9;
    let echo = run
        .times
        .iter()
        .zip(&run.mean_rho)
        .filter(|(t, _)| **t >= t_c - tol && **t <= t_c + ECHO_WINDOW + tol)
        .map(|(t, rho)| (*t, rho.get(obs.echo.lower, obs.echo.upper)))
        .max_by(|a, b| a.1.im.abs().total_cmp(&b.1.im.abs()))
        .filter(|(_, z)| z.im.abs() >= NULL_ECHO_THRESHOLD)
        .map(|(time, coherence)| EchoPeak { time, coherence });

    let at_echo = run.at(protocol.probes.t_e);
    let excited_pop_at_echo = at_echo.population(obs.excited);
    let ground_pop_at_echo = at_echo.population(obs.echo_ground);

    let inversion_ratio = echo.map(|e| e.coherence.im / data_coherence.im);
    let emissive = echo.map(|e| e.coherence.im.signum() == -data_coherence.im.signum());

    Ok(EchoReport {
        protocol: protocol.label.clone(),
        map: protocol.map,
        data_time,
        data_coherence,
        echo,
        inversion_ratio,
        excited_pop_at_data: data.population(obs.excited),
        excited_pop_at_echo,
        ground_pop_at_echo,
        population_inverted: excited_pop_at_echo > ground_pop_at_echo,
        emissive,
    })
}
