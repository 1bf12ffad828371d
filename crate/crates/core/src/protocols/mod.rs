//! Pulse-sequence protocols.
//!
//! [`Protocol`] bundles a level scheme, a time-ordered list of rectangular
//! pulses, relaxation rates, named probe times and the observables graded by
//! [`crate::analysis`]. The named constructors in [`library`] build the
//! controlled-echo family.

mod library;

pub use library::{
    controlled_echo_protocol, generalized_rabi, pulse_area, resonant_raman_protocol, two_level_echo_protocol,
    two_level_double_echo_protocol, wavelength_convert_protocol, CONTROL_RABI, DATA_RABI, OPTICAL_PULSE,
    RAMAN_PULSE, RAMAN_RABI,
};

use std::fmt;
use std::str::FromStr;

use crate::dynamics::{DecayConfig, DensityMatrix, LevelScheme, Pulse, PulseRole, Transition};
use crate::error::{Error, Result};

/// Which leg of the lambda the read-out control pulse addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AccessMode {
    /// Control on the data transition; compensates the Raman population swap.
    CounterIntuitive,
    /// Control on the other leg, identical to the transfer pulse.
    Conventional,
}

impl AccessMode {
    pub const ALL: [AccessMode; 2] = [AccessMode::CounterIntuitive, AccessMode::Conventional];

    pub fn as_str(self) -> &'static str {
        match self {
            AccessMode::CounterIntuitive => "counter_intuitive",
            AccessMode::Conventional => "conventional",
        }
    }
}

impl fmt::Display for AccessMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AccessMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "counter_intuitive" | "counterintuitive" | "ci" => Ok(AccessMode::CounterIntuitive),
            "conventional" | "conv" => Ok(AccessMode::Conventional),
            other => Err(Error::config(format!("unknown access mode `{other}`"))),
        }
    }
}

/// Closed-form map relating the echo coherence to the data coherence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EchoMap {
    /// Echo = −data (counter-intuitive control access).
    CoherenceInversion,
    /// Echo = conj(data) (conventional access after Raman rephasing).
    Conjugation,
    /// Two-level π rephasing, echo = conj(data).
    PhotonEcho,
    /// Two π rephasings, echo = data.
    DoubleRephasing,
}

impl EchoMap {
    pub fn as_str(self) -> &'static str {
        match self {
            EchoMap::CoherenceInversion => "coherence_inversion",
            EchoMap::Conjugation => "conjugation",
            EchoMap::PhotonEcho => "photon_echo",
            EchoMap::DoubleRephasing => "double_rephasing",
        }
    }
}

/// Named probe times, μs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probes {
    /// Data pulse.
    pub t_a: f64,
    /// First control (transfer) pulse.
    pub t_b: f64,
    /// Rephasing pulse.
    pub t_r: f64,
    /// Read-out control pulse / expected rephasing.
    pub t_c: f64,
    /// Echo emission.
    pub t_e: f64,
}

impl Probes {
    pub fn validate(&self) -> Result<()> {
        let ordered = self.t_a <= self.t_b && self.t_b < self.t_r && self.t_r < self.t_c && self.t_c <= self.t_e;
        if !ordered {
            return Err(Error::config(format!(
                "probe times must satisfy t_A ≤ t_B < t_R < t_C ≤ t_e, got {:?}",
                self
            )));
        }
        Ok(())
    }

    /// `t_C − t_R = t_R − t_B` within `tol`.
    pub fn is_raman_symmetric(&self, tol: f64) -> bool {
        ((self.t_c - self.t_r) - (self.t_r - self.t_b)).abs() <= tol
    }
}

/// Which density-matrix elements carry the data and the echo.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Observables {
    pub data: Transition,
    pub echo: Transition,
    /// Excited level populated at the echo.
    pub excited: usize,
    /// Ground level of the echo transition.
    pub echo_ground: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Protocol {
    pub label: String,
    pub scheme: LevelScheme,
    pulses: Vec<Pulse>,
    pub decay: DecayConfig,
    pub probes: Probes,
    /// End of the simulated timeline, μs.
    pub t_end: f64,
    pub access: Option<AccessMode>,
    pub map: EchoMap,
    pub observables: Observables,
    initial: Option<DensityMatrix>,
}

impl Protocol {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        label: impl Into<String>,
        scheme: LevelScheme,
        mut pulses: Vec<Pulse>,
        decay: DecayConfig,
        probes: Probes,
        t_end: f64,
        access: Option<AccessMode>,
        map: EchoMap,
        observables: Observables,
    ) -> Result<Self> {
        pulses.sort_by(|a, b| a.t_start.total_cmp(&b.t_start));
        let protocol = Self {
            label: label.into(),
            scheme,
            pulses,
            decay,
            probes,
            t_end,
            access,
            map,
            observables,
            initial: None,
        };
        protocol.validate()?;
        Ok(protocol)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.scheme.n_levels();
        self.decay.validate(n)?;
        self.probes.validate()?;
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(Error::config(format!("timeline end must be positive, got {}", self.t_end)));
        }
        for (i, p) in self.pulses.iter().enumerate() {
            p.validate()?;
            if !self.scheme.has_transition(p.transition) {
                return Err(Error::config(format!(
                    "pulse `{}` drives {} which is not in the {n}-level scheme",
                    p.label, p.transition
                )));
            }
            if p.t_end() > self.t_end + 1e-9 {
                return Err(Error::config(format!(
                    "pulse `{}` ends at {} μs, after the timeline end {} μs",
                    p.label,
                    p.t_end(),
                    self.t_end
                )));
            }
            for q in &self.pulses[i + 1..] {
                let overlap = q.t_start < p.t_end() - 1e-9 && p.t_start < q.t_end() - 1e-9;
                if q.transition == p.transition && overlap {
                    return Err(Error::config(format!(
                        "pulses `{}` and `{}` overlap on transition {}",
                        p.label, q.label, p.transition
                    )));
                }
            }
        }
        let obs = &self.observables;
        for t in [obs.data, obs.echo] {
            if t.lower == 0 || t.lower >= t.upper || t.upper > n {
                return Err(Error::config(format!("observable ρ{}{} outside the scheme", t.lower, t.upper)));
            }
        }
        if obs.excited == 0 || obs.excited > n || obs.echo_ground == 0 || obs.echo_ground > n {
            return Err(Error::config("observable levels outside the scheme"));
        }
        if let Some(rho) = &self.initial {
            if rho.dim() != n {
                return Err(Error::config(format!("initial state is {}x{}, scheme has {n} levels", rho.dim(), rho.dim())));
            }
        }
        Ok(())
    }

    /// Pulses sorted by leading edge.
    pub fn pulses(&self) -> &[Pulse] {
        &self.pulses
    }

    pub fn pulses_with_role(&self, role: PulseRole) -> impl Iterator<Item = &Pulse> {
        self.pulses.iter().filter(move |p| p.role == role)
    }

    pub fn pulse(&self, label: &str) -> Option<&Pulse> {
        self.pulses.iter().find(|p| p.label == label)
    }

    /// End of the data excitation, the `t_A⁺` probe.
    pub fn data_time(&self) -> f64 {
        self.pulses_with_role(PulseRole::Data)
            .map(Pulse::t_end)
            .fold(self.probes.t_a, f64::max)
    }

    /// Initial state; |1⟩ unless overridden.
    pub fn initial_state(&self) -> DensityMatrix {
        self.initial
            .clone()
            .unwrap_or_else(|| DensityMatrix::ground(self.scheme.n_levels()))
    }

    pub fn with_initial_state(mut self, rho: DensityMatrix) -> Result<Self> {
        self.initial = Some(rho);
        self.validate()?;
        Ok(self)
    }

    pub fn with_decay(mut self, decay: DecayConfig) -> Result<Self> {
        self.decay = decay;
        self.validate()?;
        Ok(self)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Copy with every pulse of `role` removed.
    pub fn without_role(&self, role: PulseRole) -> Self {
        let mut p = self.clone();
        p.pulses.retain(|q| q.role != role);
        p
    }

    /// Moves the read-out pulses so that they start at `t_c`; `t_e` and the
    /// timeline end follow. Used to reproduce literal caption timings, which
    /// may break the Raman symmetry `t_C − t_R = t_R − t_B`.
    pub fn with_readout_time(mut self, t_c: f64) -> Result<Self> {
        let shift = t_c - self.probes.t_c;
        for p in self.pulses.iter_mut().filter(|p| p.role == PulseRole::Readout) {
            p.t_start += shift;
        }
        self.pulses.sort_by(|a, b| a.t_start.total_cmp(&b.t_start));
        self.probes.t_c += shift;
        self.probes.t_e += shift;
        self.t_end += shift;
        self.validate()?;
        Ok(self)
    }

    /// Copy with a different timeline end.
    pub fn with_t_end(mut self, t_end: f64) -> Result<Self> {
        self.t_end = t_end;
        self.validate()?;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn access_mode_parses() {
        assert_eq!("counter-intuitive".parse::<AccessMode>().unwrap(), AccessMode::CounterIntuitive);
        assert_eq!("conventional".parse::<AccessMode>().unwrap(), AccessMode::Conventional);
        assert!("sideways".parse::<AccessMode>().is_err());
    }

    #[test]
    fn probes_must_be_ordered() {
        let p = Probes {
            t_a: 1.0,
            t_b: 1.1,
            t_r: 10.0,
            t_c: 18.9,
            t_e: 19.0,
        };
        assert!(p.validate().is_ok());
        assert!(p.is_raman_symmetric(1e-9));
        assert!(Probes { t_r: 20.0, ..p }.validate().is_err());
    }

    #[test]
    fn rejects_pulse_past_timeline() {
        let proto = controlled_echo_protocol(AccessMode::CounterIntuitive);
        assert!(proto.clone().with_t_end(18.95).is_err());
        assert!(proto.with_t_end(30.0).is_ok());
    }

    #[test]
    fn rejects_overlap_on_one_transition() {
        let proto = controlled_echo_protocol(AccessMode::CounterIntuitive);
        let mut pulses = proto.pulses().to_vec();
        let mut extra = pulses[0].clone();
        extra.t_start += 0.05;
        extra.label = "A2".into();
        pulses.push(extra);
        let err = Protocol::new(
            "bad",
            proto.scheme.clone(),
            pulses,
            proto.decay.clone(),
            proto.probes,
            proto.t_end,
            proto.access,
            proto.map,
            proto.observables,
        );
        assert!(matches!(err, Err(Error::Config(_))));
    }

    #[test]
    fn caption_override_moves_readout() {
        let proto = controlled_echo_protocol(AccessMode::CounterIntuitive)
            .with_readout_time(19.0)
            .unwrap();
        assert!((proto.probes.t_c - 19.0).abs() < 1e-12);
        assert!((proto.pulse("C").unwrap().t_start - 19.0).abs() < 1e-12);
        assert!(!proto.probes.is_raman_symmetric(0.01));
    }
}
