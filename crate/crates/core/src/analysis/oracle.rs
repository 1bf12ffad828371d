//! Closed-form phase evolution of one spin group through the controlled echo.
//!
//! Pulses are treated as instantaneous maps: the transfer pulse turns ρ₁₃
//! into ρ₁₂ = −i·ρ₁₃, the spin coherence then precesses as `e^{−i2πδt}`
//! (the sign follows the simulator's Hamiltonian, where δ lowers the energy
//! of |2⟩), the Raman pulse conjugates it, and the read-out pulse turns it
//! into the echo coherence: ρ₁₃ = −i·ρ₁₂ (conventional) or ρ₂₃ = −i·ρ₂₁
//! (counter-intuitive).

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::dynamics::PulseRole;
use crate::error::{Error, Result};
use crate::protocols::{AccessMode, Probes, Protocol};
use crate::units::khz_to_mhz;

/// Effective event times of the instantaneous-pulse model, μs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseOracle {
    /// Spin coherence appears and starts to precess.
    pub transfer_time: f64,
    /// Raman conjugation.
    pub rephase_time: f64,
    /// Read-out map applied to ρ₁₂ evaluated here.
    pub readout_time: f64,
    /// Optical echo coherence exists from here on.
    pub emission_time: f64,
    pub access: AccessMode,
    /// Optical T₂ of the echo transition, μs.
    pub t2: f64,
}

impl PhaseOracle {
    /// Ideal model with pulses at the nominal probe times; rephasing is
    /// exact at `2t_R − t_B`.
    pub fn from_probes(probes: &Probes, access: AccessMode, t2: f64) -> Self {
        Self {
            transfer_time: probes.t_b,
            rephase_time: probes.t_r,
            readout_time: probes.t_c,
            emission_time: probes.t_e,
            access,
            t2,
        }
    }

    /// Model matched to a finite-pulse protocol: each map acts at the centre
    /// of its pulse, the echo coherence evolves from the centre of the
    /// read-out pulse, and T₂ comes from the echo transition's dephasing.
    pub fn from_protocol(protocol: &Protocol) -> Result<Self> {
        let access = protocol
            .access
            .ok_or_else(|| Error::Precondition(format!("protocol `{}` has no control access mode", protocol.label)))?;
        let center = |roles: &[PulseRole]| -> Result<f64> {
            protocol
                .pulses()
                .iter()
                .filter(|p| roles.contains(&p.role))
                .map(|p| p.t_start + 0.5 * p.duration)
                .fold(None, |acc: Option<f64>, c| Some(acc.map_or(c, |a| a.max(c))))
                .ok_or_else(|| Error::Precondition(format!("protocol `{}` lacks a {roles:?} pulse", protocol.label)))
        };
        // resonant Raman data transfers inside the data pulse itself
        let transfer_time = match center(&[PulseRole::Transfer]) {
            Ok(t) => t,
            Err(_) => center(&[PulseRole::Data])?,
        };
        let readout = center(&[PulseRole::Readout])?;
        let echo = protocol.observables.echo;
        Ok(Self {
            transfer_time,
            rephase_time: center(&[PulseRole::Rephase])?,
            readout_time: readout,
            emission_time: readout,
            access,
            t2: protocol.decay.t2(echo.lower, echo.upper),
        })
    }

    /// Time at which the rephased spin coherence regains its initial phase.
    pub fn rephasing_time(&self) -> f64 {
        2.0 * self.rephase_time - self.transfer_time
    }

    /// Spin coherence ρ₁₂ for `transfer_time ≤ t ≤ readout_time`, or the
    /// echo coherence (ρ₁₃ conventional, ρ₂₃ counter-intuitive) for
    /// `t ≥ emission_time`.
    pub fn evaluate(&self, rho13_at_ta: Complex64, detuning_khz: f64, t: f64) -> Result<Complex64> {
        let i = Complex64::i();
        let w = TAU * khz_to_mhz(detuning_khz);
        let precess = |dt: f64| Complex64::from_polar(1.0, -w * dt);

        if t < self.transfer_time {
            return Err(Error::Domain(format!(
                "t = {t} μs precedes the coherence transfer at {} μs",
                self.transfer_time
            )));
        }
        if t < self.rephase_time {
            return Ok(-i * rho13_at_ta * precess(t - self.transfer_time));
        }
        let spin = |t: f64| i * rho13_at_ta.conj() * precess(t - self.rephasing_time());
        if t <= self.readout_time {
            return Ok(spin(t));
        }
        if t < self.emission_time {
            return Err(Error::Domain(format!(
                "t = {t} μs falls inside the read-out pulse ({} – {} μs)",
                self.readout_time, self.emission_time
            )));
        }
        let rho12 = spin(self.readout_time);
        let elapsed = t - self.emission_time;
        let decay = if self.t2.is_finite() { (-elapsed / self.t2).exp() } else { 1.0 };
        Ok(match self.access {
            AccessMode::Conventional => -i * rho12 * decay,
            // ρ₂₃ precesses with |2⟩
            AccessMode::CounterIntuitive => -i * rho12.conj() * precess(elapsed).conj() * decay,
        })
    }
}

/// Closed-form coherence at `t` under ideal probe timing; see [`PhaseOracle`].
pub fn phase_evolution_oracle(
    rho13_at_ta: Complex64,
    detuning_khz: f64,
    t: f64,
    probes: &Probes,
    access: AccessMode,
    t2: f64,
) -> Result<Complex64> {
    PhaseOracle::from_probes(probes, access, t2).evaluate(rho13_at_ta, detuning_khz, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::controlled_echo_protocol;

    fn probes() -> Probes {
        controlled_echo_protocol(AccessMode::CounterIntuitive).probes
    }

    fn rho13() -> Complex64 {
        Complex64::new(0.0, -0.154_508_497_187_473_7)
    }

    #[test]
    fn rephased_at_readout_for_any_detuning() {
        let p = probes();
        for d in [-200.0, -37.0, 0.0, 4.0, 150.0] {
            let v = phase_evolution_oracle(rho13(), d, p.t_c, &p, AccessMode::CounterIntuitive, f64::INFINITY).unwrap();
            assert!((v - Complex64::i() * rho13().conj()).norm() < 1e-12, "δ = {d}");
        }
    }

    #[test]
    fn counter_intuitive_echo_inverts_data() {
        let p = probes();
        for d in [-120.0, 0.0, 60.0] {
            let v = phase_evolution_oracle(rho13(), d, p.t_e, &p, AccessMode::CounterIntuitive, f64::INFINITY).unwrap();
            assert!((v + rho13()).norm() < 1e-12);
        }
    }

    #[test]
    fn conventional_echo_conjugates_data() {
        let p = probes();
        let v = phase_evolution_oracle(rho13(), 80.0, p.t_e, &p, AccessMode::Conventional, f64::INFINITY).unwrap();
        assert!((v - rho13().conj()).norm() < 1e-12);
        let later = phase_evolution_oracle(rho13(), 80.0, p.t_e + 1.0, &p, AccessMode::Conventional, 2.0).unwrap();
        assert!((later - rho13().conj() * (-0.5f64).exp()).norm() < 1e-12);
    }

    #[test]
    fn zero_detuning_is_static_between_pulses() {
        let p = probes();
        for t in [1.2, 3.0, 9.9] {
            let v = phase_evolution_oracle(rho13(), 0.0, t, &p, AccessMode::CounterIntuitive, 1.0).unwrap();
            assert!((v + Complex64::i() * rho13()).norm() < 1e-15);
        }
    }

    #[test]
    fn domain_errors() {
        let p = probes();
        assert!(matches!(
            phase_evolution_oracle(rho13(), 0.0, 0.5, &p, AccessMode::Conventional, 1.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            phase_evolution_oracle(rho13(), 0.0, 18.95, &p, AccessMode::Conventional, 1.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn protocol_model_uses_pulse_centres() {
        let o = PhaseOracle::from_protocol(&controlled_echo_protocol(AccessMode::Conventional)).unwrap();
        assert!((o.transfer_time - 1.15).abs() < 1e-12);
        assert!((o.rephase_time - 10.005).abs() < 1e-12);
        assert!((o.rephasing_time() - 18.86).abs() < 1e-12);
        assert!((o.t2 - 1.0 / (TAU * 0.05)).abs() < 1e-12);
    }
}
