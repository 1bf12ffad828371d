//! Scalar figures of merit: coherence loss, retrieval efficiency and
//! four-wave-mixing phase matching.

use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Coherence loss factor `e^{−η}`, `η = ΔT·(2π·Δ_inh + 1/T₂)`, for a delay
/// `delay` (μs) between data and transfer pulses, optical inhomogeneous width
/// `inhomogeneous_width` (cyclic MHz) and optical `t2` (μs, may be infinite).
pub fn loss_factor(delay: f64, inhomogeneous_width: f64, t2: f64) -> Result<f64> {
    if delay < 0.0 || inhomogeneous_width < 0.0 || !(t2 > 0.0) {
        return Err(Error::Domain(format!(
            "loss factor needs ΔT ≥ 0, Δ ≥ 0, T₂ > 0; got {delay}, {inhomogeneous_width}, {t2}"
        )));
    }
    let eta = delay * (TAU * inhomogeneous_width + 1.0 / t2);
    Ok((-eta).exp())
}

/// Backward-echo retrieval efficiency `(1 − e^{−αl})²`.
pub fn retrieval_efficiency(optical_depth: f64) -> Result<f64> {
    if !(optical_depth >= 0.0) {
        return Err(Error::Domain(format!("optical depth must be non-negative, got {optical_depth}")));
    }
    Ok((-(-optical_depth).exp_m1()).powi(2))
}

/// A plane-wave field: angular frequency and wave vector, with c = 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldMode {
    pub omega: f64,
    pub k: [f64; 3],
}

impl FieldMode {
    /// Mode of frequency `omega` travelling along `direction` (|k| = ω).
    pub fn along(omega: f64, direction: [f64; 3]) -> Result<Self> {
        let norm = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::Domain("propagation direction must be non-zero".into()));
        }
        Ok(Self {
            omega,
            k: direction.map(|x| x * omega / norm),
        })
    }

    pub fn k_norm(&self) -> f64 {
        self.k.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseMatch {
    pub echo: FieldMode,
    /// `|k_e| − ω_e`: how far the generated wave vector is from the light
    /// cone.
    pub residual: f64,
}

/// Energy and momentum closure `ω_e = −ω_A + ω_B + ω_Cn`,
/// `k_e = −k_A + k_B + k_Cn`.
pub fn phase_matching(a: &FieldMode, b: &FieldMode, cn: &FieldMode) -> Result<PhaseMatch> {
    let omega = -a.omega + b.omega + cn.omega;
    if omega < 0.0 {
        return Err(Error::Domain(format!("unphysical configuration: echo frequency {omega} < 0")));
    }
    let k = [0, 1, 2].map(|i| -a.k[i] + b.k[i] + cn.k[i]);
    let echo = FieldMode { omega, k };
    Ok(PhaseMatch {
        residual: echo.k_norm() - omega,
        echo,
    })
}

/// Transition frequencies of a double-lambda level structure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelEnergies {
    /// Energies of |1⟩…|4⟩ in angular units.
    pub energies: [f64; 4],
}

impl LevelEnergies {
    /// Angular frequency of the transition between 1-based levels `a` and `b`.
    pub fn frequency(&self, a: usize, b: usize) -> f64 {
        (self.energies[b - 1] - self.energies[a - 1]).abs()
    }
}
