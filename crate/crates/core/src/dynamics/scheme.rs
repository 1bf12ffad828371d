//! Level schemes, pulses and decay configuration.
//!
//! Levels are labelled from 1 as in the usual |1⟩, |2⟩, … notation. The
//! two ground states of a lambda system are |1⟩ and |2⟩; excited states are
//! |3⟩ (three-level) or |3⟩ and |4⟩ (four-level). The two-level scheme has a
//! single ground |1⟩ and excited |2⟩.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A dipole-allowed transition `lower → upper`, using 1-based level labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Transition {
    pub lower: usize,
    pub upper: usize,
}

impl Transition {
    pub const fn new(lower: usize, upper: usize) -> Self {
        Self { lower, upper }
    }

    /// Zero-based `(row, column)` of the coupling in an N×N matrix.
    pub(crate) fn indices(self) -> (usize, usize) {
        (self.lower - 1, self.upper - 1)
    }
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.lower, self.upper)
    }
}

impl std::str::FromStr for Transition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .trim()
            .split_once('-')
            .ok_or_else(|| Error::config(format!("transition `{s}` is not of the form `l-u`")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<usize>()
                .map_err(|_| Error::config(format!("bad level label `{v}` in transition `{s}`")))
        };
        Ok(Transition::new(parse(a)?, parse(b)?))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelScheme {
    n_levels: usize,
    transitions: Vec<Transition>,
    /// Per-level rotating-frame energy offset, cyclic MHz.
    level_shifts: Vec<f64>,
}

impl LevelScheme {
    pub fn new(n_levels: usize, transitions: Vec<Transition>, level_shifts: Vec<f64>) -> Result<Self> {
        if !(2..=4).contains(&n_levels) {
            return Err(Error::config(format!("n_levels must be 2, 3 or 4, got {n_levels}")));
        }
        if level_shifts.len() != n_levels {
            return Err(Error::config(format!(
                "level_shifts has {} entries for {n_levels} levels",
                level_shifts.len()
            )));
        }
        let scheme = Self {
            n_levels,
            transitions,
            level_shifts,
        };
        for &t in &scheme.transitions {
            if t.lower == 0 || t.lower >= t.upper || t.upper > n_levels {
                return Err(Error::config(format!("transition {t} is not an ordered pair of levels 1..={n_levels}")));
            }
            if !scheme.is_excited(t.upper) || scheme.is_excited(t.lower) {
                return Err(Error::config(format!("transition {t} must connect a ground level to an excited level")));
            }
        }
        Ok(scheme)
    }

    /// Two-level |1⟩–|2⟩ system.
    pub fn two_level() -> Self {
        Self::new(2, vec![Transition::new(1, 2)], vec![0.0; 2]).expect("static scheme")
    }

    /// Lambda system: ground |1⟩, |2⟩ sharing the excited state |3⟩.
    pub fn lambda() -> Self {
        Self::new(3, vec![Transition::new(1, 3), Transition::new(2, 3)], vec![0.0; 3]).expect("static scheme")
    }

    /// Double-lambda system: ground |1⟩, |2⟩ coupled to both |3⟩ and |4⟩.
    pub fn double_lambda() -> Self {
        Self::new(
            4,
            vec![
                Transition::new(1, 3),
                Transition::new(2, 3),
                Transition::new(1, 4),
                Transition::new(2, 4),
            ],
            vec![0.0; 4],
        )
        .expect("static scheme")
    }

    pub fn n_levels(&self) -> usize {
        self.n_levels
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn level_shifts(&self) -> &[f64] {
        &self.level_shifts
    }

    pub fn has_transition(&self, t: Transition) -> bool {
        self.transitions.contains(&t)
    }

    pub fn is_excited(&self, level: usize) -> bool {
        match self.n_levels {
            2 => level == 2,
            _ => level >= 3 && level <= self.n_levels,
        }
    }

    /// The level whose energy carries the spin-group detuning. For lambda
    /// schemes this is the lower spin level |2⟩; in the two-level scheme the
    /// same grid models optical inhomogeneity on |2⟩.
    pub fn shifted_level(&self) -> usize {
        2
    }
}

/// What a pulse does in a protocol; used to select or drop pulses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseRole {
    Data,
    Transfer,
    Rephase,
    Readout,
    Other,
}

/// One rectangular drive.
#[derive(Debug, Clone, PartialEq)]
pub struct Pulse {
    pub label: String,
    pub role: PulseRole,
    pub transition: Transition,
    /// Rabi frequency Ω, cyclic MHz.
    pub rabi: f64,
    /// Field phase, radians.
    pub phase: f64,
    /// Leading edge, μs.
    pub t_start: f64,
    /// μs.
    pub duration: f64,
    /// Field detuning, cyclic MHz. Shifts the upper level in the rotating frame.
    pub detuning: f64,
}

impl Pulse {
    pub fn new(label: impl Into<String>, role: PulseRole, transition: Transition, rabi: f64, t_start: f64, duration: f64) -> Self {
        Self {
            label: label.into(),
            role,
            transition,
            rabi,
            phase: 0.0,
            t_start,
            duration,
            detuning: 0.0,
        }
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    pub fn with_detuning(mut self, detuning: f64) -> Self {
        self.detuning = detuning;
        self
    }

    pub fn t_end(&self) -> f64 {
        self.t_start + self.duration
    }

    /// Rotation angle 2π·Ω·τ of the rectangular envelope, radians.
    pub fn area(&self) -> f64 {
        TAU * self.rabi * self.duration
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0) || !self.duration.is_finite() {
            return Err(Error::config(format!("pulse `{}` has non-positive duration {}", self.label, self.duration)));
        }
        if !(self.rabi >= 0.0) || !self.rabi.is_finite() {
            return Err(Error::config(format!("pulse `{}` has negative Rabi frequency {}", self.label, self.rabi)));
        }
        if !self.t_start.is_finite() || self.t_start < 0.0 {
            return Err(Error::config(format!("pulse `{}` starts at {}", self.label, self.t_start)));
        }
        Ok(())
    }

    /// True if `t` lies in `[t_start, t_end)`.
    pub fn is_active_at(&self, t: f64) -> bool {
        t >= self.t_start && t < self.t_end()
    }
}

/// Relaxation rates, all cyclic kHz.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DecayConfig {
    /// Off-diagonal damping γ_ij keyed by `(i, j)` with `i < j`.
    dephasing: BTreeMap<(usize, usize), f64>,
    /// Population decay Γ keyed by `(upper, lower)`.
    population_decay: BTreeMap<(usize, usize), f64>,
}

impl DecayConfig {
    pub fn none() -> Self {
        Self::default()
    }

    /// Sets γ_ij (= γ_ji).
    pub fn with_dephasing(mut self, i: usize, j: usize, rate_khz: f64) -> Self {
        self.set_dephasing(i, j, rate_khz);
        self
    }

    pub fn set_dephasing(&mut self, i: usize, j: usize, rate_khz: f64) {
        let key = if i < j { (i, j) } else { (j, i) };
        self.dephasing.insert(key, rate_khz);
    }

    /// Sets Γ for the channel `upper → lower`.
    pub fn with_population_decay(mut self, upper: usize, lower: usize, rate_khz: f64) -> Self {
        self.population_decay.insert((upper, lower), rate_khz);
        self
    }

    /// γ_ij, zero when unset.
    pub fn dephasing(&self, i: usize, j: usize) -> f64 {
        let key = if i < j { (i, j) } else { (j, i) };
        self.dephasing.get(&key).copied().unwrap_or(0.0)
    }

    pub fn dephasing_rates(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.dephasing.iter().map(|(&k, &v)| (k, v))
    }

    pub fn population_decays(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.population_decay.iter().map(|(&k, &v)| (k, v))
    }

    pub fn is_zero(&self) -> bool {
        self.dephasing.values().chain(self.population_decay.values()).all(|&r| r == 0.0)
    }

    /// Optical T₂ = 1/(2πγ) in μs for the given coherence; infinite when γ = 0.
    pub fn t2(&self, i: usize, j: usize) -> f64 {
        let g = self.dephasing(i, j);
        if g == 0.0 {
            f64::INFINITY
        } else {
            1.0 / crate::units::angular_khz(g)
        }
    }

    pub fn validate(&self, n_levels: usize) -> Result<()> {
        for (&(i, j), &g) in &self.dephasing {
            if i == 0 || j > n_levels || i == j {
                return Err(Error::config(format!("dephasing pair ({i},{j}) outside {n_levels}-level scheme")));
            }
            if !(g >= 0.0) {
                return Err(Error::config(format!("negative dephasing rate γ{i}{j} = {g}")));
            }
        }
        for (&(u, l), &g) in &self.population_decay {
            if u == 0 || l == 0 || u > n_levels || l > n_levels || u == l {
                return Err(Error::config(format!("decay channel {u}→{l} outside {n_levels}-level scheme")));
            }
            if !(g >= 0.0) {
                return Err(Error::config(format!("negative decay rate Γ{u}{l} = {g}")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn scheme_rejects_bad_transitions() {
        assert!(LevelScheme::new(5, vec![], vec![0.0; 5]).is_err());
        assert!(LevelScheme::new(3, vec![], vec![0.0; 2]).is_err());
        assert!(LevelScheme::new(3, vec![Transition::new(1, 2)], vec![0.0; 3]).is_err());
        assert!(LevelScheme::new(3, vec![Transition::new(3, 1)], vec![0.0; 3]).is_err());
        assert!(LevelScheme::new(4, vec![Transition::new(3, 4)], vec![0.0; 4]).is_err());
        assert!(LevelScheme::new(2, vec![Transition::new(1, 2)], vec![0.0; 2]).is_ok());
    }

    #[test]
    fn pulse_area_is_two_pi_rabi_duration() {
        let p = Pulse::new("B", PulseRole::Transfer, Transition::new(2, 3), 5.0, 1.1, 0.1);
        assert!((p.area() - PI).abs() < 1e-12);
        let a = Pulse::new("A", PulseRole::Data, Transition::new(1, 3), 0.5, 1.0, 0.1);
        assert!((a.area() - PI / 10.0).abs() < 1e-12);
    }

    #[test]
    fn pulse_validation() {
        let mut p = Pulse::new("x", PulseRole::Other, Transition::new(1, 3), 1.0, 0.0, 0.0);
        assert!(p.validate().is_err());
        p.duration = 0.1;
        p.rabi = -1.0;
        assert!(p.validate().is_err());
    }

    #[test]
    fn transition_parses() {
        let t: Transition = " 2-4".parse().unwrap();
        assert_eq!(t, Transition::new(2, 4));
        assert!("24".parse::<Transition>().is_err());
    }

    #[test]
    fn dephasing_is_symmetric() {
        let d = DecayConfig::none().with_dephasing(3, 1, 50.0);
        assert_eq!(d.dephasing(1, 3), 50.0);
        assert_eq!(d.dephasing(3, 1), 50.0);
        assert!(d.t2(1, 2).is_infinite());
        assert!(d.validate(3).is_ok());
        assert!(DecayConfig::none().with_dephasing(1, 2, -1.0).validate(3).is_err());
    }
}
