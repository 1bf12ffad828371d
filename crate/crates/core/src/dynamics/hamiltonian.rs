use nalgebra::DMatrix;
use num_complex::Complex64;

use super::scheme::{LevelScheme, Pulse};
use crate::error::{Error, Result};
use crate::units::angular_mhz;

/// Rotating-frame interaction Hamiltonian in angular MHz (ħ = 1).
///
/// The matrix follows the `−½ [...]` layout: a field of Rabi frequency Ω and
/// phase φ on `l → u` contributes `−½·2πΩ·e^{iφ}` at `(l, u)` and its
/// conjugate at `(u, l)`. A level shifted by `s` (cyclic MHz) in the rotating
/// frame carries `−2π·s` on the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    matrix: DMatrix<Complex64>,
}

impl Hamiltonian {
    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Entry for 1-based levels `(a, b)`.
    pub fn get(&self, a: usize, b: usize) -> Complex64 {
        self.matrix[(a - 1, b - 1)]
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (&self.matrix - self.matrix.adjoint()).iter().all(|z| z.norm() <= tol)
    }
}

/// Assembles H for one spectral group.
///
/// `group_shift` (cyclic MHz) is added to the energy of the lower spin level
/// |2⟩ only, so ρ₁₂ precesses at the group detuning while |1⟩–|3⟩ stays
/// resonant. Every drive listed in `active` must be on a transition of the
/// scheme, and no transition may carry two drives at once.
pub fn build_hamiltonian(scheme: &LevelScheme, active: &[&Pulse], group_shift: f64) -> Result<Hamiltonian> {
    let n = scheme.n_levels();
    let mut shifts = scheme.level_shifts().to_vec();
    shifts[scheme.shifted_level() - 1] += group_shift;

    let mut matrix = DMatrix::<Complex64>::zeros(n, n);
    for (i, p) in active.iter().enumerate() {
        if !scheme.has_transition(p.transition) {
            return Err(Error::config(format!(
                "pulse `{}` drives {} which is not a transition of the {n}-level scheme",
                p.label, p.transition
            )));
        }
        if active[..i].iter().any(|q| q.transition == p.transition) {
            return Err(Error::config(format!(
                "pulses overlap on transition {} (`{}`)",
                p.transition, p.label
            )));
        }
        let (l, u) = p.transition.indices();
        let coupling = Complex64::from_polar(-0.5 * angular_mhz(p.rabi), p.phase);
        matrix[(l, u)] += coupling;
        matrix[(u, l)] += coupling.conj();
        shifts[u] += p.detuning;
    }
    for (k, s) in shifts.iter().enumerate() {
        matrix[(k, k)] = Complex64::new(-angular_mhz(*s), 0.0);
    }
    Ok(Hamiltonian { matrix })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::scheme::{PulseRole, Transition};
    use std::f64::consts::PI;

    fn pulse(t: Transition, rabi: f64) -> Pulse {
        Pulse::new("p", PulseRole::Other, t, rabi, 0.0, 0.1)
    }

    #[test]
    fn single_resonant_pulse_couples_only_its_transition() {
        let p = pulse(Transition::new(1, 3), 5.0);
        let h = build_hamiltonian(&LevelScheme::lambda(), &[&p], 0.0).unwrap();
        for a in 1..=3 {
            for b in 1..=3 {
                let expected = if (a, b) == (1, 3) || (a, b) == (3, 1) { -PI * 5.0 } else { 0.0 };
                assert!((h.get(a, b) - Complex64::new(expected, 0.0)).norm() < 1e-12, "({a},{b})");
            }
        }
    }

    #[test]
    fn empty_drive_gives_zero_matrix() {
        let h = build_hamiltonian(&LevelScheme::double_lambda(), &[], 0.0).unwrap();
        assert!(h.matrix().iter().all(|z| *z == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn field_on_two_four_is_coupled() {
        let p = pulse(Transition::new(2, 4), 5.0);
        let h = build_hamiltonian(&LevelScheme::double_lambda(), &[&p], 0.0).unwrap();
        assert!((h.get(2, 4).re + PI * 5.0).abs() < 1e-12);
        assert!((h.get(4, 2).re + PI * 5.0).abs() < 1e-12);
    }

    #[test]
    fn undriven_matrix_is_minus_two_pi_shifts() {
        let scheme = LevelScheme::new(3, vec![Transition::new(1, 3)], vec![0.1, 0.2, -0.3]).unwrap();
        let h = build_hamiltonian(&scheme, &[], 0.05).unwrap();
        assert!((h.get(1, 1).re + 2.0 * PI * 0.1).abs() < 1e-12);
        assert!((h.get(2, 2).re + 2.0 * PI * 0.25).abs() < 1e-12);
        assert!((h.get(3, 3).re - 2.0 * PI * 0.3).abs() < 1e-12);
        assert!(h.is_hermitian(0.0));
    }

    #[test]
    fn phased_pulse_is_hermitian() {
        let p = pulse(Transition::new(2, 3), 2.0).with_phase(0.7).with_detuning(0.4);
        let h = build_hamiltonian(&LevelScheme::lambda(), &[&p], 0.01).unwrap();
        assert!(h.is_hermitian(1e-15));
        assert!((h.get(2, 3) - Complex64::from_polar(-2.0 * PI, 0.7)).norm() < 1e-12);
    }

    #[test]
    fn rejects_unknown_and_overlapping() {
        let p = pulse(Transition::new(1, 4), 1.0);
        assert!(matches!(build_hamiltonian(&LevelScheme::lambda(), &[&p], 0.0), Err(Error::Config(_))));
        let a = pulse(Transition::new(1, 3), 1.0);
        let b = pulse(Transition::new(1, 3), 2.0);
        assert!(matches!(build_hamiltonian(&LevelScheme::lambda(), &[&a, &b], 0.0), Err(Error::Config(_))));
    }
}
