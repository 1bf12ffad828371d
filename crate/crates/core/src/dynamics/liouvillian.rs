use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::density::DensityMatrix;
use super::hamiltonian::Hamiltonian;
use super::scheme::DecayConfig;
use crate::error::{Error, Result};
use crate::units::angular_khz;

/// Generator of `dρ/dt` acting on the row-major vectorised density matrix.
///
/// Coherent part is `−i[H, ρ]`. Dephasing damps each ρ_ij (i ≠ j) directly at
/// 2πγ_ij; a decay channel `u → l` moves 2πΓ·ρ_uu into ρ_ll and damps every
/// coherence touching `u` at πΓ.
#[derive(Debug, Clone, PartialEq)]
pub struct Liouvillian {
    n: usize,
    matrix: DMatrix<Complex64>,
}

impl Liouvillian {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            matrix: DMatrix::zeros(n * n, n * n),
        }
    }

    /// Number of levels N (the operator is N²×N²).
    pub fn levels(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.matrix
            .row_iter()
            .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `dρ/dt` at `rho`.
    pub fn apply(&self, rho: &DensityMatrix) -> DensityMatrix {
        DensityMatrix::from_vec(self.n, &(&self.matrix * rho.to_vec()))
    }

    pub(crate) fn apply_vec(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        &self.matrix * v
    }
}

pub fn build_liouvillian(h: &Hamiltonian, decay: &DecayConfig) -> Result<Liouvillian> {
    let n = h.dim();
    decay.validate(n)?;
    if !h.is_hermitian(1e-12) {
        return Err(Error::Precondition("Hamiltonian is not Hermitian".into()));
    }
    let hm = h.matrix();
    let idx = |a: usize, b: usize| a * n + b;
    let i = Complex64::i();
    let mut l = DMatrix::<Complex64>::zeros(n * n, n * n);

    // −i(Hρ − ρH)_ab = −i Σ_k H_ak ρ_kb + i Σ_k ρ_ak H_kb
    for a in 0..n {
        for b in 0..n {
            let row = idx(a, b);
            for k in 0..n {
                l[(row, idx(k, b))] -= i * hm[(a, k)];
                l[(row, idx(a, k))] += i * hm[(k, b)];
            }
        }
    }

    for ((p, q), g) in decay.dephasing_rates() {
        let rate = angular_khz(g);
        let (p, q) = (p - 1, q - 1);
        l[(idx(p, q), idx(p, q))] -= rate;
        l[(idx(q, p), idx(q, p))] -= rate;
    }

    for ((u, lo), g) in decay.population_decays() {
        let rate = angular_khz(g);
        let (u, lo) = (u - 1, lo - 1);
        l[(idx(u, u), idx(u, u))] -= rate;
        l[(idx(lo, lo), idx(u, u))] += rate;
        for k in (0..n).filter(|&k| k != u) {
            l[(idx(u, k), idx(u, k))] -= 0.5 * rate;
            l[(idx(k, u), idx(k, u))] -= 0.5 * rate;
        }
    }

    Ok(Liouvillian { n, matrix: l })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::hamiltonian::build_hamiltonian;
    use crate::dynamics::scheme::{LevelScheme, Pulse, PulseRole, Transition};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_hamiltonian_and_decay_give_zero_operator() {
        let h = build_hamiltonian(&LevelScheme::lambda(), &[], 0.0).unwrap();
        let l = build_liouvillian(&h, &DecayConfig::none()).unwrap();
        assert!(l.matrix().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn pure_dephasing_damps_coherence_only() {
        let h = build_hamiltonian(&LevelScheme::two_level(), &[], 0.0).unwrap();
        let l = build_liouvillian(&h, &DecayConfig::none().with_dephasing(1, 2, 50.0)).unwrap();
        let mut rho = DensityMatrix::ground(2);
        rho.set_hermitian(1, 2, c(0.3, 0.1));
        let d = l.apply(&rho);
        let expected = c(0.3, 0.1) * (-2.0 * PI * 0.05);
        assert!((d.get(1, 2) - expected).norm() < 1e-14);
        assert!(d.get(1, 1).norm() < 1e-15 && d.get(2, 2).norm() < 1e-15);
    }

    #[test]
    fn population_decay_matches_rate_equation() {
        let h = build_hamiltonian(&LevelScheme::double_lambda(), &[], 0.0).unwrap();
        let decay = DecayConfig::none()
            .with_population_decay(4, 1, 10.0)
            .with_population_decay(4, 2, 30.0);
        let l = build_liouvillian(&h, &decay).unwrap();
        let mut rho = DensityMatrix::zeros(4);
        rho.set_hermitian(4, 4, c(0.6, 0.0));
        rho.set_hermitian(1, 1, c(0.4, 0.0));
        rho.set_hermitian(1, 4, c(0.2, 0.0));
        let d = l.apply(&rho);
        let total = 2.0 * PI * 0.04;
        assert!((d.get(4, 4).re + total * 0.6).abs() < 1e-14);
        assert!((d.get(1, 1).re - 2.0 * PI * 0.01 * 0.6).abs() < 1e-14);
        assert!((d.get(2, 2).re - 2.0 * PI * 0.03 * 0.6).abs() < 1e-14);
        assert!((d.get(1, 4).re + 0.5 * total * 0.2).abs() < 1e-14);
        // trace preserved
        assert!(d.trace().norm() < 1e-14);
    }

    #[test]
    fn commutator_matches_rabi_equation() {
        // dρ13/dt = (i/2)Ω(ρ33 − ρ11) for a resonant field on 1–3.
        // Every element comes from −i[H, ρ], so the two hand-written forms of
        // dρ12/dt found in the literature for the double-lambda case are not used.
        let p = Pulse::new("A", PulseRole::Data, Transition::new(1, 3), 0.5, 0.0, 0.1);
        let h = build_hamiltonian(&LevelScheme::lambda(), &[&p], 0.0).unwrap();
        let l = build_liouvillian(&h, &DecayConfig::none()).unwrap();
        let d = l.apply(&DensityMatrix::ground(3));
        let omega = 2.0 * PI * 0.5;
        assert!((d.get(1, 3) - c(0.0, -0.5 * omega)).norm() < 1e-14);
    }

    #[test]
    fn undamped_operator_generates_unitary_flow() {
        // L is anti-Hermitian when there is no relaxation.
        let p = Pulse::new("R", PulseRole::Rephase, Transition::new(2, 3), 3.0, 0.0, 0.1).with_phase(0.3);
        let h = build_hamiltonian(&LevelScheme::lambda(), &[&p], 0.1).unwrap();
        let l = build_liouvillian(&h, &DecayConfig::none()).unwrap();
        let sum = l.matrix() + l.matrix().adjoint();
        assert!(sum.iter().all(|z| z.norm() < 1e-12));
    }
}
