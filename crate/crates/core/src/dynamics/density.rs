use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// N×N density matrix of one spectral group.
///
/// Element accessors take 1-based level labels; [`DensityMatrix::as_matrix`]
/// exposes the raw zero-based storage.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    inner: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// All population in |1⟩.
    pub fn ground(n: usize) -> Self {
        let mut inner = DMatrix::zeros(n, n);
        inner[(0, 0)] = Complex64::new(1.0, 0.0);
        Self { inner }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            inner: DMatrix::zeros(n, n),
        }
    }

    pub fn from_matrix(inner: DMatrix<Complex64>) -> Result<Self> {
        if !inner.is_square() {
            return Err(Error::config(format!("density matrix must be square, got {}x{}", inner.nrows(), inner.ncols())));
        }
        Ok(Self { inner })
    }

    /// Row-major vectorisation `vec[a·N + b] = ρ_ab`.
    pub(crate) fn from_vec(n: usize, v: &DVector<Complex64>) -> Self {
        Self {
            inner: DMatrix::from_fn(n, n, |a, b| v[a * n + b]),
        }
    }

    pub(crate) fn to_vec(&self) -> DVector<Complex64> {
        let n = self.dim();
        DVector::from_fn(n * n, |k, _| self.inner[(k / n, k % n)])
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    /// ρ_ab for levels `a`, `b` (1-based).
    pub fn get(&self, a: usize, b: usize) -> Complex64 {
        self.inner[(a - 1, b - 1)]
    }

    /// Sets ρ_ab and its Hermitian mirror ρ_ba.
    pub fn set_hermitian(&mut self, a: usize, b: usize, value: Complex64) {
        self.inner[(a - 1, b - 1)] = value;
        self.inner[(b - 1, a - 1)] = value.conj();
    }

    /// ρ_aa.
    pub fn population(&self, a: usize) -> f64 {
        self.inner[(a - 1, a - 1)].re
    }

    pub fn trace(&self) -> Complex64 {
        self.inner.trace()
    }

    /// max |ρ_ab − conj(ρ_ba)|.
    pub fn hermiticity_error(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in a..n {
                worst = worst.max((self.inner[(a, b)] - self.inner[(b, a)].conj()).norm());
            }
        }
        worst
    }

    /// Largest elementwise distance to another matrix of the same size.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.inner
            .iter()
            .zip(other.inner.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = (&self.inner + self.inner.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    /// Checks the physical-state invariants at the given tolerances.
    pub fn check(&self, hermitian_tol: f64, trace_tol: f64) -> Result<()> {
        let h = self.hermiticity_error();
        if h > hermitian_tol {
            return Err(Error::Numerical(format!("density matrix not Hermitian: error {h:e}")));
        }
        let tr = self.trace();
        if (tr - 1.0).norm() > trace_tol {
            return Err(Error::Numerical(format!("trace drifted to {tr}")));
        }
        for a in 1..=self.dim() {
            let p = self.get(a, a);
            if p.im.abs() > hermitian_tol || p.re < -trace_tol || p.re > 1.0 + trace_tol {
                return Err(Error::Numerical(format!("population ρ{a}{a} = {p} out of range")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vectorisation_is_row_major() {
        let mut rho = DensityMatrix::ground(3);
        rho.set_hermitian(1, 2, Complex64::new(0.1, 0.2));
        let v = rho.to_vec();
        assert_eq!(v[1], Complex64::new(0.1, 0.2));
        assert_eq!(v[3], Complex64::new(0.1, -0.2));
        assert_eq!(DensityMatrix::from_vec(3, &v), rho);
    }

    #[test]
    fn ground_state_passes_checks() {
        let rho = DensityMatrix::ground(4);
        assert!(rho.check(1e-12, 1e-9).is_ok());
        assert_eq!(rho.population(1), 1.0);
        assert_eq!(rho.eigenvalues().last().copied(), Some(1.0));
    }

    #[test]
    fn detects_broken_hermiticity() {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 0)] = Complex64::new(1.0, 0.0);
        m[(0, 1)] = Complex64::new(0.0, 0.1);
        let rho = DensityMatrix::from_matrix(m).unwrap();
        assert!(rho.check(1e-12, 1e-9).is_err());
        assert!((rho.hermiticity_error() - 0.1).abs() < 1e-15);
    }
}
