use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::density::DensityMatrix;
use super::liouvillian::Liouvillian;
use crate::error::{Error, Result};

/// Largest `‖L‖∞·dt` accepted by [`rk4_reference_step`].
pub const RK4_MAX_STEP: f64 = 0.1;

/// `exp(L·dt)` for a constant generator.
#[derive(Debug, Clone)]
pub struct IntervalPropagator {
    n: usize,
    matrix: DMatrix<Complex64>,
}

impl IntervalPropagator {
    pub fn new(l: &Liouvillian, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Numerical(format!("propagation interval must be positive, got {dt}")));
        }
        let scaled = l.matrix() * Complex64::new(dt, 0.0);
        if scaled.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numerical("generator has non-finite entries".into()));
        }
        let matrix = scaled.exp();
        if matrix.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numerical(format!(
                "matrix exponential overflowed (‖L‖∞·dt = {:.3e})",
                l.norm_inf() * dt
            )));
        }
        Ok(Self { n: l.levels(), matrix })
    }

    pub fn apply(&self, rho: &DensityMatrix) -> DensityMatrix {
        DensityMatrix::from_vec(self.n, &self.apply_vec(&rho.to_vec()))
    }

    pub(crate) fn apply_vec(&self, v: &DVector<Complex64>) -> DVector<Complex64> {
        &self.matrix * v
    }
}

/// Exact propagation over one constant-drive interval.
pub fn propagate_interval(rho: &DensityMatrix, l: &Liouvillian, dt: f64) -> Result<DensityMatrix> {
    Ok(IntervalPropagator::new(l, dt)?.apply(rho))
}

/// One classical fourth-order Runge–Kutta step.
///
/// Only meant as an independent check of [`propagate_interval`]; refuses
/// steps with `‖L‖∞·dt ≥ 0.1`.
pub fn rk4_reference_step(rho: &DensityMatrix, l: &Liouvillian, dt: f64) -> Result<DensityMatrix> {
    let v = rk4_vec(l, &rho.to_vec(), dt)?;
    Ok(DensityMatrix::from_vec(l.levels(), &v))
}

pub(crate) fn rk4_vec(l: &Liouvillian, v: &DVector<Complex64>, dt: f64) -> Result<DVector<Complex64>> {
    let size = l.norm_inf() * dt;
    if size >= RK4_MAX_STEP {
        let needed = (size / RK4_MAX_STEP).ceil() as usize + 1;
        return Err(Error::Numerical(format!(
            "RK4 step too large: ‖L‖∞·dt = {size:.3e} ≥ {RK4_MAX_STEP}; split the interval into at least {needed} substeps"
        )));
    }
    let h = Complex64::new(dt, 0.0);
    let half = Complex64::new(0.5 * dt, 0.0);
    let k1 = l.apply_vec(v);
    let k2 = l.apply_vec(&(v + &k1 * half));
    let k3 = l.apply_vec(&(v + &k2 * half));
    let k4 = l.apply_vec(&(v + &k3 * h));
    Ok(v + (k1 + k2 * Complex64::new(2.0, 0.0) + k3 * Complex64::new(2.0, 0.0) + k4) * (h / 6.0))
}

/// Integrates over `dt` with as many RK4 substeps as needed to keep
/// `‖L‖∞·h ≤ target`.
pub fn rk4_substepped(rho: &DensityMatrix, l: &Liouvillian, dt: f64, target: f64) -> Result<DensityMatrix> {
    let steps = ((l.norm_inf() * dt / target).ceil() as usize).max(1);
    let h = dt / steps as f64;
    let mut v = rho.to_vec();
    for _ in 0..steps {
        v = rk4_vec(l, &v, h)?;
    }
    Ok(DensityMatrix::from_vec(l.levels(), &v))
}
