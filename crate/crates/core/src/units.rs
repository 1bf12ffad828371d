//! Unit conventions.
//!
//! Time is in microseconds. Rabi frequencies and optical detunings are cyclic
//! MHz, decay rates and spin detunings cyclic kHz. The factor 2π is applied
//! exactly once, when a Hamiltonian or Liouvillian is assembled, turning
//! cyclic MHz into angular rad/μs.

use std::f64::consts::TAU;

/// Cyclic MHz to angular rad/μs.
#[inline]
pub fn angular_mhz(cyclic_mhz: f64) -> f64 {
    TAU * cyclic_mhz
}

/// Cyclic kHz to angular rad/μs.
#[inline]
pub fn angular_khz(cyclic_khz: f64) -> f64 {
    TAU * cyclic_khz * 1e-3
}

#[inline]
pub fn khz_to_mhz(khz: f64) -> f64 {
    khz * 1e-3
}
