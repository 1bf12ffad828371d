//! Single-group density-matrix dynamics.
//!
//! A group is propagated with `dρ/dt = −i[H, ρ] + D(ρ)`, where the drive is
//! piecewise constant (rectangular pulses), so one matrix exponential per
//! constant interval is exact regardless of the sampling cadence.

mod density;
mod group;
mod hamiltonian;
mod liouvillian;
mod propagate;
mod scheme;

pub use density::DensityMatrix;
pub use group::{
    sample_times, simulate_group, simulate_group_with, GroupSeries, Integrator, DEFAULT_SAMPLE_DT,
    RK4_REFERENCE_TARGET,
};
pub(crate) use group::{nearest_index, run_timeline, Timeline};
pub use hamiltonian::{build_hamiltonian, Hamiltonian};
pub use liouvillian::{build_liouvillian, Liouvillian};
pub use propagate::{propagate_interval, rk4_reference_step, rk4_substepped, IntervalPropagator, RK4_MAX_STEP};
pub use scheme::{DecayConfig, LevelScheme, Pulse, PulseRole, Transition};
