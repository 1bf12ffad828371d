//! Analytic oracles and echo metrics.
//!
//! The simulator is graded against closed forms: the controlled coherence
//! conversion map, the piecewise phase evolution of a single spin group and
//! the rephasing symmetry of a two-level echo. [`extract_echo_metrics`]
//! condenses an ensemble run into an [`EchoReport`].

mod ccc;
mod echo;
mod figures;
mod oracle;
mod symmetry;

pub use ccc::{ccc_map, CccStage};
pub use echo::{extract_echo_metrics, EchoPeak, EchoReport, ECHO_WINDOW, NULL_ECHO_THRESHOLD};
pub use figures::{loss_factor, phase_matching, retrieval_efficiency, FieldMode, LevelEnergies, PhaseMatch};
pub use oracle::{phase_evolution_oracle, PhaseOracle};
pub use symmetry::{rephasing_symmetry_check, SymmetryReport};
