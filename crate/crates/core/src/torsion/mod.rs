//! Isolated torsion of a uniform rod with a quadratic energy.

pub mod dynamic;
pub mod input;
pub mod params;
pub mod quasistatic;
pub mod trbdf2;

pub use dynamic::{dynamic_pde_solve, DynamicOptions, DynamicSolution, InitialData, TorsionState};
pub use trbdf2::StepControl;
pub use input::{InputHistory, InputKind, Waveform};
pub use params::{PhysicalTorsion, TorsionParams};
pub use quasistatic::{
    creep_mu_zero, creep_response, quasistatic_rhs, relaxation_response, sample_times, Impulse, TorsionTrace,
};
