//! Independent numerical engines used to cross-check closed forms: brute-force
//! constrained maximization, finite differences, a high-order reference
//! integrator and 2×2 matrix exponentials.

pub mod counterexample;
pub mod expm;
pub mod fd;
pub mod maximize;
pub mod reference;

pub use counterexample::{uniform_twist_dissipation, TwistDissipation};
pub use expm::{expm_series, matrix_exponential_2x2};
pub use fd::finite_difference_gradient;
pub use maximize::{brute_force_maximize, DiscreteMaximizationInstance, MaximizationOutcome, NodeData};
pub use reference::{reference_integrate, DenseTrace};
