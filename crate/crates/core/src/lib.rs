//! Special Cosserat rods with evolving natural configurations.
//!
//! Every numerical type is generic over a [`Real`] scalar (`f32` or `f64`);
//! the aliases at the crate root fix the scalar to `f64`.

pub mod constitutive;
pub mod energetics;
pub mod error;
pub mod grid;
pub mod kinematics;
pub mod linalg;
pub mod oracle;
pub mod scalar;
pub mod torsion;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Vec3F64 = linalg::Vec3<f64>;
pub type Mat3F64 = linalg::Mat3<f64>;
pub type DirectorFrameF64 = kinematics::DirectorFrame<f64>;
pub type StrainStateF64 = kinematics::StrainState<f64>;
pub type NaturalStateF64 = kinematics::NaturalState<f64>;
pub type PointStateF64 = kinematics::PointState<f64>;
pub type StrainRatesF64 = kinematics::StrainRates<f64>;
pub type QuadraticEnergyF64 = energetics::QuadraticEnergy<f64>;
pub type DissipationTensorsF64 = energetics::DissipationTensors<f64>;
pub type MaterialModelF64 = energetics::MaterialModel<f64>;
pub type StateFieldF64 = energetics::StateField<f64>;
pub type RodGridF64 = grid::RodGrid<f64>;
pub type TorsionParamsF64 = torsion::TorsionParams<f64>;
pub type InputHistoryF64 = torsion::InputHistory<f64>;
pub type WaveformF64 = torsion::Waveform<f64>;
pub type TorsionTraceF64 = torsion::TorsionTrace<f64>;
pub type DynamicSolutionF64 = torsion::DynamicSolution<f64>;
pub type DiscreteMaximizationInstanceF64 = oracle::DiscreteMaximizationInstance<f64>;
