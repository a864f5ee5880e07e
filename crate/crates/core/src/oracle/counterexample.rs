use crate::energetics::{dissipation_profile, DissipationTensors, NaturalVariant, QuadraticEnergy, StateField};
use crate::error::{Error, Result};
use crate::grid::RodGrid;
use crate::kinematics::{NaturalState, PointState, StrainRates, StrainState};
use crate::linalg::Vec3;
use crate::scalar::Real;

/// Pointwise dissipation of a rod in pure twist whose natural state is held
/// uniform, with the wrench balancing the elastic couple so that only the
/// natural-rate term contributes.
#[derive(Clone, Debug, PartialEq)]
pub struct TwistDissipation<T> {
    pub positions: Vec<T>,
    pub twist: Vec<T>,
    /// `ξ(s)` from the uniform evolution law.
    pub xi: Vec<T>,
    /// `(A₃₃²/M_{d,33}) u(s) (1/L)∫u ds`, the closed form of `xi`.
    pub predicted: Vec<T>,
    /// Trapezoid integral of `xi`.
    pub total: T,
}

/// Evaluates the uniform-variant dissipation profile for the twist samples
/// `twist` on `grid`, with `u_d = 0`, `v = v_d = e₃`, torsional stiffness
/// `a33` and natural torsional viscosity `m_d33` (the current viscosity is set
/// equal to it).
pub fn uniform_twist_dissipation<T: Real>(
    grid: &RodGrid<T>,
    twist: &[T],
    a33: T,
    m_d33: T,
) -> Result<TwistDissipation<T>> {
    if twist.len() != grid.nodes() {
        return Err(Error::Precondition("one twist sample per node required".into()));
    }
    let one = Vec3::new(T::one(), T::one(), T::one());
    let energy = QuadraticEnergy::new(Vec3::new(T::one(), T::one(), a33), one, one, one)?;
    let visc = Vec3::new(T::one(), T::one(), m_d33);
    let tensors = DissipationTensors::diagonal(visc, one, visc, one)?;
    let e3 = Vec3::unit(2);
    let states = twist
        .iter()
        .map(|&u| {
            Ok(PointState::new(
                NaturalState::new(Vec3::zeros(), e3)?,
                StrainState::new(Vec3::new(T::zero(), T::zero(), u), e3)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let field = StateField::new(*grid, states)?;
    let rates = vec![StrainRates::zeros(); grid.nodes()];
    let xi = dissipation_profile(&energy, &tensors, &field, &rates, NaturalVariant::Uniform)?;
    let mean = grid.integrate(twist) / grid.length();
    let predicted = twist.iter().map(|&u| a33 * a33 * u * mean / m_d33).collect();
    Ok(TwistDissipation {
        positions: grid.positions(),
        twist: twist.to_vec(),
        total: grid.integrate(&xi),
        xi,
        predicted,
    })
}
