//! Contact couple/force and natural-configuration evolution laws selected by
//! maximizing the total dissipation rate.

use crate::energetics::{DissipationTensors, HelmholtzEnergy, NaturalVariant, StateField};
use crate::error::{Error, Result};
use crate::kinematics::{PointState, StrainRates};
use crate::linalg::{Mat3, Vec3};
use crate::scalar::Real;

/// Kinematic constraint imposed on the rod.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Constraint {
    Free,
    /// `v_1 = v_2 = v_{d,1} = v_{d,2} = 0`.
    Unshearable,
    /// `𝗏 = 𝗏_d = e_3`.
    InextensibleUnshearable,
}

/// Evolution-law space and constraint. There is deliberately no default.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ConstitutiveVariant {
    pub natural: NaturalVariant,
    pub constraint: Constraint,
}

impl ConstitutiveVariant {
    pub fn new(natural: NaturalVariant, constraint: Constraint) -> Self {
        Self { natural, constraint }
    }
}

/// Director components of the contact couple `𝗆` and contact force `𝗇`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WrenchComponents<T> {
    pub m: Vec3<T>,
    pub n: Vec3<T>,
}

/// A wrench component that is either given by a constitutive relation or is a
/// reaction enforcing a constraint.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WrenchEntry<T> {
    Value(T),
    Reaction,
}

impl<T: Copy> WrenchEntry<T> {
    pub fn value(&self) -> Option<T> {
        match self {
            Self::Value(x) => Some(*x),
            Self::Reaction => None,
        }
    }

    pub fn is_reaction(&self) -> bool {
        matches!(self, Self::Reaction)
    }
}

/// `𝗆 = ∂_𝗎ψ + 𝖬 ∂_t𝗎`, `𝗇 = ∂_𝗏ψ + 𝖭 ∂_t𝗏`.
pub fn contact_wrench<T: Real, E: HelmholtzEnergy<T>>(
    energy: &E,
    tensors: &DissipationTensors<T>,
    state: &PointState<T>,
    du_dt: &Vec3<T>,
    dv_dt: &Vec3<T>,
) -> WrenchComponents<T> {
    contact_wrench_with(energy, tensors.m.matrix(), tensors.n.matrix(), state, du_dt, dv_dt)
}

/// [`contact_wrench`] with unvalidated viscosity matrices, so that the
/// degenerate hyperelastic case `𝖬 = 𝖭 = 0` can be expressed.
pub fn contact_wrench_with<T: Real, E: HelmholtzEnergy<T>>(
    energy: &E,
    m_visc: &Mat3<T>,
    n_visc: &Mat3<T>,
    state: &PointState<T>,
    du_dt: &Vec3<T>,
    dv_dt: &Vec3<T>,
) -> WrenchComponents<T> {
    let g = energy.gradient_at(state);
    WrenchComponents {
        m: g.u + m_visc.mul_vec(du_dt),
        n: g.v + n_visc.mul_vec(dv_dt),
    }
}

/// Current-strain rates implied by a wrench: `𝖬⁻¹(𝗆 − ∂_𝗎ψ)`, `𝖭⁻¹(𝗇 − ∂_𝗏ψ)`.
pub fn current_rates<T: Real, E: HelmholtzEnergy<T>>(
    energy: &E,
    tensors: &DissipationTensors<T>,
    state: &PointState<T>,
    wrench: &WrenchComponents<T>,
) -> Result<(Vec3<T>, Vec3<T>)> {
    let g = energy.gradient_at(state);
    Ok((tensors.m.solve(&(wrench.m - g.u))?, tensors.n.solve(&(wrench.n - g.v))?))
}

/// `𝖬_d 𝗎̇_d = −∂_{𝗎_d}ψ`, `𝖭_d 𝗏̇_d = −∂_{𝗏_d}ψ`.
pub fn natural_rate_local<T: Real, E: HelmholtzEnergy<T>>(
    energy: &E,
    tensors: &DissipationTensors<T>,
    state: &PointState<T>,
) -> Result<(Vec3<T>, Vec3<T>)> {
    let g = energy.gradient_at(state);
    Ok((tensors.m_d.solve(&-g.u_d)?, tensors.n_d.solve(&-g.v_d)?))
}

/// Single natural rate for a homogeneous natural configuration:
/// `𝖬_d 𝗎̇_d = −(1/L)∫₀ᴸ ∂_{𝗎_d}ψ ds` and likewise for `𝗏_d` (trapezoid rule).
pub fn natural_rate_uniform<T: Real, E: HelmholtzEnergy<T>>(
    energy: &E,
    tensors: &DissipationTensors<T>,
    field: &StateField<T>,
) -> Result<(Vec3<T>, Vec3<T>)> {
    if !field.natural_state_is_uniform(T::lit(1e-10)) {
        return Err(Error::Precondition("natural state varies along the rod".into()));
    }
    let (gu, gv) = field.mean_natural_gradients(energy);
    Ok((tensors.m_d.solve(&-gu)?, tensors.n_d.solve(&-gv)?))
}

/// Wrench and natural rates for a constrained rod.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstrainedResponse<T> {
    pub m: Vec3<T>,
    pub n: [WrenchEntry<T>; 3],
    pub u_d_rate: Vec3<T>,
    /// `∂_t v_{d,3}`; `None` when the rod is also inextensible.
    pub v_d3_rate: Option<T>,
}

fn constraint_violation<T: Real>(state: &PointState<T>, constraint: Constraint) -> Option<String> {
    let tol = T::lit(1e-12);
    let v = state.current.v();
    let v_d = state.natural.v_d();
    match constraint {
        Constraint::Free => None,
        Constraint::Unshearable => {
            let worst = v[0].abs().max(v[1].abs()).max(v_d[0].abs()).max(v_d[1].abs());
            (worst > tol).then(|| format!("shear components up to {worst:e}"))
        }
        Constraint::InextensibleUnshearable => {
            let e3 = Vec3::unit(2);
            let worst = (v - e3).max_abs().max((v_d - e3).max_abs());
            (worst > tol).then(|| format!("tangent differs from e3 by {worst:e}"))
        }
    }
}

/// Pointwise constitutive response of a constrained rod with locally evolving
/// natural configuration. The shear (and, if inextensible, axial) force
/// components are reactions. `dv3_dt` is ignored when the rod is
/// inextensible.
pub fn constrained_wrench_and_rates<T: Real, E: HelmholtzEnergy<T>>(
    energy: &E,
    tensors: &DissipationTensors<T>,
    state: &PointState<T>,
    du_dt: &Vec3<T>,
    dv3_dt: T,
    constraint: Constraint,
) -> Result<ConstrainedResponse<T>> {
    if constraint == Constraint::Free {
        return Err(Error::Precondition("use contact_wrench for an unconstrained rod".into()));
    }
    if let Some(msg) = constraint_violation(state, constraint) {
        return Err(Error::Precondition(msg));
    }
    let g = energy.gradient_at(state);
    let m = g.u + tensors.m.apply(du_dt);
    let u_d_rate = tensors.m_d.solve(&-g.u_d)?;
    match constraint {
        Constraint::Unshearable => {
            let n3 = g.v[2] + tensors.n.matrix().0[2][2] * dv3_dt;
            let v_d3_rate = -g.v_d[2] / tensors.n_d.matrix().0[2][2];
            Ok(ConstrainedResponse {
                m,
                n: [WrenchEntry::Reaction, WrenchEntry::Reaction, WrenchEntry::Value(n3)],
                u_d_rate,
                v_d3_rate: Some(v_d3_rate),
            })
        }
        _ => Ok(ConstrainedResponse {
            m,
            n: [WrenchEntry::Reaction; 3],
            u_d_rate,
            v_d3_rate: None,
        }),
    }
}

/// The rates selected by the maximization principle at every node, given the
/// wrench field.
pub fn maximizer_rates<T: Real, E: HelmholtzEnergy<T>>(
    energy: &E,
    tensors: &DissipationTensors<T>,
    field: &StateField<T>,
    wrenches: &[WrenchComponents<T>],
    variant: NaturalVariant,
) -> Result<Vec<StrainRates<T>>> {
    check_wrench_count(field, wrenches)?;
    let uniform = match variant {
        NaturalVariant::Local => None,
        NaturalVariant::Uniform => Some(natural_rate_uniform(energy, tensors, field)?),
    };
    field
        .states()
        .iter()
        .zip(wrenches)
        .map(|(s, w)| {
            let (u, v) = current_rates(energy, tensors, s, w)?;
            let (u_d, v_d) = match uniform {
                Some(r) => r,
                None => natural_rate_local(energy, tensors, s)?,
            };
            Ok(StrainRates { u_d, v_d, u, v })
        })
        .collect()
}

fn check_wrench_count<T: Real>(field: &StateField<T>, wrenches: &[WrenchComponents<T>]) -> Result<()> {
    if wrenches.len() != field.len() {
        return Err(Error::Precondition(format!(
            "{} wrenches for {} states",
            wrenches.len(),
            field.len()
        )));
    }
    Ok(())
}

/// Maximal value of the total dissipation rate under the energy-balance
/// constraint.
///
/// Local: `∫(|𝖬^{-1/2}(𝗆−∂_𝗎ψ)|² + |𝖭^{-1/2}(𝗇−∂_𝗏ψ)|² + |𝖬_d^{-1/2}∂_{𝗎_d}ψ|² + |𝖭_d^{-1/2}∂_{𝗏_d}ψ|²) ds`.
/// Uniform: the first two terms integrated as before, plus
/// `(1/L)|𝖬_d^{-1/2}∫∂_{𝗎_d}ψ ds|² + (1/L)|𝖭_d^{-1/2}∫∂_{𝗏_d}ψ ds|²`.
pub fn maximizer_value<T: Real, E: HelmholtzEnergy<T>>(
    energy: &E,
    tensors: &DissipationTensors<T>,
    field: &StateField<T>,
    wrenches: &[WrenchComponents<T>],
    variant: NaturalVariant,
) -> Result<T> {
    check_wrench_count(field, wrenches)?;
    let weights = field.grid().weights();
    let mut total = T::zero();
    let mut gu_int = Vec3::zeros();
    let mut gv_int = Vec3::zeros();
    for ((s, w), q) in field.states().iter().zip(wrenches).zip(&weights) {
        let g = energy.gradient_at(s);
        let mut density =
            tensors.m.inverse_norm_squared(&(w.m - g.u))? + tensors.n.inverse_norm_squared(&(w.n - g.v))?;
        match variant {
            NaturalVariant::Local => {
                density = density
                    + tensors.m_d.inverse_norm_squared(&g.u_d)?
                    + tensors.n_d.inverse_norm_squared(&g.v_d)?;
            }
            NaturalVariant::Uniform => {
                gu_int += g.u_d.scale(*q);
                gv_int += g.v_d.scale(*q);
            }
        }
        total = total + *q * density;
    }
    if variant == NaturalVariant::Uniform {
        let inv_l = T::one() / field.grid().length();
        total = total
            + inv_l * (tensors.m_d.inverse_norm_squared(&gu_int)? + tensors.n_d.inverse_norm_squared(&gv_int)?);
    }
    Ok(total)
}

/// Both sides of the energy-balance constraint for a candidate rate field:
/// `(∫ dissipation density, ∫[(𝗆−∂_𝗎ψ)·𝗎̇ + (𝗇−∂_𝗏ψ)·𝗏̇ − ∂_{𝗎_d}ψ·𝗎̇_d − ∂_{𝗏_d}ψ·𝗏̇_d])`.
pub fn dissipation_balance<T: Real, E: HelmholtzEnergy<T>>(
    energy: &E,
    tensors: &DissipationTensors<T>,
    field: &StateField<T>,
    wrenches: &[WrenchComponents<T>],
    rates: &[StrainRates<T>],
) -> Result<(T, T)> {
    check_wrench_count(field, wrenches)?;
    if rates.len() != field.len() {
        return Err(Error::Precondition("rate count does not match state count".into()));
    }
    let weights = field.grid().weights();
    let mut lhs = T::zero();
    let mut rhs = T::zero();
    for (((s, w), r), q) in field.states().iter().zip(wrenches).zip(rates).zip(&weights) {
        let g = energy.gradient_at(s);
        lhs = lhs + *q * crate::energetics::dissipation_density(tensors, r);
        rhs = rhs + *q * ((w.m - g.u).dot(&r.u) + (w.n - g.v).dot(&r.v) - g.u_d.dot(&r.u_d) - g.v_d.dot(&r.v_d));
    }
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energetics::{point_state, QuadraticEnergy};
    use crate::grid::RodGrid;

    fn v(x: f64, y: f64, z: f64) -> Vec3<f64> {
        Vec3::new(x, y, z)
    }

    fn energy() -> QuadraticEnergy<f64> {
        QuadraticEnergy::new(v(1.0, 1.5, 2.0), v(3.0, 2.5, 4.0), v(0.5, 0.7, 1.1), v(0.9, 1.3, 0.6)).unwrap()
    }

    fn tensors() -> DissipationTensors<f64> {
        DissipationTensors::new(
            Mat3([[2.0, 0.3, 0.1], [0.3, 1.5, 0.2], [0.1, 0.2, 1.0]]),
            Mat3([[1.0, 0.1, 0.0], [0.1, 2.0, 0.4], [0.0, 0.4, 3.0]]),
            Mat3([[1.2, 0.0, 0.2], [0.0, 0.8, 0.1], [0.2, 0.1, 1.4]]),
            Mat3([[0.9, 0.2, 0.0], [0.2, 1.1, 0.0], [0.0, 0.0, 0.7]]),
        )
        .unwrap()
    }

    #[test]
    fn rest_in_natural_configuration_has_no_wrench() {
        let s = point_state(v(0.1, -0.2, 0.3), v(0.05, 0.0, 1.1), v(0.1, -0.2, 0.3), v(0.05, 0.0, 1.1)).unwrap();
        let w = contact_wrench(&energy(), &tensors(), &s, &Vec3::zeros(), &Vec3::zeros());
        assert!(w.m.max_abs() < 1e-15 && w.n.max_abs() < 1e-15);
    }

    #[test]
    fn hyperelastic_limit() {
        let e = energy();
        let s = point_state(Vec3::zeros(), Vec3::unit(2), v(0.3, 0.2, -0.1), v(0.1, 0.0, 1.2)).unwrap();
        let w = contact_wrench_with(&e, &Mat3::zeros(), &Mat3::zeros(), &s, &v(1.0, 2.0, 3.0), &v(3.0, 2.0, 1.0));
        let g = e.gradient_at(&s);
        assert_eq!(w.m, g.u);
        assert_eq!(w.n, g.v);
    }

    #[test]
    fn local_rate_solves_linear_system() {
        let e = energy();
        let t = tensors();
        let s = point_state(v(0.2, 0.1, -0.3), v(0.1, -0.1, 0.9), v(0.5, -0.4, 0.2), v(0.0, 0.2, 1.3)).unwrap();
        let (ud, vd) = natural_rate_local(&e, &t, &s).unwrap();
        let g = e.gradient_at(&s);
        assert!((t.m_d.apply(&ud) + g.u_d).max_abs() < 1e-12);
        assert!((t.n_d.apply(&vd) + g.v_d).max_abs() < 1e-12);
    }

    #[test]
    fn torsion_only_local_rate() {
        let e = QuadraticEnergy::new(v(1.0, 1.0, 2.0), v(1.0, 1.0, 1.0), v(1.0, 1.0, 0.5), v(1.0, 1.0, 1.0)).unwrap();
        let t = DissipationTensors::diagonal(v(1.0, 1.0, 1.0), v(1.0, 1.0, 1.0), v(1.0, 1.0, 3.0), v(1.0, 1.0, 1.0)).unwrap();
        let (u, u_d) = (0.7, 0.2);
        let s = point_state(v(0.0, 0.0, u_d), Vec3::unit(2), v(0.0, 0.0, u), Vec3::unit(2)).unwrap();
        let (rate, _) = natural_rate_local(&e, &t, &s).unwrap();
        assert!((3.0 * rate[2] - (2.0 * (u - u_d) - 0.5 * u_d)).abs() < 1e-15);
    }

    #[test]
    fn uniform_rate_with_constant_field_equals_local() {
        let e = energy();
        let t = tensors();
        let s = point_state(v(0.2, 0.1, -0.3), v(0.1, -0.1, 0.9), v(0.5, -0.4, 0.2), v(0.0, 0.2, 1.3)).unwrap();
        let field = StateField::new(RodGrid::new(1.0, 7).unwrap(), vec![s; 7]).unwrap();
        let uni = natural_rate_uniform(&e, &t, &field).unwrap();
        let loc = natural_rate_local(&e, &t, &s).unwrap();
        assert!((uni.0 - loc.0).max_abs() < 1e-14 && (uni.1 - loc.1).max_abs() < 1e-14);
    }

    #[test]
    fn uniform_rate_rejects_varying_natural_state() {
        let e = energy();
        let a = point_state(Vec3::zeros(), Vec3::unit(2), Vec3::zeros(), Vec3::unit(2)).unwrap();
        let b = point_state(v(0.1, 0.0, 0.0), Vec3::unit(2), Vec3::zeros(), Vec3::unit(2)).unwrap();
        let field = StateField::new(RodGrid::unit(2).unwrap(), vec![a, b]).unwrap();
        assert!(matches!(natural_rate_uniform(&e, &tensors(), &field), Err(Error::Precondition(_))));
    }

    #[test]
    fn inextensible_at_equal_strains() {
        let e = energy();
        let t = tensors();
        let u = v(0.3, -0.1, 0.4);
        let s = point_state(u, Vec3::unit(2), u, Vec3::unit(2)).unwrap();
        let du = v(0.2, 0.5, -0.3);
        let r = constrained_wrench_and_rates(&e, &t, &s, &du, 0.0, Constraint::InextensibleUnshearable).unwrap();
        assert!((r.m - t.m.apply(&du)).max_abs() < 1e-15);
        assert!(r.n.iter().all(|x| x.is_reaction()));
        assert!(r.v_d3_rate.is_none());
        let g = e.gradient_at(&s);
        assert!((t.m_d.apply(&r.u_d_rate) + g.u_d).max_abs() < 1e-14);
    }

    #[test]
    fn unshearable_axial_force() {
        let e = energy();
        let t = tensors();
        let s = point_state(Vec3::zeros(), Vec3::unit(2), v(0.1, 0.2, 0.3), Vec3::unit(2)).unwrap();
        let r = constrained_wrench_and_rates(&e, &t, &s, &Vec3::zeros(), 0.25, Constraint::Unshearable).unwrap();
        assert!(r.n[0].is_reaction() && r.n[1].is_reaction());
        assert!((r.n[2].value().unwrap() - 3.0 * 0.25).abs() < 1e-15);
    }

    #[test]
    fn constraint_violation_is_reported() {
        let s = point_state(Vec3::zeros(), Vec3::unit(2), Vec3::zeros(), v(0.1, 0.0, 1.0)).unwrap();
        let res = constrained_wrench_and_rates(&energy(), &tensors(), &s, &Vec3::zeros(), 0.0, Constraint::Unshearable);
        assert!(matches!(res, Err(Error::Precondition(_))));
    }

    #[test]
    fn maximizer_value_trivial_cases() {
        let e = energy();
        let t = DissipationTensors::identity();
        let l = 2.0;
        let grid = RodGrid::new(l, 5).unwrap();
        let s = point_state(Vec3::zeros(), Vec3::unit(2), Vec3::zeros(), Vec3::unit(2)).unwrap();
        let field = StateField::new(grid, vec![s; 5]).unwrap();
        let zero = vec![WrenchComponents { m: Vec3::zeros(), n: Vec3::zeros() }; 5];
        assert_eq!(maximizer_value(&e, &t, &field, &zero, NaturalVariant::Local).unwrap(), 0.0);
        let unit = vec![WrenchComponents { m: Vec3::unit(2), n: Vec3::zeros() }; 5];
        for variant in [NaturalVariant::Local, NaturalVariant::Uniform] {
            let val = maximizer_value(&e, &t, &field, &unit, variant).unwrap();
            assert!((val - l).abs() < 1e-14);
        }
    }
}
