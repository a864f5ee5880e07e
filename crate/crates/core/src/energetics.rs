//! Helmholtz free energy, dissipation tensors and dissipation rates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::RodGrid;
use crate::kinematics::{NaturalState, PointState, StrainRates, StrainState};
use crate::linalg::{Mat3, Vec3};
use crate::oracle::fd::finite_difference_gradient;
use crate::scalar::Real;

/// Partial derivatives of `ψ̂(𝗎_d, 𝗏_d, 𝗎, 𝗏)` with respect to each argument.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyGradient<T> {
    pub u_d: Vec3<T>,
    pub v_d: Vec3<T>,
    pub u: Vec3<T>,
    pub v: Vec3<T>,
}

/// A frame-indifferent free energy, expressed through director components.
///
/// Implementors supply exact gradients; [`gradient_check`] compares them
/// against finite differences.
pub trait HelmholtzEnergy<T: Real> {
    fn energy(&self, u_d: &Vec3<T>, v_d: &Vec3<T>, u: &Vec3<T>, v: &Vec3<T>) -> T;

    fn gradient(&self, u_d: &Vec3<T>, v_d: &Vec3<T>, u: &Vec3<T>, v: &Vec3<T>) -> EnergyGradient<T>;

    fn energy_at(&self, state: &PointState<T>) -> T {
        self.energy(&state.natural.u_d(), &state.natural.v_d(), &state.current.u(), &state.current.v())
    }

    fn gradient_at(&self, state: &PointState<T>) -> EnergyGradient<T> {
        self.gradient(&state.natural.u_d(), &state.natural.v_d(), &state.current.u(), &state.current.v())
    }
}

/// `ψ = ½ Σ_k [A_kk(u_k − u_{d,k})² + B_kk(v_k − v_{d,k})² + A_{d,kk} u_{d,k}² + B_{d,kk}(v_{d,k} − δ_{3k})²]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadraticEnergy<T> {
    a: Vec3<T>,
    b: Vec3<T>,
    a_d: Vec3<T>,
    b_d: Vec3<T>,
}

impl<T: Real> QuadraticEnergy<T> {
    /// All twelve coefficients must be positive.
    pub fn new(a: Vec3<T>, b: Vec3<T>, a_d: Vec3<T>, b_d: Vec3<T>) -> Result<Self> {
        for (name, c) in [("A", a), ("B", b), ("A_d", a_d), ("B_d", b_d)] {
            for k in 0..3 {
                if !(c[k] > T::zero()) || !c[k].is_finite() {
                    return Err(Error::InvalidParameter {
                        name,
                        value: c[k].to_f64_lossy(),
                        reason: "energy coefficients must be positive",
                    });
                }
            }
        }
        Ok(Self { a, b, a_d, b_d })
    }

    /// Every coefficient equal to one.
    pub fn unit() -> Self {
        let one = Vec3::new(T::one(), T::one(), T::one());
        Self { a: one, b: one, a_d: one, b_d: one }
    }

    pub fn a(&self) -> Vec3<T> {
        self.a
    }

    pub fn b(&self) -> Vec3<T> {
        self.b
    }

    pub fn a_d(&self) -> Vec3<T> {
        self.a_d
    }

    pub fn b_d(&self) -> Vec3<T> {
        self.b_d
    }
}

impl<T: Real> HelmholtzEnergy<T> for QuadraticEnergy<T> {
    fn energy(&self, u_d: &Vec3<T>, v_d: &Vec3<T>, u: &Vec3<T>, v: &Vec3<T>) -> T {
        let mut psi = T::zero();
        for k in 0..3 {
            let du = u[k] - u_d[k];
            let dv = v[k] - v_d[k];
            let vd_rest = if k == 2 { v_d[k] - T::one() } else { v_d[k] };
            psi = psi
                + self.a[k] * du * du
                + self.b[k] * dv * dv
                + self.a_d[k] * u_d[k] * u_d[k]
                + self.b_d[k] * vd_rest * vd_rest;
        }
        psi * T::half()
    }

    fn gradient(&self, u_d: &Vec3<T>, v_d: &Vec3<T>, u: &Vec3<T>, v: &Vec3<T>) -> EnergyGradient<T> {
        let mut g = EnergyGradient {
            u_d: Vec3::zeros(),
            v_d: Vec3::zeros(),
            u: Vec3::zeros(),
            v: Vec3::zeros(),
        };
        for k in 0..3 {
            let du = self.a[k] * (u[k] - u_d[k]);
            let dv = self.b[k] * (v[k] - v_d[k]);
            let vd_rest = if k == 2 { v_d[k] - T::one() } else { v_d[k] };
            g.u[k] = du;
            g.v[k] = dv;
            g.u_d[k] = self.a_d[k] * u_d[k] - du;
            g.v_d[k] = self.b_d[k] * vd_rest - dv;
        }
        g
    }
}

/// A caller-supplied energy given by a value closure and a gradient closure.
pub struct FnEnergy<F, G> {
    value: F,
    gradient: G,
}

impl<F, G> FnEnergy<F, G> {
    pub fn new(value: F, gradient: G) -> Self {
        Self { value, gradient }
    }
}

impl<T, F, G> HelmholtzEnergy<T> for FnEnergy<F, G>
where
    T: Real,
    F: Fn(&Vec3<T>, &Vec3<T>, &Vec3<T>, &Vec3<T>) -> T,
    G: Fn(&Vec3<T>, &Vec3<T>, &Vec3<T>, &Vec3<T>) -> EnergyGradient<T>,
{
    fn energy(&self, u_d: &Vec3<T>, v_d: &Vec3<T>, u: &Vec3<T>, v: &Vec3<T>) -> T {
        (self.value)(u_d, v_d, u, v)
    }

    fn gradient(&self, u_d: &Vec3<T>, v_d: &Vec3<T>, u: &Vec3<T>, v: &Vec3<T>) -> EnergyGradient<T> {
        (self.gradient)(u_d, v_d, u, v)
    }
}

fn spd_tolerance<T: Real>() -> (T, T) {
    let sym = T::lit(1e-12).max(T::epsilon() * T::lit(10.0));
    let eig = T::lit(1e-10).max(T::epsilon() * T::lit(10.0));
    (sym, eig)
}

/// A symmetric positive-definite 3×3 tensor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpdTensor<T>(Mat3<T>);

impl<T: Real> SpdTensor<T> {
    pub fn new(name: &'static str, m: Mat3<T>) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::NotPositiveDefinite {
                name,
                detail: "non-finite entries".into(),
            });
        }
        let (sym_tol, eig_tol) = spd_tolerance::<T>();
        let defect = m.symmetry_defect();
        if defect > sym_tol * T::one().max(m.max_abs()) {
            return Err(Error::NotPositiveDefinite {
                name,
                detail: format!("asymmetry {defect:e}"),
            });
        }
        let (vals, _) = m.symmetric_eigen();
        if !(vals[0] > eig_tol) {
            return Err(Error::NotPositiveDefinite {
                name,
                detail: format!("smallest eigenvalue {:e}", vals[0]),
            });
        }
        Ok(Self(m))
    }

    pub fn identity() -> Self {
        Self(Mat3::identity())
    }

    pub fn scalar(c: T) -> Result<Self> {
        Self::new("scalar", Mat3::identity().scale(c))
    }

    pub fn matrix(&self) -> &Mat3<T> {
        &self.0
    }

    pub fn apply(&self, x: &Vec3<T>) -> Vec3<T> {
        self.0.mul_vec(x)
    }

    pub fn quadratic(&self, x: &Vec3<T>) -> T {
        self.0.quadratic(x)
    }

    /// `S⁻¹ b`.
    pub fn solve(&self, b: &Vec3<T>) -> Result<Vec3<T>> {
        self.0.solve_spd(b).ok_or(Error::Singular("SPD solve"))
    }

    /// `S^{-1/2}`.
    pub fn inv_sqrt(&self) -> Mat3<T> {
        self.0.spd_power(-T::half())
    }

    /// `|S^{-1/2} a|²`, evaluated as `a · S⁻¹ a`.
    pub fn inverse_norm_squared(&self, a: &Vec3<T>) -> Result<T> {
        Ok(a.dot(&self.solve(a)?))
    }

    pub fn eigenvalues(&self) -> Vec3<T> {
        self.0.symmetric_eigen().0
    }
}

/// The four tensors weighting the total dissipation rate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DissipationTensors<T> {
    pub m: SpdTensor<T>,
    pub n: SpdTensor<T>,
    pub m_d: SpdTensor<T>,
    pub n_d: SpdTensor<T>,
}

impl<T: Real> DissipationTensors<T> {
    pub fn new(m: Mat3<T>, n: Mat3<T>, m_d: Mat3<T>, n_d: Mat3<T>) -> Result<Self> {
        Ok(Self {
            m: SpdTensor::new("M", m)?,
            n: SpdTensor::new("N", n)?,
            m_d: SpdTensor::new("M_d", m_d)?,
            n_d: SpdTensor::new("N_d", n_d)?,
        })
    }

    pub fn identity() -> Self {
        Self {
            m: SpdTensor::identity(),
            n: SpdTensor::identity(),
            m_d: SpdTensor::identity(),
            n_d: SpdTensor::identity(),
        }
    }

    pub fn diagonal(m: Vec3<T>, n: Vec3<T>, m_d: Vec3<T>, n_d: Vec3<T>) -> Result<Self> {
        Self::new(Mat3::diagonal(&m), Mat3::diagonal(&n), Mat3::diagonal(&m_d), Mat3::diagonal(&n_d))
    }
}

/// Energy together with dissipation tensors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaterialModel<T, E = QuadraticEnergy<T>> {
    pub energy: E,
    pub tensors: DissipationTensors<T>,
}

impl<T: Real, E: HelmholtzEnergy<T>> MaterialModel<T, E> {
    pub fn new(energy: E, tensors: DissipationTensors<T>) -> Self {
        Self { energy, tensors }
    }
}

/// Which space the natural-configuration rates live in: one rate per material
/// point, or a single rate shared by the whole rod.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NaturalVariant {
    Local,
    Uniform,
}

/// Point states sampled on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct StateField<T> {
    grid: RodGrid<T>,
    states: Vec<PointState<T>>,
}

impl<T: Real> StateField<T> {
    pub fn new(grid: RodGrid<T>, states: Vec<PointState<T>>) -> Result<Self> {
        if states.len() != grid.nodes() {
            return Err(Error::Precondition(format!(
                "{} states supplied for a grid of {} nodes",
                states.len(),
                grid.nodes()
            )));
        }
        Ok(Self { grid, states })
    }

    pub fn grid(&self) -> &RodGrid<T> {
        &self.grid
    }

    pub fn states(&self) -> &[PointState<T>] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `true` when `u_d` and `v_d` agree at every node within `tol`.
    pub fn natural_state_is_uniform(&self, tol: T) -> bool {
        let first = &self.states[0].natural;
        self.states.iter().all(|s| {
            (s.natural.u_d() - first.u_d()).max_abs() <= tol && (s.natural.v_d() - first.v_d()).max_abs() <= tol
        })
    }

    /// Trapezoid rule for a per-node vector quantity.
    pub fn integrate_vec<F: Fn(&PointState<T>) -> Vec3<T>>(&self, f: F) -> Vec3<T> {
        let mut acc = Vec3::zeros();
        for (w, s) in self.grid.weights().iter().zip(&self.states) {
            acc += f(s).scale(*w);
        }
        acc
    }

    /// Rod-averaged natural-strain gradients `(1/L)∫∂_{𝗎_d}ψ ds`, `(1/L)∫∂_{𝗏_d}ψ ds`.
    pub fn mean_natural_gradients<E: HelmholtzEnergy<T>>(&self, energy: &E) -> (Vec3<T>, Vec3<T>) {
        let inv_l = T::one() / self.grid.length();
        let mut gu = Vec3::zeros();
        let mut gv = Vec3::zeros();
        for (w, s) in self.grid.weights().iter().zip(&self.states) {
            let g = energy.gradient_at(s);
            gu += g.u_d.scale(*w);
            gv += g.v_d.scale(*w);
        }
        (gu.scale(inv_l), gv.scale(inv_l))
    }
}

/// Samples random natural states, places the current strains on them, and
/// checks that `∂_𝗎ψ` and `∂_𝗏ψ` vanish to `1e-10`.
pub fn natural_state_check<T: Real, E: HelmholtzEnergy<T>>(energy: &E, seed: u64, samples: usize) -> bool {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tol = T::lit(1e-10);
    let mut draw = |lo: f64, hi: f64| T::lit(rng.gen_range(lo..hi));
    for _ in 0..samples {
        let u_d = Vec3::new(draw(-1.0, 1.0), draw(-1.0, 1.0), draw(-1.0, 1.0));
        let v_d = Vec3::new(draw(-0.5, 0.5), draw(-0.5, 0.5), draw(0.5, 1.5));
        let g = energy.gradient(&u_d, &v_d, &u_d, &v_d);
        if !(g.u.max_abs() <= tol && g.v.max_abs() <= tol) {
            return false;
        }
    }
    true
}

/// Largest relative discrepancy between analytic gradients and central finite
/// differences at one point. Components are compared with a floor of one on
/// the denominator so that vanishing entries are judged absolutely.
pub fn gradient_check<E: HelmholtzEnergy<f64>>(
    energy: &E,
    u_d: &Vec3<f64>,
    v_d: &Vec3<f64>,
    u: &Vec3<f64>,
    v: &Vec3<f64>,
    step: f64,
) -> f64 {
    let pack = |x: &[f64]| {
        (
            Vec3::new(x[0], x[1], x[2]),
            Vec3::new(x[3], x[4], x[5]),
            Vec3::new(x[6], x[7], x[8]),
            Vec3::new(x[9], x[10], x[11]),
        )
    };
    let mut x = Vec::with_capacity(12);
    for w in [u_d, v_d, u, v] {
        x.extend_from_slice(&w.0);
    }
    let f = |y: &[f64]| {
        let (a, b, c, d) = pack(y);
        energy.energy(&a, &b, &c, &d)
    };
    let numeric = finite_difference_gradient(f, &x, step);
    let g = energy.gradient(u_d, v_d, u, v);
    let analytic: Vec<f64> = [g.u_d, g.v_d, g.u, g.v].iter().flat_map(|w| w.0).collect();
    numeric
        .iter()
        .zip(&analytic)
        .map(|(n, a)| (n - a).abs() / a.abs().max(1.0))
        .fold(0.0, f64::max)
}

/// Local integrand `𝗎̇·𝖬𝗎̇ + 𝗏̇·𝖭𝗏̇ + 𝗎̇_d·𝖬_d𝗎̇_d + 𝗏̇_d·𝖭_d𝗏̇_d`.
pub fn dissipation_density<T: Real>(tensors: &DissipationTensors<T>, rates: &StrainRates<T>) -> T {
    tensors.m.quadratic(&rates.u)
        + tensors.n.quadratic(&rates.v)
        + tensors.m_d.quadratic(&rates.u_d)
        + tensors.n_d.quadratic(&rates.v_d)
}

/// Pointwise dissipation `ξ` at node `node`.
///
/// For [`NaturalVariant::Local`] the natural rates in `rates` are used as
/// given. For [`NaturalVariant::Uniform`] they are ignored: the natural terms
/// are `∂_{𝗎_d}ψ(s)·𝖬_d⁻¹ ḡ_u + ∂_{𝗏_d}ψ(s)·𝖭_d⁻¹ ḡ_v`, with `ḡ` the rod averages of
/// the gradients, which requires the whole field.
pub fn pointwise_dissipation<T: Real, E: HelmholtzEnergy<T>>(
    energy: &E,
    tensors: &DissipationTensors<T>,
    state: &PointState<T>,
    rates: &StrainRates<T>,
    variant: NaturalVariant,
    field: Option<&StateField<T>>,
) -> Result<T> {
    match variant {
        NaturalVariant::Local => Ok(dissipation_density(tensors, rates)),
        NaturalVariant::Uniform => {
            let field = field.ok_or(Error::MissingContext("uniform variant needs the state field"))?;
            let (gu, gv) = field.mean_natural_gradients(energy);
            let g = energy.gradient_at(state);
            Ok(tensors.m.quadratic(&rates.u)
                + tensors.n.quadratic(&rates.v)
                + g.u_d.dot(&tensors.m_d.solve(&gu)?)
                + g.v_d.dot(&tensors.n_d.solve(&gv)?))
        }
    }
}

/// [`pointwise_dissipation`] at every node of a field, with one rate sample
/// per node.
pub fn dissipation_profile<T: Real, E: HelmholtzEnergy<T>>(
    energy: &E,
    tensors: &DissipationTensors<T>,
    field: &StateField<T>,
    rates: &[StrainRates<T>],
    variant: NaturalVariant,
) -> Result<Vec<T>> {
    if rates.len() != field.len() {
        return Err(Error::Precondition("rate count does not match state count".into()));
    }
    field
        .states()
        .iter()
        .zip(rates)
        .map(|(s, r)| pointwise_dissipation(energy, tensors, s, r, variant, Some(field)))
        .collect()
}

/// Trapezoid quadrature of the dissipation density over the grid. For the
/// uniform variant the natural rates must be identical at every node.
pub fn total_dissipation<T: Real>(
    tensors: &DissipationTensors<T>,
    grid: &RodGrid<T>,
    rates: &[StrainRates<T>],
    variant: NaturalVariant,
) -> Result<T> {
    if rates.len() != grid.nodes() {
        return Err(Error::Precondition(format!(
            "{} rate samples for a grid of {} nodes",
            rates.len(),
            grid.nodes()
        )));
    }
    if variant == NaturalVariant::Uniform {
        let tol = T::lit(1e-10);
        let first = rates[0];
        if rates
            .iter()
            .any(|r| (r.u_d - first.u_d).max_abs() > tol || (r.v_d - first.v_d).max_abs() > tol)
        {
            return Err(Error::Precondition("uniform variant requires a single natural rate".into()));
        }
    }
    let density: Vec<T> = rates.iter().map(|r| dissipation_density(tensors, r)).collect();
    Ok(grid.integrate(&density))
}

/// Convenience for building point states in tests and examples.
pub fn point_state<T: Real>(u_d: Vec3<T>, v_d: Vec3<T>, u: Vec3<T>, v: Vec3<T>) -> Result<PointState<T>> {
    Ok(PointState::new(NaturalState::new(u_d, v_d)?, StrainState::new(u, v)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: f64, y: f64, z: f64) -> Vec3<f64> {
        Vec3::new(x, y, z)
    }

    fn sample_energy() -> QuadraticEnergy<f64> {
        QuadraticEnergy::new(v(1.0, 1.5, 2.0), v(3.0, 2.5, 4.0), v(0.5, 0.7, 1.1), v(0.9, 1.3, 0.6)).unwrap()
    }

    #[test]
    fn minimum_is_zero() {
        let e = sample_energy();
        assert_eq!(e.energy(&Vec3::zeros(), &Vec3::unit(2), &Vec3::zeros(), &Vec3::unit(2)), 0.0);
    }

    #[test]
    fn single_torsion_term() {
        let e = QuadraticEnergy::new(v(1.0, 1.0, 2.0), v(1.0, 1.0, 1.0), v(1.0, 1.0, 1.0), v(1.0, 1.0, 1.0)).unwrap();
        let psi = e.energy(&Vec3::zeros(), &Vec3::unit(2), &Vec3::unit(2), &Vec3::unit(2));
        assert_eq!(psi, 1.0);
        let g = e.gradient(&Vec3::zeros(), &Vec3::unit(2), &Vec3::unit(2), &Vec3::unit(2));
        assert_eq!(g.u[2], 2.0);
    }

    #[test]
    fn rejects_nonpositive_coefficients() {
        assert!(QuadraticEnergy::new(v(1.0, 0.0, 1.0), v(1.0, 1.0, 1.0), v(1.0, 1.0, 1.0), v(1.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn spd_validation() {
        assert!(SpdTensor::new("X", Mat3::diagonal(&v(1.0, 2.0, 3.0))).is_ok());
        assert!(SpdTensor::new("X", Mat3::diagonal(&v(1.0, -2.0, 3.0))).is_err());
        let mut asym = Mat3::<f64>::identity();
        asym.0[0][1] = 1e-6;
        assert!(SpdTensor::new("X", asym).is_err());
    }

    #[test]
    fn inverse_square_root_squares_to_inverse() {
        let m = Mat3([[4.0, 1.0, 0.5], [1.0, 3.0, 0.2], [0.5, 0.2, 2.0]]);
        let t = SpdTensor::new("M", m).unwrap();
        let r = t.inv_sqrt();
        let prod = r * r * m;
        assert!((prod - Mat3::identity()).max_abs() < 1e-13);
    }

    #[test]
    fn natural_check_distinguishes() {
        assert!(natural_state_check(&sample_energy(), 1, 50));
        let linear = FnEnergy::new(
            |_: &Vec3<f64>, _: &Vec3<f64>, u: &Vec3<f64>, _: &Vec3<f64>| u[2],
            |_: &Vec3<f64>, _: &Vec3<f64>, _: &Vec3<f64>, _: &Vec3<f64>| EnergyGradient {
                u_d: Vec3::zeros(),
                v_d: Vec3::zeros(),
                u: Vec3::unit(2),
                v: Vec3::zeros(),
            },
        );
        assert!(!natural_state_check(&linear, 1, 5));
    }

    #[test]
    fn zero_rates_dissipate_nothing() {
        let t = DissipationTensors::<f64>::identity();
        assert_eq!(dissipation_density(&t, &StrainRates::zeros()), 0.0);
        let grid = RodGrid::new(2.5, 9).unwrap();
        let total = total_dissipation(&t, &grid, &vec![StrainRates::zeros(); 9], NaturalVariant::Local).unwrap();
        assert_eq!(total, 0.0);
    }

    #[test]
    fn constant_unit_rates_give_four_l() {
        let t = DissipationTensors::<f64>::identity();
        let l = 2.5;
        let grid = RodGrid::new(l, 9).unwrap();
        let e3 = Vec3::unit(2);
        let r = StrainRates { u_d: e3, v_d: e3, u: e3, v: e3 };
        for variant in [NaturalVariant::Local, NaturalVariant::Uniform] {
            let total = total_dissipation(&t, &grid, &vec![r; 9], variant).unwrap();
            assert!((total - 4.0 * l).abs() < 1e-13);
        }
    }

    #[test]
    fn uniform_total_rejects_varying_natural_rates() {
        let t = DissipationTensors::<f64>::identity();
        let grid = RodGrid::unit(3).unwrap();
        let mut rates = vec![StrainRates::zeros(); 3];
        rates[1].u_d = Vec3::unit(0);
        assert!(total_dissipation(&t, &grid, &rates, NaturalVariant::Uniform).is_err());
    }

    #[test]
    fn uniform_profile_integrates_to_nonnegative_total() {
        // ∫ξ = |M_d^{-1/2} ∫∂_{u_d}ψ|² / L for zero current rates.
        let e = sample_energy();
        let t = DissipationTensors::identity();
        let grid = RodGrid::new(2.0, 21).unwrap();
        let states = grid
            .positions()
            .iter()
            .map(|s| point_state(Vec3::zeros(), Vec3::unit(2), Vec3::new(0.0, 0.0, 1.0 - 1.5 * s), Vec3::unit(2)).unwrap())
            .collect();
        let field = StateField::new(grid, states).unwrap();
        let xi = dissipation_profile(&e, &t, &field, &vec![StrainRates::zeros(); 21], NaturalVariant::Uniform).unwrap();
        assert!(xi[0] < 0.0 && xi[20] > 0.0);
        let total = grid.integrate(&xi);
        let (gu, _) = field.mean_natural_gradients(&e);
        assert!((total - 2.0 * gu.norm_squared()).abs() < 1e-12);
    }

    #[test]
    fn uniform_pointwise_needs_field() {
        let e = sample_energy();
        let t = DissipationTensors::identity();
        let s = point_state(Vec3::zeros(), Vec3::unit(2), Vec3::zeros(), Vec3::unit(2)).unwrap();
        let res = pointwise_dissipation(&e, &t, &s, &StrainRates::zeros(), NaturalVariant::Uniform, None);
        assert!(matches!(res, Err(Error::MissingContext(_))));
    }
}
