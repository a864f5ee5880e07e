//! Director frames, strain components, the elastic/dissipative split of a
//! configuration relative to its natural configuration, and observer changes.
//!
//! Strain vectors are stored by their director components: `u = u_k d_k`
//! is kept as `(u_1, u_2, u_3)`. World vectors appear only in
//! [`WorldConfiguration`], which exists to express changes of frame.

use crate::error::{Error, Result};
use crate::linalg::{Mat3, Vec3};
use crate::scalar::Real;

/// Orthonormality/determinant tolerance used when validating frames.
pub fn frame_tolerance<T: Real>() -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(1e3))
}

/// A proper rotation `R` with directors `d_k = R e_k` as its columns.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DirectorFrame<T>(Mat3<T>);

impl<T: Real> DirectorFrame<T> {
    /// Validates `RᵀR = I` and `det R = +1`.
    pub fn new(r: Mat3<T>) -> Result<Self> {
        let frame = Self(r);
        frame.validate()?;
        Ok(frame)
    }

    /// Wraps a matrix without validation; the caller guarantees it is a
    /// rotation up to round-off.
    pub fn new_unchecked(r: Mat3<T>) -> Self {
        Self(r)
    }

    pub fn identity() -> Self {
        Self(Mat3::identity())
    }

    /// Rotation `exp([a]×)`, i.e. by angle `|a|` about `a`.
    pub fn from_rotation_vector(a: &Vec3<T>) -> Self {
        Self(Mat3::exp_so3(a))
    }

    pub fn from_axis_angle(axis: &Vec3<T>, angle: T) -> Self {
        let n = axis.norm();
        Self::from_rotation_vector(&axis.scale(angle / n))
    }

    pub fn matrix(&self) -> &Mat3<T> {
        &self.0
    }

    /// Director `d_k` (zero based).
    pub fn director(&self, k: usize) -> Vec3<T> {
        self.0.col(k)
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self(self.0 * other.0)
    }

    /// World vector from director components.
    pub fn to_world(&self, components: &Vec3<T>) -> Vec3<T> {
        self.0.mul_vec(components)
    }

    /// Director components of a world vector.
    pub fn to_components(&self, world: &Vec3<T>) -> Vec3<T> {
        self.0.transpose().mul_vec(world)
    }

    /// `‖RᵀR − I‖∞`.
    pub fn orthonormality_defect(&self) -> T {
        (self.0.transpose() * self.0 - Mat3::identity()).max_abs()
    }

    pub fn validate(&self) -> Result<()> {
        if !self.0.is_finite() {
            return Err(Error::InvalidFrame("non-finite entries".into()));
        }
        let tol = frame_tolerance::<T>();
        let defect = self.orthonormality_defect();
        if defect > tol {
            return Err(Error::InvalidFrame(format!("|RᵀR - I| = {defect:e}")));
        }
        let det = self.0.det();
        if (det - T::one()).abs() > tol {
            return Err(Error::InvalidFrame(format!("det R = {det}")));
        }
        Ok(())
    }

    /// Gram–Schmidt re-orthonormalization of the columns. Never applied
    /// implicitly by any other routine.
    pub fn renormalize(&self) -> Self {
        let c0 = self.0.col(0);
        let d1 = c0.scale(T::one() / c0.norm());
        let c1 = self.0.col(1);
        let c1 = c1 - d1.scale(d1.dot(&c1));
        let d2 = c1.scale(T::one() / c1.norm());
        let d3 = d1.cross(&d2);
        Self(Mat3::from_cols(d1, d2, d3))
    }
}

fn check_orientation<T: Real>(v3: T) -> Result<()> {
    if v3 > T::zero() && v3.is_finite() {
        Ok(())
    } else {
        Err(Error::Orientation { v3: v3.to_f64_lossy() })
    }
}

/// Director components of the current strains: `u` (flexure/torsion) and
/// `v` (shear/dilation), with `v_3 > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrainState<T> {
    u: Vec3<T>,
    v: Vec3<T>,
}

impl<T: Real> StrainState<T> {
    pub fn new(u: Vec3<T>, v: Vec3<T>) -> Result<Self> {
        check_orientation(v[2])?;
        Ok(Self { u, v })
    }

    /// Straight, untwisted, unstretched state: `u = 0`, `v = e_3`.
    pub fn reference() -> Self {
        Self {
            u: Vec3::zeros(),
            v: Vec3::unit(2),
        }
    }

    pub fn u(&self) -> Vec3<T> {
        self.u
    }

    pub fn v(&self) -> Vec3<T> {
        self.v
    }
}

/// Director components of the natural strains, optionally with the natural
/// frame `R_d` when full frames are tracked.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NaturalState<T> {
    u_d: Vec3<T>,
    v_d: Vec3<T>,
    frame: Option<DirectorFrame<T>>,
}

impl<T: Real> NaturalState<T> {
    pub fn new(u_d: Vec3<T>, v_d: Vec3<T>) -> Result<Self> {
        check_orientation(v_d[2])?;
        Ok(Self { u_d, v_d, frame: None })
    }

    pub fn reference() -> Self {
        Self {
            u_d: Vec3::zeros(),
            v_d: Vec3::unit(2),
            frame: None,
        }
    }

    pub fn with_frame(mut self, frame: DirectorFrame<T>) -> Self {
        self.frame = Some(frame);
        self
    }

    pub fn u_d(&self) -> Vec3<T> {
        self.u_d
    }

    pub fn v_d(&self) -> Vec3<T> {
        self.v_d
    }

    pub fn frame(&self) -> Option<&DirectorFrame<T>> {
        self.frame.as_ref()
    }
}

/// Current and natural strain components at one material point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointState<T> {
    pub natural: NaturalState<T>,
    pub current: StrainState<T>,
}

impl<T: Real> PointState<T> {
    pub fn new(natural: NaturalState<T>, current: StrainState<T>) -> Self {
        Self { natural, current }
    }
}

/// Rates of the four strain-component vectors.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct StrainRates<T> {
    pub u_d: Vec3<T>,
    pub v_d: Vec3<T>,
    pub u: Vec3<T>,
    pub v: Vec3<T>,
}

impl<T: Real> StrainRates<T> {
    pub fn zeros() -> Self {
        Self {
            u_d: Vec3::zeros(),
            v_d: Vec3::zeros(),
            u: Vec3::zeros(),
            v: Vec3::zeros(),
        }
    }
}

/// `R_e = R R_dᵀ`, `u_e = u − R_e u_d`, `v_e = v − R_e v_d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElasticDecomposition<T> {
    pub r_e: DirectorFrame<T>,
    /// World vectors.
    pub u_e: Vec3<T>,
    pub v_e: Vec3<T>,
    /// Components in the current directors.
    pub u_e_components: Vec3<T>,
    pub v_e_components: Vec3<T>,
}

/// Splits the current configuration into its natural and elastic parts.
pub fn elastic_decompose<T: Real>(
    current: &StrainState<T>,
    current_frame: &DirectorFrame<T>,
    natural: &NaturalState<T>,
) -> Result<ElasticDecomposition<T>> {
    current_frame.validate()?;
    let natural_frame = natural
        .frame()
        .ok_or(Error::MissingContext("natural state carries no frame R_d"))?;
    natural_frame.validate()?;

    let r_e = current_frame.compose(&natural_frame.transpose());
    let u_world = current_frame.to_world(&current.u());
    let v_world = current_frame.to_world(&current.v());
    let u_d_world = natural_frame.to_world(&natural.u_d());
    let v_d_world = natural_frame.to_world(&natural.v_d());
    let u_e = u_world - r_e.to_world(&u_d_world);
    let v_e = v_world - r_e.to_world(&v_d_world);
    Ok(ElasticDecomposition {
        r_e,
        u_e,
        v_e,
        u_e_components: current_frame.to_components(&u_e),
        v_e_components: current_frame.to_components(&v_e),
    })
}

/// A configuration pair in world representation; the subject of observer
/// changes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WorldConfiguration<T> {
    pub frame: DirectorFrame<T>,
    pub u: Vec3<T>,
    pub v: Vec3<T>,
    pub natural_frame: DirectorFrame<T>,
    pub u_d: Vec3<T>,
    pub v_d: Vec3<T>,
}

impl<T: Real> WorldConfiguration<T> {
    pub fn from_components(
        current: &StrainState<T>,
        frame: &DirectorFrame<T>,
        natural: &NaturalState<T>,
    ) -> Result<Self> {
        let natural_frame = *natural
            .frame()
            .ok_or(Error::MissingContext("natural state carries no frame R_d"))?;
        Ok(Self {
            frame: *frame,
            u: frame.to_world(&current.u()),
            v: frame.to_world(&current.v()),
            natural_frame,
            u_d: natural_frame.to_world(&natural.u_d()),
            v_d: natural_frame.to_world(&natural.v_d()),
        })
    }

    /// `R_e = R R_dᵀ`.
    pub fn elastic_rotation(&self) -> DirectorFrame<T> {
        self.frame.compose(&self.natural_frame.transpose())
    }

    /// Frame-indifferent components `(𝗎_d, 𝗏_d, 𝗎, 𝗏)`, computed as
    /// `Rᵀ(R_e u_d)`, `Rᵀ(R_e v_d)`, `Rᵀu`, `Rᵀv`.
    pub fn components(&self) -> Result<PointState<T>> {
        let r_e = self.elastic_rotation();
        let u_d = self.frame.to_components(&r_e.to_world(&self.u_d));
        let v_d = self.frame.to_components(&r_e.to_world(&self.v_d));
        let u = self.frame.to_components(&self.u);
        let v = self.frame.to_components(&self.v);
        Ok(PointState::new(
            NaturalState::new(u_d, v_d)?.with_frame(self.natural_frame),
            StrainState::new(u, v)?,
        ))
    }
}

/// Applies the observer change `Q`: every world vector and frame is
/// premultiplied by `Q`.
pub fn apply_frame_change<T: Real>(q: &DirectorFrame<T>, pair: &WorldConfiguration<T>) -> WorldConfiguration<T> {
    WorldConfiguration {
        frame: q.compose(&pair.frame),
        u: q.to_world(&pair.u),
        v: q.to_world(&pair.v),
        natural_frame: q.compose(&pair.natural_frame),
        u_d: q.to_world(&pair.u_d),
        v_d: q.to_world(&pair.v_d),
    }
}

/// First derivative of nodal samples: central differences inside,
/// second-order one-sided stencils at both ends.
pub(crate) fn differentiate<T: Real, V>(samples: &[V], h: T) -> Vec<V>
where
    V: Copy + std::ops::Sub<Output = V> + std::ops::Add<Output = V> + std::ops::Mul<T, Output = V>,
{
    let n = samples.len();
    let inv2h = T::one() / (T::two() * h);
    let three = T::lit(3.0);
    let four = T::lit(4.0);
    (0..n)
        .map(|i| {
            if i == 0 {
                (samples[1] * four - samples[0] * three - samples[2]) * inv2h
            } else if i == n - 1 {
                (samples[n - 1] * three - samples[n - 2] * four + samples[n - 3]) * inv2h
            } else {
                (samples[i + 1] - samples[i - 1]) * inv2h
            }
        })
        .collect()
}

/// Darboux components `u_k = (½ d_j × ∂_s d_j)·d_k` of a sampled frame field.
pub fn darboux_of_rotation_field<T: Real>(frames: &[DirectorFrame<T>], spacing: T) -> Result<Vec<Vec3<T>>> {
    if frames.len() < 3 {
        return Err(Error::InsufficientGrid {
            nodes: frames.len(),
            required: 3,
        });
    }
    for f in frames {
        f.validate()?;
    }
    let mut derivs: [Vec<Vec3<T>>; 3] = Default::default();
    for (k, d) in derivs.iter_mut().enumerate() {
        let directors: Vec<Vec3<T>> = frames.iter().map(|f| f.director(k)).collect();
        *d = differentiate(&directors, spacing);
    }
    Ok(frames
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let mut u = Vec3::zeros();
            for (k, d) in derivs.iter().enumerate() {
                u += f.director(k).cross(&d[i]);
            }
            f.to_components(&u.scale(T::half()))
        })
        .collect())
}

/// Integrates `∂_s R = R [𝗎]×` from `R(0) = r0`, holding the Darboux
/// components at the interval average on each step and using the exact
/// exponential there.
pub fn rotation_field_of_darboux<T: Real>(
    u: &[Vec3<T>],
    r0: &DirectorFrame<T>,
    spacing: T,
) -> Result<Vec<DirectorFrame<T>>> {
    r0.validate()?;
    if u.iter().any(|x| !x.is_finite()) {
        return Err(Error::Precondition("non-finite Darboux components".into()));
    }
    let mut out = Vec::with_capacity(u.len());
    let mut r = *r0;
    out.push(r);
    for w in u.windows(2) {
        let step = (w[0] + w[1]).scale(T::half() * spacing);
        r = r.compose(&DirectorFrame::from_rotation_vector(&step));
        out.push(r);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_frame(rng: &mut ChaCha8Rng) -> DirectorFrame<f64> {
        let a = Vec3::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        DirectorFrame::from_rotation_vector(&a)
    }

    fn random_vec(rng: &mut ChaCha8Rng) -> Vec3<f64> {
        Vec3::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
    }

    fn rot_field(axis: Vec3<f64>, c: f64, n: usize) -> (Vec<DirectorFrame<f64>>, f64) {
        let h = 1.0 / (n - 1) as f64;
        let frames = (0..n)
            .map(|i| DirectorFrame::from_axis_angle(&axis, c * i as f64 * h))
            .collect();
        (frames, h)
    }

    #[test]
    fn frame_validation() {
        assert!(DirectorFrame::new(Mat3::<f64>::identity()).is_ok());
        let mut bad = Mat3::<f64>::identity();
        bad.0[0][0] = 1.0 + 1e-9;
        assert!(matches!(DirectorFrame::new(bad), Err(Error::InvalidFrame(_))));
        let reflection = Mat3::diagonal(&Vec3::new(1.0, 1.0, -1.0f64));
        assert!(DirectorFrame::new(reflection).is_err());
    }

    #[test]
    fn renormalize_is_explicit() {
        let mut m = *DirectorFrame::from_rotation_vector(&Vec3::new(0.3, -0.2, 0.9f64)).matrix();
        m.0[1][2] += 1e-6;
        let skewed = DirectorFrame::new_unchecked(m);
        assert!(skewed.validate().is_err());
        assert!(skewed.renormalize().validate().is_ok());
    }

    #[test]
    fn orientation_constraint_rejected_not_clamped() {
        assert!(matches!(
            StrainState::new(Vec3::zeros(), Vec3::new(0.0, 0.0, 0.0f64)),
            Err(Error::Orientation { .. })
        ));
        assert!(NaturalState::new(Vec3::zeros(), Vec3::new(1.0, 0.0, -0.1f64)).is_err());
    }

    #[test]
    fn darboux_of_constant_frame_is_zero() {
        let frames = vec![DirectorFrame::<f64>::identity(); 5];
        let u = darboux_of_rotation_field(&frames, 0.25).unwrap();
        assert!(u.iter().all(|x| x.max_abs() == 0.0));
    }

    #[test]
    fn darboux_requires_three_nodes() {
        let frames = vec![DirectorFrame::<f64>::identity(); 2];
        assert_eq!(
            darboux_of_rotation_field(&frames, 1.0),
            Err(Error::InsufficientGrid { nodes: 2, required: 3 })
        );
    }

    #[test]
    fn darboux_of_uniform_twist_converges_quadratically() {
        // Oracle: R(s) = rot(axis, c s) has ∂_s R Rᵀ = c [axis]×, whose director
        // components are c·axis because the axis is fixed by the rotation.
        let c = 1.7;
        for (k, axis) in [(2usize, Vec3::unit(2)), (0, Vec3::unit(0))] {
            let mut errs = Vec::new();
            for n in [33, 65] {
                let (frames, h) = rot_field(axis, c, n);
                let u = darboux_of_rotation_field(&frames, h).unwrap();
                let err = u
                    .iter()
                    .skip(1)
                    .take(n - 2)
                    .map(|x| (x[k] - c).abs().max(x[(k + 1) % 3].abs()).max(x[(k + 2) % 3].abs()))
                    .fold(0.0, f64::max);
                errs.push(err);
            }
            assert!(errs[0] < 1e-3, "{errs:?}");
            let order = (errs[0] / errs[1]).log2();
            assert!(order > 1.9, "order {order}");
        }
    }

    #[test]
    fn reconstruction_of_uniform_twist_is_exact() {
        let n = 11;
        let h = 0.1;
        let c = 2.3;
        let u = vec![Vec3::new(0.0, 0.0, c); n];
        let frames = rotation_field_of_darboux(&u, &DirectorFrame::identity(), h).unwrap();
        for (i, f) in frames.iter().enumerate() {
            let expect = DirectorFrame::from_axis_angle(&Vec3::unit(2), c * h * i as f64);
            assert!((*f.matrix() - *expect.matrix()).max_abs() < 1e-13);
        }
        let zero = rotation_field_of_darboux(&[Vec3::zeros(); 4], &DirectorFrame::identity(), 0.5).unwrap();
        assert!(zero.iter().all(|f| *f == DirectorFrame::identity()));
    }

    #[test]
    fn long_compositions_stay_orthonormal() {
        let u: Vec<Vec3<f64>> = (0..10_001)
            .map(|i| {
                let s = i as f64 * 1e-3;
                Vec3::new((3.0 * s).sin(), (2.0 * s).cos(), 1.0 + s)
            })
            .collect();
        let frames = rotation_field_of_darboux(&u, &DirectorFrame::identity(), 1e-3).unwrap();
        let worst = frames.iter().map(|f| f.orthonormality_defect()).fold(0.0, f64::max);
        assert!(worst < 1e-10, "{worst}");
    }

    #[test]
    fn decomposition_at_rest_is_trivial() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = random_frame(&mut rng);
        let u = random_vec(&mut rng);
        let v = Vec3::new(0.1, -0.2, 1.3);
        let current = StrainState::new(u, v).unwrap();
        let natural = NaturalState::new(u, v).unwrap().with_frame(r);
        let dec = elastic_decompose(&current, &r, &natural).unwrap();
        assert!((*dec.r_e.matrix() - Mat3::identity()).max_abs() < 1e-14);
        assert!(dec.u_e.max_abs() < 1e-14 && dec.v_e.max_abs() < 1e-14);
    }

    #[test]
    fn decomposition_with_identity_natural_frame() {
        let theta = 0.8;
        let r = DirectorFrame::from_axis_angle(&Vec3::unit(2), theta);
        let natural = NaturalState::reference().with_frame(DirectorFrame::identity());
        let dec = elastic_decompose(&StrainState::reference(), &r, &natural).unwrap();
        assert!((*dec.r_e.matrix() - *r.matrix()).max_abs() < 1e-15);
    }

    #[test]
    fn decomposition_reconstructs_and_splits_additively() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let r = random_frame(&mut rng);
            let r_d = random_frame(&mut rng);
            let mut v = random_vec(&mut rng);
            v[2] = rng.gen_range(0.1..2.0);
            let mut v_d = random_vec(&mut rng);
            v_d[2] = rng.gen_range(0.1..2.0);
            let current = StrainState::new(random_vec(&mut rng), v).unwrap();
            let natural = NaturalState::new(random_vec(&mut rng), v_d).unwrap().with_frame(r_d);
            let dec = elastic_decompose(&current, &r, &natural).unwrap();
            // u = R_e u_d + u_e in world vectors
            let u_world = r.to_world(&current.u());
            let rebuilt = dec.r_e.to_world(&r_d.to_world(&natural.u_d())) + dec.u_e;
            assert!((u_world - rebuilt).max_abs() < 1e-12);
            let v_world = r.to_world(&current.v());
            let rebuilt = dec.r_e.to_world(&r_d.to_world(&natural.v_d())) + dec.v_e;
            assert!((v_world - rebuilt).max_abs() < 1e-12);
            // u_k = u_{d,k} + u_{e,k}
            assert!((current.u() - natural.u_d() - dec.u_e_components).max_abs() < 1e-12);
            assert!((current.v() - natural.v_d() - dec.v_e_components).max_abs() < 1e-12);
        }
    }

    #[test]
    fn decomposition_needs_natural_frame() {
        let r = DirectorFrame::<f64>::identity();
        let res = elastic_decompose(&StrainState::reference(), &r, &NaturalState::reference());
        assert!(matches!(res, Err(Error::MissingContext(_))));
    }

    #[test]
    fn frame_change_preserves_components() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let r = random_frame(&mut rng);
            let r_d = random_frame(&mut rng);
            let mut v = random_vec(&mut rng);
            v[2] = rng.gen_range(0.1..2.0);
            let mut v_d = random_vec(&mut rng);
            v_d[2] = rng.gen_range(0.1..2.0);
            let current = StrainState::new(random_vec(&mut rng), v).unwrap();
            let natural = NaturalState::new(random_vec(&mut rng), v_d).unwrap().with_frame(r_d);
            let pair = WorldConfiguration::from_components(&current, &r, &natural).unwrap();
            let q = random_frame(&mut rng);
            let moved = apply_frame_change(&q, &pair);

            let before = pair.components().unwrap();
            let after = moved.components().unwrap();
            assert!((before.current.u() - after.current.u()).max_abs() < 1e-12);
            assert!((before.current.v() - after.current.v()).max_abs() < 1e-12);
            assert!((before.natural.u_d() - after.natural.u_d()).max_abs() < 1e-12);
            assert!((before.natural.v_d() - after.natural.v_d()).max_abs() < 1e-12);
            // and they equal the original director components
            assert!((before.current.u() - current.u()).max_abs() < 1e-12);
            assert!((before.natural.u_d() - natural.u_d()).max_abs() < 1e-12);

            let expected_re = *q.matrix() * *pair.elastic_rotation().matrix() * q.matrix().transpose();
            assert!((*moved.elastic_rotation().matrix() - expected_re).max_abs() < 1e-12);
        }
    }

    #[test]
    fn identity_frame_change_is_identity() {
        let r = DirectorFrame::from_rotation_vector(&Vec3::new(0.2, 0.1, -0.4f64));
        let natural = NaturalState::reference().with_frame(DirectorFrame::identity());
        let pair = WorldConfiguration::from_components(&StrainState::reference(), &r, &natural).unwrap();
        assert_eq!(apply_frame_change(&DirectorFrame::identity(), &pair), pair);
    }
}
