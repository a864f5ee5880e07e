#![allow(dead_code)]

use evorod::energetics::{point_state, DissipationTensors, QuadraticEnergy};
use evorod::kinematics::{DirectorFrame, NaturalState, PointState};
use evorod::linalg::{Mat3, Vec3};
use evorod::torsion::TorsionParams;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

pub fn vec3(rng: &mut ChaCha8Rng, r: f64) -> Vec3<f64> {
    Vec3::new(rng.gen_range(-r..r), rng.gen_range(-r..r), rng.gen_range(-r..r))
}

pub fn frame(rng: &mut ChaCha8Rng) -> DirectorFrame<f64> {
    DirectorFrame::from_rotation_vector(&vec3(rng, 3.0))
}

/// `Q diag(λ) Qᵀ` with eigenvalues spread over at most `cond`.
pub fn spd(rng: &mut ChaCha8Rng, cond: f64) -> Mat3<f64> {
    let q = *frame(rng).matrix();
    let base = log_uniform(rng, 0.1, 10.0);
    let lam = Vec3::new(
        base,
        base * log_uniform(rng, 1.0, cond),
        base * log_uniform(rng, 1.0, cond),
    );
    let m = q * Mat3::diagonal(&lam) * q.transpose();
    // exact symmetry
    (m + m.transpose()).scale(0.5)
}

pub fn tensors(rng: &mut ChaCha8Rng, cond: f64) -> DissipationTensors<f64> {
    DissipationTensors::new(spd(rng, cond), spd(rng, cond), spd(rng, cond), spd(rng, cond)).unwrap()
}

pub fn positive3(rng: &mut ChaCha8Rng) -> Vec3<f64> {
    Vec3::new(log_uniform(rng, 0.3, 5.0), log_uniform(rng, 0.3, 5.0), log_uniform(rng, 0.3, 5.0))
}

pub fn energy(rng: &mut ChaCha8Rng) -> QuadraticEnergy<f64> {
    QuadraticEnergy::new(positive3(rng), positive3(rng), positive3(rng), positive3(rng)).unwrap()
}

/// Strains with a positive axial stretch.
pub fn stretch(rng: &mut ChaCha8Rng) -> Vec3<f64> {
    Vec3::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5), rng.gen_range(0.3..1.7))
}

pub fn state(rng: &mut ChaCha8Rng) -> PointState<f64> {
    point_state(vec3(rng, 1.0), stretch(rng), vec3(rng, 1.0), stretch(rng)).unwrap()
}

pub fn state_with_natural(rng: &mut ChaCha8Rng, natural: NaturalState<f64>) -> PointState<f64> {
    point_state(natural.u_d(), natural.v_d(), vec3(rng, 1.0), stretch(rng)).unwrap()
}

/// Valid torsion parameters with `μ > 0`.
pub fn torsion_params(rng: &mut ChaCha8Rng) -> TorsionParams<f64> {
    TorsionParams::quasistatic(
        log_uniform(rng, 0.1, 5.0),
        log_uniform(rng, 0.1, 5.0),
        log_uniform(rng, 0.1, 5.0),
        log_uniform(rng, 0.1, 5.0),
    )
    .unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}
