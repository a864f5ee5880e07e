use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::oracle::matrix_exponential_2x2;
use crate::scalar::Real;

use super::input::{InputHistory, InputKind, Waveform};
use super::params::TorsionParams;

/// Subdivisions of a smoothed ramp used by the kernel recursions.
const RAMP_KNOTS: usize = 256;

/// A Dirac impulse `amplitude · δ(t − time)` carried beside a sampled trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Impulse<T> {
    pub time: T,
    pub amplitude: T,
}

/// Sampled quasi-static response. `m` holds the regular part of the torque;
/// any impulsive part lives in `impulse` and never in the samples.
#[derive(Clone, Debug, PartialEq)]
pub struct TorsionTrace<T> {
    pub times: Vec<T>,
    pub u: Vec<T>,
    pub u_d: Vec<T>,
    pub m: Vec<T>,
    pub impulse: Option<Impulse<T>>,
}

impl<T: Real> TorsionTrace<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// `count` equally spaced times from `0` to `t_end` inclusive.
pub fn sample_times<T: Real>(t_end: T, count: usize) -> Vec<T> {
    if count < 2 {
        return vec![T::zero()];
    }
    let n = T::from_usize(count - 1).unwrap();
    (0..count).map(|i| t_end * T::from_usize(i).unwrap() / n).collect()
}

fn check_times<T: Real>(times: &[T]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::Precondition("no sample times".into()));
    }
    if !(times[0] >= T::zero()) || times.iter().any(|t| !t.is_finite()) {
        return Err(Error::Precondition("sample times must be finite and nonnegative".into()));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Precondition("sample times must be nondecreasing".into()));
    }
    Ok(())
}

/// `(u̇, u̇_d)` of the quasi-static torsion system
/// `μu̇ = m − αu + αu_d`, `μ_d u̇_d = αu − (α+α_d)u_d`.
pub fn quasistatic_rhs<T: Real>(params: &TorsionParams<T>, u: T, u_d: T, m: T) -> Result<(T, T)> {
    if params.mu == T::zero() {
        return Err(Error::ViscosityZero);
    }
    let TorsionParams { mu, mu_d, alpha, alpha_d, .. } = *params;
    Ok(((m - alpha * u + alpha * u_d) / mu, (alpha * u - (alpha + alpha_d) * u_d) / mu_d))
}

/// Merged sorted knot sequence covering the sample times and the waveform's
/// non-smooth points, with the index of each sample inside it.
fn knots_for<T: Real>(times: &[T], waveform: &Waveform<T>) -> (Vec<T>, Vec<usize>) {
    let t_max = times[times.len() - 1];
    let mut knots: Vec<T> = times.to_vec();
    knots.push(T::zero());
    knots.extend(waveform.knots(RAMP_KNOTS).into_iter().filter(|&k| k <= t_max));
    knots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    knots.dedup();
    let index = times.iter().map(|t| knots.partition_point(|k| k < t)).collect();
    (knots, index)
}

/// Weights of the exact first-order-hold recursion for `İ = −λI + f`:
/// `I(t+h) = e^{−λh}I(t) + φ₁f(t) + φ₂[f(t+h) − f(t)]/h`.
fn hold_weights<T: Real>(lambda: T, h: T) -> (T, T, T) {
    let x = lambda * h;
    if x.abs() < T::lit(0.5) {
        // φ₁ = hΣ(−x)^k/(k+1)!, φ₂ = h²Σ(−x)^k/(k+2)!
        let (mut p1, mut p2) = (T::zero(), T::zero());
        let mut term = T::one();
        for k in 0..30 {
            let kk = T::from_usize(k).unwrap();
            term = if k == 0 { T::one() } else { term * (-x) / kk };
            p1 = p1 + term / (kk + T::one());
            p2 = p2 + term / ((kk + T::one()) * (kk + T::two()));
        }
        ((-x).exp(), h * p1, h * h * p2)
    } else {
        let p1 = -(-x).exp_m1() / lambda;
        ((-x).exp(), p1, (h - p1) / lambda)
    }
}

/// Matrix analogue of [`hold_weights`] for `ẋ = −Ax + b`.
fn hold_weights_2x2<T: Real>(a: &Mat2<T>, h: T) -> Result<(Mat2<T>, Mat2<T>, Mat2<T>)> {
    let e = matrix_exponential_2x2(a, h);
    let scale = a.max_abs() * T::two() * h;
    if scale < T::lit(0.5) {
        let mut term = Mat2::identity();
        let mut p1 = Mat2::zeros();
        let mut p2 = Mat2::zeros();
        let minus_ha = a.scale(-h);
        for k in 0..30 {
            let kk = T::from_usize(k).unwrap();
            if k > 0 {
                term = (term * minus_ha).scale(T::one() / kk);
            }
            p1 = p1 + term.scale(T::one() / (kk + T::one()));
            p2 = p2 + term.scale(T::one() / ((kk + T::one()) * (kk + T::two())));
        }
        Ok((e, p1.scale(h), p2.scale(h * h)))
    } else {
        let inv = a.try_inverse().ok_or(Error::Singular("creep matrix"))?;
        let p1 = inv * (Mat2::identity() - e);
        let p2 = inv * (Mat2::identity().scale(h) - p1);
        Ok((e, p1, p2))
    }
}

/// Convolution `(c/…)∫₀ᵗ e^{−λ(t−τ)} f(τ) dτ` sampled at `times`, with `f`
/// interpolated linearly between knots.
fn kernel_convolution<T: Real, F: Fn(T) -> T>(lambda: T, f: F, times: &[T], waveform: &Waveform<T>) -> Vec<T> {
    let (knots, index) = knots_for(times, waveform);
    let mut values = Vec::with_capacity(knots.len());
    let mut acc = T::zero();
    values.push(acc);
    for w in knots.windows(2) {
        let h = w[1] - w[0];
        let (e, p1, p2) = hold_weights(lambda, h);
        // right limit at the left knot, left limit at the right knot
        let f0 = f(w[0]);
        let f1 = f(w[1]);
        acc = e * acc + p1 * f0 + p2 * (f1 - f0) / h;
        values.push(acc);
    }
    index.iter().map(|&i| values[i]).collect()
}

/// Torque needed to impose a twist history, `m = μu̇ + αu − αu_d` with
/// `u_d = (α/μ_d)∫₀ᵗ e^{−(α+α_d)(t−τ)/μ_d} u(τ) dτ`.
///
/// An ideal step `u₀H(t)` is evaluated in closed form; its impulsive torque
/// `μu₀δ(t)` is returned in [`TorsionTrace::impulse`].
pub fn relaxation_response<T: Real>(
    params: &TorsionParams<T>,
    history: &InputHistory<T>,
    times: &[T],
) -> Result<TorsionTrace<T>> {
    history.expect(InputKind::PrescribedTwist)?;
    check_times(times)?;
    let TorsionParams { mu, mu_d, alpha, alpha_d, .. } = *params;
    let lambda = params.relaxation_rate();
    let u: Vec<T> = times.iter().map(|&t| history.value(t)).collect();
    let (u_d, impulse) = match history.waveform {
        Waveform::Step { amplitude } => {
            let plateau = alpha * amplitude / (alpha + alpha_d);
            let u_d = times.iter().map(|&t| -plateau * (-lambda * t).exp_m1()).collect();
            let impulse = (mu != T::zero() && amplitude != T::zero()).then_some(Impulse {
                time: T::zero(),
                amplitude: mu * amplitude,
            });
            (u_d, impulse)
        }
        _ => {
            let conv = kernel_convolution(lambda, |t| history.value(t), times, &history.waveform);
            (conv.into_iter().map(|c| alpha / mu_d * c).collect(), None)
        }
    };
    let m = times
        .iter()
        .zip(u.iter().zip(&u_d))
        .map(|(&t, (&u, &ud))| mu * history.derivative(t) + alpha * (u - ud))
        .collect();
    Ok(TorsionTrace { times: times.to_vec(), u, u_d, m, impulse })
}

/// Twist and natural twist under a torque history for `μ > 0`, from
/// `ẋ = −Ax + (m/μ, 0)` with the closed-form `e^{−tA}`.
pub fn creep_response<T: Real>(
    params: &TorsionParams<T>,
    history: &InputHistory<T>,
    times: &[T],
) -> Result<TorsionTrace<T>> {
    history.expect(InputKind::PrescribedTorque)?;
    check_times(times)?;
    let a = params.creep_matrix()?;
    let mu = params.mu;
    let m: Vec<T> = times.iter().map(|&t| history.value(t)).collect();
    let (u, u_d) = match history.waveform {
        Waveform::Step { amplitude } => {
            let target = a
                .try_inverse()
                .ok_or(Error::Singular("creep matrix"))?
                .mul_vec([amplitude / mu, T::zero()]);
            let mut u = Vec::with_capacity(times.len());
            let mut u_d = Vec::with_capacity(times.len());
            for &t in times {
                let e = matrix_exponential_2x2(&a, t);
                let decay = e.mul_vec(target);
                u.push(target[0] - decay[0]);
                u_d.push(target[1] - decay[1]);
            }
            (u, u_d)
        }
        _ => {
            let (knots, index) = knots_for(times, &history.waveform);
            let mut states = Vec::with_capacity(knots.len());
            let mut x = [T::zero(); 2];
            states.push(x);
            for w in knots.windows(2) {
                let h = w[1] - w[0];
                let (e, p1, p2) = hold_weights_2x2(&a, h)?;
                let b0 = history.value(w[0]) / mu;
                let b1 = history.value(w[1]) / mu;
                let ex = e.mul_vec(x);
                let q1 = p1.mul_vec([b0, T::zero()]);
                let q2 = p2.mul_vec([(b1 - b0) / h, T::zero()]);
                x = [ex[0] + q1[0] + q2[0], ex[1] + q1[1] + q2[1]];
                states.push(x);
            }
            index.iter().map(|&i| (states[i][0], states[i][1])).unzip()
        }
    };
    Ok(TorsionTrace { times: times.to_vec(), u, u_d, m, impulse: None })
}

/// Creep without current-strain viscosity: `u_d = (1/μ_d)∫₀ᵗ e^{−α_d(t−τ)/μ_d} m(τ) dτ`
/// and `u = m/α + u_d`.
pub fn creep_mu_zero<T: Real>(
    params: &TorsionParams<T>,
    history: &InputHistory<T>,
    times: &[T],
) -> Result<TorsionTrace<T>> {
    history.expect(InputKind::PrescribedTorque)?;
    check_times(times)?;
    if params.mu != T::zero() {
        return Err(Error::ViscosityNonZero(params.mu.to_f64_lossy()));
    }
    let TorsionParams { mu_d, alpha, alpha_d, .. } = *params;
    let lambda = alpha_d / mu_d;
    let m: Vec<T> = times.iter().map(|&t| history.value(t)).collect();
    let u_d: Vec<T> = match history.waveform {
        Waveform::Step { amplitude } => times.iter().map(|&t| -amplitude / alpha_d * (-lambda * t).exp_m1()).collect(),
        _ => kernel_convolution(lambda, |t| history.value(t), times, &history.waveform)
            .into_iter()
            .map(|c| c / mu_d)
            .collect(),
    };
    let u = m.iter().zip(&u_d).map(|(&m, &ud)| m / alpha + ud).collect();
    Ok(TorsionTrace { times: times.to_vec(), u, u_d, m, impulse: None })
}
