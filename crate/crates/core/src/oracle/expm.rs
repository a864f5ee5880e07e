use crate::linalg::Mat2;
use crate::scalar::Real;

/// `e^{−tA}` for a real 2×2 matrix by the hyperbolic (or trigonometric)
/// closed form around the trace centre `c = tr A / 2`.
///
/// With `B = A − cI`, `B² = δ²I` where `δ² = −det B`. For `δ² > 0` the result is
/// written as `½e^{−(c−δ)t}(I − B/δ) + ½e^{−(c+δ)t}(I + B/δ)`, which is the
/// cosh/sinh form without overflow for large `t`. When `|δ|` is below `1e-12`
/// the series routine is used instead.
pub fn matrix_exponential_2x2<T: Real>(a: &Mat2<T>, t: T) -> Mat2<T> {
    let c = a.trace() * T::half();
    let b = *a - Mat2::identity().scale(c);
    let b11 = b.0[0][0];
    let b12 = b.0[0][1];
    let b21 = b.0[1][0];
    let delta_sq = b11 * b11 + b12 * b21;
    let delta = delta_sq.abs().sqrt();
    if delta < T::lit(1e-12) {
        return expm_series(&a.scale(-t));
    }
    if delta_sq < T::zero() {
        // complex pair: e^{−tB} = cos(δt) I − sin(δt)/δ B
        let (s, co) = (delta * t).sin_cos();
        let damp = (-c * t).exp();
        let e = Mat2::identity().scale(co) - b.scale(s / delta);
        return e.scale(damp);
    }
    // Diagonal entries of (I ∓ B/δ) without cancellation: 1 − |b11|/δ = b12 b21 / (δ(δ + |b11|)).
    let small = b12 * b21 / (delta * (delta + b11.abs()));
    let large = T::two() - small;
    let (p11, p22) = if b11 >= T::zero() { (small, large) } else { (large, small) };
    // P = I − B/δ and its complement I + B/δ = 2I − P.
    let p = Mat2::new(p11, -b12 / delta, -b21 / delta, p22);
    let q = Mat2::new(p22, b12 / delta, b21 / delta, p11);
    let slow = (-(c - delta) * t).exp() * T::half();
    let fast = (-(c + delta) * t).exp() * T::half();
    p.scale(slow) + q.scale(fast)
}

/// `e^{M}` by scaling and squaring of a truncated Taylor series.
pub fn expm_series<T: Real>(m: &Mat2<T>) -> Mat2<T> {
    let norm = m.max_abs() * T::two();
    let mut squarings = 0u32;
    let mut scale = T::one();
    while norm * scale > T::half() {
        scale = scale * T::half();
        squarings += 1;
    }
    let x = m.scale(scale);
    let mut term = Mat2::identity();
    let mut sum = Mat2::identity();
    for k in 1..=24 {
        term = (term * x).scale(T::one() / T::from_usize(k).unwrap());
        sum = sum + term;
        if term.max_abs() <= T::epsilon() * sum.max_abs() * T::lit(1e-3) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    sum
}
