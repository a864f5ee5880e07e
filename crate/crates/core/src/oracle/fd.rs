use crate::scalar::Real;

/// Central-difference gradient of `f` at `x` with step `h` in every coordinate.
pub fn finite_difference_gradient<T: Real, F: Fn(&[T]) -> T>(f: F, x: &[T], h: T) -> Vec<T> {
    let mut probe = x.to_vec();
    let inv2h = T::one() / (T::two() * h);
    (0..x.len())
        .map(|i| {
            let xi = probe[i];
            probe[i] = xi + h;
            let fp = f(&probe);
            probe[i] = xi - h;
            let fm = f(&probe);
            probe[i] = xi;
            (fp - fm) * inv2h
        })
        .collect()
}
