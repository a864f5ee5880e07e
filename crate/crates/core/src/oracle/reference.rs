use crate::error::{Error, Result};
use crate::scalar::Real;

/// States at the requested output times.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseTrace<T> {
    pub times: Vec<T>,
    pub states: Vec<Vec<T>>,
    pub steps: usize,
    pub rejected: usize,
}

// Dormand–Prince 5(4) tableau. The last row of `A` equals the fifth-order
// weights, so the seventh stage doubles as the next step's first (FSAL).
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

const MAX_STEPS: usize = 20_000_000;

/// Adaptive Dormand–Prince 5(4) integration of `y' = rhs(t, y)` from
/// `t_eval[0]`, landing exactly on every entry of `t_eval` (which must be
/// nondecreasing). Local error per step is held below `tol` in the mixed
/// absolute/relative RMS norm.
pub fn reference_integrate<T, F>(mut rhs: F, y0: &[T], t_eval: &[T], tol: T) -> Result<DenseTrace<T>>
where
    T: Real,
    F: FnMut(T, &[T]) -> Vec<T>,
{
    if t_eval.is_empty() {
        return Err(Error::Precondition("no output times requested".into()));
    }
    if t_eval.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Precondition("output times must be nondecreasing".into()));
    }
    if !(tol > T::zero()) {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: tol.to_f64_lossy(),
            reason: "must be positive",
        });
    }
    let n = y0.len();
    let c: Vec<T> = C.iter().map(|&x| T::lit(x)).collect();
    let a: Vec<Vec<T>> = A.iter().map(|r| r.iter().map(|&x| T::lit(x)).collect()).collect();
    let e: Vec<T> = B5.iter().zip(B4.iter()).map(|(&p, &q)| T::lit(p - q)).collect();

    let mut t = t_eval[0];
    let mut y = y0.to_vec();
    let mut trace = DenseTrace {
        times: vec![t],
        states: vec![y.clone()],
        steps: 0,
        rejected: 0,
    };
    let span = t_eval[t_eval.len() - 1] - t;
    let mut h = if span > T::zero() { span * T::lit(1e-3) } else { T::one() };
    h = h.min(tol.powf(T::lit(0.2)) * T::lit(0.1)).max(T::epsilon() * T::lit(1e3));
    let mut k: Vec<Vec<T>> = vec![vec![T::zero(); n]; 7];
    k[0] = rhs(t, &y);
    let mut stage = vec![T::zero(); n];

    for &target in &t_eval[1..] {
        while t < target {
            if trace.steps + trace.rejected > MAX_STEPS {
                return Err(Error::NonConvergence {
                    t: t.to_f64_lossy(),
                    step: h.to_f64_lossy(),
                    detail: "step budget exhausted".into(),
                });
            }
            let remaining = target - t;
            let last = h >= remaining;
            let step = if last { remaining } else { h };
            let floor = T::epsilon() * T::lit(16.0) * t.abs().max(T::one());
            if step < floor && !last {
                return Err(Error::NonConvergence {
                    t: t.to_f64_lossy(),
                    step: step.to_f64_lossy(),
                    detail: "step size underflow".into(),
                });
            }
            for s in 1..7 {
                for i in 0..n {
                    let mut acc = y[i];
                    for j in 0..s {
                        acc = acc + step * a[s][j] * k[j][i];
                    }
                    stage[i] = acc;
                }
                k[s] = rhs(t + c[s] * step, &stage);
            }
            // stage now holds the fifth-order solution (FSAL row).
            let mut err_sq = T::zero();
            for i in 0..n {
                let mut est = T::zero();
                for j in 0..7 {
                    est = est + e[j] * k[j][i];
                }
                let sc = tol + tol * y[i].abs().max(stage[i].abs());
                let r = step * est / sc;
                err_sq = err_sq + r * r;
            }
            let err = if n > 0 { (err_sq / T::from_usize(n).unwrap()).sqrt() } else { T::zero() };
            if !err.is_finite() {
                h = step * T::lit(0.2);
                trace.rejected += 1;
                continue;
            }
            let factor = if err == T::zero() {
                T::lit(5.0)
            } else {
                (T::lit(0.9) * err.powf(T::lit(-0.2))).max(T::lit(0.2)).min(T::lit(5.0))
            };
            if err <= T::one() {
                t = if last { target } else { t + step };
                y.copy_from_slice(&stage);
                k[0] = k[6].clone();
                trace.steps += 1;
                if !last {
                    h = step * factor;
                }
            } else {
                h = step * factor.min(T::one());
                trace.rejected += 1;
            }
        }
        trace.times.push(target);
        trace.states.push(y.clone());
    }
    Ok(trace)
}
