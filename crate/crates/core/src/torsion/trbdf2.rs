//! TR-BDF2 for linear systems `M ẏ = J y + b(t)` with diagonal `M`.

use crate::error::{Error, Result};
use crate::linalg::{BandLu, BandMatrix, BorderedBand, BorderedLu};
use crate::scalar::Real;

/// A sparse square operator that can factor `diag(d) − c·J`.
pub trait LinearOperator<T: Real> {
    type Factor: Solve<T>;

    fn dim(&self) -> usize;

    fn apply(&self, x: &[T]) -> Vec<T>;

    fn factor_shifted(&self, d: &[T], c: T) -> Result<Self::Factor>;
}

pub trait Solve<T> {
    fn solve(&self, b: &[T]) -> Vec<T>;
}

impl<T: Real> Solve<T> for BandLu<T> {
    fn solve(&self, b: &[T]) -> Vec<T> {
        BandLu::solve(self, b)
    }
}

impl<T: Real> Solve<T> for BorderedLu<T> {
    fn solve(&self, b: &[T]) -> Vec<T> {
        BorderedLu::solve(self, b)
    }
}

impl<T: Real> LinearOperator<T> for BandMatrix<T> {
    type Factor = BandLu<T>;

    fn dim(&self) -> usize {
        BandMatrix::dim(self)
    }

    fn apply(&self, x: &[T]) -> Vec<T> {
        self.mul_vec(x)
    }

    fn factor_shifted(&self, d: &[T], c: T) -> Result<BandLu<T>> {
        self.shifted(d, c).factor()
    }
}

impl<T: Real> LinearOperator<T> for BorderedBand<T> {
    type Factor = BorderedLu<T>;

    fn dim(&self) -> usize {
        BorderedBand::dim(self)
    }

    fn apply(&self, x: &[T]) -> Vec<T> {
        self.mul_vec(x)
    }

    fn factor_shifted(&self, d: &[T], c: T) -> Result<BorderedLu<T>> {
        self.shifted(d, c).factor()
    }
}

/// Step-size policy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepControl<T> {
    pub rtol: T,
    pub atol: T,
    /// First trial step; chosen from the span when absent.
    pub dt_initial: Option<T>,
    pub dt_max: Option<T>,
    /// Take steps of exactly this size (clipped only at stop times) and skip
    /// error control.
    pub fixed_step: Option<T>,
    pub max_steps: usize,
}

impl<T: Real> Default for StepControl<T> {
    fn default() -> Self {
        Self {
            rtol: T::lit(1e-8),
            atol: T::lit(1e-10),
            dt_initial: None,
            dt_max: None,
            fixed_step: None,
            max_steps: 5_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub factorizations: usize,
}

/// A completed step: both endpoints and the intermediate stage.
pub struct StepView<'a, T> {
    pub t0: T,
    pub y0: &'a [T],
    pub t_mid: T,
    pub y_mid: &'a [T],
    pub t1: T,
    pub y1: &'a [T],
}

/// Hooks into step acceptance.
pub trait StepMonitor<T> {
    /// Extra error ratio for a candidate step that passed the local error
    /// test, scaling like the square of the step; values above one reject.
    fn assess(&mut self, _step: &StepView<'_, T>) -> T;

    fn accepted(&mut self, _step: &StepView<'_, T>) {}
}

/// Monitor that never objects.
pub struct NoMonitor;

impl<T: Real> StepMonitor<T> for NoMonitor {
    fn assess(&mut self, _step: &StepView<'_, T>) -> T {
        T::zero()
    }
}

/// Integrates from `t_out[0]` and returns the state at every entry of
/// `t_out` (nondecreasing). Steps end exactly on each output time and on each
/// `breakpoint` inside the span. `monitor` sees every candidate step.
pub fn integrate<T, J, B, O>(
    jac: &J,
    mass: &[T],
    mut forcing: B,
    y0: &[T],
    t_out: &[T],
    breakpoints: &[T],
    control: &StepControl<T>,
    monitor: &mut O,
) -> Result<(Vec<Vec<T>>, StepStats)>
where
    T: Real,
    J: LinearOperator<T>,
    B: FnMut(T) -> Vec<T>,
    O: StepMonitor<T>,
{
    let n = jac.dim();
    if mass.len() != n || y0.len() != n {
        return Err(Error::Precondition("state, mass and operator dimensions differ".into()));
    }
    if t_out.is_empty() || t_out.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::Precondition("output times must be nonempty and nondecreasing".into()));
    }
    let t_start = t_out[0];
    let t_end = t_out[t_out.len() - 1];
    let mut stops: Vec<T> = t_out
        .iter()
        .chain(breakpoints)
        .copied()
        .filter(|&t| t > t_start && t <= t_end)
        .collect();
    stops.sort_by(|a, b| a.partial_cmp(b).unwrap());
    stops.dedup();

    let gamma = T::two() - T::SQRT_2();
    let d = gamma * T::half();
    let a = (T::SQRT_2() + T::one()) * T::half();
    let c = (T::SQRT_2() - T::one()) * T::half();
    let err_const = T::SQRT_2() * T::half() - T::lit(2.0 / 3.0);

    let span = t_end - t_start;
    let mut h = match (control.fixed_step, control.dt_initial) {
        (Some(f), _) | (None, Some(f)) => f,
        (None, None) => span * T::lit(1e-4),
    };
    if let Some(hmax) = control.dt_max {
        h = h.min(hmax);
    }
    if span > T::zero() && !(h > T::zero()) {
        return Err(Error::InvalidParameter {
            name: "dt_initial",
            value: h.to_f64_lossy(),
            reason: "must be positive",
        });
    }

    let mut stats = StepStats::default();
    let mut out = Vec::with_capacity(t_out.len());
    let mut next_out = 0;
    let mut t = t_start;
    let mut y = y0.to_vec();
    while next_out < t_out.len() && t_out[next_out] <= t {
        out.push(y.clone());
        next_out += 1;
    }
    let mut f_n = add(&jac.apply(&y), &forcing(t));
    let mut factor: Option<(T, J::Factor)> = None;
    let mut after_reject = false;
    let mut stop_idx = 0;

    while next_out < t_out.len() {
        if stats.accepted + stats.rejected >= control.max_steps {
            return Err(Error::NonConvergence {
                t: t.to_f64_lossy(),
                step: h.to_f64_lossy(),
                detail: "step budget exhausted".into(),
            });
        }
        while stop_idx < stops.len() && stops[stop_idx] <= t {
            stop_idx += 1;
        }
        let stop = stops[stop_idx];
        let remaining = stop - t;
        // Land on the stop exactly; stretch slightly rather than leave a sliver.
        let hit = h >= remaining * T::lit(0.999_999);
        let step = if hit { remaining } else { h };
        if step <= T::epsilon() * T::lit(64.0) * t.abs().max(T::one()) && !hit {
            return Err(Error::NonConvergence {
                t: t.to_f64_lossy(),
                step: step.to_f64_lossy(),
                detail: "step size underflow".into(),
            });
        }

        let needs_factor = match &factor {
            Some((hs, _)) => *hs != step,
            None => true,
        };
        if needs_factor {
            factor = Some((step, jac.factor_shifted(mass, d * step)?));
            stats.factorizations += 1;
        }
        let lu = &factor.as_ref().unwrap().1;

        let t_mid = t + gamma * step;
        let t_new = if hit { stop } else { t + step };
        let b_mid = forcing(t_mid);
        let rhs1: Vec<T> = (0..n).map(|i| mass[i] * y[i] + d * step * (f_n[i] + b_mid[i])).collect();
        let y_mid = lu.solve(&rhs1);
        let b_new = forcing(t_new);
        let rhs2: Vec<T> = (0..n)
            .map(|i| mass[i] * (a * y_mid[i] - c * y[i]) + d * step * b_new[i])
            .collect();
        let y_new = lu.solve(&rhs2);
        if y_new.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonConvergence {
                t: t.to_f64_lossy(),
                step: step.to_f64_lossy(),
                detail: "non-finite state".into(),
            });
        }
        let f_mid = add(&jac.apply(&y_mid), &b_mid);
        let f_new = add(&jac.apply(&y_new), &b_new);

        let candidate = StepView {
            t0: t,
            y0: &y,
            t_mid,
            y_mid: &y_mid,
            t1: t_new,
            y1: &y_new,
        };
        let accept = if control.fixed_step.is_some() {
            monitor.assess(&candidate);
            true
        } else {
            let raw: Vec<T> = (0..n)
                .map(|i| {
                    err_const
                        * T::two()
                        * step
                        * ((f_new[i] - f_mid[i]) / (T::one() - gamma) - (f_mid[i] - f_n[i]) / gamma)
                })
                .collect();
            let est = lu.solve(&raw);
            let mut err = T::zero();
            for i in 0..n {
                let sc = control.atol + control.rtol * y[i].abs().max(y_new[i].abs());
                err = err.max(est[i].abs() / sc);
            }
            if err <= T::one() {
                // Put the monitor's h² ratio on the h³ scale of `err`.
                let extra = monitor.assess(&candidate);
                err = err.max(extra * extra.sqrt());
            }
            let mut fac = if err == T::zero() {
                T::lit(4.0)
            } else {
                (T::lit(0.9) * err.powf(-T::one() / T::lit(3.0))).max(T::lit(0.2)).min(T::lit(4.0))
            };
            if !err.is_finite() {
                fac = T::lit(0.2);
            }
            if err <= T::one() {
                if after_reject {
                    fac = fac.min(T::one());
                }
                after_reject = false;
                // Keep the previous size after a clipped step so the next
                // factorization can be reused.
                if !hit || step >= h {
                    h = ladder(step * fac);
                }
                true
            } else {
                h = ladder(step * fac.min(T::lit(0.9)));
                after_reject = true;
                stats.rejected += 1;
                false
            }
        };
        if let Some(hmax) = control.dt_max {
            h = h.min(hmax);
        }
        if let Some(f) = control.fixed_step {
            h = f;
        }
        if !accept {
            continue;
        }
        stats.accepted += 1;
        monitor.accepted(&candidate);
        t = t_new;
        y = y_new;
        f_n = f_new;
        while next_out < t_out.len() && t_out[next_out] <= t {
            out.push(y.clone());
            next_out += 1;
        }
    }
    Ok((out, stats))
}

/// Rounds down to the ladder `2^{k/4}`. Sizes only change by whole rungs, so
/// factorizations are reused and rounding-level differences between two
/// equivalent runs do not alter the step sequence.
fn ladder<T: Real>(h: T) -> T {
    let rung = (h.log2() * T::lit(4.0) + T::lit(1e-9)).floor();
    T::two().powf(rung / T::lit(4.0))
}

fn add<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| *x + *y).collect()
}
