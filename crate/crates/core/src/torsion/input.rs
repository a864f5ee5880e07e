use crate::error::{Error, Result};
use crate::scalar::Real;

/// Which boundary quantity the history prescribes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InputKind {
    PrescribedTwist,
    PrescribedTorque,
}

impl InputKind {
    pub fn name(self) -> &'static str {
        match self {
            InputKind::PrescribedTwist => "prescribed twist",
            InputKind::PrescribedTorque => "prescribed torque",
        }
    }
}

/// Time profile of an input. Every waveform is zero for `t < 0`.
#[derive(Clone, Debug, PartialEq)]
pub enum Waveform<T> {
    /// Identically zero.
    Zero,
    /// `amplitude · H(t)`, understood as the limit of ever shorter ramps.
    Step { amplitude: T },
    /// `amplitude · S(t/ramp)` with `S(x) = 3x² − 2x³` on `[0, 1]`, held at
    /// `amplitude` afterwards.
    SmoothedStep { amplitude: T, ramp: T },
    /// Piecewise-linear interpolation of samples starting at `(0, 0)`,
    /// held constant after the last sample.
    Tabulated { times: Vec<T>, values: Vec<T> },
}

impl<T: Real> Waveform<T> {
    pub fn smoothed_step(amplitude: T, ramp: T) -> Result<Self> {
        if !(ramp > T::zero()) || !ramp.is_finite() {
            return Err(Error::InvalidParameter {
                name: "ramp_duration",
                value: ramp.to_f64_lossy(),
                reason: "must be positive",
            });
        }
        Ok(Waveform::SmoothedStep { amplitude, ramp })
    }

    pub fn tabulated(times: Vec<T>, values: Vec<T>) -> Result<Self> {
        if times.len() != values.len() || times.len() < 2 {
            return Err(Error::Precondition(
                "tabulated input needs at least two (time, value) pairs of equal length".into(),
            ));
        }
        if times[0] != T::zero() || values[0] != T::zero() {
            return Err(Error::Precondition("tabulated input must start at (0, 0)".into()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) || times.iter().chain(&values).any(|x| !x.is_finite()) {
            return Err(Error::Precondition("tabulated times must be finite and strictly increasing".into()));
        }
        Ok(Waveform::Tabulated { times, values })
    }

    pub fn value(&self, t: T) -> T {
        if t < T::zero() {
            return T::zero();
        }
        match self {
            Waveform::Zero => T::zero(),
            Waveform::Step { amplitude } => *amplitude,
            Waveform::SmoothedStep { amplitude, ramp } => {
                let x = (t / *ramp).min(T::one());
                *amplitude * x * x * (T::lit(3.0) - T::two() * x)
            }
            Waveform::Tabulated { times, values } => {
                let last = times.len() - 1;
                if t >= times[last] {
                    return values[last];
                }
                let k = times.partition_point(|&x| x <= t) - 1;
                let w = (t - times[k]) / (times[k + 1] - times[k]);
                values[k] + (values[k + 1] - values[k]) * w
            }
        }
    }

    /// Right derivative. The ideal step has none away from `t = 0`, where it
    /// is reported as zero.
    pub fn derivative(&self, t: T) -> T {
        if t < T::zero() {
            return T::zero();
        }
        match self {
            Waveform::Zero | Waveform::Step { .. } => T::zero(),
            Waveform::SmoothedStep { amplitude, ramp } => {
                if t >= *ramp {
                    return T::zero();
                }
                let x = t / *ramp;
                *amplitude * T::lit(6.0) * x * (T::one() - x) / *ramp
            }
            Waveform::Tabulated { times, values } => {
                let last = times.len() - 1;
                if t >= times[last] {
                    return T::zero();
                }
                let k = times.partition_point(|&x| x <= t) - 1;
                (values[k + 1] - values[k]) / (times[k + 1] - times[k])
            }
        }
    }

    /// Times where the waveform is not smooth.
    pub fn breakpoints(&self) -> Vec<T> {
        match self {
            Waveform::Zero | Waveform::Step { .. } => vec![T::zero()],
            Waveform::SmoothedStep { ramp, .. } => vec![T::zero(), *ramp],
            Waveform::Tabulated { times, .. } => times.clone(),
        }
    }

    /// Final constant level.
    pub fn plateau(&self) -> T {
        match self {
            Waveform::Zero => T::zero(),
            Waveform::Step { amplitude } | Waveform::SmoothedStep { amplitude, .. } => *amplitude,
            Waveform::Tabulated { values, .. } => values[values.len() - 1],
        }
    }

    /// Points at which a piecewise-linear interpolant is accurate to second
    /// order: breakpoints plus `per_ramp` subdivisions of a smoothed ramp.
    pub(crate) fn knots(&self, per_ramp: usize) -> Vec<T> {
        match self {
            Waveform::SmoothedStep { ramp, .. } => {
                let n = T::from_usize(per_ramp).unwrap();
                (0..=per_ramp).map(|i| *ramp * T::from_usize(i).unwrap() / n).collect()
            }
            _ => self.breakpoints(),
        }
    }
}

/// A prescribed boundary history.
#[derive(Clone, Debug, PartialEq)]
pub struct InputHistory<T> {
    pub kind: InputKind,
    pub waveform: Waveform<T>,
}

impl<T: Real> InputHistory<T> {
    pub fn new(kind: InputKind, waveform: Waveform<T>) -> Self {
        Self { kind, waveform }
    }

    pub fn twist(waveform: Waveform<T>) -> Self {
        Self::new(InputKind::PrescribedTwist, waveform)
    }

    pub fn torque(waveform: Waveform<T>) -> Self {
        Self::new(InputKind::PrescribedTorque, waveform)
    }

    pub fn value(&self, t: T) -> T {
        self.waveform.value(t)
    }

    pub fn derivative(&self, t: T) -> T {
        self.waveform.derivative(t)
    }

    pub(crate) fn expect(&self, kind: InputKind) -> Result<()> {
        if self.kind == kind {
            Ok(())
        } else {
            Err(Error::KindMismatch {
                expected: kind.name(),
                found: self.kind.name(),
            })
        }
    }
}
