use crate::error::{Error, Result};
use crate::linalg::Mat2;
use crate::scalar::Real;

/// Dimensionless isolated-torsion parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorsionParams<T> {
    /// Inertia ratio `ν ≥ 0`.
    pub nu: T,
    /// Current-strain viscosity `μ ≥ 0`.
    pub mu: T,
    /// Natural-strain viscosity `μ_d > 0`.
    pub mu_d: T,
    /// Elastic stiffness `α > 0`.
    pub alpha: T,
    /// Natural stiffness `α_d > 0`.
    pub alpha_d: T,
}

fn require<T: Real>(name: &'static str, value: T, strict: bool) -> Result<()> {
    let ok = value.is_finite() && if strict { value > T::zero() } else { value >= T::zero() };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value: value.to_f64_lossy(),
            reason: if strict { "must be positive" } else { "must be nonnegative" },
        })
    }
}

impl<T: Real> TorsionParams<T> {
    pub fn new(nu: T, mu: T, mu_d: T, alpha: T, alpha_d: T) -> Result<Self> {
        require("nu", nu, false)?;
        require("mu", mu, false)?;
        require("mu_d", mu_d, true)?;
        require("alpha", alpha, true)?;
        require("alpha_d", alpha_d, true)?;
        Ok(Self { nu, mu, mu_d, alpha, alpha_d })
    }

    /// Quasi-static parameters (`ν = 0`).
    pub fn quasistatic(mu: T, mu_d: T, alpha: T, alpha_d: T) -> Result<Self> {
        Self::new(T::zero(), mu, mu_d, alpha, alpha_d)
    }

    /// Copy with a different inertia ratio.
    pub fn with_nu(self, nu: T) -> Result<Self> {
        Self::new(nu, self.mu, self.mu_d, self.alpha, self.alpha_d)
    }

    /// `A = [[α/μ, −α/μ], [−α/μ_d, (α+α_d)/μ_d]]`, defined for `μ > 0`.
    pub fn creep_matrix(&self) -> Result<Mat2<T>> {
        if self.mu == T::zero() {
            return Err(Error::ViscosityZero);
        }
        let a = self.alpha;
        Ok(Mat2::new(
            a / self.mu,
            -a / self.mu,
            -a / self.mu_d,
            (a + self.alpha_d) / self.mu_d,
        ))
    }

    /// Decay rate `(α + α_d)/μ_d` of the natural twist under held twist.
    pub fn relaxation_rate(&self) -> T {
        (self.alpha + self.alpha_d) / self.mu_d
    }

    /// Equilibrium under a constant torque `m₀`: `((α+α_d)m₀/(αα_d), m₀/α_d)`.
    pub fn creep_asymptotes(&self, m0: T) -> (T, T) {
        (
            (self.alpha + self.alpha_d) * m0 / (self.alpha * self.alpha_d),
            m0 / self.alpha_d,
        )
    }
}

/// Dimensional data of a uniform rod in isolated torsion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalTorsion<T> {
    pub length: T,
    pub time_scale: T,
    /// Mass per unit reference length `ρA`.
    pub rho_a: T,
    /// Second mass moments of inertia of the section.
    pub i11: T,
    pub i22: T,
    pub m33: T,
    pub m_d33: T,
    pub a33: T,
    pub a_d33: T,
}

impl<T: Real> PhysicalTorsion<T> {
    /// Maps to dimensionless parameters:
    /// `ν = (I₁₁+I₂₂)/(ρA L²)`, `μ = T M₃₃/(ρA L⁴)`, `μ_d = T M_{d,33}/(ρA L⁴)`,
    /// `α = T² A₃₃/(ρA L⁴)`, `α_d = T² A_{d,33}/(ρA L⁴)`.
    pub fn nondimensionalize(&self) -> Result<TorsionParams<T>> {
        require("length", self.length, true)?;
        require("time_scale", self.time_scale, true)?;
        require("rho_a", self.rho_a, true)?;
        require("i11", self.i11, false)?;
        require("i22", self.i22, false)?;
        let l2 = self.length * self.length;
        let l4 = l2 * l2;
        let t = self.time_scale;
        TorsionParams::new(
            (self.i11 + self.i22) / (self.rho_a * l2),
            t * self.m33 / (self.rho_a * l4),
            t * self.m_d33 / (self.rho_a * l4),
            t * t * self.a33 / (self.rho_a * l4),
            t * t * self.a_d33 / (self.rho_a * l4),
        )
    }

    /// Inverse of [`nondimensionalize`](Self::nondimensionalize) given the
    /// scales; the polar moment is split evenly between `I₁₁` and `I₂₂`.
    pub fn from_dimensionless(params: &TorsionParams<T>, length: T, time_scale: T, rho_a: T) -> Result<Self> {
        require("length", length, true)?;
        require("time_scale", time_scale, true)?;
        require("rho_a", rho_a, true)?;
        let l2 = length * length;
        let l4 = l2 * l2;
        let t = time_scale;
        let polar = params.nu * rho_a * l2;
        Ok(Self {
            length,
            time_scale,
            rho_a,
            i11: polar * T::half(),
            i22: polar * T::half(),
            m33: params.mu * rho_a * l4 / t,
            m_d33: params.mu_d * rho_a * l4 / t,
            a33: params.alpha * rho_a * l4 / (t * t),
            a_d33: params.alpha_d * rho_a * l4 / (t * t),
        })
    }

    /// Circular section of radius `radius`: `I₁₁ = I₂₂ = ρA radius²/4`.
    pub fn circular_moments(rho_a: T, radius: T) -> (T, T) {
        let i = rho_a * radius * radius / T::lit(4.0);
        (i, i)
    }

    /// Dimensionless torque `T² m / (ρA L³)`.
    pub fn torque_to_dimensionless(&self, m: T) -> T {
        self.time_scale * self.time_scale * m / (self.rho_a * self.length.powi(3))
    }

    pub fn torque_from_dimensionless(&self, m: T) -> T {
        m * self.rho_a * self.length.powi(3) / (self.time_scale * self.time_scale)
    }

    /// Dimensionless twist `L u`.
    pub fn twist_to_dimensionless(&self, u: T) -> T {
        self.length * u
    }

    pub fn twist_from_dimensionless(&self, u: T) -> T {
        u / self.length
    }
}
