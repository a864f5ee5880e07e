use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constitutive::WrenchComponents;
use crate::energetics::{DissipationTensors, HelmholtzEnergy, NaturalVariant, SpdTensor, StateField};
use crate::error::{Error, Result};
use crate::kinematics::StrainRates;
use crate::linalg::{Mat3, Vec3};
use crate::scalar::Real;

/// Largest node count accepted by the brute-force search.
pub const MAX_NODES: usize = 16;

/// Per-node data of a discrete maximization problem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodeData<T> {
    pub m: SpdTensor<T>,
    pub n: SpdTensor<T>,
    pub m_d: SpdTensor<T>,
    pub n_d: SpdTensor<T>,
    /// `𝗆 − ∂_𝗎ψ`
    pub couple_excess: Vec3<T>,
    /// `𝗇 − ∂_𝗏ψ`
    pub force_excess: Vec3<T>,
    /// `∂_{𝗎_d}ψ`
    pub grad_u_d: Vec3<T>,
    /// `∂_{𝗏_d}ψ`
    pub grad_v_d: Vec3<T>,
}

/// Quadrature-discretized version of the constrained maximization: maximize
/// `F(x) = xᵀHx` subject to `F(x) = ℓ(x) = c·x`.
///
/// Unknowns are ordered per node as `[𝗎̇_d, 𝗏̇_d, 𝗎̇, 𝗏̇]`. In the uniform
/// space the natural rates come first, once, followed by `[𝗎̇, 𝗏̇]` per node.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMaximizationInstance<T> {
    weights: Vec<T>,
    nodes: Vec<NodeData<T>>,
    space: NaturalVariant,
}

/// Result of [`brute_force_maximize`].
#[derive(Clone, Debug, PartialEq)]
pub enum MaximizationOutcome<T> {
    Found {
        rates: Vec<T>,
        value: T,
        restarts_used: usize,
        degenerate_restarts: usize,
    },
    /// Every sampled direction had `ℓ(d) = 0` although the targets do not
    /// vanish; nothing can be concluded.
    Inconclusive { degenerate_restarts: usize },
}

impl<T: Real> DiscreteMaximizationInstance<T> {
    pub fn new(weights: Vec<T>, nodes: Vec<NodeData<T>>, space: NaturalVariant) -> Result<Self> {
        if nodes.is_empty() || nodes.len() > MAX_NODES {
            return Err(Error::Precondition(format!(
                "node count {} outside 1..={MAX_NODES}",
                nodes.len()
            )));
        }
        if weights.len() != nodes.len() {
            return Err(Error::Precondition("weight count does not match node count".into()));
        }
        if weights.iter().any(|w| !(*w > T::zero())) {
            return Err(Error::Precondition("quadrature weights must be positive".into()));
        }
        Ok(Self { weights, nodes, space })
    }

    /// Builds the instance from a state field, its wrenches and uniform tensors.
    pub fn from_field<E: HelmholtzEnergy<T>>(
        energy: &E,
        tensors: &DissipationTensors<T>,
        field: &StateField<T>,
        wrenches: &[WrenchComponents<T>],
        space: NaturalVariant,
    ) -> Result<Self> {
        if wrenches.len() != field.len() {
            return Err(Error::Precondition("wrench count does not match state count".into()));
        }
        let nodes = field
            .states()
            .iter()
            .zip(wrenches)
            .map(|(s, w)| {
                let g = energy.gradient_at(s);
                NodeData {
                    m: tensors.m,
                    n: tensors.n,
                    m_d: tensors.m_d,
                    n_d: tensors.n_d,
                    couple_excess: w.m - g.u,
                    force_excess: w.n - g.v,
                    grad_u_d: g.u_d,
                    grad_v_d: g.v_d,
                }
            })
            .collect();
        Self::new(field.grid().weights(), nodes, space)
    }

    pub fn space(&self) -> NaturalVariant {
        self.space
    }

    pub fn nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn dim(&self) -> usize {
        match self.space {
            NaturalVariant::Local => 12 * self.nodes.len(),
            NaturalVariant::Uniform => 6 + 6 * self.nodes.len(),
        }
    }

    fn blocks(&self) -> Vec<(usize, Mat3<T>, Vec3<T>)> {
        // (offset, weighted tensor, weighted linear coefficient)
        let mut out = Vec::new();
        match self.space {
            NaturalVariant::Local => {
                for (i, (w, nd)) in self.weights.iter().zip(&self.nodes).enumerate() {
                    let o = 12 * i;
                    out.push((o, nd.m_d.matrix().scale(*w), -nd.grad_u_d.scale(*w)));
                    out.push((o + 3, nd.n_d.matrix().scale(*w), -nd.grad_v_d.scale(*w)));
                    out.push((o + 6, nd.m.matrix().scale(*w), nd.couple_excess.scale(*w)));
                    out.push((o + 9, nd.n.matrix().scale(*w), nd.force_excess.scale(*w)));
                }
            }
            NaturalVariant::Uniform => {
                let mut md = Mat3::zeros();
                let mut nd_sum = Mat3::zeros();
                let mut gu = Vec3::zeros();
                let mut gv = Vec3::zeros();
                for (w, nd) in self.weights.iter().zip(&self.nodes) {
                    md = md + nd.m_d.matrix().scale(*w);
                    nd_sum = nd_sum + nd.n_d.matrix().scale(*w);
                    gu += nd.grad_u_d.scale(*w);
                    gv += nd.grad_v_d.scale(*w);
                }
                out.push((0, md, -gu));
                out.push((3, nd_sum, -gv));
                for (i, (w, nd)) in self.weights.iter().zip(&self.nodes).enumerate() {
                    let o = 6 + 6 * i;
                    out.push((o, nd.m.matrix().scale(*w), nd.couple_excess.scale(*w)));
                    out.push((o + 3, nd.n.matrix().scale(*w), nd.force_excess.scale(*w)));
                }
            }
        }
        out
    }

    /// Linear coefficients `c` of `ℓ(x) = c·x`.
    pub fn linear_coefficients(&self) -> Vec<T> {
        let mut c = vec![T::zero(); self.dim()];
        for (o, _, b) in self.blocks() {
            c[o..o + 3].copy_from_slice(&b.0);
        }
        c
    }

    fn apply_h(&self, blocks: &[(usize, Mat3<T>, Vec3<T>)], x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); x.len()];
        for (o, h, _) in blocks {
            let v = h.mul_vec(&Vec3([x[*o], x[o + 1], x[o + 2]]));
            y[*o..*o + 3].copy_from_slice(&v.0);
        }
        y
    }

    /// `F(x)`, the discrete total dissipation rate.
    pub fn functional(&self, x: &[T]) -> T {
        let blocks = self.blocks();
        dot(x, &self.apply_h(&blocks, x))
    }

    /// `ℓ(x)`, the right-hand side of the constraint.
    pub fn linear_form(&self, x: &[T]) -> T {
        dot(&self.linear_coefficients(), x)
    }

    /// `F(x) − ℓ(x)`.
    pub fn constraint_residual(&self, x: &[T]) -> T {
        self.functional(x) - self.linear_form(x)
    }

    /// Exact maximizer `x* = H⁻¹c` computed blockwise.
    pub fn closed_form_rates(&self) -> Result<Vec<T>> {
        let mut x = vec![T::zero(); self.dim()];
        for (o, h, b) in self.blocks() {
            let v = h.solve_spd(&b).ok_or(Error::Singular("maximization block"))?;
            x[o..o + 3].copy_from_slice(&v.0);
        }
        Ok(x)
    }

    /// Unpacks a flat rate vector into per-node rates.
    pub fn expand(&self, x: &[T]) -> Vec<StrainRates<T>> {
        let v3 = |o: usize| Vec3([x[o], x[o + 1], x[o + 2]]);
        (0..self.nodes.len())
            .map(|i| match self.space {
                NaturalVariant::Local => {
                    let o = 12 * i;
                    StrainRates { u_d: v3(o), v_d: v3(o + 3), u: v3(o + 6), v: v3(o + 9) }
                }
                NaturalVariant::Uniform => {
                    let o = 6 + 6 * i;
                    StrainRates { u_d: v3(0), v_d: v3(3), u: v3(o), v: v3(o + 3) }
                }
            })
            .collect()
    }
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

/// Searches for the constrained maximum by projected gradient iterations.
///
/// For every direction `d` the only nonzero feasible multiple is `λd` with
/// `λ = ℓ(d)/F(d)`, where `F(λd) = ℓ(d)²/F(d)`. Each restart draws a random
/// direction, normalizes it onto the hyperplane `ℓ = 1` and minimizes `F` there
/// (equivalently maximizes `ℓ²/F`) with Barzilai–Borwein steps projected onto
/// the hyperplane. The best restart is rescaled to the feasible point.
pub fn brute_force_maximize<T: Real>(
    instance: &DiscreteMaximizationInstance<T>,
    restarts: usize,
    iters: usize,
    seed: u64,
) -> MaximizationOutcome<T> {
    let dim = instance.dim();
    let blocks = instance.blocks();
    let c = instance.linear_coefficients();
    let cc = dot(&c, &c);
    if cc == T::zero() {
        return MaximizationOutcome::Found {
            rates: vec![T::zero(); dim],
            value: T::zero(),
            restarts_used: 0,
            degenerate_restarts: 0,
        };
    }
    let c_norm = cc.sqrt();
    let project = |g: &mut Vec<T>| {
        let s = dot(g, &c) / cc;
        for (gi, ci) in g.iter_mut().zip(&c) {
            *gi = *gi - s * *ci;
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(T, Vec<T>)> = None;
    let mut degenerate = 0usize;
    let mut used = 0usize;
    for _ in 0..restarts {
        let d: Vec<T> = (0..dim).map(|_| T::lit(rng.gen_range(-1.0..1.0))).collect();
        let ell = dot(&c, &d);
        let d_norm = dot(&d, &d).sqrt();
        if ell.abs() <= T::lit(1e-12) * c_norm * d_norm {
            degenerate += 1;
            continue;
        }
        used += 1;
        let mut x: Vec<T> = d.iter().map(|v| *v / ell).collect();
        let mut hx = instance.apply_h(&blocks, &x);
        let mut g: Vec<T> = hx.iter().map(|v| *v * T::two()).collect();
        project(&mut g);
        let g0 = dot(&g, &g).sqrt();
        // first step: exact line search along −g
        let hg = instance.apply_h(&blocks, &g);
        let mut step = dot(&g, &g) / (T::two() * dot(&g, &hg));
        let mut prev_x = x.clone();
        let mut prev_g = g.clone();
        for k in 0..iters {
            if !(dot(&g, &g).sqrt() > g0 * T::lit(1e-15)) || !step.is_finite() {
                break;
            }
            for i in 0..dim {
                x[i] = x[i] - step * g[i];
            }
            hx = instance.apply_h(&blocks, &x);
            g = hx.iter().map(|v| *v * T::two()).collect();
            project(&mut g);
            let sx: Vec<T> = x.iter().zip(&prev_x).map(|(a, b)| *a - *b).collect();
            let sg: Vec<T> = g.iter().zip(&prev_g).map(|(a, b)| *a - *b).collect();
            let sy = dot(&sx, &sg);
            if !(sy > T::zero()) {
                break;
            }
            // alternate the two Barzilai–Borwein step lengths
            step = if k % 2 == 0 { dot(&sx, &sx) / sy } else { sy / dot(&sg, &sg) };
            prev_x.clone_from(&x);
            prev_g.clone_from(&g);
        }
        let q = dot(&x, &hx);
        let ell = dot(&c, &x);
        let value = ell * ell / q;
        if best.as_ref().is_none_or(|(v, _)| value > *v) {
            let lambda = ell / q;
            best = Some((value, x.iter().map(|v| *v * lambda).collect()));
        }
    }
    match best {
        Some((value, rates)) => MaximizationOutcome::Found {
            rates,
            value,
            restarts_used: used,
            degenerate_restarts: degenerate,
        },
        None => MaximizationOutcome::Inconclusive {
            degenerate_restarts: degenerate,
        },
    }
}
