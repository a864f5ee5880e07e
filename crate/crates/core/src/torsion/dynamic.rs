//! Method of lines for the dimensionless torsion equations
//!
//! `ν φ_tt = α(φ_ss − ∂_s u_d) + μ φ_tss`, `φ(0,t) = 0`,
//! `α(φ_s − u_d) + μ φ_ts = m(t)` at `s = 1`,
//!
//! with the natural twist evolving pointwise or as a single rod-wide value.
//!
//! Angles and angular velocities live on the nodes and twists on the cells
//! between them, so the torque flux `α(u − u_d) + μu̇` is differenced
//! conservatively and the torque boundary condition enters as the flux into
//! the half cell at `s = 1`.

use crate::energetics::NaturalVariant;
use crate::error::{Error, Result};
use crate::grid::RodGrid;
use crate::linalg::{BandMatrix, BorderedBand};
use crate::scalar::Real;

use super::params::TorsionParams;
use super::trbdf2::{integrate, LinearOperator, StepControl, StepMonitor, StepStats, StepView};

pub const MIN_NODES: usize = 16;

/// Nodal initial angle, angular velocity and natural twist on `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct InitialData<T> {
    pub phi: Vec<T>,
    pub velocity: Vec<T>,
    pub u_d: Vec<T>,
}

impl<T: Real> InitialData<T> {
    /// At rest in the reference configuration.
    pub fn quiescent(nodes: usize) -> Self {
        Self {
            phi: vec![T::zero(); nodes],
            velocity: vec![T::zero(); nodes],
            u_d: vec![T::zero(); nodes],
        }
    }

    /// Samples `(φ, φ_t, u_d)` as functions of `s`.
    pub fn from_fn<F: Fn(T) -> (T, T, T)>(grid: &RodGrid<T>, f: F) -> Self {
        let mut out = Self::quiescent(grid.nodes());
        for (i, s) in grid.positions().into_iter().enumerate() {
            let (p, v, u) = f(s);
            out.phi[i] = p;
            out.velocity[i] = v;
            out.u_d[i] = u;
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DynamicOptions<T> {
    pub nodes: usize,
    /// Output times, nondecreasing from `0`.
    pub times: Vec<T>,
    /// Times at which the torque is not smooth.
    pub breakpoints: Vec<T>,
    pub control: StepControl<T>,
    /// Bound on the per-step relative energy-balance defect enforced by step
    /// rejection; `None` only measures it.
    pub energy_tol: Option<T>,
}

impl<T: Real> DynamicOptions<T> {
    pub fn new(nodes: usize, times: Vec<T>) -> Self {
        Self {
            nodes,
            times,
            breakpoints: Vec::new(),
            control: StepControl::default(),
            energy_tol: Some(T::lit(1e-7)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DynamicSolution<T> {
    pub grid: RodGrid<T>,
    pub variant: NaturalVariant,
    pub times: Vec<T>,
    /// `phi[k][i]` is the angle at node `i` and output time `k`.
    pub phi: Vec<Vec<T>>,
    pub velocity: Vec<Vec<T>>,
    /// Natural twist at the nodes, reconstructed from cell values.
    pub u_d: Vec<Vec<T>>,
    /// Applied torque at `s = 1`.
    pub torque_end: Vec<T>,
    /// Reaction torque at the clamped end `s = 0`.
    pub torque_root: Vec<T>,
    /// Discrete energy at each output time.
    pub energy: Vec<T>,
    /// Largest per-step relative defect of the discrete energy balance, over
    /// steps where some state component exceeds `atol/rtol`.
    pub max_energy_residual: T,
    pub stats: StepStats,
}

impl<T: Real> DynamicSolution<T> {
    /// `φ(1, t)` at every output time.
    pub fn end_angle(&self) -> Vec<T> {
        self.phi.iter().map(|p| p[p.len() - 1]).collect()
    }

    /// Angle, cell twists and nodal natural twist at output `k`.
    pub fn state(&self, k: usize) -> TorsionState<T> {
        let h = self.grid.spacing();
        let phi = self.phi[k].clone();
        let u = phi.windows(2).map(|w| (w[1] - w[0]) / h).collect();
        TorsionState { phi, u, u_d: self.u_d[k].clone() }
    }
}

/// Twist field on a grid: nodal angle `φ` with `φ(0) = 0`, the twist `u` on
/// each cell between nodes, and the nodal natural twist.
#[derive(Clone, Debug, PartialEq)]
pub struct TorsionState<T> {
    pub phi: Vec<T>,
    pub u: Vec<T>,
    pub u_d: Vec<T>,
}

impl<T: Real> TorsionState<T> {
    /// Accumulates cell twists into nodal angles.
    pub fn from_twist(grid: &RodGrid<T>, u: Vec<T>, u_d: Vec<T>) -> Result<Self> {
        if u.len() + 1 != grid.nodes() || u_d.len() != grid.nodes() {
            return Err(Error::Precondition("twist needs one value per cell and u_d one per node".into()));
        }
        let h = grid.spacing();
        let mut phi = Vec::with_capacity(grid.nodes());
        phi.push(T::zero());
        for (k, uk) in u.iter().enumerate() {
            phi.push(phi[k] + h * *uk);
        }
        Ok(Self { phi, u, u_d })
    }
}

#[derive(Clone, Copy)]
struct Layout {
    cells: usize,
    variant: NaturalVariant,
}

impl Layout {
    fn stride(&self) -> usize {
        match self.variant {
            NaturalVariant::Local => 3,
            NaturalVariant::Uniform => 2,
        }
    }

    fn dim(&self) -> usize {
        match self.variant {
            NaturalVariant::Local => 3 * self.cells,
            NaturalVariant::Uniform => 2 * self.cells + 1,
        }
    }

    // Node k (1..=cells) unknowns, cell j (1..=cells) natural twist.
    fn phi(&self, k: usize) -> usize {
        self.stride() * (k - 1)
    }

    fn w(&self, k: usize) -> usize {
        self.stride() * (k - 1) + 1
    }

    fn ud(&self, j: usize) -> usize {
        match self.variant {
            NaturalVariant::Local => 3 * (j - 1) + 2,
            NaturalVariant::Uniform => 2 * self.cells,
        }
    }
}

/// Cell quantities extracted from a state vector.
struct Cells<T> {
    u: Vec<T>,
    u_rate: Vec<T>,
    u_d: Vec<T>,
}

struct Model<T> {
    p: TorsionParams<T>,
    layout: Layout,
    h: T,
}

impl<T: Real> Model<T> {
    fn node(&self, y: &[T], k: usize) -> (T, T) {
        if k == 0 {
            (T::zero(), T::zero())
        } else {
            (y[self.layout.phi(k)], y[self.layout.w(k)])
        }
    }

    fn cells(&self, y: &[T]) -> Cells<T> {
        let n = self.layout.cells;
        let mut c = Cells { u: Vec::with_capacity(n), u_rate: Vec::with_capacity(n), u_d: Vec::with_capacity(n) };
        for j in 1..=n {
            let (p0, w0) = self.node(y, j - 1);
            let (p1, w1) = self.node(y, j);
            c.u.push((p1 - p0) / self.h);
            c.u_rate.push((w1 - w0) / self.h);
            c.u_d.push(y[self.layout.ud(j)]);
        }
        c
    }

    fn mass(&self) -> Vec<T> {
        let l = self.layout;
        let mut m = vec![T::one(); l.dim()];
        for k in 1..=l.cells {
            let share = if k == l.cells { self.h * T::half() } else { self.h };
            m[l.w(k)] = self.p.nu * share;
            m[l.ud(k)] = self.p.mu_d;
        }
        m
    }

    /// Writes the constant operator `J` through `add(row, col, value)`.
    fn assemble(&self, add: &mut dyn FnMut(usize, usize, T)) {
        let l = self.layout;
        let TorsionParams { mu, mu_d: _, alpha, alpha_d, .. } = self.p;
        let inv_h = T::one() / self.h;
        // Coefficients of the flux τ_j = α(u_j − u_{d,j}) + μu̇_j.
        let flux = |j: usize| {
            let mut terms = vec![(l.phi(j), alpha * inv_h), (l.w(j), mu * inv_h), (l.ud(j), -alpha)];
            if j > 1 {
                terms.push((l.phi(j - 1), -alpha * inv_h));
                terms.push((l.w(j - 1), -mu * inv_h));
            }
            terms
        };
        for k in 1..=l.cells {
            add(l.phi(k), l.w(k), T::one());
            if k < l.cells {
                for (col, v) in flux(k + 1) {
                    add(l.w(k), col, v);
                }
            }
            for (col, v) in flux(k) {
                add(l.w(k), col, -v);
            }
        }
        match l.variant {
            NaturalVariant::Local => {
                for j in 1..=l.cells {
                    add(l.ud(j), l.phi(j), alpha * inv_h);
                    if j > 1 {
                        add(l.ud(j), l.phi(j - 1), -alpha * inv_h);
                    }
                    add(l.ud(j), l.ud(j), -(alpha + alpha_d));
                }
            }
            NaturalVariant::Uniform => {
                // ∫u ds = φ(1)
                add(l.ud(1), l.phi(l.cells), alpha);
                add(l.ud(1), l.ud(1), -(alpha + alpha_d));
            }
        }
    }

    fn energy(&self, y: &[T]) -> T {
        let l = self.layout;
        let c = self.cells(y);
        let mut e = T::zero();
        for k in 1..=l.cells {
            let share = if k == l.cells { self.h * T::half() } else { self.h };
            let w = y[l.w(k)];
            e = e + self.p.nu * share * w * w * T::half();
        }
        for j in 0..l.cells {
            let el = c.u[j] - c.u_d[j];
            e = e + self.h * T::half() * (self.p.alpha * el * el + self.p.alpha_d * c.u_d[j] * c.u_d[j]);
        }
        e
    }

    /// Dissipation rate given the state and the natural-twist rates.
    fn dissipation(&self, y: &[T], ud_rate: &[T]) -> T {
        let c = self.cells(y);
        let mut d = T::zero();
        for r in &c.u_rate {
            d = d + self.h * self.p.mu * *r * *r;
        }
        match self.layout.variant {
            NaturalVariant::Local => {
                for r in ud_rate {
                    d = d + self.h * self.p.mu_d * *r * *r;
                }
            }
            NaturalVariant::Uniform => d = d + self.p.mu_d * ud_rate[0] * ud_rate[0],
        }
        d
    }

    fn ud_rates(&self, y: &[T]) -> Vec<T> {
        let c = self.cells(y);
        let TorsionParams { mu_d, alpha, alpha_d, .. } = self.p;
        match self.layout.variant {
            NaturalVariant::Local => (0..self.layout.cells)
                .map(|j| (alpha * (c.u[j] - c.u_d[j]) - alpha_d * c.u_d[j]) / mu_d)
                .collect(),
            NaturalVariant::Uniform => {
                let phi_end = y[self.layout.phi(self.layout.cells)];
                vec![(alpha * (phi_end - c.u_d[0]) - alpha_d * c.u_d[0]) / mu_d]
            }
        }
    }

    fn nodal_u_d(&self, y: &[T]) -> Vec<T> {
        let c = self.cells(y).u_d;
        let n = c.len();
        let mut out = Vec::with_capacity(n + 1);
        out.push((T::lit(3.0) * c[0] - c[1]) * T::half());
        for j in 1..n {
            out.push((c[j - 1] + c[j]) * T::half());
        }
        out.push((T::lit(3.0) * c[n - 1] - c[n - 2]) * T::half());
        out
    }

    fn root_torque(&self, y: &[T]) -> T {
        let c = self.cells(y);
        let tau = |j: usize| self.p.alpha * (c.u[j] - c.u_d[j]) + self.p.mu * c.u_rate[j];
        (T::lit(3.0) * tau(0) - tau(1)) * T::half()
    }
}

/// Solves the dynamic torsion problem on `[0, 1]` with torque `m(t)` at
/// `s = 1`, by TR-BDF2 on the semi-discrete system.
pub fn dynamic_pde_solve<T, F>(
    params: &TorsionParams<T>,
    variant: NaturalVariant,
    initial: &InitialData<T>,
    torque: F,
    options: &DynamicOptions<T>,
) -> Result<DynamicSolution<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    if !(params.nu > T::zero()) {
        return Err(Error::InvalidParameter {
            name: "nu",
            value: params.nu.to_f64_lossy(),
            reason: "must be positive for the dynamic problem",
        });
    }
    let nodes = options.nodes;
    if nodes < MIN_NODES {
        return Err(Error::InsufficientGrid { nodes, required: MIN_NODES });
    }
    let grid = RodGrid::unit(nodes)?;
    for (name, v) in [("phi", &initial.phi), ("velocity", &initial.velocity), ("u_d", &initial.u_d)] {
        if v.len() != nodes {
            return Err(Error::Precondition(format!(
                "initial {name} has {} values for {nodes} nodes",
                v.len()
            )));
        }
    }
    if initial.phi[0] != T::zero() || initial.velocity[0] != T::zero() {
        return Err(Error::Precondition("initial angle and velocity must vanish at s = 0".into()));
    }
    if options.times.is_empty() || options.times[0] != T::zero() {
        return Err(Error::Precondition("output times must start at 0".into()));
    }

    let layout = Layout { cells: nodes - 1, variant };
    let model = Model { p: *params, layout, h: grid.spacing() };
    let mut y0 = vec![T::zero(); layout.dim()];
    for k in 1..nodes {
        y0[layout.phi(k)] = initial.phi[k];
        y0[layout.w(k)] = initial.velocity[k];
    }
    match variant {
        NaturalVariant::Local => {
            for j in 1..nodes {
                y0[layout.ud(j)] = (initial.u_d[j - 1] + initial.u_d[j]) * T::half();
            }
        }
        NaturalVariant::Uniform => {
            let first = initial.u_d[0];
            let tol = T::lit(1e-12) * T::one().max(first.abs());
            if initial.u_d.iter().any(|v| (*v - first).abs() > tol) {
                return Err(Error::Precondition("uniform variant needs a constant initial natural twist".into()));
            }
            y0[layout.ud(1)] = first;
        }
    }

    match variant {
        NaturalVariant::Local => {
            let mut j = BandMatrix::zeros(layout.dim(), 5, 5);
            model.assemble(&mut |r, c, v| j.add(r, c, v));
            run(&model, &j, &y0, &torque, options, grid)
        }
        NaturalVariant::Uniform => {
            let nb = layout.dim() - 1;
            let mut j = BorderedBand::zeros(nb, 3, 3);
            model.assemble(&mut |r, c, v| match (r < nb, c < nb) {
                (true, true) => j.band.add(r, c, v),
                (true, false) => j.col[r] = j.col[r] + v,
                (false, true) => j.row[c] = j.row[c] + v,
                (false, false) => j.corner = j.corner + v,
            });
            run(&model, &j, &y0, &torque, options, grid)
        }
    }
}

fn run<T, J, F>(
    model: &Model<T>,
    jac: &J,
    y0: &[T],
    torque: &F,
    options: &DynamicOptions<T>,
    grid: RodGrid<T>,
) -> Result<DynamicSolution<T>>
where
    T: Real,
    J: LinearOperator<T>,
    F: Fn(T) -> T,
{
    let layout = model.layout;
    let end_w = layout.w(layout.cells);
    let dim = layout.dim();
    let forcing = |t: T| {
        let mut b = vec![T::zero(); dim];
        b[end_w] = torque(t);
        b
    };
    let mass = model.mass();

    let gamma = T::two() - T::SQRT_2();
    let (nodes, weights) = gauss_legendre_4::<T>();
    let mut monitor = EnergyMonitor {
        model,
        jac,
        torque,
        mass: &mass,
        end_w,
        nodes,
        weights,
        basis: nodes.map(|x| hermite_basis(gamma, x)),
        rtol: options.control.rtol,
        atol: options.control.atol,
        limit: options.energy_tol,
        last: T::zero(),
        worst: T::zero(),
    };
    let (states, stats) = integrate(
        jac,
        &mass,
        forcing,
        y0,
        &options.times,
        &options.breakpoints,
        &options.control,
        &mut monitor,
    )?;

    let nodal = |y: &[T], pick: &dyn Fn(usize) -> usize| {
        let mut v = vec![T::zero()];
        v.extend((1..=layout.cells).map(|k| y[pick(k)]));
        v
    };
    Ok(DynamicSolution {
        grid,
        variant: layout.variant,
        times: options.times.clone(),
        phi: states.iter().map(|y| nodal(y, &|k| layout.phi(k))).collect(),
        velocity: states.iter().map(|y| nodal(y, &|k| layout.w(k))).collect(),
        u_d: states.iter().map(|y| model.nodal_u_d(y)).collect(),
        torque_end: options.times.iter().map(|&t| torque(t)).collect(),
        torque_root: states.iter().map(|y| model.root_torque(y)).collect(),
        energy: states.iter().map(|y| model.energy(y)).collect(),
        max_energy_residual: monitor.worst,
        stats,
    })
}

/// Measures the discrete energy balance `ΔE = ∫(P − D) dt` on every step and
/// rejects steps whose relative defect exceeds `limit`.
struct EnergyMonitor<'a, T, J, F> {
    model: &'a Model<T>,
    jac: &'a J,
    torque: &'a F,
    mass: &'a [T],
    end_w: usize,
    nodes: [T; 4],
    weights: [T; 4],
    basis: [[T; 5]; 4],
    rtol: T,
    atol: T,
    limit: Option<T>,
    last: T,
    worst: T,
}

impl<T, J, F> EnergyMonitor<'_, T, J, F>
where
    T: Real,
    J: LinearOperator<T>,
    F: Fn(T) -> T,
{
    fn rate(&self, t: T, y: &[T]) -> Vec<T> {
        let mut r = self.jac.apply(y);
        r[self.end_w] = r[self.end_w] + (self.torque)(t);
        r.iter().zip(self.mass).map(|(a, m)| *a / *m).collect()
    }

    fn residual(&self, s: &StepView<'_, T>) -> T {
        // Below the absolute tolerance the step error is not controlled
        // relative to the state, so the balance is only judged once the
        // relative part of the error weight dominates.
        let resolved = s.y1.iter().fold(T::zero(), |m, v| m.max(v.abs())) * self.rtol >= self.atol;
        if !resolved {
            return T::zero();
        }
        let dt = s.t1 - s.t0;
        let r0 = self.rate(s.t0, s.y0);
        let r1 = self.rate(s.t1, s.y1);
        // Power and dissipation along the quartic through the step's three
        // states and two end rates.
        let (mut net, mut flow) = (T::zero(), T::zero());
        let mut y = vec![T::zero(); s.y0.len()];
        for ((&x, &wq), b) in self.nodes.iter().zip(&self.weights).zip(&self.basis) {
            for i in 0..y.len() {
                y[i] = b[0] * s.y0[i] + b[1] * s.y_mid[i] + b[2] * s.y1[i] + dt * (b[3] * r0[i] + b[4] * r1[i]);
            }
            let power = (self.torque)(s.t0 + x * dt) * y[self.end_w];
            let diss = self.model.dissipation(&y, &self.model.ud_rates(&y));
            net = net + wq * dt * (power - diss);
            flow = flow + wq * dt * (power.abs() + diss);
        }
        let (e0, e1) = (self.model.energy(s.y0), self.model.energy(s.y1));
        let de = e1 - e0;
        // Flows below what rounding in the energies lets us resolve to
        // 1e-8 relative are judged against that rounding level instead.
        let cells = T::from_usize(self.model.layout.cells).unwrap();
        let floor = T::epsilon() * cells * (e0.abs() + e1.abs()) * T::lit(1e8);
        let scale = de.abs().max(flow).max(floor);
        if scale > T::zero() {
            (de - net).abs() / scale
        } else {
            T::zero()
        }
    }
}

impl<T, J, F> StepMonitor<T> for EnergyMonitor<'_, T, J, F>
where
    T: Real,
    J: LinearOperator<T>,
    F: Fn(T) -> T,
{
    fn assess(&mut self, step: &StepView<'_, T>) -> T {
        self.last = self.residual(step);
        self.limit.map_or(T::zero(), |l| self.last / l)
    }

    fn accepted(&mut self, _step: &StepView<'_, T>) {
        self.worst = self.worst.max(self.last);
    }
}

/// Four-point Gauss–Legendre rule on `[0, 1]`.
fn gauss_legendre_4<T: Real>() -> ([T; 4], [T; 4]) {
    let r = (T::lit(6.0) / T::lit(5.0)).sqrt() * T::two() / T::lit(7.0);
    let inner = (T::lit(3.0 / 7.0) - r).sqrt();
    let outer = (T::lit(3.0 / 7.0) + r).sqrt();
    let s30 = T::lit(30.0).sqrt();
    let w_inner = (T::lit(18.0) + s30) / T::lit(72.0);
    let w_outer = (T::lit(18.0) - s30) / T::lit(72.0);
    let h = T::half();
    (
        [h * (T::one() - outer), h * (T::one() - inner), h * (T::one() + inner), h * (T::one() + outer)],
        [w_outer, w_inner, w_inner, w_outer],
    )
}

/// Coefficients `b` with `p(x) = b₀p(0) + b₁p(γ) + b₂p(1) + b₃p'(0) + b₄p'(1)`
/// for every quartic `p`.
fn hermite_basis<T: Real>(gamma: T, x: T) -> [T; 5] {
    // Rows of C: the five functionals applied to the monomials 1, x, …, x⁴.
    // The weights solve Cᵀb = (1, x, …, x⁴).
    let mut c = [[T::zero(); 5]; 5];
    for k in 0..5 {
        let kk = T::from_usize(k).unwrap();
        c[0][k] = if k == 0 { T::one() } else { T::zero() };
        c[1][k] = gamma.powi(k as i32);
        c[2][k] = T::one();
        c[3][k] = if k == 1 { T::one() } else { T::zero() };
        c[4][k] = kk;
    }
    let mut a = [[T::zero(); 6]; 5];
    for k in 0..5 {
        for f in 0..5 {
            a[k][f] = c[f][k];
        }
        a[k][5] = x.powi(k as i32);
    }
    for col in 0..5 {
        let piv = (col..5)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        a.swap(col, piv);
        for row in 0..5 {
            if row != col {
                let f = a[row][col] / a[col][col];
                for k in col..6 {
                    a[row][k] = a[row][k] - f * a[col][k];
                }
            }
        }
    }
    let mut b = [T::zero(); 5];
    for k in 0..5 {
        b[k] = a[k][5] / a[k][k];
    }
    b
}
