//! Scenario execution and the invariant checks reported for each run.

use evorod::constitutive::{maximizer_value, WrenchComponents};
use evorod::energetics::{point_state, DissipationTensors, NaturalVariant, QuadraticEnergy, StateField};
use evorod::grid::RodGrid;
use evorod::kinematics::{DirectorFrame, NaturalState, PointState};
use evorod::linalg::{Mat3, Vec3};
use evorod::oracle::{
    brute_force_maximize, reference_integrate, uniform_twist_dissipation, DiscreteMaximizationInstance,
    MaximizationOutcome,
};
use evorod::torsion::{
    creep_mu_zero, creep_response, dynamic_pde_solve, quasistatic_rhs, relaxation_response, sample_times,
    DynamicOptions, InitialData, InputHistory, TorsionParams, TorsionTrace, Waveform,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::{self, Config, Numerics};

const REFERENCE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Info,
}

#[derive(Debug)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

impl Check {
    fn bound(name: &str, residual: f64, tol: f64) -> Self {
        Self {
            name: name.into(),
            status: if residual <= tol { Status::Pass } else { Status::Fail },
            detail: format!("residual={residual:.3e} tolerance={tol:.1e}"),
        }
    }

    fn holds(name: &str, ok: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            detail,
        }
    }

    fn info(name: &str, detail: String) -> Self {
        Self { name: name.into(), status: Status::Info, detail }
    }
}

/// A CSV table; every value is written with 17 significant digits unless it
/// is an integer column.
pub struct Table {
    pub header: &'static str,
    pub rows: Vec<Vec<Cell>>,
}

pub enum Cell {
    Float(f64),
    Int(usize),
    Text(&'static str),
}

pub struct RunResult {
    pub table: Table,
    pub checks: Vec<Check>,
    pub summary: String,
}

type Outcome = Result<RunResult, String>;

pub fn run(config: &Config) -> Outcome {
    let stride = config.output().sample_stride;
    if stride == 0 {
        return Err("output.sample_stride must be at least 1".into());
    }
    match config {
        Config::Relaxation(c) => quasistatic(Kind::Relaxation, c, stride),
        Config::Creep(c) => quasistatic(Kind::Creep, c, stride),
        Config::CreepMuZero(c) => quasistatic(Kind::CreepMuZero, c, stride),
        Config::Dynamic(c) => dynamic(c, stride),
        Config::MaximizerCheck(c) => maximizer_check(c),
        Config::Counterexample(c) => counterexample(c),
    }
}

fn err(e: evorod::Error) -> String {
    e.to_string()
}

fn strided(len: usize, stride: usize) -> impl Iterator<Item = usize> {
    (0..len).filter(move |k| k % stride == 0 || *k + 1 == len)
}

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Relaxation,
    Creep,
    CreepMuZero,
}

/// Sample times merged with the waveform breakpoints, and the positions of the
/// samples within the merged list.
fn merged_times(times: &[f64], w: &Waveform<f64>) -> (Vec<f64>, Vec<usize>) {
    let t_end = times[times.len() - 1];
    let mut all: Vec<f64> = times.to_vec();
    all.extend(w.breakpoints().into_iter().filter(|b| *b > 0.0 && *b < t_end));
    all.sort_by(|a, b| a.total_cmp(b));
    all.dedup();
    let idx = times.iter().map(|t| all.iter().position(|x| x == t).unwrap()).collect();
    (all, idx)
}

fn scale_of(values: &[f64]) -> f64 {
    values.iter().fold(1.0f64, |m, x| m.max(x.abs()))
}

fn quasistatic(kind: Kind, c: &config::Quasistatic, stride: usize) -> Outcome {
    c.numerics.validate()?;
    let p = c.params.build().map_err(err)?;
    let w = c.input.waveform(c.numerics.ramp_duration, true).map_err(err)?;
    let times = sample_times(c.numerics.t_end, c.numerics.samples);
    let trace = match kind {
        Kind::Relaxation => relaxation_response(&p, &InputHistory::twist(w.clone()), &times),
        Kind::Creep => creep_response(&p, &InputHistory::torque(w.clone()), &times),
        Kind::CreepMuZero => creep_mu_zero(&p, &InputHistory::torque(w.clone()), &times),
    }
    .map_err(err)?;

    let mut checks = vec![Check::holds(
        "finite trace",
        trace.u.iter().chain(&trace.u_d).chain(&trace.m).all(|x| x.is_finite()),
        format!("{} rows", trace.len()),
    )];
    checks.push(reference_check(kind, &p, &w, &trace)?);
    if let Waveform::Step { amplitude } = w {
        checks.extend(step_checks(kind, &p, amplitude, &trace));
    }

    let impulse = trace.impulse.map_or(0.0, |i| i.amplitude);
    let rows = strided(trace.len(), stride)
        .map(|k| {
            [trace.times[k], trace.u[k], trace.u_d[k], trace.m[k], impulse]
                .into_iter()
                .map(Cell::Float)
                .collect()
        })
        .collect();
    let last = trace.len() - 1;
    Ok(RunResult {
        table: Table { header: "t,u,u_d,m_regular,m_impulse_amplitude", rows },
        checks,
        summary: format!(
            "t = {}: u = {:.6}, u_d = {:.6}, m = {:.6}",
            trace.times[last], trace.u[last], trace.u_d[last], trace.m[last]
        ),
    })
}

/// Compares the trace with adaptive Dormand–Prince integration of the same
/// quasi-static equations.
fn reference_check(kind: Kind, p: &TorsionParams<f64>, w: &Waveform<f64>, trace: &TorsionTrace<f64>) -> Result<Check, String> {
    let (all, idx) = merged_times(&trace.times, w);
    let p = *p;
    let wv = w.clone();
    let (mut worst, scale) = (0.0f64, scale_of(&trace.u).max(scale_of(&trace.m)));
    match kind {
        Kind::Relaxation => {
            let rhs = move |t: f64, y: &[f64]| vec![(p.alpha * wv.value(t) - (p.alpha + p.alpha_d) * y[0]) / p.mu_d];
            let r = reference_integrate(rhs, &[0.0], &all, REFERENCE_TOL).map_err(err)?;
            for (k, &j) in idx.iter().enumerate() {
                let t = trace.times[k];
                let ud = r.states[j][0];
                let m = p.mu * w.derivative(t) + p.alpha * (w.value(t) - ud);
                worst = worst.max((trace.u_d[k] - ud).abs()).max((trace.m[k] - m).abs());
            }
        }
        Kind::Creep => {
            let rhs = move |t: f64, y: &[f64]| {
                let (a, b) = quasistatic_rhs(&p, y[0], y[1], wv.value(t)).unwrap_or((f64::NAN, f64::NAN));
                vec![a, b]
            };
            let r = reference_integrate(rhs, &[0.0, 0.0], &all, REFERENCE_TOL).map_err(err)?;
            for (k, &j) in idx.iter().enumerate() {
                worst = worst.max((trace.u[k] - r.states[j][0]).abs()).max((trace.u_d[k] - r.states[j][1]).abs());
            }
        }
        Kind::CreepMuZero => {
            let rhs = move |t: f64, y: &[f64]| vec![(wv.value(t) - p.alpha_d * y[0]) / p.mu_d];
            let r = reference_integrate(rhs, &[0.0], &all, REFERENCE_TOL).map_err(err)?;
            for (k, &j) in idx.iter().enumerate() {
                let ud = r.states[j][0];
                let u = w.value(trace.times[k]) / p.alpha + ud;
                worst = worst.max((trace.u_d[k] - ud).abs()).max((trace.u[k] - u).abs());
            }
        }
    }
    Ok(Check::bound("agreement with reference integration", worst / scale, 1e-8))
}

fn step_checks(kind: Kind, p: &TorsionParams<f64>, amplitude: f64, trace: &TorsionTrace<f64>) -> Vec<Check> {
    let last = trace.len() - 1;
    let t_end = trace.times[last];
    match kind {
        Kind::Relaxation => {
            let plateau = p.alpha * p.alpha_d * amplitude / (p.alpha + p.alpha_d);
            let decreasing = trace.m.windows(2).all(|w| (w[1] - w[0]) * amplitude.signum() <= 0.0);
            vec![
                Check::holds(
                    "torque decreases monotonically",
                    decreasing,
                    format!("m(0+) = {:.6}, m(t_end) = {:.6}", trace.m[0], trace.m[last]),
                ),
                Check::info(
                    "relaxed torque",
                    format!(
                        "m(inf) = {plateau:.17}, |m(t_end) - m(inf)| = {:.3e} at t_end = {t_end}",
                        (trace.m[last] - plateau).abs()
                    ),
                ),
                Check::info("impulse", format!("amplitude mu*u0 = {:.17} at t = 0", p.mu * amplitude)),
            ]
        }
        Kind::Creep | Kind::CreepMuZero => {
            let (u_inf, ud_inf) = p.creep_asymptotes(amplitude);
            let growing = trace.u.windows(2).all(|w| (w[1] - w[0]) * amplitude.signum() >= -1e-15);
            vec![
                Check::holds(
                    "twist grows monotonically",
                    growing,
                    format!("u(t_end) = {:.6}", trace.u[last]),
                ),
                Check::info(
                    "creep asymptotes",
                    format!(
                        "u(inf) = {u_inf:.17}, u_d(inf) = {ud_inf:.17}, distance at t_end = {t_end}: {:.3e}, {:.3e}",
                        (trace.u[last] - u_inf).abs(),
                        (trace.u_d[last] - ud_inf).abs()
                    ),
                ),
            ]
        }
    }
}

fn dynamic(c: &config::Dynamic, stride: usize) -> Outcome {
    c.numerics.validate()?;
    let p = c.params.build().map_err(err)?;
    let w = c.input.waveform(c.numerics.ramp_duration, false).map_err(err)?;
    let n = c.numerics.grid_nodes;
    let times = sample_times(c.numerics.t_end, c.numerics.samples);
    let mut opts = DynamicOptions::new(n, times.clone());
    opts.breakpoints = w.breakpoints();
    apply_control(&mut opts, &c.numerics);
    let torque = w.clone();
    let sol = dynamic_pde_solve(&p, c.variant.natural(), &InitialData::quiescent(n), move |t| torque.value(t), &opts)
        .map_err(err)?;

    let mut checks = vec![
        Check::bound("per-step energy balance", sol.max_energy_residual, 1e-6),
        Check::holds(
            "nonnegative stored energy",
            sol.energy.iter().all(|e| *e >= 0.0),
            format!("final energy {:.6e}", sol.energy[sol.energy.len() - 1]),
        ),
        Check::info(
            "steps",
            format!(
                "accepted {}, rejected {}, factorizations {}",
                sol.stats.accepted, sol.stats.rejected, sol.stats.factorizations
            ),
        ),
    ];
    if p.mu > 0.0 {
        let qs = creep_response(&p, &InputHistory::torque(w), &times).map_err(err)?;
        let end = sol.end_angle();
        let gap = end.iter().zip(&qs.u).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        checks.push(Check::info(
            "deviation from quasi-static creep",
            format!("max |phi(1,t) - u_qs(t)| = {gap:.3e} (small only for small nu)"),
        ));
    }

    let positions = sol.grid.positions();
    let mut rows = Vec::new();
    for k in strided(sol.times.len(), stride) {
        for (i, s) in positions.iter().enumerate() {
            rows.push(vec![
                Cell::Float(*s),
                Cell::Float(sol.times[k]),
                Cell::Float(sol.phi[k][i]),
                Cell::Float(sol.u_d[k][i]),
            ]);
        }
    }
    let last = sol.times.len() - 1;
    Ok(RunResult {
        table: Table { header: "s,t,phi,u_d", rows },
        checks,
        summary: format!("t = {}: end angle {:.6}", sol.times[last], sol.phi[last][n - 1]),
    })
}

fn apply_control(opts: &mut DynamicOptions<f64>, numerics: &Numerics) {
    if let Some(tol) = numerics.tol {
        opts.control.rtol = tol;
        opts.control.atol = tol * 1e-2;
    }
    opts.control.dt_initial = numerics.dt_initial;
}

fn random_frame(rng: &mut ChaCha8Rng) -> DirectorFrame<f64> {
    DirectorFrame::from_rotation_vector(&random_vec(rng, 3.0))
}

fn random_vec(rng: &mut ChaCha8Rng, r: f64) -> Vec3<f64> {
    Vec3::new(rng.gen_range(-r..r), rng.gen_range(-r..r), rng.gen_range(-r..r))
}

fn random_stretch(rng: &mut ChaCha8Rng) -> Vec3<f64> {
    Vec3::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5), rng.gen_range(0.3..1.7))
}

fn random_positive(rng: &mut ChaCha8Rng) -> Vec3<f64> {
    Vec3::new(rng.gen_range(0.3..5.0), rng.gen_range(0.3..5.0), rng.gen_range(0.3..5.0))
}

/// `Q diag(λ) Qᵀ` with eigenvalue ratios at most `cond`.
fn random_spd(rng: &mut ChaCha8Rng, cond: f64) -> Mat3<f64> {
    let q = *random_frame(rng).matrix();
    let base = rng.gen_range(0.1f64..10.0);
    let mut spread = || (rng.gen_range(0.0..cond.ln())).exp();
    let lam = Vec3::new(base, base * spread(), base * spread());
    let m = q * Mat3::diagonal(&lam) * q.transpose();
    (m + m.transpose()).scale(0.5)
}

fn maximizer_check(c: &config::MaximizerCheck) -> Outcome {
    if c.nodes.is_empty() || c.variants.is_empty() {
        return Err("maximizer_check needs at least one node count and one variant".into());
    }
    if !(c.max_condition >= 1.0) {
        return Err(format!("max_condition must be at least 1, got {}", c.max_condition));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let mut rows = Vec::new();
    let (mut lo, mut hi, mut arg, mut resid) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut inconclusive = 0;
    for i in 0..c.instances {
        let nodes = c.nodes[i % c.nodes.len()];
        let variant = c.variants[(i / c.nodes.len()) % c.variants.len()];
        let space = variant.natural();
        let energy = QuadraticEnergy::new(
            random_positive(&mut rng),
            random_positive(&mut rng),
            random_positive(&mut rng),
            random_positive(&mut rng),
        )
        .map_err(err)?;
        let spd: Vec<Mat3<f64>> = (0..4).map(|_| random_spd(&mut rng, c.max_condition)).collect();
        let tensors = DissipationTensors::new(spd[0], spd[1], spd[2], spd[3]).map_err(err)?;
        let shared = NaturalState::new(random_vec(&mut rng, 1.0), random_stretch(&mut rng)).map_err(err)?;
        let states = (0..nodes)
            .map(|_| {
                let (u_d, v_d) = match space {
                    NaturalVariant::Local => (random_vec(&mut rng, 1.0), random_stretch(&mut rng)),
                    NaturalVariant::Uniform => (shared.u_d(), shared.v_d()),
                };
                point_state(u_d, v_d, random_vec(&mut rng, 1.0), random_stretch(&mut rng))
            })
            .collect::<evorod::Result<Vec<PointState<f64>>>>()
            .map_err(err)?;
        let grid = RodGrid::new(rng.gen_range(0.5..2.0), nodes).map_err(err)?;
        let field = StateField::new(grid, states).map_err(err)?;
        let wrenches: Vec<_> = (0..nodes)
            .map(|_| WrenchComponents { m: random_vec(&mut rng, 2.0), n: random_vec(&mut rng, 2.0) })
            .collect();
        let value = maximizer_value(&energy, &tensors, &field, &wrenches, space).map_err(err)?;
        let inst = DiscreteMaximizationInstance::from_field(&energy, &tensors, &field, &wrenches, space).map_err(err)?;
        let x = inst.closed_form_rates().map_err(err)?;
        let r = inst.constraint_residual(&x).abs() / value.max(1.0);
        resid = resid.max(r);
        let label = match variant {
            config::Variant::Local => "local",
            config::Variant::Uniform => "uniform",
        };
        match brute_force_maximize(&inst, c.restarts, c.iterations, c.seed.wrapping_add(i as u64)) {
            MaximizationOutcome::Found { rates, value: found, .. } => {
                let gap = (found - value) / value;
                let num: f64 = rates.iter().zip(&x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
                let den: f64 = x.iter().map(|a| a * a).sum::<f64>().sqrt();
                let e = num / den;
                lo = lo.min(gap);
                hi = hi.max(gap);
                arg = arg.max(e);
                rows.push(vec![
                    Cell::Int(i),
                    Cell::Int(nodes),
                    Cell::Text(label),
                    Cell::Float(value),
                    Cell::Float(found),
                    Cell::Float(gap),
                    Cell::Float(e),
                    Cell::Float(r),
                ]);
            }
            MaximizationOutcome::Inconclusive { .. } => inconclusive += 1,
        }
    }
    let checks = vec![
        Check::holds(
            "brute force attains the closed-form maximum",
            lo >= -1e-6 && hi <= 1e-8,
            format!("relative gap in [{lo:.3e}, {hi:.3e}] tolerance=[-1e-6, 1e-8]"),
        ),
        Check::bound("argmax matches closed-form rates", arg, 1e-4),
        Check::bound("closed-form rates satisfy the constraint", resid, 1e-10),
        Check::holds(
            "conclusive searches",
            inconclusive == 0,
            format!("{inconclusive} of {} inconclusive", c.instances),
        ),
    ];
    Ok(RunResult {
        table: Table {
            header: "instance,nodes,variant,closed_form_value,brute_force_value,relative_gap,argmax_error,constraint_residual",
            rows,
        },
        checks,
        summary: format!("{} instances checked", c.instances),
    })
}

fn counterexample(c: &config::Counterexample) -> Outcome {
    let grid = RodGrid::new(c.length, c.nodes).map_err(err)?;
    let twist: Vec<f64> = grid.positions().iter().map(|s| c.twist_root + c.twist_slope * s).collect();
    let r = uniform_twist_dissipation(&grid, &twist, c.a33, c.m_d33).map_err(err)?;
    // closed form at the root, with ∫u ds evaluated exactly for the linear profile
    let integral = c.twist_root * c.length + 0.5 * c.twist_slope * c.length * c.length;
    let expected = c.a33 * c.a33 / c.m_d33 * c.twist_root * integral / c.length;
    let h = grid.spacing();
    let checks = vec![
        Check::holds("pointwise dissipation negative at s = 0", r.xi[0] < 0.0, format!("xi(0) = {:.17}", r.xi[0])),
        Check::bound(
            "xi(0) matches (A33^2/M_d33) u(0) (1/L) int u ds",
            (r.xi[0] - expected).abs(),
            10.0 * h * h * expected.abs().max(1.0),
        ),
        Check::holds(
            "total dissipation nonnegative",
            r.total >= -1e-12,
            format!("int xi ds = {:.17}", r.total),
        ),
    ];
    let rows = (0..grid.nodes())
        .map(|i| {
            vec![
                Cell::Float(r.positions[i]),
                Cell::Float(r.twist[i]),
                Cell::Float(r.xi[i]),
                Cell::Float(r.predicted[i]),
            ]
        })
        .collect();
    Ok(RunResult {
        table: Table { header: "s,u,xi,xi_closed_form", rows },
        checks,
        summary: format!("xi(0) = {:.6}, int xi ds = {:.6}", r.xi[0], r.total),
    })
}
