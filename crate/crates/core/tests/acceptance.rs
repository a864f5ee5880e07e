//! End-to-end acceptance suite. Every criterion prints one PASS/FAIL line with
//! its worst residual and runtime; the run exits nonzero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use common::*;
use evorod::constitutive::{maximizer_value, natural_rate_local, WrenchComponents};
use evorod::energetics::{
    dissipation_profile, gradient_check, HelmholtzEnergy, NaturalVariant, StateField,
};
use evorod::grid::RodGrid;
use evorod::kinematics::{
    apply_frame_change, darboux_of_rotation_field, rotation_field_of_darboux, NaturalState, StrainRates,
    WorldConfiguration,
};
use evorod::linalg::{Mat2, Vec3};
use evorod::oracle::{
    brute_force_maximize, expm_series, reference_integrate, uniform_twist_dissipation,
    DiscreteMaximizationInstance, MaximizationOutcome,
};
use evorod::torsion::*;
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn run(id: usize, name: &str, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let in_time = elapsed <= budget;
    let pass = out.pass && in_time;
    println!(
        "criterion {id:>2} {} {name}: {} [{:.3} s, budget {} s]",
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    pass
}

fn relaxation_exact() -> Outcome {
    let p = TorsionParams::quasistatic(0.5, 1.0, 2.0, 1.0).unwrap();
    let times: Vec<f64> = (0..=999).map(|k| 0.01 + 9.99 * k as f64 / 999.0).collect();
    let tr = relaxation_response(&p, &InputHistory::twist(Waveform::Step { amplitude: 1.0 }), &times).unwrap();
    let closed = tr
        .times
        .iter()
        .zip(&tr.m)
        .map(|(t, m)| (m - (2.0 / 3.0 + 4.0 / 3.0 * (-3.0 * t).exp())).abs())
        .fold(0.0, f64::max);
    let impulse = tr.impulse.map(|i| i.amplitude);

    // independent integration of the natural twist under a fast smoothed ramp
    let ramp = Waveform::smoothed_step(1.0, 1e-4).unwrap();
    let mut t_eval = vec![0.0, 1e-4];
    t_eval.extend(times.iter().filter(|t| **t > 0.05));
    let (a, ad, md, mu) = (p.alpha, p.alpha_d, p.mu_d, p.mu);
    let w = ramp.clone();
    let rhs = move |t: f64, y: &[f64]| vec![(a * w.value(t) - (a + ad) * y[0]) / md];
    let reference = reference_integrate(rhs, &[0.0], &t_eval, 1e-12).unwrap();
    let mut ref_err = 0.0f64;
    for (t, y) in reference.times.iter().zip(&reference.states).skip(2) {
        let m = mu * ramp.derivative(*t) + a * (ramp.value(*t) - y[0]);
        let k = times.iter().position(|s| s == t).unwrap();
        ref_err = ref_err.max((m - tr.m[k]).abs());
    }
    outcome(
        closed < 1e-8 && impulse == Some(0.5) && ref_err < 5e-4,
        format!("closed-form error {closed:.2e}, impulse {impulse:?}, smoothed-ramp reference error {ref_err:.2e}"),
    )
}

fn relaxation_limits() -> Outcome {
    let mut rng = rng(2);
    let mut worst = 0.0f64;
    let mut monotone = true;
    for draw in 0..20 {
        let mu = if draw % 5 == 0 { 0.0 } else { log_uniform(&mut rng, 0.1, 5.0) };
        let p = TorsionParams::quasistatic(
            mu,
            log_uniform(&mut rng, 0.1, 5.0),
            log_uniform(&mut rng, 0.1, 5.0),
            log_uniform(&mut rng, 0.1, 5.0),
        )
        .unwrap();
        let u0 = rng.gen_range(0.5..2.0);
        let t_end = 20.0 / p.relaxation_rate();
        let mut times = vec![0.0];
        times.extend((1..=10_000).map(|k| t_end * k as f64 / 10_000.0));
        let tr =
            relaxation_response(&p, &InputHistory::twist(Waveform::Step { amplitude: u0 }), &times).unwrap();
        let start = p.alpha * u0;
        let plateau = p.alpha * p.alpha_d * u0 / (p.alpha + p.alpha_d);
        worst = worst
            .max((tr.m[0] - start).abs() / start)
            .max((tr.m[times.len() - 1] - plateau).abs() / plateau);
        monotone &= tr.m.windows(2).all(|w| w[1] < w[0]);
    }
    outcome(
        worst < 1e-6 && monotone,
        format!("worst limit error {worst:.2e}, strictly decreasing on all draws: {monotone}"),
    )
}

fn creep_asymptotics() -> Outcome {
    let mut rng = rng(3);
    let mut asym = 0.0f64;
    let mut expm = 0.0f64;
    for _ in 0..20 {
        let p = torsion_params(&mut rng);
        let m0 = rng.gen_range(0.2..3.0);
        let a = p.creep_matrix().unwrap();
        let half = a.trace() / 2.0;
        let lam_min = half - (half * half - a.det()).sqrt();
        let t_end = 30.0 / lam_min;
        let times = sample_times(t_end, 301);
        let tr = creep_response(&p, &InputHistory::torque(Waveform::Step { amplitude: m0 }), &times).unwrap();
        let (u_inf, ud_inf) = p.creep_asymptotes(m0);
        let last = times.len() - 1;
        asym = asym.max((tr.u[last] - u_inf).abs()).max((tr.u_d[last] - ud_inf).abs());
        let a_inv = a.try_inverse().unwrap();
        let rest = a_inv.mul_vec([m0 / p.mu, 0.0]);
        for k in (0..times.len()).step_by(10) {
            let e = expm_series(&a.scale(-times[k]));
            let x = (Mat2::identity() - e).mul_vec(rest);
            let scale = (x[0] * x[0] + x[1] * x[1]).sqrt().max(f64::MIN_POSITIVE);
            let d = ((x[0] - tr.u[k]).powi(2) + (x[1] - tr.u_d[k]).powi(2)).sqrt();
            if k > 0 {
                expm = expm.max(d / scale);
            }
        }
    }
    outcome(
        asym < 1e-6 && expm < 1e-10,
        format!("asymptote error {asym:.2e}, closed form vs scaling-and-squaring {expm:.2e}"),
    )
}

fn creep_without_viscosity() -> Outcome {
    let p = TorsionParams::quasistatic(0.0, 1.2, 1.5, 0.7).unwrap();
    let m0 = 1.3;
    let times = sample_times(8.0, 81);
    let tr = creep_mu_zero(&p, &InputHistory::torque(Waveform::Step { amplitude: m0 }), &times).unwrap();
    let (a, ad, md) = (p.alpha, p.alpha_d, p.mu_d);
    let reference =
        reference_integrate(|_, y: &[f64]| vec![(m0 - ad * y[0]) / md], &[0.0], &times, 1e-13).unwrap();
    let mut err = 0.0f64;
    for (k, y) in reference.states.iter().enumerate().skip(1) {
        err = err.max((tr.u_d[k] - y[0]).abs()).max((tr.u[k] - (m0 / a + y[0])).abs());
    }
    outcome(err < 1e-10, format!("max deviation from reduced-system integration {err:.2e}"))
}

fn maximization_principle() -> Outcome {
    let mut rng = rng(5);
    let (mut lo, mut hi, mut arg, mut resid) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut conclusive = true;
    for i in 0..20 {
        let nodes = if i % 2 == 0 { 4 } else { 8 };
        let space = if (i / 2) % 2 == 0 { NaturalVariant::Local } else { NaturalVariant::Uniform };
        let energy = energy(&mut rng);
        let tensors = tensors(&mut rng, 1e3);
        let grid = RodGrid::new(rng.gen_range(0.5..2.0), nodes).unwrap();
        let shared = NaturalState::new(vec3(&mut rng, 1.0), stretch(&mut rng)).unwrap();
        let states = (0..nodes)
            .map(|_| match space {
                NaturalVariant::Local => state(&mut rng),
                NaturalVariant::Uniform => state_with_natural(&mut rng, shared),
            })
            .collect();
        let field = StateField::new(grid, states).unwrap();
        let wrenches: Vec<_> = (0..nodes)
            .map(|_| WrenchComponents { m: vec3(&mut rng, 2.0), n: vec3(&mut rng, 2.0) })
            .collect();
        let value = maximizer_value(&energy, &tensors, &field, &wrenches, space).unwrap();
        let inst = DiscreteMaximizationInstance::from_field(&energy, &tensors, &field, &wrenches, space).unwrap();
        let x = inst.closed_form_rates().unwrap();
        resid = resid.max(inst.constraint_residual(&x).abs() / value.max(1.0));
        match brute_force_maximize(&inst, 8, 4000, i as u64) {
            MaximizationOutcome::Found { rates, value: found, .. } => {
                let rel = (found - value) / value;
                lo = lo.min(rel);
                hi = hi.max(rel);
                let d: Vec<f64> = rates.iter().zip(&x).map(|(a, b)| a - b).collect();
                arg = arg.max(norm(&d) / norm(&x));
            }
            MaximizationOutcome::Inconclusive { .. } => conclusive = false,
        }
    }
    outcome(
        conclusive && lo >= -1e-6 && hi <= 1e-8 && arg < 1e-4 && resid < 1e-10,
        format!("relative value gap [{lo:.2e}, {hi:.2e}], argmax error {arg:.2e}, closed-form residual {resid:.2e}"),
    )
}

fn dissipation_signs() -> Outcome {
    let grid = RodGrid::unit(101).unwrap();
    let twist: Vec<f64> = grid.positions().iter().map(|s| 1.0 - 3.0 * s).collect();
    let (a33, md33) = (1.7, 0.8);
    let r = uniform_twist_dissipation(&grid, &twist, a33, md33).unwrap();
    // (A₃₃²/M₃₃) u(0) ∫u ds on the unit rod
    let expected = a33 * a33 / md33 * 1.0 * -0.5;
    let root_gap = (r.xi[0] - expected).abs();

    let mut rng = rng(6);
    let mut local_min = f64::INFINITY;
    for _ in 0..100 {
        let energy = energy(&mut rng);
        let tensors = tensors(&mut rng, 1e3);
        let field = StateField::new(RodGrid::unit(3).unwrap(), vec![state(&mut rng); 3]).unwrap();
        let (u_d, v_d) = natural_rate_local(&energy, &tensors, &field.states()[0]).unwrap();
        let rates = StrainRates { u_d, v_d, u: vec3(&mut rng, 2.0), v: vec3(&mut rng, 2.0) };
        let xi = dissipation_profile(&energy, &tensors, &field, &[rates; 3], NaturalVariant::Local).unwrap();
        local_min = local_min.min(xi[0]);
    }
    outcome(
        r.xi[0] < 0.0 && root_gap < 1e-3 && r.total >= -1e-12 && local_min >= -1e-12,
        format!(
            "uniform ξ(0) = {:.6} (closed form {expected:.6}), ∫ξ = {:.6}, local min ξ = {local_min:.3e}",
            r.xi[0], r.total
        ),
    )
}

fn frame_indifference() -> Outcome {
    let mut rng = rng(7);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let energy = energy(&mut rng);
        let s = state(&mut rng);
        let natural = s.natural.with_frame(frame(&mut rng));
        let pair = WorldConfiguration::from_components(&s.current, &frame(&mut rng), &natural).unwrap();
        let before = pair.components().unwrap();
        let after = apply_frame_change(&frame(&mut rng), &pair).components().unwrap();
        let de = (energy.energy_at(&before) - energy.energy_at(&after)).abs();
        let dv = [
            before.natural.u_d() - after.natural.u_d(),
            before.natural.v_d() - after.natural.v_d(),
            before.current.u() - after.current.u(),
            before.current.v() - after.current.v(),
        ]
        .iter()
        .map(|v| v.max_abs())
        .fold(0.0, f64::max);
        worst = worst.max(de).max(dv);
    }
    outcome(worst < 1e-12, format!("largest change under observer change {worst:.2e}"))
}

fn gradients() -> Outcome {
    let mut rng = rng(8);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let energy = energy(&mut rng);
        let s = state(&mut rng);
        let e = gradient_check(&energy, &s.natural.u_d(), &s.natural.v_d(), &s.current.u(), &s.current.v(), 1e-5);
        worst = worst.max(e);
    }
    outcome(worst < 1e-6, format!("worst relative gradient error {worst:.2e}"))
}

fn dynamic_limit() -> Outcome {
    let p = TorsionParams::<f64>::new(1e-4, 1.0, 1.0, 1.0, 1.0).unwrap();
    let w = Waveform::smoothed_step(1.0, 1e-3).unwrap();
    let times = sample_times(10.0, 1001);
    let creep = creep_response(&p, &InputHistory::torque(w.clone()), &times).unwrap();
    let mut pass = true;
    let mut detail = Vec::new();
    for variant in [NaturalVariant::Local, NaturalVariant::Uniform] {
        let mut opts = DynamicOptions::new(64, times.clone());
        opts.breakpoints = w.breakpoints();
        let torque = w.clone();
        let sol = match dynamic_pde_solve(&p, variant, &InitialData::quiescent(64), move |t| torque.value(t), &opts)
        {
            Ok(s) => s,
            Err(e) => return outcome(false, format!("{variant:?} solve failed: {e}")),
        };
        let end = sol.end_angle();
        let worst = times
            .iter()
            .enumerate()
            .filter(|(_, t)| **t > 0.05)
            .map(|(k, _)| ((end[k] - creep.u[k]) / creep.u[k]).abs())
            .fold(0.0, f64::max);
        pass &= worst < 1e-2 && sol.max_energy_residual < 1e-6;
        detail.push(format!(
            "{variant:?}: relative error {worst:.2e}, energy residual {:.2e}",
            sol.max_energy_residual
        ));
    }
    outcome(pass, detail.join("; "))
}

fn darboux_round_trip() -> Outcome {
    let field = |s: f64| Vec3::new(1.5 * (2.0 * s).sin(), 0.7 * s * s - 0.3, 2.0 + (3.0 * s).cos());
    let r0 = evorod::kinematics::DirectorFrame::from_rotation_vector(&Vec3::new(0.3, -0.2, 0.9));
    let error = |n: usize| {
        let h = 1.0 / (n - 1) as f64;
        let u: Vec<_> = (0..n).map(|i| field(i as f64 * h)).collect();
        let frames = rotation_field_of_darboux(&u, &r0, h).unwrap();
        let back = darboux_of_rotation_field(&frames, h).unwrap();
        u.iter().zip(&back).map(|(a, b)| (*a - *b).max_abs()).fold(0.0, f64::max)
    };
    let (e64, e128) = (error(64), error(128));
    // spacing ratio is 127/63, not exactly 2
    let order = (e64 / e128).ln() / (127.0f64 / 63.0).ln();
    outcome(order >= 1.9, format!("errors {e64:.2e} (N=64), {e128:.2e} (N=128), observed order {order:.3}"))
}

fn main() {
    let s = Duration::from_secs;
    let results = [
        run(1, "stress relaxation", s(1), relaxation_exact),
        run(2, "relaxation limits and monotonicity", s(5), relaxation_limits),
        run(3, "creep asymptotes", s(5), creep_asymptotics),
        run(4, "creep without current viscosity", s(1), creep_without_viscosity),
        run(5, "maximization principle", s(60), maximization_principle),
        run(6, "dissipation sign structure", s(5), dissipation_signs),
        run(7, "frame indifference", s(1), frame_indifference),
        run(8, "energy gradients", s(1), gradients),
        run(9, "dynamic to quasi-static limit", s(60), dynamic_limit),
        run(10, "Darboux round trip", s(1), darboux_round_trip),
    ];
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, p)| !**p).map(|(i, _)| i + 1).collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", results.len());
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
