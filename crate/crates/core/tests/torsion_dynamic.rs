mod common;

use common::max_abs_diff;
use evorod::energetics::NaturalVariant;
use evorod::grid::RodGrid;
use evorod::torsion::*;

fn params() -> TorsionParams<f64> {
    TorsionParams::new(0.05, 0.2, 1.0, 1.0, 0.5).unwrap()
}

fn smooth(t: f64) -> f64 {
    (1.0 - (2.0 * t).cos()) * 0.5
}

fn order(errs: &[f64]) -> Vec<f64> {
    errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

#[test]
fn second_order_in_space() {
    for variant in [NaturalVariant::Local, NaturalVariant::Uniform] {
        let solve = |n: usize| {
            let mut o = DynamicOptions::new(n, vec![0.0, 1.0]);
            o.control.rtol = 1e-12;
            o.control.atol = 1e-14;
            dynamic_pde_solve(&params(), variant, &InitialData::quiescent(n), smooth, &o).unwrap()
        };
        let fine = solve(257);
        let mut phi_err = Vec::new();
        let mut ud_err = Vec::new();
        for n in [17, 33, 65] {
            let c = solve(n);
            let stride = 256 / (n - 1);
            let pick = |v: &[f64]| (0..n).map(|i| v[i * stride]).collect::<Vec<_>>();
            phi_err.push(max_abs_diff(&c.phi[1], &pick(&fine.phi[1])));
            ud_err.push(max_abs_diff(&c.u_d[1], &pick(&fine.u_d[1])));
        }
        for p in order(&phi_err).into_iter().chain(order(&ud_err)) {
            assert!(p > 1.8, "{variant:?}: {phi_err:?} {ud_err:?}");
        }
    }
}

#[test]
fn second_order_in_time() {
    let solve = |dt: f64| {
        let mut o = DynamicOptions::new(33, vec![0.0, 1.0]);
        o.control.fixed_step = Some(dt);
        dynamic_pde_solve(&params(), NaturalVariant::Local, &InitialData::quiescent(33), smooth, &o).unwrap()
    };
    let reference = solve(1.0 / 1280.0);
    let errs: Vec<f64> = [20.0, 40.0, 80.0]
        .iter()
        .map(|k| max_abs_diff(&solve(1.0 / k).phi[1], &reference.phi[1]))
        .collect();
    for p in order(&errs) {
        assert!(p > 1.8, "{errs:?}");
    }
}

#[test]
fn variants_coincide_for_homogeneous_twist() {
    // Torque chosen so that a homogeneous twist U stays in equilibrium while
    // the natural twist relaxes uniformly.
    let p = TorsionParams::new(0.05, 0.3, 0.7, 1.3, 0.6).unwrap();
    let (twist, ud0) = (0.8, 0.1);
    let lam = p.relaxation_rate();
    let ud_inf = p.alpha * twist / (p.alpha + p.alpha_d);
    let m = move |t: f64| p.alpha * (twist - (ud_inf + (ud0 - ud_inf) * (-lam * t).exp()));
    let grid = RodGrid::unit(33).unwrap();
    let init = InitialData::from_fn(&grid, |s| (s * twist, 0.0, ud0));
    let mut o = DynamicOptions::new(33, sample_times(3.0, 31));
    o.control.rtol = 1e-11;
    o.control.atol = 1e-13;
    let a = dynamic_pde_solve(&p, NaturalVariant::Local, &init, m, &o).unwrap();
    let b = dynamic_pde_solve(&p, NaturalVariant::Uniform, &init, m, &o).unwrap();
    for k in 0..31 {
        assert!(max_abs_diff(&a.phi[k], &b.phi[k]) < 1e-10);
        assert!(max_abs_diff(&a.u_d[k], &b.u_d[k]) < 1e-10);
        let ud = ud_inf + (ud0 - ud_inf) * (-lam * a.times[k]).exp();
        assert!(a.u_d[k].iter().all(|x| (x - ud).abs() < 1e-6));
    }
}

#[test]
fn energy_balance_holds_under_oscillating_torque() {
    let mut o = DynamicOptions::new(48, sample_times(6.0, 61));
    o.energy_tol = None;
    let sol = dynamic_pde_solve(
        &params(),
        NaturalVariant::Uniform,
        &InitialData::quiescent(48),
        |t| (3.0 * t).sin(),
        &o,
    )
    .unwrap();
    assert!(sol.max_energy_residual < 1e-3, "{}", sol.max_energy_residual);
    assert!(sol.energy.iter().all(|e| *e >= 0.0));
}

#[test]
fn torques_match_boundary_data() {
    let torque = |t: f64| 0.5 * smooth(t);
    let o = DynamicOptions::new(33, sample_times(2.0, 21));
    let sol = dynamic_pde_solve(&params(), NaturalVariant::Local, &InitialData::quiescent(33), torque, &o).unwrap();
    for (t, m) in sol.times.iter().zip(&sol.torque_end) {
        assert!((m - torque(*t)).abs() < 1e-12);
    }
    assert_eq!(sol.torque_root.len(), sol.times.len());
}
