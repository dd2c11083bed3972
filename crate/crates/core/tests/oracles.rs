//! Grid oracles and worked examples for the profiles, mappings, constants,
//! reduced minimization and the half-space kernel.

use std::f64::consts::PI;

use hslab_core::certifier::{heat_kernel_q_inverse, heat_kernel_ratio};
use hslab_core::hyp2f1::{f21, log_deriv_q, Hyp2F1Params};
use hslab_core::mappings::{
    alpha_threshold_gamma_theta, threshold_search, x_weight, BetaWeight, RhoMap, Thresholds,
};
use hslab_core::numerics::{integrate_ode, log_space, OdeProblem, QuadratureSpec};
use hslab_core::profiles::{
    asymptotic_b, h_asymptotic_check, radial_factors, GProfile, HProfile, BRANCH_POINT,
};
use hslab_core::sharp_constants::{s_n, s_np, s_bar_3p};
use hslab_core::variational::{
    change_of_variables_check, minimize_reduced, mc_quotient_two_point, McQuotientSpec, McRegion,
    ReducedFunctional, ReducedKind,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Five-point central difference of `f` at `t`.
fn d1<F: Fn(f64) -> f64>(f: F, t: f64, h: f64) -> f64 {
    (-f(t + 2.0 * h) + 8.0 * f(t + h) - 8.0 * f(t - h) + f(t - 2.0 * h)) / (12.0 * h)
}

fn d2<F: Fn(f64) -> f64>(f: F, t: f64, h: f64) -> f64 {
    (-f(t + 2.0 * h) + 16.0 * f(t + h) - 30.0 * f(t) + 16.0 * f(t - h) - f(t - 2.0 * h)) / (12.0 * h * h)
}

fn step(t: f64) -> f64 {
    (0.01 * t).min(0.02)
}

#[test]
fn g_solves_its_ode() {
    let g = GProfile::new().unwrap();
    for t in log_space(0.05, 8.0, 200) {
        let gpp = d1(|s| g.deriv(s).unwrap(), t, step(t));
        let pot = g.eval(t).unwrap() / (4.0 * t.sinh().powi(2));
        let res = (gpp + pot).abs();
        assert!(res <= 1e-6 * pot.abs().max(gpp.abs()), "t = {t}: residual {res}");
    }
}

#[test]
fn h_solves_its_ode() {
    for n in 4..=8u32 {
        let h = HProfile::new(n).unwrap();
        let c = (n as f64 - 1.0) * (n as f64 - 3.0) / 4.0;
        for t in log_space(0.05, 8.0, 200) {
            let hpp = d1(|s| h.deriv(s).unwrap(), t, step(t));
            let pot = c * h.eval(t).unwrap() / t.sinh().powi(2);
            let res = (hpp - pot).abs();
            assert!(res <= 1e-6 * pot.abs().max(hpp.abs()), "n = {n}, t = {t}: residual {res}");
        }
    }
}

#[test]
fn backward_integration_reproduces_g_and_h() {
    let g = GProfile::new().unwrap();
    let sol = integrate_ode(OdeProblem {
        rhs: |t: f64, y: [f64; 2]| [y[1], -y[0] / (4.0 * t.sinh().powi(2))],
        t_start: 8.0,
        t_end: 0.5,
        initial_state: [g.eval(8.0).unwrap(), g.deriv(8.0).unwrap()],
        tol: 1e-12,
    })
    .unwrap();
    for t in log_space(0.5, 8.0, 100) {
        let err = (sol.eval(t).unwrap()[0] - g.eval(t).unwrap()).abs();
        assert!(err <= 1e-7, "g at {t}: {err}");
    }
    for n in [4u32, 5, 6] {
        let h = HProfile::new(n).unwrap();
        let c = (n as f64 - 1.0) * (n as f64 - 3.0) / 4.0;
        let sol = integrate_ode(OdeProblem {
            rhs: move |t: f64, y: [f64; 2]| [y[1], c * y[0] / t.sinh().powi(2)],
            t_start: 8.0,
            t_end: 0.5,
            initial_state: [h.eval(8.0).unwrap(), h.deriv(8.0).unwrap()],
            tol: 1e-12,
        })
        .unwrap();
        for t in log_space(0.5, 8.0, 100) {
            let err = (sol.eval(t).unwrap()[0] - h.eval(t).unwrap()).abs();
            assert!(err <= 1e-7, "h_{n} at {t}: {err}");
        }
    }
}

#[test]
fn branches_meet_at_the_branch_point() {
    let below = BRANCH_POINT * (1.0 - 1e-13);
    let g = GProfile::new().unwrap();
    assert!((g.eval(below).unwrap() - g.eval(BRANCH_POINT).unwrap()).abs() <= 1e-10);
    assert!((g.deriv(below).unwrap() - g.deriv(BRANCH_POINT).unwrap()).abs() <= 1e-10);
    for n in 4..=8 {
        let h = HProfile::new(n).unwrap();
        assert!((h.eval(below).unwrap() - h.eval(BRANCH_POINT).unwrap()).abs() <= 1e-10);
        assert!((h.deriv(below).unwrap() - h.deriv(BRANCH_POINT).unwrap()).abs() <= 1e-10);
    }
}

#[test]
fn profile_shape_on_a_fine_grid() {
    let g = GProfile::new().unwrap();
    let grid = log_space(1e-4, 10.0, 10_000);
    let gs: Vec<f64> = grid.iter().map(|&t| g.eval(t).unwrap()).collect();
    assert!(gs.iter().all(|&v| v > 0.0 && v < 1.0));
    assert!(gs.windows(2).all(|w| w[1] > w[0]));
    for n in 4..=6 {
        let h = HProfile::new(n).unwrap();
        let hs: Vec<f64> = grid.iter().map(|&t| h.eval(t).unwrap()).collect();
        assert!(hs.iter().all(|&v| v >= 1.0));
        assert!(hs.windows(2).all(|w| w[1] < w[0]), "h_{n} not decreasing");
    }
}

#[test]
fn matching_constants() {
    let g = GProfile::new().unwrap();
    assert!((g.c2_star() + 1.0 / PI).abs() <= 1e-10);
    for n in 4..=8 {
        assert!(HProfile::new(n).unwrap().c2_sharp() != 0.0);
    }
    let b = asymptotic_b().unwrap();
    assert!(b > 1.0 - 1.0 / PI && b < 1.0, "B = {b}");
}

#[test]
fn small_t_asymptotics() {
    let g = GProfile::new().unwrap();
    let errs: Vec<f64> = [1e-2, 1e-3, 1e-4, 1e-5]
        .iter()
        .map(|&t| (g.eval(t).unwrap() / g.small_t_asymptotic(t) - 1.0).abs())
        .collect();
    assert!(errs[3] < 1e-3, "{errs:?}");
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    for n in 4..=6 {
        let h = HProfile::new(n).unwrap();
        let errs: Vec<f64> = [1e-2, 1e-3, 1e-4, 1e-5].iter().map(|&t| h_asymptotic_check(&h, t).unwrap()).collect();
        assert!(errs.windows(2).all(|w| w[0] >= 5.0 * w[1]), "n = {n}: {errs:?}");
    }
}

#[test]
fn hypergeometric_grid_checks() {
    let zs: Vec<f64> = [0.0].into_iter().chain(log_space(1e-6, 1.0, 1000).into_iter().map(|z| -z)).collect();
    for p in [Hyp2F1Params::elliptic(), Hyp2F1Params::first(4), Hyp2F1Params::first(7)] {
        let fs: Vec<f64> = zs.iter().map(|&z| f21(p, z).unwrap()).collect();
        assert!(fs.iter().all(|&v| v > 0.0));
        // zs runs from 0 towards -1
        assert!(fs.windows(2).all(|w| w[1] < w[0]));
    }
    let ws: Vec<f64> = (1..=10_000).map(|i| -(i as f64) / 10_000.0).collect();
    for n in 4..=10u32 {
        let bound = (n as f64 - 1.0) / 4.0;
        assert!(ws.iter().all(|&w| log_deriv_q(n, w).unwrap() < bound), "n = {n}");
    }
}

#[test]
fn radial_factor_equations() {
    let g = GProfile::new().unwrap();
    let h4 = HProfile::new(4).unwrap();
    let f = |t: f64| radial_factors(&g, &h4, t).unwrap().0;
    let t = 1.0;
    let (h, nf) = (1e-3, 4.0);
    let lhs = d2(f, t, h) + (nf - 1.0) / t.tanh() * d1(f, t, h)
        + ((nf - 1.0).powi(2) / 4.0 + (nf - 2.0).powi(2) / (4.0 * t.sinh().powi(2))) * f(t);
    assert!(lhs.abs() <= 1e-6 * f(t).abs(), "f residual {lhs}");

    let h5 = HProfile::new(5).unwrap();
    let phi = |t: f64| radial_factors(&g, &h5, t).unwrap().1;
    let (rho, nf) = (2.0, 5.0);
    let lhs = d2(phi, rho, h) + (nf - 1.0) / rho.tanh() * d1(phi, rho, h) + (nf - 1.0).powi(2) / 4.0 * phi(rho);
    assert!(lhs.abs() <= 1e-6 * phi(rho).abs(), "phi residual {lhs}");
}

#[test]
fn log_weight_and_sandwich_on_a_grid() {
    let grid = log_space(1e-10, 1.0, 10_000);
    let xs: Vec<f64> = grid.iter().map(|&t| x_weight(t).unwrap()).collect();
    assert!(xs.windows(2).all(|w| w[1] > w[0]));
    let x = |s: f64| 1.0 / (1.0 - s.ln());
    for theta in [0.25, 0.5, 1.0, 1.5] {
        let w = BetaWeight::new(theta, 2f64.powf(1.0 / theta)).unwrap();
        for &r in &grid[..grid.len() - 1] {
            let b = w.eval(r).unwrap();
            assert!(x(w.alpha_lower * r) < b && b < x(w.beta_upper * r), "theta = {theta}, r = {r}");
        }
    }
}

#[test]
fn thresholds_stay_below_one() {
    for n in 3..=5 {
        for gamma in [0.0, 0.5, 1.0] {
            for theta in [0.5, 1.0, 1.5] {
                let a = alpha_threshold_gamma_theta(n, gamma, theta).unwrap();
                assert!(a > 0.0 && a < 1.0, "({n}, {gamma}, {theta}) -> {a}");
                let th = Thresholds::new(n, gamma, theta).unwrap();
                assert!(th.r_geometry > 0.0 && th.alpha_boundary > 0.0);
            }
        }
    }
}

#[test]
fn rho_map_round_trip_and_growth() {
    let m = RhoMap::new(4).unwrap();
    for t in log_space(1e-6, 30.0, 1000) {
        let rho = m.rho_of_t(t).unwrap();
        assert!(rho >= t);
        assert!((m.t_of_rho(rho).unwrap() - t).abs() <= 1e-8 * t.max(1.0), "t = {t}");
    }
    let gaps: Vec<f64> = (5..=30).map(|t| m.rho_of_t(t as f64).unwrap() - t as f64).collect();
    // the gap settles: successive changes shrink to roundoff
    let steps: Vec<f64> = gaps.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    assert!(steps.windows(2).all(|w| w[1] <= w[0] + 1e-13), "{gaps:?}");
    assert!(gaps.iter().all(|g| g.is_finite() && *g < 10.0));
}

#[test]
fn y_weight_log_limit() {
    for n in 3..=5 {
        let m = RhoMap::new(n).unwrap();
        let dev = |t: f64| (-m.y_weight(t).unwrap() * t.ln() - 1.0).abs();
        let (near, far) = (dev(1e-6), dev(1e-3));
        assert!(near < 0.2 && near < far, "n = {n}: {near} vs {far}");
        let (near, far) = (dev(1e-8), dev(1e-4));
        assert!(near.is_finite() && near < far, "n = {n}: {near} vs {far}");
    }
}

#[test]
fn threshold_search_is_consistent() {
    let coarse = log_space(1e-8, 60.0, 1000);
    let fine = log_space(1e-8, 60.0, 10_000);
    for n in 3..=5 {
        let m = RhoMap::new(n).unwrap();
        let alpha = threshold_search(&m, &coarse).unwrap();
        assert!(alpha > 0.0);
        let margin = |a: f64, grid: &[f64]| {
            grid.iter()
                .map(|&t| m.y_weight(t).unwrap() - 1.0 / (1.0 - (a * (t / 2.0).tanh()).ln()))
                .fold(f64::INFINITY, f64::min)
        };
        assert!(margin(alpha, &fine) >= 0.0, "n = {n}");
        assert!(margin(alpha / 2.0, &coarse) > margin(alpha, &coarse));
    }
}

#[test]
fn closed_form_constants() {
    let s = s_np(3, 6.0).unwrap();
    let expected = 3.0 * (PI / 2.0).powf(4.0 / 3.0);
    assert!((s / expected - 1.0).abs() <= 1e-12);
    assert!((s_n(3).unwrap() / expected - 1.0).abs() <= 1e-12);
    for n in 3..=8 {
        let pc = 2.0 * n as f64 / (n as f64 - 2.0);
        assert!((s_np(n, pc).unwrap() / s_n(n).unwrap() - 1.0).abs() <= 1e-10);
    }
    for i in 1..=50 {
        let p = 2.0 + 4.0 * i as f64 / 50.0;
        assert!((s_bar_3p(p).unwrap() / s_np(3, p).unwrap() - 1.0).abs() <= 1e-12, "p = {p}");
    }
}

#[test]
fn reduced_minimization_from_above() {
    for (n, p) in [(3u32, 4.0), (4, 3.0)] {
        let f = ReducedFunctional::new(ReducedKind::Euclidean { ball_radius: 1.0 }, n, p).unwrap();
        let estimates: Vec<f64> = [512, 1024, 2048]
            .iter()
            .map(|&k| {
                let r = minimize_reduced(&f, &f.default_grid(k).unwrap()).unwrap();
                let gap = r.relative_gap.unwrap();
                assert!(gap > -1e-9 && gap < 0.02, "({n}, {p}) at {k}: {gap}");
                r.estimate
            })
            .collect();
        assert!(estimates.windows(2).all(|w| w[1] <= w[0]), "{estimates:?}");
    }
}

#[test]
fn change_of_variables_agrees() {
    let quad = QuadratureSpec::default();
    for n in 3..=6 {
        let map = RhoMap::new(n).unwrap();
        let rep = change_of_variables_check(&map, 4.0f64.min(2.0 * n as f64 / (n as f64 - 2.0)), &quad).unwrap();
        assert!(rep.max_relative_gap <= 1e-6, "n = {n}: {rep:?}");
    }
}

#[test]
fn monte_carlo_error_shrinks_with_samples() {
    let target = s_np(3, 4.0).unwrap();
    let mut ratios = Vec::new();
    for seed in 0..5 {
        let small = McQuotientSpec::new(3, 100_000, seed, McRegion::FullSpace).unwrap();
        let large = McQuotientSpec::new(3, 200_000, seed, McRegion::FullSpace).unwrap();
        let (a, b) = (mc_quotient_two_point(4.0, &small).unwrap(), mc_quotient_two_point(4.0, &large).unwrap());
        assert!((b.estimate - target).abs() <= 4.0 * b.std_error, "seed {seed}: {b:?}");
        ratios.push(b.std_error / a.std_error);
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    assert!((mean - 0.5f64.sqrt()).abs() < 0.1, "{ratios:?}");
}

#[test]
fn half_space_kernel_is_below_free_kernel() {
    let quad = QuadratureSpec::default();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..100 {
        let mut point = || [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0), rng.random_range(0.05..3.0)];
        let (x, y) = (point(), point());
        let q = heat_kernel_q_inverse(x, y, &quad).unwrap();
        assert!(q > 0.0);
        let ratio = heat_kernel_ratio(x, y, &quad).unwrap();
        assert!(ratio <= 1.0 + 1e-6, "{x:?} {y:?}: {ratio}");
    }
    let ratio = heat_kernel_ratio([0.0, 0.0, 50.0], [1.0, 0.0, 50.0], &quad).unwrap();
    assert!((ratio - 1.0).abs() < 0.02, "{ratio}");
}
