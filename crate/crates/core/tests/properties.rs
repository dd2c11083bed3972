use std::sync::OnceLock;

use hslab_core::hyp2f1::{f21, f21_direct_series, log_deriv_q, Hyp2F1Params};
use hslab_core::mappings::{sinh_ratio, x_weight, BetaWeight, LogWeight, RhoMap};
use hslab_core::numerics::{find_root, integrate, QuadratureSpec, RootBracket};
use hslab_core::profiles::{GProfile, HProfile};
use hslab_core::sharp_constants::{s_np, MinimizerKind, MinimizerProfile};
use hslab_core::variational::McMoments;
use proptest::prelude::*;

fn map4() -> &'static RhoMap {
    static MAP: OnceLock<RhoMap> = OnceLock::new();
    MAP.get_or_init(|| RhoMap::new(4).unwrap())
}

fn g_profile() -> &'static GProfile {
    static G: OnceLock<GProfile> = OnceLock::new();
    G.get_or_init(|| GProfile::new().unwrap())
}

fn poly(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, 1..8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quadrature_is_linear(p in coeffs(), q in coeffs(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let spec = QuadratureSpec::default();
        let lhs = integrate(|x| a * poly(&p, x) + b * poly(&q, x), -1.0, 2.0, &spec).unwrap();
        let rhs = a * integrate(|x| poly(&p, x), -1.0, 2.0, &spec).unwrap()
            + b * integrate(|x| poly(&q, x), -1.0, 2.0, &spec).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()));
    }

    #[test]
    fn quadrature_splits_additively(p in coeffs(), c in -0.9f64..1.9) {
        let spec = QuadratureSpec::default();
        let f = |x: f64| poly(&p, x);
        let whole = integrate(f, -1.0, 2.0, &spec).unwrap();
        let parts = integrate(f, -1.0, c, &spec).unwrap() + integrate(f, c, 2.0, &spec).unwrap();
        prop_assert!((whole - parts).abs() <= 1e-9 * (1.0 + whole.abs()));
    }

    #[test]
    fn root_residual_is_small(shift in -2.0f64..2.0, k in 0.5f64..4.0) {
        let f = |x: f64| (k * x).tanh() - shift / 2.5;
        let br = RootBracket::new(&f, -10.0, 10.0).unwrap();
        let x = find_root(f, br, 1e-14).unwrap();
        prop_assert!(f(x).abs() <= 1e-12);
    }

    #[test]
    fn pfaff_form_matches_direct_series(z in -0.98f64..-1e-6, n in 4u32..=9, which in 0usize..3) {
        let p = match which {
            0 => Hyp2F1Params::elliptic(),
            1 => Hyp2F1Params::first(n),
            _ => Hyp2F1Params::second(n),
        };
        let direct = f21_direct_series(p, z, 200_000).unwrap();
        let pfaff = f21(p, z).unwrap();
        prop_assert!((direct - pfaff).abs() <= 1e-12 * direct.abs().max(1.0), "{direct} vs {pfaff}");
    }

    #[test]
    fn log_derivative_below_bound(n in 4u32..=10, w in -1.0f64..0.0) {
        let q = log_deriv_q(n, w).unwrap();
        prop_assert!(q < (n as f64 - 1.0) / 4.0);
    }

    #[test]
    fn x_weight_is_increasing(a in 1e-12f64..1.0, b in 1e-12f64..1.0) {
        prop_assume!(a < b);
        prop_assert!(x_weight(a).unwrap() < x_weight(b).unwrap());
    }

    #[test]
    fn log_weight_is_positive_and_increasing(alpha in 0.01f64..std::f64::consts::E, t in 1e-9f64..0.99) {
        let w = LogWeight::new(alpha).unwrap();
        let v = w.eval(t).unwrap();
        prop_assert!(v > 0.0 && v < w.eval(t * 1.01).unwrap());
    }

    #[test]
    fn beta_forms_agree(theta in 0.2f64..1.9, r in 1e-3f64..1.0) {
        let w = BetaWeight::new(theta, (1.0 + 1.0f64).powf(1.0 / theta)).unwrap();
        let closed = w.eval(r).unwrap();
        let quad = w.eval_integral(r).unwrap();
        prop_assert!((closed - quad).abs() <= 1e-9 * closed);
    }

    #[test]
    fn beta_sandwich(theta in 0.2f64..1.9, n in 3u32..=6, r in 1e-4f64..0.999) {
        let a = 1.0 + 1.0 / (n as f64 - 2.0).sqrt();
        let w = BetaWeight::new(theta, a.powf(1.0 / theta)).unwrap();
        let b = w.eval(r).unwrap();
        let x = |s: f64| 1.0 / (1.0 - s.ln());
        prop_assert!(x(w.alpha_lower * r) < b && b < x(w.beta_upper * r));
    }

    #[test]
    fn sinh_ratio_matches_direct(a in 0.01f64..19.0, b in 0.01f64..19.0) {
        let direct = a.sinh() / b.sinh();
        let r = sinh_ratio(a, b);
        prop_assert!((r - direct).abs() <= 1e-13 * direct);
        let big = sinh_ratio(a + 30.0, b + 30.0);
        prop_assert!((big - (a - b).exp()).abs() <= 1e-12 * big);
    }

    #[test]
    fn rho_round_trip(lt in -6.0f64..3.0) {
        let t = 10f64.powf(lt);
        let m = map4();
        let rho = m.rho_of_t(t).unwrap();
        let back = m.t_of_rho(rho).unwrap();
        prop_assert!((back - t).abs() <= 1e-8 * t.max(1.0));
        prop_assert!(m.rho_slope(t).unwrap() > 0.0);
    }

    #[test]
    fn g_stays_in_unit_interval(lt in -8.0f64..1.0) {
        let v = g_profile().eval(10f64.powf(lt)).unwrap();
        prop_assert!(v > 0.0 && v < 1.0);
    }

    #[test]
    fn h_is_at_least_one(n in 4u32..=8, lt in -6.0f64..1.3) {
        let h = HProfile::new(n).unwrap();
        let t = 10f64.powf(lt);
        prop_assert!(h.eval(t).unwrap() >= 1.0);
        prop_assert!(h.deriv(t).unwrap() < 0.0);
    }

    #[test]
    fn sharp_constant_is_continuous_in_p(n in 3u32..=8, u in 0.01f64..0.99) {
        let pc = 2.0 * n as f64 / (n as f64 - 2.0);
        let p = 2.0 + u * (pc - 2.0);
        let dp = 1e-7 * p;
        let (a, b) = (s_np(n, p).unwrap(), s_np(n, p + dp.min(pc - p)).unwrap());
        prop_assert!((a - b).abs() <= 1e-5 * a);
    }

    #[test]
    fn minimizers_are_positive_and_radially_decreasing(n in 3u32..=6, u in 0.05f64..1.0, r in 1e-3f64..1e3) {
        let pc = 2.0 * n as f64 / (n as f64 - 2.0);
        let p = 2.0 + u * (pc - 2.0);
        let m = MinimizerProfile::new(MinimizerKind::InteriorPoint, n, p).unwrap();
        let (v, dv) = m.radial(r);
        prop_assert!(v > 0.0 && dv < 0.0);
        let (v2, _) = m.radial(r * 1.5);
        prop_assert!(v2 < v);
    }

    #[test]
    fn moments_merge_in_any_split(xs in prop::collection::vec(-10.0f64..10.0, 2..60), cut in 0usize..60) {
        let cut = cut.min(xs.len());
        let mut whole = McMoments::<2>::default();
        let mut left = McMoments::<2>::default();
        let mut right = McMoments::<2>::default();
        for (i, &x) in xs.iter().enumerate() {
            let s = [x, x * x];
            whole.push(s);
            if i < cut { left.push(s) } else { right.push(s) }
        }
        left.merge(&right);
        for k in 0..2 {
            prop_assert!((whole.mean()[k] - left.mean()[k]).abs() <= 1e-12 * (1.0 + whole.mean()[k].abs()));
        }
    }
}
