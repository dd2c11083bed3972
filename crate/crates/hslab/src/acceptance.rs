//! The twelve acceptance criteria. Each produces one record named
//! `criterion_NN_<topic>`; `run_all` evaluates them on the worker pool and
//! returns them in criterion order.

use std::f64::consts::PI;
use std::time::Instant;

use hslab_core::certifier::{certify_case, inequality_case, CaseName};
use hslab_core::mappings::RhoMap;
use hslab_core::numerics::{integrate_ode, log_space, OdeProblem};
use hslab_core::profiles::{asymptotic_b, h_asymptotic_check, GProfile, HProfile, BRANCH_POINT};
use hslab_core::sharp_constants::{critical_exponent, radial_quotient_interior, s_bar_3p, s_n, s_np};
use hslab_core::variational::{
    change_of_variables_check, minimize_reduced, McQuotientSpec, McRegion, ReducedFunctional, ReducedKind,
};
use rayon::prelude::*;

use crate::commands::{cert_record, kernel_sweep, quadrature, two_point_record};
use crate::config::{Command, RunConfig};
use crate::error::AppResult;
use crate::format::to_json;
use crate::jobs;
use crate::report::{Provenance, Record, Report};

type Check = fn(&RunConfig) -> AppResult<Record>;

pub const CRITERIA: [(&str, Provenance, Check); 12] = [
    ("criterion_01_closed_form_constants", Provenance::Paper, closed_form_constants),
    ("criterion_02_three_dimensional_identity", Provenance::Paper, three_dimensional_identity),
    ("criterion_03_minimizer_attains_constant", Provenance::Paper, minimizer_attains_constant),
    ("criterion_04_two_point_minimizer", Provenance::Paper, two_point_minimizer),
    ("criterion_05_profile_correctness", Provenance::Derived, profile_correctness),
    ("criterion_06_asymptotics", Provenance::Paper, asymptotics),
    ("criterion_07_y_limit", Provenance::Paper, y_limit),
    ("criterion_08_certifier_catalog", Provenance::Derived, certifier_catalog),
    ("criterion_09_variational_upper_bounds", Provenance::Derived, variational_upper_bounds),
    ("criterion_10_heat_kernel", Provenance::Paper, heat_kernel),
    ("criterion_11_change_of_variables", Provenance::Derived, change_of_variables),
    ("criterion_12_determinism", Provenance::Trivial, determinism),
];

pub fn run_all(cfg: &RunConfig) -> Vec<Record> {
    CRITERIA
        .par_iter()
        .map(|&(name, prov, check)| {
            let start = Instant::now();
            let rec = match check(cfg) {
                Ok(r) => Record { name: name.to_string(), provenance: prov, ..r },
                Err(e) => Record::failure(name, prov, e),
            };
            eprintln!("{name}: {} in {:.1?}", if rec.failed() { "FAIL" } else { "pass" }, start.elapsed());
            rec
        })
        .collect()
}

/// A nameless record; `run_all` fills in name and provenance.
fn outcome(passed: bool, value: f64, note: String) -> Record {
    Record::check("", passed, Provenance::Derived).with_value(value).with_note(note)
}

fn rel(a: f64, b: f64) -> f64 {
    (a / b - 1.0).abs()
}

fn closed_form_constants(_: &RunConfig) -> AppResult<Record> {
    let closed = 3.0 * (PI / 2.0).powf(4.0 / 3.0);
    let d3 = rel(s_np(3, 6.0)?, closed).max(rel(s_n(3)?, closed));
    let mut worst = 0.0f64;
    for n in 3..=8 {
        worst = worst.max(rel(s_np(n, critical_exponent(n))?, s_n(n)?));
    }
    Ok(outcome(
        d3 <= 1e-12 && worst <= 1e-10,
        worst.max(d3),
        format!("S_3 closed form deviation {d3:e}; critical-exponent deviation {worst:e} for n = 3..8"),
    ))
}

fn three_dimensional_identity(_: &RunConfig) -> AppResult<Record> {
    let mut worst = 0.0f64;
    for i in 1..=50 {
        let p = 2.0 + 4.0 * i as f64 / 50.0;
        worst = worst.max(rel(s_bar_3p(p)?, s_np(3, p)?));
    }
    Ok(outcome(worst <= 1e-12, worst, "50 values of p in (2, 6]".into()))
}

fn minimizer_attains_constant(cfg: &RunConfig) -> AppResult<Record> {
    let quad = quadrature(cfg.tol);
    let mut worst = 0.0f64;
    for (n, p) in [(3, 4.0), (3, 6.0), (4, 3.0), (5, 2.5)] {
        worst = worst.max(rel(radial_quotient_interior(n, p, &quad)?, s_np(n, p)?));
    }
    Ok(outcome(worst <= 1e-6, worst, "(n, p) in {(3,4), (3,6), (4,3), (5,2.5)}".into()))
}

fn two_point_minimizer(cfg: &RunConfig) -> AppResult<Record> {
    let start = Instant::now();
    let recs: Vec<Record> = [4.0, 6.0].iter().map(|&p| two_point_record(p, cfg.samples, cfg.seed)).collect();
    let secs = start.elapsed().as_secs_f64();
    let worst = recs.iter().filter_map(|r| r.deviation).fold(0.0, f64::max);
    let ok = recs.iter().all(|r| r.passed == Some(true)) && secs < 60.0;
    let notes: Vec<String> =
        recs.iter().map(|r| format!("{}: {} ({})", r.name, r.value.unwrap_or(f64::NAN), r.note.clone().unwrap_or_default())).collect();
    Ok(outcome(ok, worst, format!("{}; runtime under 60 s: {}", notes.join("; "), secs < 60.0)))
}

/// Five-point difference of `f` at `t`.
fn d1(f: impl Fn(f64) -> f64, t: f64, h: f64) -> f64 {
    (-f(t + 2.0 * h) + 8.0 * f(t + h) - 8.0 * f(t - h) + f(t - 2.0 * h)) / (12.0 * h)
}

/// Largest scaled residual of `y'' = c y / sinh^2 t` on 200 points of
/// `[0.05, 8]`, with `y''` differenced from the analytic first derivative.
fn ode_residual(eval: impl Fn(f64) -> f64, deriv: impl Fn(f64) -> f64, c: f64) -> f64 {
    log_space(0.05, 8.0, 200)
        .into_iter()
        .map(|t| {
            let ypp = d1(&deriv, t, (0.01 * t).min(0.02));
            let pot = c * eval(t) / t.sinh().powi(2);
            (ypp - pot).abs() / ypp.abs().max(pot.abs())
        })
        .fold(0.0, f64::max)
}

/// Largest gap between a profile and a backward integration of its ODE
/// from `t = 8` down to `t = 0.5`.
fn backward_gap(eval: impl Fn(f64) -> f64, deriv: impl Fn(f64) -> f64, c: f64) -> AppResult<f64> {
    let sol = integrate_ode(OdeProblem {
        rhs: move |t: f64, y: [f64; 2]| [y[1], c * y[0] / t.sinh().powi(2)],
        t_start: 8.0,
        t_end: 0.5,
        initial_state: [eval(8.0), deriv(8.0)],
        tol: 1e-12,
    })?;
    let mut worst = 0.0f64;
    for t in log_space(0.5, 8.0, 100) {
        worst = worst.max((sol.eval(t)?[0] - eval(t)).abs());
    }
    Ok(worst)
}

fn profile_correctness(_: &RunConfig) -> AppResult<Record> {
    let g = GProfile::new()?;
    let below = BRANCH_POINT * (1.0 - 1e-13);
    let gv = |t: f64| g.eval(t).unwrap_or(f64::NAN);
    let gd = |t: f64| g.deriv(t).unwrap_or(f64::NAN);
    let mut residual = ode_residual(gv, gd, -0.25);
    let mut backward = backward_gap(gv, gd, -0.25)?;
    let mut matching = (gv(below) - gv(BRANCH_POINT)).abs().max((gd(below) - gd(BRANCH_POINT)).abs());
    let mut c2_sharp_nonzero = true;
    for n in 4..=8 {
        let h = HProfile::new(n)?;
        let c = (n as f64 - 1.0) * (n as f64 - 3.0) / 4.0;
        let hv = |t: f64| h.eval(t).unwrap_or(f64::NAN);
        let hd = |t: f64| h.deriv(t).unwrap_or(f64::NAN);
        residual = residual.max(ode_residual(hv, hd, c));
        backward = backward.max(backward_gap(hv, hd, c)?);
        matching = matching.max((hv(below) - hv(BRANCH_POINT)).abs()).max((hd(below) - hd(BRANCH_POINT)).abs());
        c2_sharp_nonzero &= h.c2_sharp() != 0.0;
    }
    let c2 = (g.c2_star() + 1.0 / PI).abs();
    let ok = residual <= 1e-6 && matching <= 1e-10 && backward <= 1e-7 && c2 <= 1e-10 && c2_sharp_nonzero;
    Ok(outcome(
        ok,
        residual,
        format!(
            "ODE residual {residual:e}; branch mismatch {matching:e}; backward integration gap {backward:e}; \
             |c2* + 1/pi| {c2:e}; c2# nonzero for n = 4..8: {c2_sharp_nonzero}"
        ),
    ))
}

fn asymptotics(_: &RunConfig) -> AppResult<Record> {
    let b = asymptotic_b()?;
    let g = GProfile::new()?;
    let ts = [1e-2, 1e-3, 1e-4, 1e-5];
    let g_errs: Vec<f64> = ts.iter().map(|&t| Ok(rel(g.eval(t)?, g.small_t_asymptotic(t)))).collect::<AppResult<_>>()?;
    let g_ok = g_errs[3] < 1e-3 && g_errs.windows(2).all(|w| w[1] < w[0]);
    let mut worst_ratio = f64::INFINITY;
    for n in 4..=6 {
        let h = HProfile::new(n)?;
        let errs: Vec<f64> = ts.iter().map(|&t| h_asymptotic_check(&h, t)).collect::<Result<_, _>>()?;
        for w in errs.windows(2) {
            worst_ratio = worst_ratio.min(w[0] / w[1]);
        }
    }
    let h_ok = worst_ratio >= 5.0;
    let b_ok = b > 1.0 - 1.0 / PI && b < 1.0;
    Ok(outcome(
        b_ok && g_ok && h_ok,
        b,
        format!("B = {b}; g relative errors at 1e-2..1e-5: {g_errs:?}; smallest h error ratio per decade {worst_ratio}"),
    ))
}

fn y_limit(_: &RunConfig) -> AppResult<Record> {
    let mut ok = true;
    let mut notes = Vec::new();
    let mut value = 0.0f64;
    for n in 3..=5 {
        let m = RhoMap::new(n)?;
        let dev = |t: f64| -> AppResult<f64> { Ok((-m.y_weight(t)? * t.ln() - 1.0).abs()) };
        let (near, far) = (dev(1e-8)?, dev(1e-4)?);
        ok &= near.is_finite() && far.is_finite() && near < far;
        value = value.max(near);
        notes.push(format!("n = {n}: {near:e} at 1e-8, {far:e} at 1e-4"));
    }
    Ok(outcome(ok, value, notes.join("; ")))
}

fn certifier_catalog(_: &RunConfig) -> AppResult<Record> {
    let reports = jobs::certify_many(&CaseName::ALL);
    let mut failures = Vec::new();
    let mut worst = f64::INFINITY;
    for (name, res) in reports {
        let rec = cert_record(name, res);
        worst = worst.min(rec.value.unwrap_or(f64::NEG_INFINITY));
        if rec.failed() {
            failures.push(format!("{}: {}", rec.name, rec.note.unwrap_or_default()));
        }
    }
    let note = if failures.is_empty() {
        "all 14 cases pass at refinement depth 6".to_string()
    } else {
        failures.join("; ")
    };
    Ok(outcome(failures.is_empty(), worst, note))
}

fn variational_upper_bounds(_: &RunConfig) -> AppResult<Record> {
    let mut ok = true;
    let mut notes = Vec::new();
    let mut worst = 0.0f64;
    for (n, p) in [(3u32, 4.0), (4, 3.0)] {
        let f = ReducedFunctional::new(ReducedKind::Euclidean { ball_radius: 1.0 }, n, p)?;
        let mut prev = f64::INFINITY;
        for k in [512, 1024, 2048] {
            let r = minimize_reduced(&f, &f.default_grid(k)?)?;
            let gap = r.relative_gap.unwrap_or(f64::NAN);
            ok &= r.estimate <= prev && gap >= -1e-9 && (k != 2048 || gap <= 0.02);
            prev = r.estimate;
            if k == 2048 {
                worst = worst.max(gap);
                notes.push(format!("(n, p) = ({n}, {p}): gap {gap:e} at N = 2048"));
            }
        }
    }
    Ok(outcome(ok, worst, notes.join("; ")))
}

fn heat_kernel(cfg: &RunConfig) -> AppResult<Record> {
    let (max_ratio, min_q, _) = kernel_sweep(cfg.seed, &quadrature(cfg.tol))?;
    Ok(outcome(
        max_ratio <= 1.0 + 1e-6 && min_q > 0.0,
        max_ratio,
        format!("100 seeded pairs; largest ratio {max_ratio}; smallest kernel value {min_q:e}"),
    ))
}

fn change_of_variables(cfg: &RunConfig) -> AppResult<Record> {
    let quad = quadrature(cfg.tol);
    let gaps: Vec<f64> = (3..=8u32)
        .into_par_iter()
        .map(|n| {
            let map = RhoMap::new(n)?;
            Ok(change_of_variables_check(&map, 4.0f64.min(critical_exponent(n)), &quad)?.max_relative_gap)
        })
        .collect::<AppResult<_>>()?;
    let worst = gaps.iter().copied().fold(0.0, f64::max);
    Ok(outcome(worst <= 1e-6, worst, format!("largest relative gap {worst:e} for n = 3..8")))
}

/// Repeat thread-sensitive work on one worker and on the shared pool and
/// compare bits, then render a report twice.
fn determinism(cfg: &RunConfig) -> AppResult<Record> {
    let spec = McQuotientSpec::new(3, 200_000, cfg.seed, McRegion::FullSpace)?;
    let single = jobs::pool(Some(1))?;
    let work = || -> AppResult<(u64, u64, u64)> {
        let est = jobs::mc_two_point(4.0, &spec)?;
        let cert = certify_case(&inequality_case(CaseName::Gef)?)?;
        Ok((est.estimate.to_bits(), est.std_error.to_bits(), cert.min_margin.to_bits()))
    };
    let a = single.install(work)?;
    let b = work()?;
    let mut sub = RunConfig::new(Command::Constants);
    sub.seed = cfg.seed;
    let rendered = |c: &RunConfig| -> AppResult<String> { to_json(&Report::new(c, crate::commands::execute(c)?)) };
    let same_bytes = rendered(&sub)? == rendered(&sub)?;
    Ok(outcome(
        a == b && same_bytes,
        f64::NAN,
        format!("thread-count independence: {}; repeated rendering identical: {same_bytes}", a == b),
    ))
}
