//! Weights and reparametrizations: the logarithmic weight `X`, the weight
//! `B(r)` with its sandwich constants, the implicit map `rho(t)` defined by
//! `int_0^rho dr/h^2 = int_0^t ds/g^2`, the weight `Y(t)`, and the threshold
//! constants.

use alloc::vec::Vec;
use core::f64::consts::{E, PI};
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{domain, Error, Result};
use crate::numerics::{
    find_root, integrate, log_space, solve_increasing, EndpointTransform, HermiteTable, QuadratureSpec,
    RootBracket,
};
use crate::profiles::{GProfile, HProfile};

/// `X(t) = 1/(1 - ln t)` on `(0, 1]`.
pub fn x_weight(t: f64) -> Result<f64> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(domain("X needs t in (0, 1]"));
    }
    Ok(1.0 / (1.0 - t.ln()))
}

/// `X(alpha t)` for a fixed `alpha in (0, e]`. Arguments up to `e` are
/// accepted since the formula stays positive there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogWeight {
    alpha: f64,
}

impl LogWeight {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= E) {
            return Err(domain("alpha must lie in (0, e]"));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        let s = self.alpha * t;
        if !(s > 0.0 && s < E) {
            return Err(domain("X(alpha t) needs 0 < alpha t < e"));
        }
        Ok(1.0 / (1.0 - s.ln()))
    }
}

/// `B(r)` for given `theta in (0, 2)` and `R > 1`, with the constants
/// `alpha`, `beta` such that `X(alpha r) <= B(r) <= X(beta r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaWeight {
    pub theta: f64,
    pub r_big: f64,
    pub alpha_lower: f64,
    pub beta_upper: f64,
}

/// `(1/theta)(ln(a/(a-1)) + 1/(a-1))` with `a = R^theta`: the value of
/// `int_0^1 s^{theta-1}(2a - s^theta)/(a - s^theta)^2 ds`.
fn alpha_integral_closed(theta: f64, a: f64) -> f64 {
    ((a / (a - 1.0)).ln() + 1.0 / (a - 1.0)) / theta
}

fn alpha_integral_quadrature(theta: f64, a: f64) -> Result<f64> {
    let spec = QuadratureSpec::default().with_tol(1e-14, 1e-13);
    let spec = if theta < 1.0 { spec.with_transform(EndpointTransform::PowerLeft(theta - 1.0)) } else { spec };
    integrate(|s: f64| s.powf(theta - 1.0) * (2.0 * a - s.powf(theta)) / (a - s.powf(theta)).powi(2), 0.0, 1.0, &spec)
}

impl BetaWeight {
    pub fn new(theta: f64, r_big: f64) -> Result<Self> {
        if !(theta > 0.0 && theta < 2.0 && r_big > 1.0) {
            return Err(domain("B(r) needs theta in (0, 2) and R > 1"));
        }
        let a = r_big.powf(theta);
        let alpha_lower = (-(a * a - 1.0 + alpha_integral_closed(theta, a))).exp();
        let beta_upper = (-((a - 1.0).powi(2) - 1.0)).exp();
        Ok(Self { theta, r_big, alpha_lower, beta_upper })
    }

    fn a(&self) -> f64 {
        self.r_big.powf(self.theta)
    }

    /// Closed form of `B(r)`.
    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r > 0.0 && r <= 1.0) {
            return Err(domain("B(r) needs r in (0, 1]"));
        }
        let (th, a) = (self.theta, self.a());
        let rt = r.powf(th);
        let d = a - rt;
        let denom = th * a * a - (a - 1.0).ln() + a / (a - 1.0) - (rt / d).ln() - a / d;
        Ok(th * a * a / (denom * d * d))
    }

    /// `B(r)` from its defining integral; an independent check of `eval`.
    pub fn eval_integral(&self, r: f64) -> Result<f64> {
        if !(r > 0.0 && r <= 1.0) {
            return Err(domain("B(r) needs r in (0, 1]"));
        }
        let (th, a) = (self.theta, self.a());
        let d = a - r.powf(th);
        let t = if r == 1.0 {
            1.0
        } else {
            1.0 + integrate(|s: f64| 1.0 / (s * (a - s.powf(th)).powi(2)), r, 1.0, &QuadratureSpec::default())?
        };
        Ok(1.0 / (d * d * t))
    }

    /// `t(r) = 1 + int_r^1 ds/(s (R^theta - s^theta)^2)`, closed form.
    pub fn t_of_r(&self, r: f64) -> Result<f64> {
        Ok(1.0 / (self.eval(r)? * (self.a() - r.powf(self.theta)).powi(2)))
    }

    /// Inverse of [`Self::t_of_r`] for `t >= 1`.
    pub fn r_of_t(&self, t: f64) -> Result<f64> {
        if !(t >= 1.0) {
            return Err(domain("r(t) needs t >= 1"));
        }
        if t == 1.0 {
            return Ok(1.0);
        }
        // t(r) is decreasing; search in ln r
        let f = |lr: f64| self.t_of_r(lr.exp()).unwrap_or(f64::INFINITY) - t;
        let mut lo = -1.0;
        while f(lo) < 0.0 {
            lo *= 2.0;
            if lo < -700.0 {
                return Err(Error::BadBracket { lo, hi: 0.0 });
            }
        }
        let br = RootBracket::new(&f, lo, 0.0)?;
        Ok(find_root(f, br, 1e-15)?.exp())
    }
}

fn alpha_for_shift(theta: f64, m: f64) -> Result<f64> {
    if !(theta > 0.0 && theta < 2.0) {
        return Err(domain("threshold needs theta in (0, 2)"));
    }
    let a = 1.0 + 1.0 / m.sqrt();
    let closed = alpha_integral_closed(theta, a);
    let quad = alpha_integral_quadrature(theta, a)?;
    if (closed - quad).abs() > 1e-10 * closed.abs().max(1.0) {
        return Err(Error::NonConvergence { estimate: quad, error: (closed - quad).abs() });
    }
    Ok((-(a * a - 1.0 + closed)).exp())
}

/// `alpha_{n,theta}` from `-ln alpha = R^{2 theta} - 1 + int_0^1 ...` with
/// `R^theta = 1 + 1/sqrt(n - 2)`. Both evaluations of the integral are
/// computed and must agree.
pub fn alpha_threshold_theta(n: u32, theta: f64) -> Result<f64> {
    if n < 3 {
        return Err(domain("threshold needs n >= 3"));
    }
    alpha_for_shift(theta, n as f64 - 2.0)
}

/// `alpha_{n,gamma,theta}`: as [`alpha_threshold_theta`] with
/// `R^theta = 1 + 1/sqrt(n - 2 gamma)`.
pub fn alpha_threshold_gamma_theta(n: u32, gamma: f64, theta: f64) -> Result<f64> {
    let nf = n as f64;
    if n < 2 || !(gamma >= 0.0 && nf - 2.0 * gamma > 0.0) {
        return Err(domain("threshold needs n - 2 gamma > 0"));
    }
    alpha_for_shift(theta, nf - 2.0 * gamma)
}

/// Threshold constants for a parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct Thresholds {
    pub n: u32,
    pub gamma: f64,
    pub theta: f64,
    /// `e^{(n-3)/(n-2)}`, the Euclidean threshold.
    pub alpha_euclid: f64,
    /// Threshold for `B(r)` with `R^theta = 1 + 1/sqrt(n - 2)`.
    pub alpha_theta: f64,
    /// `e^{(n-1-2 gamma)/(n-2 gamma)}`
    pub alpha_gamma: f64,
    /// Threshold for `B(r)` with `R^theta = 1 + 1/sqrt(n - 2 gamma)`.
    pub alpha_gamma_theta: f64,
    /// `R` with `R^theta = 1 + 1/sqrt(n - 2 gamma)`.
    pub r_big: f64,
    /// `1/(n sqrt(75 R))` with `sqrt R = 1 + 1/sqrt(n - 2 gamma)`.
    pub r_geometry: f64,
    /// `alpha_{n,gamma,1/2} / (3 r_geometry)`.
    pub alpha_boundary: f64,
}

impl Thresholds {
    pub fn new(n: u32, gamma: f64, theta: f64) -> Result<Self> {
        let nf = n as f64;
        if n < 3 || !(gamma >= 0.0 && gamma < nf / 2.0) || !(theta > 0.0 && theta < 2.0) {
            return Err(domain("thresholds need n >= 3, gamma in [0, n/2), theta in (0, 2)"));
        }
        let m = nf - 2.0 * gamma;
        let a = 1.0 + 1.0 / m.sqrt();
        let r_half = a * a;
        let r_geometry = 1.0 / (nf * (75.0 * r_half).sqrt());
        Ok(Self {
            n,
            gamma,
            theta,
            alpha_euclid: ((nf - 3.0) / (nf - 2.0)).exp(),
            alpha_theta: alpha_threshold_theta(n, theta)?,
            alpha_gamma: ((m - 1.0) / m).exp(),
            alpha_gamma_theta: alpha_threshold_gamma_theta(n, gamma, theta)?,
            r_big: a.powf(1.0 / theta),
            r_geometry,
            alpha_boundary: alpha_threshold_gamma_theta(n, gamma, 0.5)? / (3.0 * r_geometry),
        })
    }

    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        alloc::vec![
            ("alpha_euclid", self.alpha_euclid),
            ("alpha_theta", self.alpha_theta),
            ("alpha_gamma", self.alpha_gamma),
            ("alpha_gamma_theta", self.alpha_gamma_theta),
            ("r_big", self.r_big),
            ("r_geometry", self.r_geometry),
            ("alpha_boundary", self.alpha_boundary),
        ]
    }
}

const RHO_NODES: usize = 2048;
const RHO_T_MIN: f64 = 1e-8;
const RHO_T_MAX: f64 = 60.0;

/// Tabulated implicit map `t -> rho(t)`.
#[derive(Debug, Clone)]
pub struct RhoMap {
    g: GProfile,
    h: HProfile,
    g_cumulative: Vec<f64>,
    table: HermiteTable,
}

fn spec_tab() -> QuadratureSpec {
    QuadratureSpec::default().with_tol(1e-15, 1e-13)
}

impl RhoMap {
    pub fn new(n: u32) -> Result<Self> {
        Self::with_profiles(GProfile::new()?, HProfile::new(n)?)
    }

    pub fn with_profiles(g: GProfile, h: HProfile) -> Result<Self> {
        let ts = log_space(RHO_T_MIN, RHO_T_MAX, RHO_NODES);
        let inv_g2 = |s: f64| g.eval(s).map(|v| 1.0 / (v * v)).unwrap_or(f64::NAN);
        let mut cumulative = Vec::with_capacity(RHO_NODES);
        cumulative.push(small_t_g_integral(&g, ts[0])?);
        for w in ts.windows(2) {
            let last = cumulative[cumulative.len() - 1];
            cumulative.push(last + integrate(inv_g2, w[0], w[1], &spec_tab())?);
        }
        let mut rhos = Vec::with_capacity(RHO_NODES);
        let mut rho = solve_h_integral(&h, 0.0, 0.0, cumulative[0])?;
        rhos.push(rho);
        for i in 1..RHO_NODES {
            rho = solve_h_integral(&h, rho, cumulative[i - 1], cumulative[i])?;
            rhos.push(rho);
        }
        let mut ds = Vec::with_capacity(RHO_NODES);
        for (t, r) in ts.iter().zip(&rhos) {
            ds.push((h.eval(*r)? / g.eval(*t)?).powi(2));
        }
        let table = HermiteTable::new(ts, rhos, ds)?;
        Ok(Self { g, h, g_cumulative: cumulative, table })
    }

    pub fn n(&self) -> u32 {
        self.h.n()
    }

    pub fn g(&self) -> &GProfile {
        &self.g
    }

    pub fn h(&self) -> &HProfile {
        &self.h
    }

    /// `int_0^t ds/g(s)^2`.
    pub fn g_integral(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(domain("integral needs t > 0"));
        }
        if t <= RHO_T_MIN {
            return small_t_g_integral(&self.g, t);
        }
        let ts = self.table.nodes();
        let i = ts.partition_point(|&s| s <= t).min(ts.len()) - 1;
        let inv_g2 = |s: f64| self.g.eval(s).map(|v| 1.0 / (v * v)).unwrap_or(f64::NAN);
        if t == ts[i] {
            return Ok(self.g_cumulative[i]);
        }
        Ok(self.g_cumulative[i] + integrate(inv_g2, ts[i], t, &spec_tab())?)
    }

    /// `int_0^rho dr/h(r)^2`.
    pub fn h_integral(&self, rho: f64) -> Result<f64> {
        if !(rho > 0.0) {
            return Err(domain("integral needs rho > 0"));
        }
        h_integral_between(&self.h, 0.0, rho)
    }

    pub fn rho_of_t(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(domain("rho needs t > 0"));
        }
        let (lo, hi) = self.table.range();
        if t < lo {
            let target = small_t_g_integral(&self.g, t)?;
            return solve_h_integral(&self.h, 0.0, 0.0, target);
        }
        if t > hi {
            let rho_hi = self.table.values()[self.table.values().len() - 1];
            return Ok(t + (rho_hi - hi));
        }
        self.table.eval(t)
    }

    /// `d rho/dt = h(rho)^2 / g(t)^2`.
    pub fn rho_slope(&self, t: f64) -> Result<f64> {
        let rho = self.rho_of_t(t)?;
        Ok((self.h.eval(rho)? / self.g.eval(t)?).powi(2))
    }

    /// Inverse map `rho -> t`.
    pub fn t_of_rho(&self, rho: f64) -> Result<f64> {
        if !(rho > 0.0) {
            return Err(domain("t needs rho > 0"));
        }
        let rhos = self.table.values();
        let ts = self.table.nodes();
        let last = rhos.len() - 1;
        let (lo, hi) = if rho >= rhos[last] {
            return Ok(rho - (rhos[last] - ts[last]));
        } else if rho <= rhos[0] {
            (1e-300, ts[0])
        } else {
            let i = rhos.partition_point(|&r| r < rho);
            (ts[i - 1], ts[i])
        };
        let f = |t: f64| self.rho_of_t(t).unwrap_or(f64::NAN) - rho;
        let br = RootBracket::new(&f, lo, hi)?;
        find_root(f, br, 1e-15 * hi.max(1e-300))
    }

    /// `Y(t) = (n-2) h(rho)^2 sinh t / (g(t)^2 sinh rho)`.
    pub fn y_weight(&self, t: f64) -> Result<f64> {
        let rho = self.rho_of_t(t)?;
        let ratio = sinh_ratio(t, rho);
        let (hv, gv) = (self.h.eval(rho)?, self.g.eval(t)?);
        Ok((self.n() as f64 - 2.0) * hv * hv * ratio / (gv * gv))
    }
}

/// `sinh a / sinh b` without overflow.
pub fn sinh_ratio(a: f64, b: f64) -> f64 {
    if a.max(b) < 20.0 {
        a.sinh() / b.sinh()
    } else {
        (a - b).exp() * (-(-2.0 * a).exp_m1()) / (-(-2.0 * b).exp_m1())
    }
}

/// `int_0^t ds/g^2` for small `t`: the closed integral of the leading
/// asymptotic term, `pi/(2 L(t))` with `L(t) = -ln(2t)/pi + B`, plus the
/// quadrature of the remainder.
fn small_t_g_integral(g: &GProfile, t: f64) -> Result<f64> {
    let b = g.asymptotic_b();
    let l = |s: f64| -(2.0 * s).ln() / PI + b;
    // 1/g^2 - 1/(2 s L^2) written through q = g/sqrt(2s) to avoid cancellation
    let corr = |s: f64| {
        if s < 1e-300 {
            return 0.0;
        }
        let q = g.eval(s).unwrap_or(f64::NAN) / (2.0 * s).sqrt();
        let ls = l(s);
        (ls - q) * (ls + q) / (2.0 * s * q * q * ls * ls)
    };
    let spec = QuadratureSpec::default().with_tol(1e-16, 1e-12).with_transform(EndpointTransform::LogLeft);
    Ok(PI / (2.0 * l(t)) + integrate(corr, 0.0, t, &spec)?)
}

fn h_integral_between(h: &HProfile, a: f64, b: f64) -> Result<f64> {
    if h.is_trivial() {
        return Ok(b - a);
    }
    if b <= a {
        return Ok(0.0);
    }
    integrate(|r: f64| h.eval(r).map(|v| 1.0 / (v * v)).unwrap_or(f64::NAN), a, b, &spec_tab())
}

/// Find `rho > rho0` with `base + int_{rho0}^{rho} dr/h^2 = target`.
fn solve_h_integral(h: &HProfile, rho0: f64, base: f64, target: f64) -> Result<f64> {
    let need = target - base;
    if h.is_trivial() {
        return Ok(rho0 + need);
    }
    if need <= 0.0 {
        return Ok(rho0);
    }
    let step = if rho0 > 0.0 { (need * h.eval(rho0)?.powi(2)).max(1e-12) } else { 0.1 };
    let f = |r: f64| h_integral_between(h, rho0, r).unwrap_or(f64::NAN) - need;
    solve_increasing(f, rho0, step, 1e-14 * (rho0 + step))
}

/// Largest `alpha in (0, e)` (bisection to `1e-4`) with
/// `Y(t) >= X(alpha tanh(t/2))` on every grid point. The value is
/// grid-empirical and not certified.
pub fn threshold_search(map: &RhoMap, grid: &[f64]) -> Result<f64> {
    if grid.is_empty() || grid.iter().any(|&t| !(t > 0.0)) {
        return Err(domain("threshold grid must be non-empty and positive"));
    }
    let ys: Vec<(f64, f64)> = grid
        .iter()
        .map(|&t| Ok(((t / 2.0).tanh(), map.y_weight(t)?)))
        .collect::<Result<_>>()?;
    let passes = |alpha: f64| {
        ys.iter().all(|&(tau, y)| {
            let s = alpha * tau;
            y - 1.0 / (1.0 - s.ln()) >= 0.0
        })
    };
    let mut lo = 1e-12;
    if !passes(lo) {
        return Err(Error::NoPositiveAlpha);
    }
    let mut hi = E * (1.0 - 1e-15);
    if passes(hi) {
        return Ok(hi);
    }
    while hi - lo > 1e-4 {
        let mid = 0.5 * (lo + hi);
        if passes(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}
