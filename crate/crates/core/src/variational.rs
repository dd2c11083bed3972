//! Reduced one-dimensional Rayleigh quotients: discrete minimization from
//! above, quadrature of given profiles, change-of-variables consistency, and
//! Monte Carlo evaluation of full quotients.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{domain, Error, Result};
use crate::hyp2f1::ln_gamma;
use crate::mappings::{x_weight, RhoMap, Thresholds};
use crate::numerics::{gauss_legendre, integrate, log_space, EndpointTransform, QuadratureSpec};
use crate::profiles::HProfile;
use crate::sharp_constants::{
    critical_exponent, half_sphere_moment, s_np, sigma_1d, sigma_1d_profile, sphere_area,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridScheme {
    UniformLog,
    Graded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    scheme: GridScheme,
}

impl RadialGrid {
    pub fn new(nodes: Vec<f64>, scheme: GridScheme) -> Result<Self> {
        if nodes.len() < 65 {
            return Err(domain("a radial grid needs at least 64 intervals"));
        }
        if !(nodes[0] > 0.0) || nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(domain("grid nodes must be positive and strictly increasing"));
        }
        Ok(Self { nodes, scheme })
    }

    pub fn uniform_log(lo: f64, hi: f64, intervals: usize) -> Result<Self> {
        if !(lo > 0.0 && hi > lo) {
            return Err(domain("log grid needs 0 < lo < hi"));
        }
        Self::new(log_space(lo, hi, intervals + 1), GridScheme::UniformLog)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn scheme(&self) -> GridScheme {
        self.scheme
    }

    pub fn intervals(&self) -> usize {
        self.nodes.len() - 1
    }
}

/// The reduced problems. All share the one-dimensional form
/// `c inf int a v'^2 / (int b |v|^p)^{2/p}` for radial trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReducedKind {
    /// Interior point singularity on `B_R` after `t = r^{2-n}`.
    Euclidean { ball_radius: f64 },
    /// Interior point with the `X^{-theta}` conjugation, `t = X(alpha r)^{2 theta - 1}`.
    LogWeighted { theta: f64, alpha: f64 },
    /// Hyperbolic space in geodesic polar coordinates, variable `rho`.
    Hyperbolic,
    /// Half-space with boundary point singularity, `t = r^{2 gamma - n}/(n - 2 gamma)`, on the unit half ball.
    HalfSpace { gamma: f64 },
    /// Unit half ball with the logarithmic weight, `t = 1/X(alpha r)`.
    HalfBall { gamma: f64, alpha: f64 },
}

#[derive(Debug, Clone)]
pub struct ReducedFunctional {
    pub kind: ReducedKind,
    pub n: u32,
    pub p: f64,
    /// Whether the angular integral (sphere area, or the half-sphere moment
    /// ratio for the half-space kinds) is folded into the value.
    pub sphere_factor_included: bool,
    h: Option<HProfile>,
}

const T_MAX: f64 = 1e6;
const RHO_GRID: (f64, f64) = (1e-4, 30.0);

impl ReducedFunctional {
    pub fn new(kind: ReducedKind, n: u32, p: f64) -> Result<Self> {
        let nf = n as f64;
        if n < 3 || !(p > 2.0 && p <= critical_exponent(n) * (1.0 + 1e-14)) {
            return Err(domain("reduced functional needs n >= 3 and p in (2, 2n/(n-2)]"));
        }
        let alpha_euclid = ((nf - 3.0) / (nf - 2.0)).exp();
        let h = match kind {
            ReducedKind::Euclidean { ball_radius } if !(ball_radius > 0.0) => {
                return Err(domain("ball radius must be positive"))
            }
            ReducedKind::LogWeighted { theta, alpha } => {
                if !(0.0..0.5).contains(&theta) || !(alpha > 0.0 && alpha <= alpha_euclid) {
                    return Err(domain("log-weighted kind needs theta in [0, 1/2), alpha in (0, alpha_n]"));
                }
                None
            }
            ReducedKind::Hyperbolic => Some(HProfile::new(n)?),
            ReducedKind::HalfSpace { gamma } | ReducedKind::HalfBall { gamma, .. }
                if !(gamma >= 0.0 && gamma < nf / 2.0) =>
            {
                return Err(domain("gamma must lie in [0, n/2)"))
            }
            ReducedKind::HalfBall { gamma, alpha } => {
                let m = nf - 2.0 * gamma;
                if !(alpha > 0.0 && alpha <= ((m - 1.0) / m).exp()) {
                    return Err(domain("half-ball kind needs alpha in (0, alpha_{n,gamma}]"));
                }
                None
            }
            _ => None,
        };
        Ok(Self { kind, n, p, sphere_factor_included: true, h })
    }

    pub fn with_sphere_factor(mut self, included: bool) -> Self {
        self.sphere_factor_included = included;
        self
    }

    /// Angular factor multiplying the one-dimensional quotient of a radial trial.
    pub fn angular_factor(&self) -> f64 {
        let p = self.p;
        match self.kind {
            ReducedKind::HalfSpace { .. } | ReducedKind::HalfBall { .. } => {
                half_sphere_moment(self.n, 2.0) / half_sphere_moment(self.n, p).powf(2.0 / p)
            }
            _ => sphere_area(self.n).powf(1.0 - 2.0 / p),
        }
    }

    fn sphere_factor(&self) -> f64 {
        if self.sphere_factor_included {
            self.angular_factor()
        } else {
            1.0
        }
    }

    /// Constant in front of the infimum.
    pub fn prefactor(&self) -> f64 {
        let (nf, p) = (self.n as f64, self.p);
        match self.kind {
            ReducedKind::LogWeighted { theta, .. } => (1.0 - 2.0 * theta).powf((p + 2.0) / p),
            ReducedKind::Hyperbolic => (nf - 2.0).powf(-(p + 2.0) / p),
            _ => 1.0,
        }
    }

    /// Closed-form value of the infimum, where one is known.
    pub fn target(&self) -> Option<f64> {
        let (nf, p) = (self.n as f64, self.p);
        let s = s_np(self.n, p).ok()?;
        let full = match self.kind {
            ReducedKind::Euclidean { .. } => (nf - 2.0).powf(-(p + 2.0) / p) * s,
            ReducedKind::LogWeighted { theta, .. } => ((1.0 - 2.0 * theta) / (nf - 2.0)).powf((p + 2.0) / p) * s,
            ReducedKind::Hyperbolic if self.n == 3 => s,
            _ => return None,
        };
        Some(if self.sphere_factor_included { full } else { full / self.angular_factor() })
    }

    /// Left end of the one-dimensional domain.
    pub fn lower_limit(&self) -> f64 {
        let nf = self.n as f64;
        match self.kind {
            ReducedKind::Euclidean { ball_radius } => ball_radius.powf(2.0 - nf),
            ReducedKind::LogWeighted { theta, alpha } => (1.0 - alpha.ln()).powf(1.0 - 2.0 * theta),
            ReducedKind::Hyperbolic => 0.0,
            ReducedKind::HalfSpace { gamma } => 1.0 / (nf - 2.0 * gamma),
            ReducedKind::HalfBall { alpha, .. } => 1.0 - alpha.ln(),
        }
    }

    /// Log grid over the truncated domain: `[lower limit, 1e6]` in `t`, or
    /// `[1e-4, 30]` in `rho` for the hyperbolic kind.
    pub fn default_grid(&self, intervals: usize) -> Result<RadialGrid> {
        match self.kind {
            ReducedKind::Hyperbolic => RadialGrid::uniform_log(RHO_GRID.0, RHO_GRID.1, intervals),
            _ => RadialGrid::uniform_log(self.lower_limit(), T_MAX, intervals),
        }
    }

    /// Coefficient of `v'^2`.
    fn stiffness_weight(&self, x: f64) -> Result<f64> {
        match (&self.kind, &self.h) {
            (ReducedKind::Hyperbolic, Some(h)) => Ok(h.eval(x)?.powi(2)),
            _ => Ok(1.0),
        }
    }

    /// Coefficient of `|v|^p`.
    fn mass_weight(&self, x: f64) -> Result<f64> {
        let e = -(self.p + 2.0) / 2.0;
        match (&self.kind, &self.h) {
            (ReducedKind::Hyperbolic, Some(h)) => Ok(x.sinh().powf(e) * h.eval(x)?.powf(self.p)),
            _ => Ok(x.powf(e)),
        }
    }

    fn scale(&self) -> f64 {
        self.prefactor() * self.sphere_factor()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RayleighResult {
    pub estimate: f64,
    pub target: Option<f64>,
    /// `(estimate - target)/target`.
    pub relative_gap: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Minimizing profile at the grid nodes, normalized so the denominator is one.
    pub profile: Vec<f64>,
}

const GAUSS_POINTS: usize = 8;
const MAX_ITER_PER_LEVEL: usize = 20_000;
const STOP_REL: f64 = 1e-10;
const MIN_LEVEL_INTERVALS: usize = 64;

struct Discrete {
    x: Vec<f64>,
    k: Vec<f64>,
    quad: Vec<[(f64, f64); GAUSS_POINTS]>,
    p: f64,
}

impl Discrete {
    fn new(func: &ReducedFunctional, x: Vec<f64>) -> Result<Self> {
        let (gx, gw) = gauss_legendre(GAUSS_POINTS);
        let mut k = Vec::with_capacity(x.len() - 1);
        let mut quad = Vec::with_capacity(x.len() - 1);
        for w in x.windows(2) {
            let h = w[1] - w[0];
            let mut a_int = 0.0;
            let mut q = [(0.0, 0.0); GAUSS_POINTS];
            for (j, (xi, wi)) in gx.iter().zip(&gw).enumerate() {
                let lam = 0.5 * (1.0 + xi);
                let s = w[0] + lam * h;
                a_int += wi * 0.5 * h * func.stiffness_weight(s)?;
                q[j] = (wi * 0.5 * h * func.mass_weight(s)?, lam);
            }
            if !a_int.is_finite() || q.iter().any(|(c, _)| !c.is_finite()) {
                return Err(domain("functional weights are not finite on the grid"));
            }
            k.push(a_int / (h * h));
            quad.push(q);
        }
        Ok(Self { x, k, quad, p: func.p })
    }

    fn energy(&self, v: &[f64]) -> f64 {
        self.k.iter().enumerate().map(|(i, k)| k * (v[i + 1] - v[i]).powi(2)).sum()
    }

    fn mass(&self, v: &[f64]) -> f64 {
        let mut s = 0.0;
        for (i, q) in self.quad.iter().enumerate() {
            for &(c, lam) in q {
                s += c * ((1.0 - lam) * v[i] + lam * v[i + 1]).abs().powf(self.p);
            }
        }
        s
    }

    /// Gradient of the mass divided by `p`, at interior nodes.
    fn mass_gradient(&self, v: &[f64]) -> Vec<f64> {
        let mut g = alloc::vec![0.0; v.len()];
        for (i, q) in self.quad.iter().enumerate() {
            for &(c, lam) in q {
                let vq = (1.0 - lam) * v[i] + lam * v[i + 1];
                let d = c * vq.abs().powf(self.p - 2.0) * vq;
                g[i] += (1.0 - lam) * d;
                g[i + 1] += lam * d;
            }
        }
        g
    }

    /// Solve `K u = rhs` on interior nodes with zero boundary values.
    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.x.len();
        let m = n - 2;
        let mut c = alloc::vec![0.0; m];
        let mut d = alloc::vec![0.0; m];
        for j in 0..m {
            let i = j + 1;
            let diag = self.k[i - 1] + self.k[i];
            let lower = if j > 0 { -self.k[i - 1] } else { 0.0 };
            let denom = diag - lower * if j > 0 { c[j - 1] } else { 0.0 };
            c[j] = -self.k[i] / denom;
            d[j] = (rhs[i] - lower * if j > 0 { d[j - 1] } else { 0.0 }) / denom;
        }
        let mut u = alloc::vec![0.0; n];
        for j in (0..m).rev() {
            u[j + 1] = d[j] - if j + 1 < m { c[j] * u[j + 2] } else { 0.0 };
        }
        u
    }

    fn normalize(&self, v: &mut [f64]) {
        let s = self.mass(v).powf(-1.0 / self.p);
        v.iter_mut().for_each(|x| *x *= s);
    }

    /// Inverse power iteration from `v`; returns the final quotient, the
    /// iteration count and whether the stopping rule was met.
    fn iterate(&self, v: &mut Vec<f64>) -> Result<(f64, usize, bool)> {
        self.normalize(v);
        let mut q = self.energy(v);
        for it in 1..=MAX_ITER_PER_LEVEL {
            let rhs = self.mass_gradient(v);
            let mut u = self.solve(&rhs);
            if let Some(idx) = u[1..u.len() - 1].iter().position(|&x| !(x > 0.0)) {
                return Err(Error::SignError { index: idx + 1 });
            }
            self.normalize(&mut u);
            let q_new = self.energy(&u);
            *v = u;
            let done = (q - q_new).abs() <= STOP_REL * q_new;
            q = q_new;
            if done {
                return Ok((q, it, true));
            }
        }
        Ok((q, MAX_ITER_PER_LEVEL, false))
    }
}

/// Minimize the discretized quotient over continuous piecewise linear
/// profiles on `grid` that vanish at both ends. Coarser nested levels
/// (every second node, down to 64 intervals) are solved first and
/// prolonged; each level starts from the previous minimizer, so the estimate
/// never increases under refinement. The result bounds the infimum from
/// above up to the quadrature error of the weight integrals.
pub fn minimize_reduced(func: &ReducedFunctional, grid: &RadialGrid) -> Result<RayleighResult> {
    let nodes = grid.nodes();
    let total = grid.intervals();
    let mut strides = alloc::vec![1usize];
    while total.is_multiple_of(strides[strides.len() - 1] * 2) && total / (strides[strides.len() - 1] * 2) >= MIN_LEVEL_INTERVALS {
        let s = strides[strides.len() - 1] * 2;
        strides.push(s);
    }
    strides.reverse();

    let coarse: Vec<f64> = nodes.iter().step_by(strides[0]).copied().collect();
    let scale = (coarse[0].max(1e-300) * coarse[coarse.len() - 1]).sqrt();
    let mut v: Vec<f64> = coarse.iter().map(|&x| sigma_1d_profile(func.p, x / scale).0).collect();
    let last = v.len() - 1;
    v[0] = 0.0;
    v[last] = 0.0;

    let mut iterations = 0;
    let mut converged = true;
    let mut q = f64::INFINITY;
    let mut prev_x = coarse.clone();
    for (level, &stride) in strides.iter().enumerate() {
        let x: Vec<f64> = nodes.iter().step_by(stride).copied().collect();
        if level > 0 {
            v = prolong(&prev_x, &v, &x);
        }
        let disc = Discrete::new(func, x.clone())?;
        let (ql, it, ok) = disc.iterate(&mut v)?;
        iterations += it;
        converged = ok;
        q = ql;
        prev_x = x;
    }
    if !converged {
        return Err(Error::NonConvergence { estimate: q * func.scale(), error: f64::NAN });
    }
    let estimate = q * func.scale();
    let target = func.target();
    Ok(RayleighResult {
        estimate,
        target,
        relative_gap: target.map(|t| (estimate - t) / t),
        iterations,
        converged,
        profile: v,
    })
}

/// Piecewise linear interpolation of `(xs, vs)` at the finer nodes `fine`.
fn prolong(xs: &[f64], vs: &[f64], fine: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(fine.len());
    let mut j = 0;
    for &x in fine {
        while j + 2 < xs.len() && xs[j + 1] < x {
            j += 1;
        }
        let lam = ((x - xs[j]) / (xs[j + 1] - xs[j])).clamp(0.0, 1.0);
        out.push((1.0 - lam) * vs[j] + lam * vs[j + 1]);
    }
    out
}

/// Quotient of a given profile `x -> (v(x), v'(x))` supported in
/// `support` (the right end may be infinite), by quadrature.
pub fn quotient_of_profile<V: Fn(f64) -> (f64, f64)>(
    func: &ReducedFunctional,
    profile: V,
    support: (f64, f64),
    quad: &QuadratureSpec,
) -> Result<f64> {
    let (lo, hi) = support;
    if !(lo >= 0.0 && hi > lo) {
        return Err(domain("support must be an interval in [0, inf]"));
    }
    let p = func.p;
    let num_f = |x: f64| {
        let (_, dv) = profile(x);
        func.stiffness_weight(x).unwrap_or(f64::NAN) * dv * dv
    };
    let den_f = |x: f64| {
        let (v, _) = profile(x);
        if v == 0.0 {
            return 0.0;
        }
        func.mass_weight(x).unwrap_or(f64::NAN) * v.abs().powf(p)
    };
    let num = integrate_split(num_f, lo, hi, quad)?;
    let den = integrate_split(den_f, lo, hi, quad)?;
    Ok(func.scale() * num / den.powf(2.0 / p))
}

fn integrate_split<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, quad: &QuadratureSpec) -> Result<f64> {
    if hi.is_finite() {
        return integrate(&f, lo, hi, quad);
    }
    let mid = (2.0 * lo).max(1.0);
    let right = quad.with_transform(EndpointTransform::AlgebraicRight);
    Ok(integrate(&f, lo, mid, quad)? + integrate(&f, mid, f64::INFINITY, &right)?)
}

/// Quotients of one trial function carried through the substitutions
/// between equivalent forms. Every entry of a family should agree.
#[derive(Debug, Clone, PartialEq)]
pub struct ChangeOfVariablesReport {
    pub n: u32,
    pub p: f64,
    /// Radial quotient in `r` and `(n-2)^{(p+2)/p}` times the `t = r^{2-n}` form.
    pub euclidean: [f64; 2],
    /// Hyperbolic quotient for `u`, for `w = u/phi`, and `(n-2)^{(p+2)/p}`
    /// times the `Y`-weighted forms in `t` (with `v = w(rho(t))` and with
    /// `u = f v`).
    pub hyperbolic: [f64; 4],
    pub max_relative_gap: f64,
}

/// `sin^2(pi (x-a)/(b-a))` on `[a,b]`, with derivative.
fn sine_bump(x: f64, a: f64, b: f64) -> (f64, f64) {
    if x <= a || x >= b {
        return (0.0, 0.0);
    }
    let k = PI / (b - a);
    let s = k * (x - a);
    (s.sin().powi(2), k * (2.0 * s).sin())
}

fn coth(x: f64) -> f64 {
    1.0 / x.tanh()
}

pub fn change_of_variables_check(map: &RhoMap, p: f64, quad: &QuadratureSpec) -> Result<ChangeOfVariablesReport> {
    let n = map.n();
    if !(p > 2.0 && p <= critical_exponent(n) * (1.0 + 1e-14)) {
        return Err(domain("p must lie in (2, 2n/(n-2)]"));
    }
    let nf = n as f64;
    let half = 0.5 * (nf - 1.0);
    let lift = (nf - 2.0).powf((p + 2.0) / p);
    let ratio = |num: f64, den: f64| num / den.powf(2.0 / p);
    let g = map.g();
    let h = map.h();
    let ev = |r: Result<f64>| r.unwrap_or(f64::NAN);

    // Euclidean: u(r) on [1/2, 2]
    let (ra, rb) = (0.5, 2.0);
    let eu_r = ratio(
        integrate(|r: f64| sine_bump(r, ra, rb).1.powi(2) * r.powf(nf - 1.0), ra, rb, quad)?,
        integrate(|r: f64| r.powf(0.5 * p * (nf - 2.0) - 1.0) * sine_bump(r, ra, rb).0.powf(p), ra, rb, quad)?,
    );
    let r_of = |t: f64| t.powf(-1.0 / (nf - 2.0));
    let (ta, tb) = (rb.powf(2.0 - nf), ra.powf(2.0 - nf));
    let eu_t = lift
        * ratio(
            integrate(
                |t: f64| {
                    let r = r_of(t);
                    (sine_bump(r, ra, rb).1 * r / ((nf - 2.0) * t)).powi(2)
                },
                ta,
                tb,
                quad,
            )?,
            integrate(|t: f64| t.powf(-(p + 2.0) / 2.0) * sine_bump(r_of(t), ra, rb).0.powf(p), ta, tb, quad)?,
        );

    // hyperbolic: w(rho) on [a, a + 5/2], with t(a) >= 1e-3 so the
    // transported bump is not squeezed against t = 0
    let a = map.rho_of_t(1e-3)?.max(0.5);
    let b = a + 2.5;
    let w = |rho: f64| sine_bump(rho, a, b);
    let direct = ratio(
        integrate(
            |rho: f64| {
                let (wv, dw) = w(rho);
                let (hv, dh) = (ev(h.eval(rho)), ev(h.deriv(rho)));
                let phi = rho.sinh().powf(-half) * hv;
                let u = phi * wv;
                let du = phi * (dw + wv * (dh / hv - half * coth(rho)));
                rho.sinh().powf(nf - 1.0) * (du * du - half * half * u * u)
            },
            a,
            b,
            quad,
        )?,
        integrate(
            |rho: f64| {
                let u = rho.sinh().powf(-half) * ev(h.eval(rho)) * w(rho).0;
                rho.sinh().powf(0.5 * p * (nf - 2.0) - 1.0) * u.abs().powf(p)
            },
            a,
            b,
            quad,
        )?,
    );
    let conjugated = ratio(
        integrate(|rho: f64| ev(h.eval(rho)).powi(2) * w(rho).1.powi(2), a, b, quad)?,
        integrate(
            |rho: f64| rho.sinh().powf(-(p + 2.0) / 2.0) * ev(h.eval(rho)).powf(p) * w(rho).0.powf(p),
            a,
            b,
            quad,
        )?,
    );
    let (t0, t1) = (map.t_of_rho(a)?, map.t_of_rho(b)?);
    let integrate_t = |f: &dyn Fn(f64) -> f64| {
        integrate(
            |s: f64| {
                let t = s.exp();
                f(t) * t
            },
            t0.ln(),
            t1.ln(),
            quad,
        )
    };
    // v(t) = w(rho(t)), v'(t) = w'(rho) rho'(t)
    let v = |t: f64| -> (f64, f64) {
        let rho = ev(map.rho_of_t(t));
        let (wv, dw) = w(rho);
        (wv, dw * ev(map.rho_slope(t)))
    };
    let y_form = lift
        * ratio(
            integrate_t(&|t: f64| ev(g.eval(t)).powi(2) * v(t).1.powi(2))?,
            integrate_t(&|t: f64| {
                t.sinh().powf(-(p + 2.0) / 2.0)
                    * ev(g.eval(t)).powf(p)
                    * ev(map.y_weight(t)).powf((p + 2.0) / 2.0)
                    * v(t).0.powf(p)
            })?,
        );
    let y_direct = lift
        * ratio(
            integrate_t(&|t: f64| {
                let (vv, dv) = v(t);
                let (gv, dg) = (ev(g.eval(t)), ev(g.deriv(t)));
                let f = t.sinh().powf(-half) * gv;
                let u = f * vv;
                let du = f * (dv + vv * (dg / gv - half * coth(t)));
                let c = 0.5 * (nf - 2.0);
                t.sinh().powf(nf - 1.0) * (du * du - half * half * u * u - c * c * u * u / t.sinh().powi(2))
            })?,
            integrate_t(&|t: f64| {
                let u = t.sinh().powf(-half) * ev(g.eval(t)) * v(t).0;
                t.sinh().powf(0.5 * p * (nf - 2.0) - 1.0) * ev(map.y_weight(t)).powf((p + 2.0) / 2.0) * u.abs().powf(p)
            })?,
        );
    let hyperbolic = [direct, conjugated, y_form, y_direct];
    let mut gap = ((eu_r - eu_t) / eu_r).abs();
    for x in &hyperbolic {
        for y in &hyperbolic {
            gap = gap.max(((x - y) / x).abs());
        }
    }
    Ok(ChangeOfVariablesReport { n, p, euclidean: [eu_r, eu_t], hyperbolic, max_relative_gap: gap })
}

/// Region for Monte Carlo sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum McRegion {
    FullSpace,
    HalfSpace,
    /// `{|x| > 1} ∩ B_r(e_n)`, the model exterior-ball region.
    ExteriorBallCap { radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McQuotientSpec {
    pub n: u32,
    pub sample_count: u64,
    pub seed: u64,
    pub region: McRegion,
}

/// Samples per independent random stream.
pub const MC_CHUNK_SAMPLES: u64 = 1 << 15;

impl McQuotientSpec {
    pub fn new(n: u32, sample_count: u64, seed: u64, region: McRegion) -> Result<Self> {
        if n < 3 || sample_count < 10_000 {
            return Err(domain("Monte Carlo needs n >= 3 and at least 1e4 samples"));
        }
        Ok(Self { n, sample_count, seed, region })
    }

    pub fn chunks(&self) -> u64 {
        self.sample_count.div_ceil(MC_CHUNK_SAMPLES)
    }

    /// Number of antithetic pairs drawn in `chunk`.
    pub fn chunk_pairs(&self, chunk: u64) -> u64 {
        let start = chunk * MC_CHUNK_SAMPLES;
        (self.sample_count.saturating_sub(start)).min(MC_CHUNK_SAMPLES) / 2
    }

    fn rng(&self, chunk: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(chunk);
        rng
    }
}

/// Running sums of a `K`-vector sample: count, sums, and cross products.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McMoments<const K: usize> {
    pub count: u64,
    pub sum: [f64; K],
    pub cross: [[f64; K]; K],
}

impl<const K: usize> Default for McMoments<K> {
    fn default() -> Self {
        Self { count: 0, sum: [0.0; K], cross: [[0.0; K]; K] }
    }
}

impl<const K: usize> McMoments<K> {
    pub fn push(&mut self, v: [f64; K]) {
        self.count += 1;
        for i in 0..K {
            self.sum[i] += v[i];
            for j in 0..K {
                self.cross[i][j] += v[i] * v[j];
            }
        }
    }

    pub fn merge(&mut self, other: &Self) {
        self.count += other.count;
        for i in 0..K {
            self.sum[i] += other.sum[i];
            for j in 0..K {
                self.cross[i][j] += other.cross[i][j];
            }
        }
    }

    pub fn mean(&self) -> [f64; K] {
        let c = self.count as f64;
        let mut m = [0.0; K];
        for (mi, s) in m.iter_mut().zip(&self.sum) {
            *mi = s / c;
        }
        m
    }

    /// Covariance matrix of the sample mean.
    pub fn mean_covariance(&self) -> [[f64; K]; K] {
        let c = self.count as f64;
        let m = self.mean();
        let mut cov = [[0.0; K]; K];
        for i in 0..K {
            for j in 0..K {
                cov[i][j] = (self.cross[i][j] / c - m[i] * m[j]) * c / (c - 1.0) / c;
            }
        }
        cov
    }

    /// Standard error of `phi(mean)` with gradient `grad` (delta method).
    pub fn delta_std_error(&self, grad: [f64; K]) -> f64 {
        let cov = self.mean_covariance();
        let mut v = 0.0;
        for i in 0..K {
            for j in 0..K {
                v += grad[i] * cov[i][j] * grad[j];
            }
        }
        v.max(0.0).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
}

fn check_two_point(p: f64, spec: &McQuotientSpec) -> Result<()> {
    if !(p > 2.0 && p <= critical_exponent(spec.n) * (1.0 + 1e-14)) {
        return Err(domain("p must lie in (2, 2n/(n-2)]"));
    }
    if spec.region != McRegion::FullSpace {
        return Err(domain("the two-point quotient is taken over the full space"));
    }
    Ok(())
}

/// Integrand samples of the quotient of `trial` for one chunk: pairs of
/// `(|grad u|^2 / q, W |u|^p / q)`, with `W = ((|x - e_n| |x + e_n|)/2)^{p(n-2)/2 - n}`,
/// averaged over the reflection `x_n -> -x_n`. The sampling density `q` is
/// an equal mixture of multivariate Cauchy clouds centred at `e_n` and
/// `-e_n`. `trial` writes the gradient and returns the value.
pub fn weighted_quotient_chunk<U: Fn(&[f64], &mut [f64]) -> f64>(
    p: f64,
    spec: &McQuotientSpec,
    chunk: u64,
    trial: U,
) -> Result<McMoments<2>> {
    check_two_point(p, spec)?;
    let n = spec.n as usize;
    let nf = n as f64;
    let wexp = 0.5 * p * (nf - 2.0) - nf;
    let cn = (ln_gamma(0.5 * (nf + 1.0)) - 0.5 * (nf + 1.0) * PI.ln()).exp();
    let mut rng = spec.rng(chunk);
    let mut x = alloc::vec![0.0; n];
    let mut grad = alloc::vec![0.0; n];
    let mut acc = McMoments::<2>::default();
    let mut eval = |x: &[f64]| -> [f64; 2] {
        let last = n - 1;
        let head: f64 = x[..last].iter().map(|v| v * v).sum();
        let dp2 = head + (x[last] + 1.0).powi(2);
        let dm2 = head + (x[last] - 1.0).powi(2);
        let u = trial(x, &mut grad);
        let g2: f64 = grad.iter().map(|g| g * g).sum();
        let wgt = (0.5 * (dp2 * dm2).sqrt()).powf(wexp);
        let q = 0.5 * cn * ((1.0 + dm2).powf(-0.5 * (nf + 1.0)) + (1.0 + dp2).powf(-0.5 * (nf + 1.0)));
        [g2 / q, wgt * u.abs().powf(p) / q]
    };
    for _ in 0..spec.chunk_pairs(chunk) {
        let sign = if rng.next_u32() & 1 == 0 { 1.0 } else { -1.0 };
        let g: f64 = StandardNormal.sample(&mut rng);
        let inv = 1.0 / g.abs();
        for xi in x.iter_mut() {
            let z: f64 = StandardNormal.sample(&mut rng);
            *xi = z * inv;
        }
        x[n - 1] += sign;
        let f1 = eval(&x);
        x[n - 1] = -x[n - 1];
        let f2 = eval(&x);
        acc.push([0.5 * (f1[0] + f2[0]), 0.5 * (f1[1] + f2[1])]);
    }
    Ok(acc)
}

/// Two-point minimizer `(|x+e_n|^k + |x-e_n|^k)^{-2/(p-2)}`, `k = (p-2)(n-2)/2`,
/// with its gradient.
pub fn two_point_trial(n: u32, p: f64) -> impl Fn(&[f64], &mut [f64]) -> f64 {
    let nf = n as f64;
    let k = 0.5 * (p - 2.0) * (nf - 2.0);
    let m = 2.0 / (p - 2.0);
    move |x: &[f64], grad: &mut [f64]| {
        let last = x.len() - 1;
        let head: f64 = x[..last].iter().map(|v| v * v).sum();
        let dp = (head + (x[last] + 1.0).powi(2)).sqrt();
        let dm = (head + (x[last] - 1.0).powi(2)).sqrt();
        let s = dp.powf(k) + dm.powf(k);
        let (a, b) = (dp.powf(k - 2.0), dm.powf(k - 2.0));
        let c = -m * k * s.powf(-m - 1.0);
        for (i, g) in grad.iter_mut().enumerate() {
            let e = if i == last { 1.0 } else { 0.0 };
            *g = c * (a * (x[i] + e) + b * (x[i] - e));
        }
        s.powf(-m)
    }
}

pub fn two_point_chunk(p: f64, spec: &McQuotientSpec, chunk: u64) -> Result<McMoments<2>> {
    weighted_quotient_chunk(p, spec, chunk, two_point_trial(spec.n, p))
}

/// Turn merged two-point moments into the quotient estimate.
pub fn two_point_finish(p: f64, spec: &McQuotientSpec, moments: &McMoments<2>) -> Result<McEstimate> {
    let [num, den] = moments.mean();
    let q = num / den.powf(2.0 / p);
    let grad = [1.0 / den.powf(2.0 / p), -(2.0 / p) * num / den.powf(2.0 / p + 1.0)];
    let se = moments.delta_std_error(grad);
    if !(se <= 0.05 * q.abs()) {
        return Err(Error::VarianceBlowup { estimate: q, std_error: se });
    }
    Ok(McEstimate { estimate: q, std_error: se, samples: spec.sample_count })
}

/// Monte Carlo Rayleigh quotient of the two-point minimizer for the weight
/// `((|x - e_n| |x + e_n|)/2)^{p(n-2)/2 - n}`. Chunks are evaluated in order;
/// the result does not depend on how chunks are scheduled.
pub fn mc_quotient_two_point(p: f64, spec: &McQuotientSpec) -> Result<McEstimate> {
    mc_quotient_weighted(p, spec, two_point_trial(spec.n, p))
}

/// Monte Carlo quotient of an arbitrary trial function against the
/// two-point weight.
pub fn mc_quotient_weighted<U: Fn(&[f64], &mut [f64]) -> f64>(p: f64, spec: &McQuotientSpec, trial: U) -> Result<McEstimate> {
    let mut acc = McMoments::<2>::default();
    for c in 0..spec.chunks() {
        acc.merge(&weighted_quotient_chunk(p, spec, c, &trial)?);
    }
    two_point_finish(p, spec, &acc)
}

/// Integral inequalities checked by Monte Carlo on explicit test functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SmokeInequality {
    /// Half-space form of the hyperbolic Poincaré-Sobolev inequality,
    /// `n = 3`, where the constant is `s_np(3, p)`.
    HalfSpaceHyperbolic,
    /// Boundary point singularity with exterior ball, in coordinates where
    /// the singular point is `e_n` and the ball is `B_1(0)`. The unknown
    /// constant is replaced by its radial-trial upper bound.
    ExteriorBall { gamma: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    Zero,
    /// `prod (1 - s_i^2)^2`, `s_i = (x_i - c_i)/w_i`, supported in the box.
    ProductBump { center: Vec<f64>, half_width: Vec<f64> },
}

impl TestFunction {
    fn value_grad(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        match self {
            TestFunction::Zero => {
                grad.iter_mut().for_each(|g| *g = 0.0);
                0.0
            }
            TestFunction::ProductBump { center, half_width } => {
                let mut factors = [0.0f64; 16];
                let mut dfs = [0.0f64; 16];
                for i in 0..x.len() {
                    let s = (x[i] - center[i]) / half_width[i];
                    if s.abs() >= 1.0 {
                        grad.iter_mut().for_each(|g| *g = 0.0);
                        return 0.0;
                    }
                    let a = 1.0 - s * s;
                    factors[i] = a * a;
                    dfs[i] = -4.0 * s * a / half_width[i];
                }
                let total: f64 = factors[..x.len()].iter().product();
                for i in 0..x.len() {
                    let others: f64 = (0..x.len()).filter(|&j| j != i).map(|j| factors[j]).product();
                    grad[i] = others * dfs[i];
                }
                total
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmokeReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub std_error: f64,
    pub passed: bool,
    /// The constant on the right was replaced by an upper bound.
    pub heuristic: bool,
}

struct SmokeSetup {
    constant: f64,
    hardy: f64,
    alpha: f64,
    heuristic: bool,
}

fn smoke_setup(name: SmokeInequality, n: u32, p: f64) -> Result<SmokeSetup> {
    let nf = n as f64;
    match name {
        SmokeInequality::HalfSpaceHyperbolic => {
            if n != 3 {
                return Err(domain("the half-space constant is known in closed form only for n = 3"));
            }
            Ok(SmokeSetup { constant: s_np(3, p)?, hardy: 0.25, alpha: 0.0, heuristic: false })
        }
        SmokeInequality::ExteriorBall { gamma } => {
            let th = Thresholds::new(n, gamma, 0.5)?;
            // (n - 2 gamma)^{-(p+2)/p} times the radial-trial bound of the constant
            let func = ReducedFunctional::new(ReducedKind::HalfSpace { gamma }, n, p)?;
            let constant = func.angular_factor() * sigma_1d(p)?;
            Ok(SmokeSetup { constant, hardy: 0.25 * nf * nf, alpha: th.alpha_boundary, heuristic: true })
        }
    }
}

fn in_region(name: SmokeInequality, x: &[f64], radius: f64) -> bool {
    let last = x.len() - 1;
    match name {
        SmokeInequality::HalfSpaceHyperbolic => x[last] > 0.0,
        SmokeInequality::ExteriorBall { .. } => {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            let head: f64 = x[..last].iter().map(|v| v * v).sum();
            let d = (head + (x[last] - 1.0).powi(2)).sqrt();
            r2 > 1.0 && d < radius
        }
    }
}

/// Moments of `(|grad u|^2, u^2 V, W |u|^p)` times the box volume for one
/// chunk, `V` being the Hardy potential and `W` the weight on the right.
pub fn smoke_chunk(
    name: SmokeInequality,
    f: &TestFunction,
    p: f64,
    spec: &McQuotientSpec,
    chunk: u64,
) -> Result<McMoments<3>> {
    let n = spec.n as usize;
    let nf = n as f64;
    let setup = smoke_setup(name, spec.n, p)?;
    let (center, half_width) = match f {
        TestFunction::ProductBump { center, half_width } if center.len() == n && half_width.len() == n && n <= 16 => {
            (center, half_width)
        }
        TestFunction::Zero => return Ok(McMoments::default()),
        _ => return Err(domain("test function dimension does not match n")),
    };
    let radius = match spec.region {
        McRegion::ExteriorBallCap { radius } => radius,
        _ => f64::INFINITY,
    };
    let volume: f64 = half_width.iter().map(|w| 2.0 * w).product();
    let wexp = 0.5 * p * (nf - 2.0) - nf;
    let mut rng = spec.rng(chunk);
    let mut x = alloc::vec![0.0; n];
    let mut grad = alloc::vec![0.0; n];
    let mut acc = McMoments::<3>::default();
    let sample = |x: &[f64], grad: &mut [f64]| -> Result<[f64; 3]> {
        let u = f.value_grad(x, grad);
        if u == 0.0 {
            return Ok([0.0; 3]);
        }
        if !in_region(name, x, radius) {
            return Err(domain("test function support leaves the region"));
        }
        let g2: f64 = grad.iter().map(|g| g * g).sum();
        let last = n - 1;
        let head: f64 = x[..last].iter().map(|v| v * v).sum();
        let dp = (head + (x[last] + 1.0).powi(2)).sqrt();
        let dm = (head + (x[last] - 1.0).powi(2)).sqrt();
        let (pot, w) = match name {
            SmokeInequality::HalfSpaceHyperbolic => (1.0 / (x[last] * x[last]), (0.5 * dp * dm).powf(wexp)),
            SmokeInequality::ExteriorBall { .. } => {
                let xw = x_weight(setup.alpha * dm)?;
                (1.0 / (dm * dm), dm.powf(wexp) * (0.5 * dp).powf(wexp) * xw.powf(0.5 * (p + 2.0)))
            }
        };
        Ok([volume * g2, volume * setup.hardy * pot * u * u, volume * w * u.abs().powf(p)])
    };
    for _ in 0..spec.chunk_pairs(chunk) {
        for i in 0..n {
            let s: f64 = rand_distr::StandardUniform.sample(&mut rng);
            x[i] = center[i] + half_width[i] * (2.0 * s - 1.0);
        }
        let a = sample(&x, &mut grad)?;
        x[n - 1] = 2.0 * center[n - 1] - x[n - 1];
        let b = sample(&x, &mut grad)?;
        acc.push([0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])]);
    }
    Ok(acc)
}

pub fn smoke_finish(name: SmokeInequality, p: f64, spec: &McQuotientSpec, moments: &McMoments<3>) -> Result<SmokeReport> {
    let setup = smoke_setup(name, spec.n, p)?;
    let label = match name {
        SmokeInequality::HalfSpaceHyperbolic => "half_space_hyperbolic",
        SmokeInequality::ExteriorBall { .. } => "exterior_ball",
    };
    if moments.count == 0 {
        return Ok(SmokeReport {
            name: label.into(),
            lhs: 0.0,
            rhs: 0.0,
            margin: 0.0,
            std_error: 0.0,
            passed: true,
            heuristic: setup.heuristic,
        });
    }
    let [grad2, hardy, weighted] = moments.mean();
    let lhs = grad2 - hardy;
    let rhs = setup.constant * weighted.powf(2.0 / p);
    let margin = lhs - rhs;
    let se = moments.delta_std_error([1.0, -1.0, -setup.constant * (2.0 / p) * weighted.powf(2.0 / p - 1.0)]);
    if margin == 0.0 && se == 0.0 {
        return Ok(SmokeReport { name: label.into(), lhs, rhs, margin, std_error: se, passed: true, heuristic: setup.heuristic });
    }
    if margin.abs() < 3.0 * se {
        return Err(Error::InconclusiveMc { margin, std_error: se });
    }
    Ok(SmokeReport { name: label.into(), lhs, rhs, margin, std_error: se, passed: margin > 0.0, heuristic: setup.heuristic })
}

/// Evaluate `LHS - RHS` of the named inequality for each test function.
pub fn smoke_test_inequality(
    name: SmokeInequality,
    test_functions: &[TestFunction],
    p: f64,
    spec: &McQuotientSpec,
) -> Result<Vec<SmokeReport>> {
    test_functions
        .iter()
        .map(|f| {
            let mut acc = McMoments::<3>::default();
            for c in 0..spec.chunks() {
                acc.merge(&smoke_chunk(name, f, p, spec, c)?);
            }
            smoke_finish(name, p, spec, &acc)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn quad() -> QuadratureSpec {
        QuadratureSpec::default().with_tol(1e-14, 1e-12)
    }

    #[test]
    fn grid_validation() {
        assert!(RadialGrid::uniform_log(1.0, 10.0, 10).is_err());
        assert!(RadialGrid::uniform_log(1.0, 10.0, 64).is_ok());
        assert!(RadialGrid::new((0..70).map(|i| 70.0 - i as f64).collect(), GridScheme::Graded).is_err());
    }

    #[test]
    fn euclidean_minimization_from_above() {
        let f = ReducedFunctional::new(ReducedKind::Euclidean { ball_radius: 1.0 }, 3, 4.0).unwrap();
        let r = minimize_reduced(&f, &f.default_grid(512).unwrap()).unwrap();
        let gap = r.relative_gap.unwrap();
        assert!(gap > -1e-9 && gap < 0.02, "gap {gap}");
        assert!(r.profile.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn profile_quotient_matches_radial_quadrature() {
        for (n, p) in [(3, 4.0), (4, 3.0)] {
            let f = ReducedFunctional::new(ReducedKind::Euclidean { ball_radius: 1.0 }, n, p).unwrap();
            let q = quotient_of_profile(&f, |t| sigma_1d_profile(p, t), (0.0, f64::INFINITY), &quad()).unwrap();
            let nf = n as f64;
            let expected =
                crate::sharp_constants::radial_quotient_interior(n, p, &quad()).unwrap() * (nf - 2.0).powf(-(p + 2.0) / p);
            assert_relative_eq!(q, expected, max_relative = 1e-8);
        }
    }

    #[test]
    fn quotient_is_homogeneous() {
        let f = ReducedFunctional::new(ReducedKind::Euclidean { ball_radius: 1.0 }, 3, 4.0).unwrap();
        let q1 = quotient_of_profile(&f, |t| sine_bump(t, 2.0, 9.0), (2.0, 9.0), &quad()).unwrap();
        let q3 = quotient_of_profile(
            &f,
            |t| {
                let (v, d) = sine_bump(t, 2.0, 9.0);
                (3.0 * v, 3.0 * d)
            },
            (2.0, 9.0),
            &quad(),
        )
        .unwrap();
        assert_relative_eq!(q1, q3, max_relative = 1e-10);
        assert!(q1 > f.target().unwrap());
    }

    #[test]
    fn moments_merge_is_additive() {
        let mut a = McMoments::<2>::default();
        let mut b = McMoments::<2>::default();
        let mut all = McMoments::<2>::default();
        for i in 0..10 {
            let v = [i as f64, (i * i) as f64];
            all.push(v);
            if i < 4 {
                a.push(v)
            } else {
                b.push(v)
            }
        }
        a.merge(&b);
        assert_eq!(a, all);
    }

    #[test]
    fn bump_gradient_matches_difference() {
        let f = TestFunction::ProductBump { center: alloc::vec![0.0, 0.1, 1.0], half_width: alloc::vec![0.5, 0.4, 0.3] };
        let x = [0.1, 0.2, 1.05];
        let mut g = [0.0; 3];
        let mut tmp = [0.0; 3];
        f.value_grad(&x, &mut g);
        for i in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[i] += 1e-6;
            xm[i] -= 1e-6;
            let d = (f.value_grad(&xp, &mut tmp) - f.value_grad(&xm, &mut tmp)) / 2e-6;
            assert!((d - g[i]).abs() < 1e-7);
        }
    }
}
