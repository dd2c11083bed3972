//! The profiles `g` and `h`.
//!
//! `g` solves `g'' + g/(4 sinh^2 t) = 0` and `h` solves
//! `h'' - (n-1)(n-3) h/(4 sinh^2 t) = 0` on `t > 0`, both tending to 1 at
//! infinity. With `xi = 1/(1 - e^{2t})` the outer branch (`t >= ln sqrt 2`)
//! is a hypergeometric function of `xi`; the inner branch is written in
//! `x = e^{2t} - 1` and involves
//!
//! ```text
//! I_m(x) = integral_{-1}^{-x} s^{1-m} P(s) ds,   P(s) = 1/((s-1) G(s)^2)
//! ```
//!
//! with `m = 2, G = F` for `g` and `m = n, G = F1` for `h`. The singular part
//! of `I_m` is integrated in closed form from the Taylor coefficients of `P`;
//! the regular remainder is tabulated once as a Chebyshev series in `x`.

use alloc::vec::Vec;
use core::f64::consts::{LN_2, PI};
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{domain, Error, Result};
use crate::hyp2f1::{f21, f21_deriv, Hyp2F1Params};
use crate::numerics::{integrate, Chebyshev, QuadratureSpec};

/// `ln sqrt 2`, where inner and outer branches meet.
pub const BRANCH_POINT: f64 = 0.5 * LN_2;

const TAYLOR_TERMS: usize = 90;
const CHEB_NODES: usize = 48;

/// `x = e^{2t} - 1`
fn x_of(t: f64) -> f64 {
    (2.0 * t).exp_m1()
}

/// `d xi/dt` written in `x` so that it stays finite for large `t`.
fn dxi_dt(x: f64) -> f64 {
    let r = 1.0 / x;
    2.0 * (r + r * r)
}

#[derive(Debug, Clone)]
struct InnerIntegral {
    params: Hyp2F1Params,
    m: usize,
    taylor: Vec<f64>,
    remainder: Chebyshev,
}

impl InnerIntegral {
    fn new(params: Hyp2F1Params, m: usize) -> Result<Self> {
        let taylor = p_taylor(params, TAYLOR_TERMS);
        let mut this = Self { params, m, taylor, remainder: Chebyshev::fit(|_| Ok(0.0), 0.0, 1.0, 2)? };
        let spec = QuadratureSpec::default().with_tol(1e-14, 1e-13);
        let cheb = Chebyshev::fit(
            |x| {
                if x >= 1.0 {
                    Ok(0.0)
                } else {
                    integrate(|s| this.regular_part(s), -1.0, -x, &spec)
                }
            },
            0.0,
            1.0,
            CHEB_NODES,
        )?;
        this.remainder = cheb;
        Ok(this)
    }

    fn p(&self, s: f64) -> Result<f64> {
        let gv = f21(self.params, s)?;
        Ok(1.0 / ((s - 1.0) * gv * gv))
    }

    /// `(P(s) - sum_{k <= m-2} p_k s^k) / s^{m-1}`, analytic on `[-1, 0]`.
    fn regular_part(&self, s: f64) -> f64 {
        let m = self.m;
        if s.abs() < 0.5 {
            let mut acc = 0.0;
            for &c in self.taylor[m - 1..].iter().rev() {
                acc = acc * s + c;
            }
            acc
        } else {
            let head = self.taylor[..m - 1].iter().rev().fold(0.0, |acc, &c| acc * s + c);
            let pv = self.p(s).unwrap_or(f64::NAN);
            (pv - head) / s.powi(m as i32 - 1)
        }
    }

    /// `I_m(x)` for `x in (0, 1]`.
    fn eval(&self, x: f64) -> f64 {
        let m = self.m as i32;
        let mut acc = self.remainder.eval(x);
        let lnx = x.ln();
        for (k, &pk) in self.taylor[..self.m - 1].iter().enumerate() {
            let j = k as i32 + 2 - m;
            if j == 0 {
                acc += pk * lnx;
            } else {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                acc += pk * sign * (x.powi(j) - 1.0) / j as f64;
            }
        }
        acc
    }

    /// `d I_m / dx = -(-x)^{1-m} P(-x)`.
    fn deriv(&self, x: f64) -> Result<f64> {
        let s = -x;
        Ok(-s.powi(1 - self.m as i32) * self.p(s)?)
    }
}

/// Taylor coefficients of `1/((s-1) G(s)^2)` at `s = 0`.
fn p_taylor(params: Hyp2F1Params, terms: usize) -> Vec<f64> {
    let mut g = Vec::with_capacity(terms);
    let mut c = 1.0;
    for k in 0..terms {
        g.push(c);
        let kf = k as f64;
        c *= (params.a + kf) * (params.b + kf) / ((params.c + kf) * (kf + 1.0));
    }
    let sq: Vec<f64> = (0..terms).map(|k| (0..=k).map(|j| g[j] * g[k - j]).sum()).collect();
    let mut inv = alloc::vec![0.0; terms];
    inv[0] = 1.0;
    for k in 1..terms {
        inv[k] = -(1..=k).map(|j| sq[j] * inv[k - j]).sum::<f64>();
    }
    let mut acc = 0.0;
    inv.iter()
        .map(|v| {
            acc += v;
            -acc
        })
        .collect()
}

/// The integral defining `B`:
/// `1 + (1/pi) integral_0^1 (1 - (1+t) F(-t)^2) / (t (t+1) F(-t)^2) dt`.
pub fn asymptotic_b() -> Result<f64> {
    let p = Hyp2F1Params::elliptic();
    let integrand = |t: f64| {
        let f = f21(p, -t).unwrap_or(f64::NAN);
        let f2 = f * f;
        if t < 1e-6 {
            // numerator / t from the series of F(-t)
            let num_over_t = -0.5 + 5.0 / 32.0 * t - 5.0 / 64.0 * t * t;
            num_over_t / ((1.0 + t) * f2)
        } else {
            (1.0 - (1.0 + t) * f2) / (t * (t + 1.0) * f2)
        }
    };
    let spec = QuadratureSpec::default().with_tol(1e-14, 1e-13);
    Ok(1.0 + integrate(integrand, 0.0, 1.0, &spec)? / PI)
}

/// The profile `g`.
#[derive(Debug, Clone)]
pub struct GProfile {
    inner: InnerIntegral,
    c2_star: f64,
    asymptotic_b: f64,
}

impl GProfile {
    pub fn new() -> Result<Self> {
        let p = Hyp2F1Params::elliptic();
        let f = f21(p, -1.0)?;
        let c2_star = f * (4.0 * f21_deriv(p, -1.0)? - f);
        let this = Self { inner: InnerIntegral::new(p, 2)?, c2_star, asymptotic_b: asymptotic_b()? };
        let residual = (this.inner_deriv(BRANCH_POINT)? - this.outer_deriv(BRANCH_POINT)?).abs();
        if residual > 1e-8 {
            return Err(Error::MatchFailure { residual });
        }
        Ok(this)
    }

    pub fn branch_point(&self) -> f64 {
        BRANCH_POINT
    }

    /// `F(-1)(4F'(-1) - F(-1))`; equals `-1/pi`.
    pub fn c2_star(&self) -> f64 {
        self.c2_star
    }

    pub fn asymptotic_b(&self) -> f64 {
        self.asymptotic_b
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(domain("g needs t > 0"));
        }
        if t >= BRANCH_POINT {
            self.outer(t)
        } else {
            self.inner(t)
        }
    }

    pub fn deriv(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(domain("g needs t > 0"));
        }
        if t >= BRANCH_POINT {
            self.outer_deriv(t)
        } else {
            self.inner_deriv(t)
        }
    }

    /// `sqrt(2t) (-ln(2t)/pi + B)`
    pub fn small_t_asymptotic(&self, t: f64) -> f64 {
        (2.0 * t).sqrt() * (-(2.0 * t).ln() / PI + self.asymptotic_b)
    }

    pub(crate) fn outer(&self, t: f64) -> Result<f64> {
        f21(Hyp2F1Params::elliptic(), -1.0 / x_of(t))
    }

    fn outer_deriv(&self, t: f64) -> Result<f64> {
        let x = x_of(t);
        if !x.is_finite() {
            return Ok(0.0);
        }
        Ok(f21_deriv(Hyp2F1Params::elliptic(), -1.0 / x)? * dxi_dt(x))
    }

    pub(crate) fn inner(&self, t: f64) -> Result<f64> {
        let x = x_of(t);
        let f = f21(Hyp2F1Params::elliptic(), -x)?;
        Ok(x.sqrt() * f * (1.0 - self.c2_star * self.inner.eval(x)))
    }

    fn inner_deriv(&self, t: f64) -> Result<f64> {
        let p = Hyp2F1Params::elliptic();
        let x = x_of(t);
        let (f, df) = (f21(p, -x)?, f21_deriv(p, -x)?);
        let bracket = 1.0 - self.c2_star * self.inner.eval(x);
        let sq = x.sqrt();
        let d_dx = (0.5 * f / sq - sq * df) * bracket - sq * f * self.c2_star * self.inner.deriv(x)?;
        Ok(2.0 * (x + 1.0) * d_dx)
    }
}

/// The profile `h` in dimension `n`. For `n = 3` it is identically 1.
#[derive(Debug, Clone)]
pub struct HProfile {
    n: u32,
    c1_sharp: f64,
    c2_sharp: f64,
    inner: Option<InnerIntegral>,
}

/// `(c1#, c2#)` from the values of `F1`, `F2` and their derivatives at -1.
pub fn matching_constants(n: u32) -> Result<(f64, f64)> {
    if n < 4 {
        return Err(domain("matching constants need n >= 4"));
    }
    let (p1, p2) = (Hyp2F1Params::first(n), Hyp2F1Params::second(n));
    let (f1, f2) = (f21(p1, -1.0)?, f21(p2, -1.0)?);
    let (d1, d2) = (f21_deriv(p1, -1.0)?, f21_deriv(p2, -1.0)?);
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 }; // (-1)^{n-1}
    let c1 = f2 / f1;
    let c2 = 2.0 * sign * f1 * f2 * (d1 / f1 + d2 / f2 - (n as f64 - 1.0) / 2.0);
    Ok((c1, c2))
}

impl HProfile {
    pub fn new(n: u32) -> Result<Self> {
        if n < 3 {
            return Err(domain("h needs n >= 3"));
        }
        if n == 3 {
            return Ok(Self { n, c1_sharp: 1.0, c2_sharp: 0.0, inner: None });
        }
        let (c1_sharp, c2_sharp) = matching_constants(n)?;
        if !(c2_sharp.abs() > 1e-10) {
            return Err(Error::MatchFailure { residual: c2_sharp });
        }
        let inner = InnerIntegral::new(Hyp2F1Params::first(n), n as usize)?;
        let this = Self { n, c1_sharp, c2_sharp, inner: Some(inner) };
        let value_gap = (this.inner_value(BRANCH_POINT)? - this.outer(BRANCH_POINT)?).abs();
        let slope_gap = (this.inner_deriv(BRANCH_POINT)? - this.outer_deriv(BRANCH_POINT)?).abs();
        let residual = value_gap.max(slope_gap);
        if residual > 1e-8 {
            return Err(Error::MatchFailure { residual });
        }
        Ok(this)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn is_trivial(&self) -> bool {
        self.inner.is_none()
    }

    pub fn c1_sharp(&self) -> f64 {
        self.c1_sharp
    }

    pub fn c2_sharp(&self) -> f64 {
        self.c2_sharp
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(domain("h needs t > 0"));
        }
        if self.inner.is_none() {
            Ok(1.0)
        } else if t >= BRANCH_POINT {
            self.outer(t)
        } else {
            self.inner_value(t)
        }
    }

    pub fn deriv(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(domain("h needs t > 0"));
        }
        if self.inner.is_none() {
            Ok(0.0)
        } else if t >= BRANCH_POINT {
            self.outer_deriv(t)
        } else {
            self.inner_deriv(t)
        }
    }

    /// Leading small-`t` term; for `n = 4` it carries the `t^2 ln t`
    /// correction.
    pub fn small_t_asymptotic(&self, t: f64) -> Result<f64> {
        let n = self.n;
        if n < 4 {
            return Err(domain("asymptotic form needs n >= 4"));
        }
        let c2 = self.c2_sharp;
        if n == 4 {
            Ok(0.5 * c2 / (2.0 * t).sqrt() * (1.0 - t * t * (2.0 * t).ln() / 8.0))
        } else {
            let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
            Ok(c2 * sign / (n as f64 - 2.0) * (2.0 * t).powf(-(n as f64 - 3.0) / 2.0))
        }
    }

    pub(crate) fn outer(&self, t: f64) -> Result<f64> {
        f21(Hyp2F1Params::second(self.n), -1.0 / x_of(t))
    }

    fn outer_deriv(&self, t: f64) -> Result<f64> {
        let x = x_of(t);
        if !x.is_finite() {
            return Ok(0.0);
        }
        Ok(f21_deriv(Hyp2F1Params::second(self.n), -1.0 / x)? * dxi_dt(x))
    }

    fn inner_parts(&self, t: f64) -> Result<(&InnerIntegral, f64, f64)> {
        let inner = self.inner.as_ref().ok_or_else(|| domain("trivial profile"))?;
        let x = x_of(t);
        let bracket = self.c1_sharp + self.c2_sharp * inner.eval(x);
        Ok((inner, x, bracket))
    }

    pub(crate) fn inner_value(&self, t: f64) -> Result<f64> {
        let (_, x, bracket) = self.inner_parts(t)?;
        let k = (self.n as f64 - 1.0) / 2.0;
        Ok(x.powf(k) * f21(Hyp2F1Params::first(self.n), -x)? * bracket)
    }

    fn inner_deriv(&self, t: f64) -> Result<f64> {
        let (inner, x, bracket) = self.inner_parts(t)?;
        let p = Hyp2F1Params::first(self.n);
        let k = (self.n as f64 - 1.0) / 2.0;
        let (f, df) = (f21(p, -x)?, f21_deriv(p, -x)?);
        let xk = x.powf(k);
        let d_dx = (k * xk / x * f - xk * df) * bracket + xk * f * self.c2_sharp * inner.deriv(x)?;
        Ok(2.0 * (x + 1.0) * d_dx)
    }
}

/// `|h(t)/lead(t) - 1|` for the small-`t` leading term of `h`.
pub fn h_asymptotic_check(h: &HProfile, t: f64) -> Result<f64> {
    if !(t > 0.0 && t < 0.1) {
        return Err(domain("asymptotic check needs 0 < t < 0.1"));
    }
    Ok((h.eval(t)? / h.small_t_asymptotic(t)? - 1.0).abs())
}

/// `(f(t), phi(t)) = (sinh t)^{-(n-1)/2} (g(t), h(t))`.
pub fn radial_factors(g: &GProfile, h: &HProfile, t: f64) -> Result<(f64, f64)> {
    if !(t > 0.0) {
        return Err(domain("radial factors need t > 0"));
    }
    let s = t.sinh().powf(-(h.n() as f64 - 1.0) / 2.0);
    Ok((s * g.eval(t)?, s * h.eval(t)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gauss_constant() -> f64 {
        let (mut a, mut b) = (1.0f64, 2f64.sqrt());
        for _ in 0..40 {
            let an = 0.5 * (a + b);
            b = (a * b).sqrt();
            a = an;
        }
        1.0 / a
    }

    /// `g(t) = 1/AGM(1, sqrt(1 - xi))`, `xi = 1/(1 - e^{2t})`, valid for all
    /// `t > 0` by analytic continuation.
    fn g_oracle(t: f64) -> f64 {
        let xi = -1.0 / x_of(t);
        let (mut a, mut b) = (1.0f64, (1.0 - xi).sqrt());
        for _ in 0..60 {
            let an = 0.5 * (a + b);
            b = (a * b).sqrt();
            a = an;
        }
        1.0 / a
    }

    #[test]
    fn taylor_head() {
        // P(s) = 1/((s-1)F^2) = -1 - s/2 + ...
        let p = p_taylor(Hyp2F1Params::elliptic(), 10);
        assert_relative_eq!(p[0], -1.0);
        assert_relative_eq!(p[1], -0.5, max_relative = 1e-15);
        // first solution: -1 + (n-3)/2 s - A_n s^2
        for n in 4..=8u32 {
            let p = p_taylor(Hyp2F1Params::first(n), 10);
            let nf = n as f64;
            let a_n = (2.0 * nf.powi(3) - 15.0 * nf * nf + 28.0 * nf + 1.0) / (16.0 * nf);
            assert_relative_eq!(p[1], (nf - 3.0) / 2.0, max_relative = 1e-14);
            assert_relative_eq!(p[2], -a_n, max_relative = 1e-13);
        }
    }

    #[test]
    fn regular_part_branches_agree() {
        for (params, m) in [(Hyp2F1Params::elliptic(), 2), (Hyp2F1Params::first(6), 6)] {
            let inner = InnerIntegral::new(params, m).unwrap();
            let s = -0.5;
            let head = inner.taylor[..m - 1].iter().rev().fold(0.0, |acc, &c| acc * s + c);
            let direct = (inner.p(s).unwrap() - head) / s.powi(m as i32 - 1);
            let series = {
                let mut acc = 0.0;
                for &c in inner.taylor[m - 1..].iter().rev() {
                    acc = acc * s + c;
                }
                acc
            };
            assert!((direct - series).abs() < 1e-12 * direct.abs().max(1.0));
            assert!(inner.remainder.tail() < 1e-14);
        }
    }

    #[test]
    fn g_matches_agm_oracle() {
        let g = GProfile::new().unwrap();
        for k in 0..200 {
            let t = 1e-6 * (1e7f64).powf(k as f64 / 199.0);
            assert_relative_eq!(g.eval(t).unwrap(), g_oracle(t), max_relative = 1e-12);
        }
        assert_relative_eq!(g.eval(BRANCH_POINT).unwrap(), gauss_constant(), max_relative = 1e-14);
        assert!((g.eval(10.0).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn g_constants() {
        let g = GProfile::new().unwrap();
        assert!((g.c2_star() + 1.0 / PI).abs() < 1e-12);
        // B = 4 ln 2 / pi
        assert_relative_eq!(g.asymptotic_b(), 4.0 * LN_2 / PI, max_relative = 1e-12);
        assert!(g.asymptotic_b() > 1.0 - 1.0 / PI && g.asymptotic_b() < 1.0);
    }

    #[test]
    fn b_integrand_switch_is_continuous() {
        let p = Hyp2F1Params::elliptic();
        let t = 1e-3;
        let f2 = f21(p, -t).unwrap().powi(2);
        let direct = (1.0 - (1.0 + t) * f2) / (t * (t + 1.0) * f2);
        let series = (-0.5 + 5.0 / 32.0 * t - 5.0 / 64.0 * t * t) / ((1.0 + t) * f2);
        assert!((direct - series).abs() < 1e-8);
    }

    #[test]
    fn g_derivative_matches_difference() {
        let g = GProfile::new().unwrap();
        for t in [0.01, 0.1, 0.3, BRANCH_POINT, 0.5, 2.0, 9.0] {
            let h = 1e-6 * t;
            let fd = (g.eval(t + h).unwrap() - g.eval(t - h).unwrap()) / (2.0 * h);
            assert_relative_eq!(g.deriv(t).unwrap(), fd, max_relative = 1e-6, epsilon = 1e-9);
        }
        let bp = BRANCH_POINT;
        assert!((g.inner_deriv(bp).unwrap() - g.outer_deriv(bp).unwrap()).abs() < 1e-10);
        assert!((g.inner(bp).unwrap() - g.outer(bp).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn h_matches_legendre_oracle() {
        // h(t) = P_nu(coth t), nu = (n-3)/2, via the Laplace integral
        let spec = QuadratureSpec::default().with_tol(1e-14, 1e-13);
        for n in [4u32, 6, 7] {
            let h = HProfile::new(n).unwrap();
            let nu = (n as f64 - 3.0) / 2.0;
            for t in [0.02, 0.1, 0.3, 0.6, 1.5, 4.0] {
                let (c, s) = (1.0 / t.tanh(), t.sinh());
                let lap = integrate(|phi: f64| (c + phi.cos() / s).powf(nu), 0.0, PI, &spec).unwrap() / PI;
                assert_relative_eq!(h.eval(t).unwrap(), lap, max_relative = 1e-11);
            }
        }
        let h5 = HProfile::new(5).unwrap();
        for t in [0.001, 0.05, 0.3466, 2.0] {
            assert_relative_eq!(h5.eval(t).unwrap(), 1.0 / t.tanh(), max_relative = 1e-12);
        }
    }

    #[test]
    fn c2_sharp_closed_form() {
        let expected = [(4, 8.0 / PI), (5, -6.0), (6, 13.581_221_8), (7, -30.0), (8, 65.189_864_7)];
        for (n, v) in expected {
            let (_, c2) = matching_constants(n).unwrap();
            assert_relative_eq!(c2, v, max_relative = 1e-8);
        }
    }

    #[test]
    fn h_values() {
        let h5 = HProfile::new(5).unwrap();
        assert_relative_eq!(h5.eval(BRANCH_POINT).unwrap(), 3.0, max_relative = 1e-15);
        let h4 = HProfile::new(4).unwrap();
        assert!((h4.eval(20.0).unwrap() - 1.0).abs() < 1e-8);
        let h3 = HProfile::new(3).unwrap();
        assert_eq!(h3.eval(0.37).unwrap(), 1.0);
        assert!(HProfile::new(2).is_err());
        assert!(h4.eval(0.0).is_err());
    }

    #[test]
    fn h_branches_match() {
        for n in 4..=8 {
            let h = HProfile::new(n).unwrap();
            let bp = BRANCH_POINT;
            assert!((h.inner_value(bp).unwrap() - h.outer(bp).unwrap()).abs() < 1e-10);
            assert!((h.inner_deriv(bp).unwrap() - h.outer_deriv(bp).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn h_asymptotics_improve() {
        for n in [4u32, 5, 6] {
            let h = HProfile::new(n).unwrap();
            let e: Vec<f64> = [1e-2, 1e-3, 1e-4].iter().map(|&t| h_asymptotic_check(&h, t).unwrap()).collect();
            assert!(e[1] * 5.0 <= e[0] && e[2] * 5.0 <= e[1], "n={n}: {e:?}");
        }
    }
}
