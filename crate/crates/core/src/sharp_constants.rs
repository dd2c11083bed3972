//! Closed-form sharp constants, explicit minimizers, and radial quadrature
//! of Rayleigh quotients.

use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{domain, Result};
use crate::hyp2f1::{gamma, ln_gamma};
use crate::numerics::{integrate, EndpointTransform, QuadratureSpec};

/// Critical exponent `2n/(n-2)`.
pub fn critical_exponent(n: u32) -> f64 {
    let nf = n as f64;
    2.0 * nf / (nf - 2.0)
}

fn check_np(n: u32, p: f64) -> Result<()> {
    if n < 3 {
        return Err(domain("dimension must be at least 3"));
    }
    if !(p > 2.0 && p <= critical_exponent(n) * (1.0 + 1e-14)) {
        return Err(domain("p must lie in (2, 2n/(n-2)]"));
    }
    Ok(())
}

/// Area of the unit sphere in `R^n`, `2 pi^{n/2} / Gamma(n/2)`.
pub fn sphere_area(n: u32) -> f64 {
    let nf = n as f64;
    2.0 * PI.powf(nf / 2.0) / gamma(nf / 2.0)
}

/// `int_{S^{n-1}_+} omega_n^q dS = pi^{(n-1)/2} Gamma((q+1)/2) / Gamma((q+n)/2)`.
pub fn half_sphere_moment(n: u32, q: f64) -> f64 {
    let nf = n as f64;
    (0.5 * (nf - 1.0) * PI.ln() + ln_gamma(0.5 * (q + 1.0)) - ln_gamma(0.5 * (q + nf))).exp()
}

/// Sobolev constant `pi n (n-2) (Gamma(n/2)/Gamma(n))^{2/n}`.
pub fn s_n(n: u32) -> Result<f64> {
    if n < 3 {
        return Err(domain("dimension must be at least 3"));
    }
    let nf = n as f64;
    Ok(PI * nf * (nf - 2.0) * ((ln_gamma(nf / 2.0) - ln_gamma(nf)) * 2.0 / nf).exp())
}

/// Sharp constant of the weighted Sobolev inequality with weight
/// `|x|^{p(n-2)/2 - n}`:
/// `2p ((n-2)/2)^{(p+2)/p} [2 pi^{n/2} Gamma(p/(p-2))^2 / ((p-2) Gamma(n/2) Gamma(2p/(p-2)))]^{(p-2)/p}`.
pub fn s_np(n: u32, p: f64) -> Result<f64> {
    check_np(n, p)?;
    let nf = n as f64;
    let q = p / (p - 2.0);
    let ln_bracket = 2.0f64.ln() + 0.5 * nf * PI.ln() + 2.0 * ln_gamma(q)
        - (p - 2.0).ln()
        - ln_gamma(nf / 2.0)
        - ln_gamma(2.0 * q);
    Ok(2.0 * p * ((nf - 2.0) / 2.0).powf((p + 2.0) / p) * (ln_bracket * (p - 2.0) / p).exp())
}

/// Three-dimensional form
/// `p 2^{-2/p} [4 pi Gamma(p/(p-2))^2 / ((p-2) Gamma(2p/(p-2)))]^{(p-2)/p}`,
/// which is also the hyperbolic constant for `n = 3`.
pub fn s_bar_3p(p: f64) -> Result<f64> {
    check_np(3, p)?;
    let q = p / (p - 2.0);
    let ln_bracket = (4.0 * PI).ln() + 2.0 * ln_gamma(q) - (p - 2.0).ln() - ln_gamma(2.0 * q);
    Ok(p * 2.0f64.powf(-2.0 / p) * (ln_bracket * (p - 2.0) / p).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScaleKind {
    Interior,
    Poincare,
    Gamma(f64),
}

/// `base (n-2)^{-(p+2)/p}`, or with `n - 2 gamma` for [`ScaleKind::Gamma`].
pub fn scaled_constant(n: u32, p: f64, base: f64, kind: ScaleKind) -> Result<f64> {
    if !(base > 0.0) || !(p > 2.0) {
        return Err(domain("scaled constant needs base > 0 and p > 2"));
    }
    let nf = n as f64;
    let m = match kind {
        ScaleKind::Interior | ScaleKind::Poincare => nf - 2.0,
        ScaleKind::Gamma(g) => nf - 2.0 * g,
    };
    if !(m > 0.0) {
        return Err(domain("scaled constant needs a positive shift"));
    }
    Ok(base * m.powf(-(p + 2.0) / p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinimizerKind {
    /// `(1 + |x|^k)^{-2/(p-2)}`, `k = (p-2)(n-2)/2`.
    InteriorPoint,
    /// `(|x + e_n|^k + |x - e_n|^k)^{-2/(p-2)}`.
    TwoPoint,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizerProfile {
    pub kind: MinimizerKind,
    pub n: u32,
    pub p: f64,
}

impl MinimizerProfile {
    pub fn new(kind: MinimizerKind, n: u32, p: f64) -> Result<Self> {
        check_np(n, p)?;
        Ok(Self { kind, n, p })
    }

    /// Exponent `k = (p-2)(n-2)/2` of the radial terms.
    pub fn exponent(&self) -> f64 {
        0.5 * (self.p - 2.0) * (self.n as f64 - 2.0)
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n as usize {
            return Err(domain("point dimension does not match n"));
        }
        let k = self.exponent();
        let e = -2.0 / (self.p - 2.0);
        Ok(match self.kind {
            MinimizerKind::InteriorPoint => (1.0 + norm(x).powf(k)).powf(e),
            MinimizerKind::TwoPoint => {
                let (dp, dm) = pole_distances(x);
                (dp.powf(k) + dm.powf(k)).powf(e)
            }
        })
    }

    /// Value and radial derivative of the interior-point profile at radius `r`.
    pub fn radial(&self, r: f64) -> (f64, f64) {
        let k = self.exponent();
        let base = 1.0 + r.powf(k);
        let u = base.powf(-2.0 / (self.p - 2.0));
        let du = -(self.n as f64 - 2.0) * r.powf(k - 1.0) * base.powf(-self.p / (self.p - 2.0));
        (u, du)
    }
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `(|x + e_n|, |x - e_n|)`.
pub fn pole_distances(x: &[f64]) -> (f64, f64) {
    let last = x.len() - 1;
    let head: f64 = x[..last].iter().map(|v| v * v).sum();
    let xn = x[last];
    ((head + (xn + 1.0).powi(2)).sqrt(), (head + (xn - 1.0).powi(2)).sqrt())
}

/// Quotient `int |grad u|^2 / (int |x|^{p(n-2)/2-n} |u|^p)^{2/p}` over `R^n`
/// for a radial `u`, given as `r -> (u(r), u'(r))`. The sphere area is
/// included. Both integrals are split at `r = 1` and mapped to `r = e^{-s}`
/// and `r = e^{s}`, each integrated to infinity.
pub fn radial_quotient<U: Fn(f64) -> (f64, f64)>(n: u32, p: f64, u: U, quad: &QuadratureSpec) -> Result<f64> {
    check_np(n, p)?;
    let nf = n as f64;
    let spec = quad.with_transform(EndpointTransform::ExpRight);
    let both = |f: &dyn Fn(f64) -> f64| -> Result<f64> {
        let inner = integrate(|s: f64| f((-s).exp()) * (-s).exp(), 0.0, f64::INFINITY, &spec)?;
        let outer = integrate(|s: f64| f(s.exp()) * s.exp(), 0.0, f64::INFINITY, &spec)?;
        Ok(inner + outer)
    };
    let num = both(&|r: f64| {
        let (_, du) = u(r);
        du * du * r.powf(nf - 1.0)
    })?;
    let den = both(&|r: f64| {
        let (v, _) = u(r);
        r.powf(0.5 * p * (nf - 2.0) - 1.0) * v.abs().powf(p)
    })?;
    let area = sphere_area(n);
    Ok(area * num / (area * den).powf(2.0 / p))
}

/// Rayleigh quotient of the interior-point minimizer, which equals `s_np`.
pub fn radial_quotient_interior(n: u32, p: f64, quad: &QuadratureSpec) -> Result<f64> {
    let prof = MinimizerProfile::new(MinimizerKind::InteriorPoint, n, p)?;
    radial_quotient(n, p, |r| prof.radial(r), quad)
}

/// Infimum of the one-dimensional quotient
/// `int_0^inf v'^2 dt / (int_0^inf t^{-(p+2)/2} |v|^p dt)^{2/p}`,
/// attained by `v(t) = (1 + t^{-(p-2)/2})^{-2/(p-2)}`. It does not depend on
/// the dimension; it equals `s_np(n,p) (n-2)^{-(p+2)/p} |S^{n-1}|^{2/p-1}`.
pub fn sigma_1d(p: f64) -> Result<f64> {
    // every admissible p lies in (2, 6], the range of n = 3
    Ok(s_np(3, p)? * sphere_area(3).powf(2.0 / p - 1.0))
}

/// Minimizer of the one-dimensional quotient of [`sigma_1d`], with derivative.
pub fn sigma_1d_profile(p: f64, t: f64) -> (f64, f64) {
    let a = 0.5 * (p - 2.0);
    let base = 1.0 + t.powf(-a);
    let v = base.powf(-2.0 / (p - 2.0));
    let dv = base.powf(-2.0 / (p - 2.0) - 1.0) * t.powf(-a - 1.0);
    (v, dv)
}
