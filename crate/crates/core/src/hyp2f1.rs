//! Gauss hypergeometric function `2F1(a, b; c; z)` on the non-positive real
//! axis, plus the Gamma function.
//!
//! Arguments in `[-1, 0)` go through the Pfaff transformation
//! `F(a,b;c;z) = (1-z)^(-a) F(a, c-b; c; z/(z-1))`, which lands in `(0, 1/2]`
//! where the series converges geometrically. Terminating series (a or b a
//! non-positive integer) are summed directly at any `z`.

use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{domain, Error, Result};

const SERIES_CAP: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyp2F1Params {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

fn non_positive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

impl Hyp2F1Params {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if non_positive_integer(c) || !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(domain("c must not be a non-positive integer"));
        }
        Ok(Self { a, b, c })
    }

    /// `F = F(1/2, 1/2; 1; .)`, the profile `g` building block.
    pub const fn elliptic() -> Self {
        Self { a: 0.5, b: 0.5, c: 1.0 }
    }

    /// `F1 = F((n-1)/2, (n-1)/2; n-1; .)`.
    pub fn first(n: u32) -> Self {
        let k = (n as f64 - 1.0) / 2.0;
        Self { a: k, b: k, c: n as f64 - 1.0 }
    }

    /// `F2 = F((n-1)/2, -(n-3)/2; 1; .)`.
    pub fn second(n: u32) -> Self {
        Self { a: (n as f64 - 1.0) / 2.0, b: -(n as f64 - 3.0) / 2.0, c: 1.0 }
    }

    /// Parameters of the derivative, `(a+1, b+1; c+1)`.
    pub fn shifted(&self) -> Self {
        Self { a: self.a + 1.0, b: self.b + 1.0, c: self.c + 1.0 }
    }

    fn terminating(&self) -> bool {
        non_positive_integer(self.a) || non_positive_integer(self.b)
    }
}

/// Sum the defining series at `z`, stopping when the next term drops below
/// `1e-17 |sum|`. Fails with `DivergentSeries` after `max_terms`.
pub fn f21_direct_series(p: Hyp2F1Params, z: f64, max_terms: usize) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..max_terms {
        let kf = k as f64;
        term *= (p.a + kf) * (p.b + kf) / ((p.c + kf) * (kf + 1.0)) * z;
        sum += term;
        if term == 0.0 || term.abs() < 1e-17 * sum.abs() {
            return Ok(sum);
        }
        if !term.is_finite() {
            break;
        }
    }
    Err(Error::DivergentSeries { z })
}

pub fn f21(p: Hyp2F1Params, z: f64) -> Result<f64> {
    if !(z <= 0.0) {
        return Err(domain("2F1 is only evaluated for z <= 0"));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    if p.terminating() {
        return f21_direct_series(p, z, SERIES_CAP);
    }
    let w = z / (z - 1.0);
    // pick the Pfaff form that terminates when one does
    let (pref, q) = if non_positive_integer(p.c - p.a) {
        ((1.0 - z).powf(-p.b), Hyp2F1Params { a: p.c - p.a, b: p.b, c: p.c })
    } else {
        ((1.0 - z).powf(-p.a), Hyp2F1Params { a: p.a, b: p.c - p.b, c: p.c })
    };
    f21_direct_series(q, w, SERIES_CAP)
        .map(|s| pref * s)
        .map_err(|_| Error::DivergentSeries { z })
}

/// `dF/dz = (ab/c) F(a+1, b+1; c+1; z)`.
pub fn f21_deriv(p: Hyp2F1Params, z: f64) -> Result<f64> {
    let scale = p.a * p.b / p.c;
    if scale == 0.0 {
        return Ok(0.0);
    }
    Ok(scale * f21(p.shifted(), z)?)
}

/// Logarithmic derivative `F1'(w)/F1(w)` for dimension `n >= 4`.
pub fn log_deriv_q(n: u32, w: f64) -> Result<f64> {
    if n < 4 || !(-1.0..=0.0).contains(&w) {
        return Err(domain("log_deriv_q needs n >= 4 and w in [-1, 0]"));
    }
    let p = Hyp2F1Params::first(n);
    let f = f21(p, w)?;
    if !(f > 0.0) {
        return Err(domain("F1 not positive"));
    }
    Ok(f21_deriv(p, w)? / f)
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(x: f64) -> f64 {
    LANCZOS[1..]
        .iter()
        .enumerate()
        .fold(LANCZOS[0], |acc, (i, &c)| acc + c / (x + i as f64 + 1.0))
}

/// Gamma function for real arguments (reflection below 1/2).
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    if x == x.round() && x <= 21.0 {
        return (1..x as u32).map(|k| k as f64).product();
    }
    let x = x - 1.0;
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * lanczos_sum(x)
}

/// `ln Gamma(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + lanczos_sum(x).ln()
}
