//! Bracketed root finding (Brent's method with a bisection safeguard).

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Negative,
    Positive,
}

impl Sign {
    pub fn of(v: f64) -> Option<Sign> {
        if v > 0.0 {
            Some(Sign::Positive)
        } else if v < 0.0 {
            Some(Sign::Negative)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootBracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo_sign: Sign,
    pub f_hi_sign: Sign,
}

impl RootBracket {
    /// Evaluate `f` at both ends and build a bracket. Fails with `BadBracket`
    /// when the signs agree.
    pub fn new<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Result<RootBracket> {
        if !(lo < hi) {
            return Err(domain("bracket needs lo < hi"));
        }
        let (a, b) = (f(lo), f(hi));
        let bad = Error::BadBracket { lo, hi };
        let sa = Sign::of(a).unwrap_or(if b > 0.0 { Sign::Negative } else { Sign::Positive });
        let sb = Sign::of(b).unwrap_or(if a > 0.0 { Sign::Negative } else { Sign::Positive });
        if sa == sb || a.is_nan() || b.is_nan() {
            return Err(bad);
        }
        Ok(RootBracket { lo, hi, f_lo_sign: sa, f_hi_sign: sb })
    }
}

/// Find a root of `f` inside `bracket` to absolute width `tol`.
pub fn find_root<F: Fn(f64) -> f64>(f: F, bracket: RootBracket, tol: f64) -> Result<f64> {
    let RootBracket { lo, hi, f_lo_sign, f_hi_sign } = bracket;
    if !(lo < hi) || !(tol > 0.0) {
        return Err(domain("bracket needs lo < hi and tol > 0"));
    }
    if f_lo_sign == f_hi_sign {
        return Err(Error::BadBracket { lo, hi });
    }
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if Sign::of(fa) == Sign::of(fb) {
        return Err(Error::BadBracket { lo, hi });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..500 {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
        if fb.is_nan() {
            return Err(Error::NonConvergence { estimate: b, error: xm.abs() });
        }
    }
    Err(Error::NonConvergence { estimate: b, error: (c - b).abs() })
}

/// Bracket a root of an increasing function by doubling the step from
/// `start`, then solve.
pub fn solve_increasing<F: Fn(f64) -> f64>(f: F, start: f64, step: f64, tol: f64) -> Result<f64> {
    let mut lo = start;
    let mut hi = start + step;
    let mut h = step;
    for _ in 0..200 {
        if f(hi) >= 0.0 {
            let br = RootBracket::new(&f, lo, hi)?;
            return find_root(&f, br, tol);
        }
        lo = hi;
        h *= 2.0;
        hi += h;
    }
    Err(Error::BadBracket { lo: start, hi })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_root() {
        let f = |x: f64| x - 1.0;
        let br = RootBracket::new(&f, 0.0, 2.0).unwrap();
        assert!((find_root(f, br, 1e-14).unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn sqrt_two() {
        let f = |x: f64| x * x - 2.0;
        let br = RootBracket::new(&f, 1.0, 2.0).unwrap();
        let r = find_root(f, br, 1e-12).unwrap();
        assert!((r - core::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn bad_bracket() {
        let f = |x: f64| x * x + 1.0;
        assert!(matches!(RootBracket::new(&f, -1.0, 1.0), Err(Error::BadBracket { .. })));
        let br = RootBracket { lo: -1.0, hi: 1.0, f_lo_sign: Sign::Negative, f_hi_sign: Sign::Positive };
        assert!(matches!(find_root(f, br, 1e-10), Err(Error::BadBracket { .. })));
    }

    #[test]
    fn increasing_search() {
        let r = solve_increasing(|x: f64| x.exp() - 100.0, 0.0, 0.5, 1e-13).unwrap();
        assert!((r - 100f64.ln()).abs() < 1e-12);
    }
}
