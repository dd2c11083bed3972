//! Interpolation tables: Chebyshev series on an interval and piecewise cubic
//! Hermite data with exact node derivatives.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{domain, Error, Result};

/// Chebyshev expansion of a function on `[lo, hi]`.
#[derive(Debug, Clone)]
pub struct Chebyshev {
    lo: f64,
    hi: f64,
    coeffs: Vec<f64>,
}

impl Chebyshev {
    /// Interpolate `f` at `n` Chebyshev points of the first kind.
    pub fn fit<F: FnMut(f64) -> Result<f64>>(mut f: F, lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo < hi) || n < 2 {
            return Err(domain("chebyshev fit needs lo < hi and n >= 2"));
        }
        let nf = n as f64;
        let mut vals = Vec::with_capacity(n);
        for k in 0..n {
            let x = (PI * (k as f64 + 0.5) / nf).cos();
            vals.push(f(0.5 * (hi + lo) + 0.5 * (hi - lo) * x)?);
        }
        let coeffs = (0..n)
            .map(|j| {
                let s: f64 = vals
                    .iter()
                    .enumerate()
                    .map(|(k, v)| v * (PI * j as f64 * (k as f64 + 0.5) / nf).cos())
                    .sum();
                2.0 * s / nf
            })
            .collect();
        Ok(Self { lo, hi, coeffs })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    /// Magnitude of the trailing coefficient, a proxy for truncation error.
    pub fn tail(&self) -> f64 {
        let n = self.coeffs.len();
        self.coeffs[n - 2..].iter().map(|c| c.abs()).fold(0.0, f64::max)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let u = (2.0 * x - self.lo - self.hi) / (self.hi - self.lo);
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * u * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        u * b1 - b2 + 0.5 * self.coeffs[0]
    }
}

/// Piecewise cubic Hermite interpolant through `(x_i, y_i, y'_i)`.
#[derive(Debug, Clone)]
pub struct HermiteTable {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ds: Vec<f64>,
}

impl HermiteTable {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, ds: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != ys.len() || xs.len() != ds.len() {
            return Err(domain("hermite table needs matching lengths >= 2"));
        }
        if xs.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(domain("hermite nodes must be strictly increasing"));
        }
        Ok(Self { xs, ys, ds })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    pub fn nodes(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.ys
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if !(x >= lo && x <= hi) {
            return Err(Error::CacheRange { t: x });
        }
        let i = self.xs.partition_point(|&s| s < x).clamp(1, self.xs.len() - 1);
        let (x0, x1) = (self.xs[i - 1], self.xs[i]);
        let h = x1 - x0;
        let s = (x - x0) / h;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        Ok(h00 * self.ys[i - 1] + h10 * h * self.ds[i - 1] + h01 * self.ys[i] + h11 * h * self.ds[i])
    }
}
