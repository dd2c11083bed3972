//! Adaptive Gauss-Kronrod quadrature (21-point Kronrod extension of the
//! 10-point Gauss rule) with endpoint transforms.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{domain, Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Change of variables applied before the adaptive rule sees the integrand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EndpointTransform {
    None,
    /// Logarithmic singularity at the left end. The map is
    /// `x = a + (b - a) exp(1 - 1/u)` on `u in (0, 1]`, so the transformed
    /// integrand must tend to zero where `exp` underflows.
    LogLeft,
    /// Algebraic singularity `(x - a)^e` with `e in (-1, 0]`:
    /// `x = a + (b - a) u^(1/(1+e))`.
    PowerLeft(f64),
    /// `[a, +inf)` via `x = a - ln u`. For exponentially decaying integrands.
    ExpRight,
    /// `[a, +inf)` via `x = a + (1 - u)/u`. For algebraically decaying
    /// integrands.
    AlgebraicRight,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    pub endpoint_transform: EndpointTransform,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_subdivisions: 2000,
            endpoint_transform: EndpointTransform::None,
        }
    }
}

impl QuadratureSpec {
    pub fn with_transform(mut self, t: EndpointTransform) -> Self {
        self.endpoint_transform = t;
        self
    }

    pub fn with_tol(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0 && self.max_subdivisions >= 1) {
            return Err(domain("quadrature tolerances must be positive"));
        }
        if let EndpointTransform::PowerLeft(e) = self.endpoint_transform {
            if !(e > -1.0 && e <= 0.0) {
                return Err(domain("power_left exponent must lie in (-1, 0]"));
            }
        }
        Ok(())
    }
}

/// Value and error estimate of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub intervals: usize,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[10];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    let mut resg = 0.0;
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - mean).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = resk * half;
    resabs *= half.abs();
    resasc *= half.abs();
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    (value, err)
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<QuadResult> {
    let (v, e) = kronrod(f, a, b);
    let mut segs: Vec<Segment> = alloc::vec![Segment { a, b, value: v, error: e }];
    loop {
        let total: f64 = segs.iter().map(|s| s.value).sum();
        let err: f64 = segs.iter().map(|s| s.error).sum();
        if !total.is_finite() || !err.is_finite() {
            return Err(Error::NonConvergence { estimate: total, error: err });
        }
        if err <= spec.abs_tol.max(spec.rel_tol * total.abs()) {
            return Ok(QuadResult { value: total, abs_error: err, intervals: segs.len() });
        }
        if segs.len() >= spec.max_subdivisions {
            return Err(Error::NonConvergence { estimate: total, error: err });
        }
        let (worst, _) = segs
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, s)| if s.error > acc.1 { (i, s.error) } else { acc });
        let s = segs.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a || mid >= s.b {
            return Err(Error::NonConvergence { estimate: total, error: err });
        }
        let (v1, e1) = kronrod(f, s.a, mid);
        let (v2, e2) = kronrod(f, mid, s.b);
        segs.push(Segment { a: s.a, b: mid, value: v1, error: e1 });
        segs.push(Segment { a: mid, b: s.b, value: v2, error: e2 });
    }
}

/// Integrate `f` over `[a, b]`; `b` may be `f64::INFINITY` when a right
/// transform is selected.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    integrate_with_error(f, a, b, spec).map(|r| r.value)
}

pub fn integrate_with_error<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<QuadResult> {
    spec.validate()?;
    if a.is_nan() || b.is_nan() || a >= b {
        return Err(domain("integration interval must satisfy a < b"));
    }
    let infinite = b == f64::INFINITY;
    match spec.endpoint_transform {
        EndpointTransform::ExpRight | EndpointTransform::AlgebraicRight if !infinite => {
            return Err(domain("right transforms need an infinite upper limit"))
        }
        EndpointTransform::ExpRight | EndpointTransform::AlgebraicRight => {}
        _ if infinite || !a.is_finite() => {
            return Err(domain("infinite upper limit needs a right transform"))
        }
        _ => {}
    }
    let w = b - a;
    match spec.endpoint_transform {
        EndpointTransform::None => adaptive(&f, a, b, spec),
        EndpointTransform::PowerLeft(e) => {
            let k = 1.0 / (1.0 + e);
            let g = |u: f64| {
                if u <= 0.0 {
                    return 0.0;
                }
                let uk = u.powf(k);
                f(a + w * uk) * w * k * uk / u
            };
            adaptive(&g, 0.0, 1.0, spec)
        }
        EndpointTransform::LogLeft => {
            let g = |u: f64| {
                let s = (1.0 - 1.0 / u).exp();
                if s == 0.0 {
                    return 0.0;
                }
                f(a + w * s) * w * s / (u * u)
            };
            adaptive(&g, 0.0, 1.0, spec)
        }
        EndpointTransform::ExpRight => {
            let g = |u: f64| f(a - u.ln()) / u;
            adaptive(&g, 0.0, 1.0, spec)
        }
        EndpointTransform::AlgebraicRight => {
            let g = |u: f64| f(a + (1.0 - u) / u) / (u * u);
            adaptive(&g, 0.0, 1.0, spec)
        }
    }
}

/// Fixed `n`-point Gauss-Legendre nodes and weights on `[-1, 1]`, computed by
/// Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = alloc::vec![0.0; n];
    let mut w = alloc::vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (core::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p1 = z;
                p0 = 1.0;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kronrod_weights_sum_to_two() {
        let s: f64 = 2.0 * WGK[..10].iter().sum::<f64>() + WGK[10];
        assert_relative_eq!(s, 2.0, epsilon = 1e-15);
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert_relative_eq!(g, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn kronrod_exact_for_degree_31() {
        for k in 0..=31u32 {
            let (v, _) = kronrod(&|x: f64| x.powi(k as i32), 0.0, 1.0);
            assert_relative_eq!(v, 1.0 / (k as f64 + 1.0), max_relative = 1e-14);
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        for k in 0..16 {
            let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum();
            let exact = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
            assert!((s - exact).abs() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn constant_integrand() {
        let v = integrate(|_| 1.0, 0.0, 1.0, &QuadratureSpec::default()).unwrap();
        assert_relative_eq!(v, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn inverse_sqrt_with_power_left() {
        let spec = QuadratureSpec::default().with_transform(EndpointTransform::PowerLeft(-0.5));
        let v = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, &spec).unwrap();
        assert_relative_eq!(v, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn rational_antiderivative() {
        let t = 0.25;
        let v = integrate(|s: f64| 1.0 / (s * (s + 1.0)), t, 1.0, &QuadratureSpec::default()).unwrap();
        assert_relative_eq!(v, (2.5f64).ln(), max_relative = 1e-12);
        assert!((v - 0.916_290_7).abs() < 1e-7);
    }

    #[test]
    fn log_left_handles_log_singularity() {
        let spec = QuadratureSpec::default().with_transform(EndpointTransform::LogLeft);
        let v = integrate(|x: f64| -x.ln(), 0.0, 1.0, &spec).unwrap();
        assert_relative_eq!(v, 1.0, max_relative = 1e-10);
        let v = integrate(|x: f64| x.ln() * x.ln(), 0.0, 2.0, &spec).unwrap();
        let l = 2f64.ln();
        assert_relative_eq!(v, 2.0 * (l * l - 2.0 * l + 2.0), max_relative = 1e-10);
    }

    #[test]
    fn exp_right_semi_infinite() {
        let spec = QuadratureSpec::default().with_transform(EndpointTransform::ExpRight);
        let v = integrate(|x: f64| (-x).exp() * x * x, 1.0, f64::INFINITY, &spec).unwrap();
        assert_relative_eq!(v, 5.0 / core::f64::consts::E, max_relative = 1e-11);
    }

    #[test]
    fn algebraic_right_semi_infinite() {
        let spec = QuadratureSpec::default().with_transform(EndpointTransform::AlgebraicRight);
        let v = integrate(|x: f64| 1.0 / (1.0 + x * x), 0.0, f64::INFINITY, &spec).unwrap();
        assert_relative_eq!(v, core::f64::consts::FRAC_PI_2, max_relative = 1e-11);
    }

    #[test]
    fn rejects_bad_intervals_and_specs() {
        let spec = QuadratureSpec::default();
        assert!(matches!(integrate(|x| x, 1.0, 0.0, &spec), Err(Error::Domain(_))));
        assert!(matches!(integrate(|x| x, 0.0, f64::INFINITY, &spec), Err(Error::Domain(_))));
        let bad = spec.with_transform(EndpointTransform::PowerLeft(-1.5));
        assert!(integrate(|x| x, 0.0, 1.0, &bad).is_err());
    }

    #[test]
    fn reports_non_convergence() {
        let spec = QuadratureSpec { max_subdivisions: 2, ..QuadratureSpec::default() };
        let r = integrate(|x: f64| (1.0 / x).sin(), 1e-4, 1.0, &spec);
        assert!(matches!(r, Err(Error::NonConvergence { .. })));
    }
}
