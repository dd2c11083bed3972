//! Shared numerical kernels.

mod interp;
mod ode;
mod quad;
mod roots;

pub use interp::{Chebyshev, HermiteTable};
pub use ode::{integrate_ode, OdeProblem, OdeSolution, State};
pub use quad::{gauss_legendre, integrate, integrate_with_error, EndpointTransform, QuadResult, QuadratureSpec};
pub use roots::{find_root, solve_increasing, RootBracket, Sign};

/// Log-spaced grid of `n` points from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> alloc::vec::Vec<f64> {
    #[allow(unused_imports)]
    use num_traits::Float;
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i + 1 == n {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}
