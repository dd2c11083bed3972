//! Numerical laboratory for sharp Hardy-Sobolev inequalities on Euclidean and
//! hyperbolic space.
//!
//! The crate is `no_std` and only needs `alloc`. Everything here is pure: given
//! the same inputs, every routine returns bit-identical output, which is what
//! the determinism guarantees of the command-line front end rely on.
//!
//! Modules, bottom up:
//!
//! - [`numerics`]: adaptive Gauss-Kronrod quadrature, Brent root finding, a
//!   Dormand-Prince integrator with dense output, interpolation tables.
//! - [`hyp2f1`]: the Gauss hypergeometric function on the non-positive axis.
//! - [`profiles`]: the profiles `g` and `h`, matching constants, asymptotics.
//! - [`mappings`]: the logarithmic weight `X`, the weight `B(r)`, the implicit
//!   map `rho(t)`, the weight `Y(t)` and all threshold constants.
//! - [`sharp_constants`]: closed-form sharp constants and minimizers.
//! - [`variational`]: discretized 1-D minimization and Monte Carlo quotients.
//! - [`certifier`]: grid-refinement margin checks and the half-space kernel.
#![no_std]
// `!(x > 0.0)` is used on purpose so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod certifier;
mod error;
pub mod hyp2f1;
pub mod mappings;
pub mod numerics;
pub mod profiles;
pub mod sharp_constants;
pub mod variational;

pub use error::{Error, Result};
