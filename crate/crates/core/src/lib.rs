//! Numerical toolkit for fractional-in-time extensions of evolution equations.
//!
//! Given a known solution `u(t)` of an evolution equation `du/dt = L u`, the
//! solution of the fractional-order extension (Caputo/Riemann-Liouville order
//! `alpha` in (0, 1]) is obtained by averaging `u` against a Mittag-Leffler
//! form factor:
//!
//! ```text
//! u_alpha(t) = integral_0^inf  f_alpha(z) u(t^alpha z) dz
//! ```
//!
//! The crate provides the special functions (generalized Mittag-Leffler
//! functions and their probability densities), half-line quadrature, numerical
//! Laplace/Mellin transforms with executable checks of the underlying
//! transform identities, the subordination operator itself, and two reference
//! applications: fractional diffusion kernels and fractional Black-Scholes
//! call pricing.

#![no_std]
#![deny(unsafe_code)]
// Frozen numerical constants (Lanczos/SPECFUN coefficients, oracle values)
// keep every printed digit even where f64 rounds them.
#![allow(clippy::excessive_precision)]
#![allow(clippy::inconsistent_digit_grouping)]
#![allow(clippy::approx_constant)]
// `!(x > 0.0)` is used on validation paths precisely because it rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod blackscholes;
pub mod diffusion;
pub mod math;
pub mod quadrature;
pub mod specialfn;
pub mod subordination;
pub mod transforms;

pub use quadrature::QuadratureSpec;
pub use specialfn::{MLParams, SeriesConfig};
