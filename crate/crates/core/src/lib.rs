//! Orthogonal polynomials on the unit circle, spectral factorization, and
//! explicit extremal constructions for the Steklov class
//! `S_δ = {σ probability measure on 𝕋 : σ' ≥ δ/2π a.e.}`.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approximants;
pub mod construction;
pub mod entropy;
pub mod error;
pub mod extremal;
pub mod fft;
pub mod measures;
pub mod opuc;
pub mod poly;
pub mod quadrature;
pub mod spectral;

pub use error::{Error, Result};
pub use measures::{CircleMeasure, Discretization, SteklovParams};
pub use opuc::{OrthogonalSystem, VerblunskySequence};
pub use poly::ComplexPolynomial;
