//! Numerical laboratory for fractional differentiation driven by the Poisson
//! semigroup.
//!
//! The library builds the Riesz fractional derivative of order `0 < alpha < n`
//! two independent ways — as a truncated hypersingular integral of centered
//! differences, and as a normalized power of `I - P_eps` for the Poisson
//! semigroup `P_t` — and cross-verifies that both converge to the same spectral
//! operator.  Everything runs on a periodized box with trigonometric
//! interpolation standing in for the continuum, so every claim is checked
//! against closed forms or against a second discretization rather than
//! against itself.
//!
//! Module map:
//! - [`special`]: gamma, Bessel `J_nu`, fractional binomials, the spherical
//!   sine integral and its Bessel expansion, Taylor-jet arithmetic.
//! - [`fields`]: grids, FFT-backed spectral transforms, radial multipliers,
//!   the test-field catalogue, field I/O.
//! - [`varlp`]: variable-exponent Lebesgue modulars, Luxemburg norms, and the
//!   regularity certificates the norm theory needs.
//! - [`symbols`]: the truncation-kernel transform `w`, the transference
//!   quotients between the two derivative constructions, Mikhlin-type audits,
//!   smooth partitions of unity, and Hankel-transform machinery for radial
//!   inverse Fourier transforms.
//! - [`operators`]: the discrete operators themselves (both derivative
//!   constructions, Riesz and Bessel potentials, Poisson kernel application).
//! - [`experiments`]: scripted convergence studies with JSON/CSV reports.
//! - [`config`]: the flat key = value run configuration format.

pub mod config;
pub mod error;
pub mod experiments;
pub mod fields;
pub mod operators;
pub mod quad;
pub mod special;
pub mod symbols;
pub mod varlp;

pub use error::{LabError, Result};
