//! Special-function layer: everything above it (symbols, operators,
//! experiments) treats these as exact to ~1e-10 and the tests here are what
//! justify that trust.

pub mod bessel;
pub mod binom;
pub mod gamma;
pub mod jets;
pub mod sinpow;
pub mod spherical;

pub use bessel::{bessel_j, bessel_j_reduced};
pub use binom::{binomial, frac_binomial, frac_binomial_tail_bound};
pub use gamma::{gamma, ln_gamma};
pub use jets::Jet;
pub use sinpow::SinePowerExpansion;
pub use spherical::SphericalSineIntegral;

/// Surface measure of the unit sphere in `R^n`: `2 pi^{n/2} / Gamma(n/2)`.
pub fn sphere_area(n: u32) -> f64 {
    assert!(n >= 1, "dimension must be positive");
    let half = n as f64 / 2.0;
    2.0 * std::f64::consts::PI.powf(half) / gamma(half)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_areas_match_classical_values() {
        assert!((sphere_area(1) - 2.0).abs() < 1e-14);
        assert!((sphere_area(2) - 2.0 * std::f64::consts::PI).abs() < 1e-13);
        assert!((sphere_area(3) - 4.0 * std::f64::consts::PI).abs() < 1e-13);
    }
}
