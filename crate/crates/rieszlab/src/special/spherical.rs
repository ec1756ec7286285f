//! The spherical sine integral `V(rho) = ∫_{S^{n-1}} sin^ell(rho sigma_1) dsigma`
//! and its closed Bessel expansion
//!
//!   V(rho) = plateau + sum_i C_i J_{nu-1}(f_i rho) / (f_i rho)^{nu-1},
//!   nu = n/2,  f_i = ell - 2i,
//!   C_i = (-1)^{ell/2 - i} (2 pi)^{n/2} 2^{1-ell} C(ell, i),
//!   plateau = |S^{n-1}| 2^{-ell} C(ell, ell/2).
//!
//! The plateau is the sphere average of sin^ell and doubles as the mean value
//! V approaches for large rho once the oscillatory Bessel terms die off.  A
//! Gamma-ratio variant of the same constant circulates that is exactly
//! sqrt(pi) too large; `plateau_gamma_variant` exposes it so audit tables can
//! display the discrepancy against the quadrature oracle.

use std::f64::consts::PI;

use crate::error::{LabError, Result};

use super::bessel::bessel_j_reduced;
use super::gamma::gamma;
use super::jets::Jet;
use super::sinpow::SinePowerExpansion;
use super::sphere_area;

#[derive(Debug, Clone)]
pub struct SphericalSineIntegral {
    pub dim: u32,
    pub ell: u32,
    /// Large-rho mean value: |S^{n-1}| 2^{-ell} C(ell, ell/2).
    pub plateau: f64,
    /// (frequency f_i, amplitude C_i) pairs of the Bessel terms.
    pub bessel_terms: Vec<(f64, f64)>,
    nu: f64,
}

impl SphericalSineIntegral {
    pub fn new(dim: u32, ell: u32) -> Result<Self> {
        if dim < 1 {
            return Err(LabError::domain("dimension must be at least 1"));
        }
        let expansion = SinePowerExpansion::new(ell)?;
        let nu = dim as f64 / 2.0;
        let plateau = sphere_area(dim) * expansion.constant_term;
        // Integrating each cosine of the expansion over the sphere produces a
        // reduced Bessel function: C_i = coefficient * (2 pi)^{n/2}.
        let spectral_scale = (2.0 * PI).powf(nu);
        let bessel_terms = expansion
            .cosines
            .iter()
            .map(|(freq, c)| (*freq as f64, c * spectral_scale))
            .collect();
        Ok(SphericalSineIntegral {
            dim,
            ell,
            plateau,
            bessel_terms,
            nu,
        })
    }

    /// The Gamma-ratio variant `4 pi^{n/2} Gamma((ell+1)/2) / (ell
    /// Gamma(ell/2) Gamma(n/2))` of the plateau constant: exactly sqrt(pi)
    /// times the true mean (Legendre duplication), kept around for audit
    /// tables.
    pub fn plateau_gamma_variant(&self) -> f64 {
        let n = self.dim as f64;
        let l = self.ell as f64;
        4.0 * PI.powf(n / 2.0) * gamma((l + 1.0) / 2.0)
            / (l * gamma(l / 2.0) * gamma(n / 2.0))
    }

    pub fn half_dim(&self) -> f64 {
        self.nu
    }

    /// V(rho) via the Bessel expansion; rho >= 0.
    pub fn eval(&self, rho: f64) -> f64 {
        let mu = self.nu - 1.0;
        self.plateau
            + self
                .bessel_terms
                .iter()
                .map(|(f, c)| c * bessel_j_reduced(mu, f * rho))
                .sum::<f64>()
    }

    /// V(rho) / rho^ell, evaluated without cancellation: the sine power is
    /// peeled into sinc factors under the surface integral, so small rho is
    /// exact rather than a difference of O(plateau) quantities.  Intended for
    /// rho up to ~3; the fixed spectral rules below are sized for that.
    pub fn eval_reduced(&self, rho: f64) -> f64 {
        // Zonal reduction for n >= 2:
        //   V(rho) = |S^{n-2}| ∫_{-1}^{1} sin^ell(rho t) (1-t^2)^{(n-3)/2} dt.
        let ell = self.ell as i32;
        match self.dim {
            1 => 2.0 * sinc(rho).powi(ell),
            2 => {
                let (nodes, w) = crate::quad::chebyshev_gauss(96);
                sphere_area(1)
                    * nodes
                        .iter()
                        .map(|t| w * (t * sinc(rho * t)).powi(ell))
                        .sum::<f64>()
            }
            3 => {
                let rule = crate::quad::gauss_legendre(96);
                sphere_area(2) * rule.integrate(-1.0, 1.0, |t| (t * sinc(rho * t)).powi(ell))
            }
            _ => {
                // General dimension: weight (1-t^2)^{(n-3)/2} stays in the
                // integrand (n >= 4 keeps it bounded).
                let rule = crate::quad::gauss_legendre(128);
                let p = (self.dim as f64 - 3.0) / 2.0;
                sphere_area(self.dim - 1)
                    * rule.integrate(-1.0, 1.0, |t| {
                        (t * sinc(rho * t)).powi(ell) * (1.0 - t * t).powf(p)
                    })
            }
        }
    }

    /// Taylor jet of V at rho > 0.  Each reduced-Bessel term u(r) =
    /// J_mu(f r)/(f r)^mu obeys u'' = -(2 mu + 1) u'/r - f^2 u; two Bessel
    /// evaluations seed u and u', the ODE supplies every higher coefficient.
    pub fn jet(&self, rho: f64, order: usize) -> Result<Jet> {
        if rho <= 0.0 {
            return Err(LabError::domain(format!(
                "spherical sine jet needs rho > 0, got {rho}"
            )));
        }
        let mu = self.nu - 1.0;
        let mut total = Jet::constant(self.plateau, order);
        for &(f, c) in &self.bessel_terms {
            let mut u = vec![0.0; order + 1];
            u[0] = bessel_j_reduced(mu, f * rho);
            if order >= 1 {
                // d/dr [J_mu(z)/z^mu] = -z J_{mu+1}(z)/z^{mu+1} * dz/dr.
                u[1] = -f * f * rho * bessel_j_reduced(mu + 1.0, f * rho);
            }
            // q_k = Taylor coefficients of u'/r, obtained by dividing the
            // u' jet by the jet of r term-by-term.
            let mut q = vec![0.0; order.max(1)];
            for k in 0..order.saturating_sub(1) {
                let d_k = (k as f64 + 1.0) * u[k + 1];
                let prev = if k == 0 { 0.0 } else { q[k - 1] };
                q[k] = (d_k - prev) / rho;
                u[k + 2] = (-(2.0 * mu + 1.0) * q[k] - f * f * u[k])
                    / ((k as f64 + 2.0) * (k as f64 + 1.0));
            }
            total = total.add(&Jet {
                coeffs: u.iter().map(|x| c * x).collect(),
            });
        }
        Ok(total)
    }
}

/// sin(t)/t, continuous through 0.
pub fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-4 {
        let t2 = t * t;
        1.0 - t2 / 6.0 * (1.0 - t2 / 20.0)
    } else {
        t.sin() / t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_case_is_two_sine_powers() {
        // n = 1: the "sphere" is two points, V = 2 sin^ell(rho).
        let v = SphericalSineIntegral::new(1, 2).unwrap();
        // Check the expansion constants: V = 1 - cos(2 rho) means plateau 1
        // and a single term with C_0 = -sqrt(2 pi)/2 at frequency 2 (since
        // J_{-1/2}(z)/z^{-1/2} = sqrt(2/pi) cos z).
        assert!((v.plateau - 1.0).abs() < 1e-14);
        assert_eq!(v.bessel_terms.len(), 1);
        let (f, c) = v.bessel_terms[0];
        assert_eq!(f, 2.0);
        assert!((c + (2.0 * PI).sqrt() / 2.0).abs() < 1e-14);
        for &rho in &[0.0f64, 0.3, 1.9, 6.0, 25.0] {
            let want = 2.0 * rho.sin().powi(2);
            assert!(
                (v.eval(rho) - want).abs() < 1e-12,
                "rho={rho}: {} vs {want}",
                v.eval(rho)
            );
        }
    }

    #[test]
    fn two_dimensional_ell_two_closed_form() {
        // n = 2, ell = 2: V(rho) = pi (1 - J_0(2 rho)).
        let v = SphericalSineIntegral::new(2, 2).unwrap();
        assert!((v.plateau - PI).abs() < 1e-13);
        for &rho in &[0.0, 0.5, 2.0, 8.0, 40.0] {
            let want = PI * (1.0 - crate::special::bessel_j(0.0, 2.0 * rho));
            assert!(
                (v.eval(rho) - want).abs() < 1e-11,
                "rho={rho}: {} vs {want}",
                v.eval(rho)
            );
        }
    }

    #[test]
    fn gamma_variant_is_sqrt_pi_heavy() {
        for (n, ell) in [(1u32, 2u32), (2, 2), (2, 4), (3, 2), (3, 6)] {
            let v = SphericalSineIntegral::new(n, ell).unwrap();
            let ratio = v.plateau_gamma_variant() / v.plateau;
            assert!(
                (ratio - PI.sqrt()).abs() < 1e-12,
                "n={n} ell={ell}: ratio {ratio}"
            );
        }
    }

    #[test]
    fn reduced_form_matches_eval_where_both_are_stable() {
        for (n, ell) in [(1u32, 2u32), (2, 2), (2, 4), (3, 2), (3, 4)] {
            let v = SphericalSineIntegral::new(n, ell).unwrap();
            for &rho in &[0.25, 0.7, 1.5, 2.5] {
                let a = v.eval(rho);
                let b = v.eval_reduced(rho) * rho.powi(ell as i32);
                assert!(
                    (a - b).abs() < 1e-11 * (1.0 + a.abs()),
                    "n={n} ell={ell} rho={rho}: {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn reduced_form_has_the_right_origin_value() {
        // V ~ rho^ell * |S^{n-1}| * E[sigma_1^ell]; at rho = 0 the reduced
        // value is the ell-th directional moment of the sphere.  For n = 3,
        // ell = 2: |S^2| * E[t^2] = 4 pi / 3.
        let v = SphericalSineIntegral::new(3, 2).unwrap();
        assert!((v.eval_reduced(0.0) - 4.0 * PI / 3.0).abs() < 1e-12);
        // n = 1: moment is 1, reduced value 2.
        let v1 = SphericalSineIntegral::new(1, 4).unwrap();
        assert!((v1.eval_reduced(0.0) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn jet_matches_central_differences() {
        // Moderate rho only: past z ~ 14 the Bessel series noise (~1e-11,
        // non-smooth in rho) swamps an h = 1e-4 second difference.  Large
        // rho is covered by the analytic check below.
        for (n, ell) in [(1u32, 2u32), (2, 2), (2, 4), (3, 2)] {
            let v = SphericalSineIntegral::new(n, ell).unwrap();
            for &rho in &[0.8, 2.0] {
                let jet = v.jet(rho, 4).unwrap();
                let d = jet.derivatives();
                assert!((d[0] - v.eval(rho)).abs() < 1e-12);
                let h = 1e-4;
                let fd1 = (v.eval(rho + h) - v.eval(rho - h)) / (2.0 * h);
                assert!(
                    (d[1] - fd1).abs() < 1e-6 * (1.0 + fd1.abs()),
                    "n={n} ell={ell} rho={rho}: d1 {} vs fd {fd1}",
                    d[1]
                );
                let fd2 = (v.eval(rho + h) - 2.0 * v.eval(rho) + v.eval(rho - h)) / (h * h);
                assert!(
                    (d[2] - fd2).abs() < 1e-5 * (1.0 + fd2.abs()),
                    "n={n} ell={ell} rho={rho}: d2 {} vs fd {fd2}",
                    d[2]
                );
            }
        }
    }

    #[test]
    fn jet_matches_trigonometric_derivatives_far_out() {
        // n = 1, ell = 2: V = 1 - cos(2 rho) has exact derivative cycle
        // 2 sin, 4 cos, -8 sin, -16 cos at frequency 2.
        let v = SphericalSineIntegral::new(1, 2).unwrap();
        for &rho in &[0.5, 7.3, 19.0] {
            let d = v.jet(rho, 4).unwrap().derivatives();
            let (s, c) = ((2.0 * rho).sin(), (2.0 * rho).cos());
            let want = [1.0 - c, 2.0 * s, 4.0 * c, -8.0 * s, -16.0 * c];
            for (k, w) in want.iter().enumerate() {
                assert!(
                    (d[k] - w).abs() < 1e-9,
                    "rho={rho} order {k}: {} vs {w}",
                    d[k]
                );
            }
        }
    }

    #[test]
    fn jet_taylor_steps_predict_nearby_values() {
        let v = SphericalSineIntegral::new(2, 4).unwrap();
        let rho = 3.0;
        let jet = v.jet(rho, 8).unwrap();
        for &h in &[1e-2, 5e-2, 0.1] {
            let predicted = jet.eval_offset(h);
            let actual = v.eval(rho + h);
            // 8th-order Taylor: error ~ |V^(9)| h^9 / 9!.
            assert!(
                (predicted - actual).abs() < 1e-9 + 1e2 * h.powi(9),
                "h={h}: {predicted} vs {actual}"
            );
        }
    }
}
