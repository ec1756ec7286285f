//! Finite cosine expansion of even powers of the sine.
//!
//! For even ell,  sin^ell t = 2^{-ell} C(ell, ell/2)
//!                          + 2^{1-ell} sum_{i<ell/2} (-1)^{ell/2-i} C(ell,i) cos((ell-2i) t),
//! which is what turns spherical sine integrals into finite Bessel sums.

use crate::error::{LabError, Result};

use super::binom::binomial;

#[derive(Debug, Clone)]
pub struct SinePowerExpansion {
    pub ell: u32,
    /// The mean value 2^{-ell} C(ell, ell/2).
    pub constant_term: f64,
    /// (frequency ell - 2i, coefficient) pairs, i = 0 .. ell/2 - 1.
    pub cosines: Vec<(u32, f64)>,
}

impl SinePowerExpansion {
    pub fn new(ell: u32) -> Result<Self> {
        if ell < 2 || ell % 2 != 0 {
            return Err(LabError::domain(format!(
                "sine-power expansion needs even ell >= 2, got {ell}"
            )));
        }
        let scale = (2.0f64).powi(1 - ell as i32);
        let constant_term = 0.5 * scale * binomial(ell, ell / 2);
        let half = ell / 2;
        let cosines = (0..half)
            .map(|i| {
                let sign = if (half - i) % 2 == 0 { 1.0 } else { -1.0 };
                (ell - 2 * i, sign * scale * binomial(ell, i))
            })
            .collect();
        Ok(SinePowerExpansion {
            ell,
            constant_term,
            cosines,
        })
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.constant_term
            + self
                .cosines
                .iter()
                .map(|(freq, c)| c * (*freq as f64 * t).cos())
                .sum::<f64>()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_odd_and_zero_powers() {
        assert!(SinePowerExpansion::new(0).is_err());
        assert!(SinePowerExpansion::new(3).is_err());
    }

    #[test]
    fn reproduces_the_power_pointwise() {
        for ell in [2u32, 4, 6, 8, 10] {
            let exp = SinePowerExpansion::new(ell).unwrap();
            let mut t = -3.0f64;
            while t <= 3.0 {
                let want = t.sin().powi(ell as i32);
                let got = exp.eval(t);
                assert!(
                    (got - want).abs() < 1e-13,
                    "ell={ell} t={t}: {got} vs {want}"
                );
                t += 0.137;
            }
        }
    }

    #[test]
    fn coefficients_cancel_at_zero() {
        // sin^ell(0) = 0 forces constant + sum of cosine coefficients = 0.
        for ell in [2u32, 6, 12] {
            let exp = SinePowerExpansion::new(ell).unwrap();
            let total: f64 = exp.constant_term + exp.cosines.iter().map(|(_, c)| c).sum::<f64>();
            assert!(total.abs() < 1e-14, "ell={ell}: residue {total}");
        }
    }

    #[test]
    fn known_ell_2_form() {
        // sin^2 t = 1/2 - cos(2t)/2.
        let exp = SinePowerExpansion::new(2).unwrap();
        assert_eq!(exp.constant_term, 0.5);
        assert_eq!(exp.cosines, vec![(2, -0.5)]);
    }
}
