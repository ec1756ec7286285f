//! Truncated-Taylor (jet) arithmetic and standalone high-order derivative
//! recurrences for quotients.
//!
//! A `Jet` holds Taylor *coefficients* `a_k = f^{(k)}(x0)/k!` around an
//! implicit basepoint; all binary ops require equal length.  Orders stay
//! small (<= 8 across the crate) so the O(k^2) convolutions are free.

use crate::error::{LabError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub coeffs: Vec<f64>,
}

impl Jet {
    pub fn constant(value: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = value;
        Jet { coeffs }
    }

    /// The identity function t |-> t expanded at `x0`.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = x0;
        if order >= 1 {
            coeffs[1] = 1.0;
        }
        Jet { coeffs }
    }

    pub fn from_derivatives(derivs: &[f64]) -> Self {
        let mut fact = 1.0;
        let coeffs = derivs
            .iter()
            .enumerate()
            .map(|(k, d)| {
                if k > 0 {
                    fact *= k as f64;
                }
                d / fact
            })
            .collect();
        Jet { coeffs }
    }

    /// Derivative values `f^{(k)}(x0) = k! a_k`.
    pub fn derivatives(&self) -> Vec<f64> {
        let mut fact = 1.0;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, a)| {
                if k > 0 {
                    fact *= k as f64;
                }
                a * fact
            })
            .collect()
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    fn check_len(&self, rhs: &Jet) {
        assert_eq!(
            self.coeffs.len(),
            rhs.coeffs.len(),
            "jet order mismatch: {} vs {}",
            self.order(),
            rhs.order()
        );
    }

    pub fn add(&self, rhs: &Jet) -> Jet {
        self.check_len(rhs);
        Jet {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Jet) -> Jet {
        self.check_len(rhs);
        Jet {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet {
            coeffs: self.coeffs.iter().map(|a| a * s).collect(),
        }
    }

    pub fn mul(&self, rhs: &Jet) -> Jet {
        self.check_len(rhs);
        let n = self.coeffs.len();
        let mut out = vec![0.0; n];
        for i in 0..n {
            for j in 0..(n - i) {
                out[i + j] += self.coeffs[i] * rhs.coeffs[j];
            }
        }
        Jet { coeffs: out }
    }

    /// Sequential deconvolution; the divisor needs a nonzero constant term.
    pub fn div(&self, rhs: &Jet) -> Jet {
        self.check_len(rhs);
        assert!(
            rhs.coeffs[0] != 0.0,
            "jet division by zero constant term"
        );
        let n = self.coeffs.len();
        let mut out = vec![0.0; n];
        for k in 0..n {
            let mut acc = self.coeffs[k];
            for j in 0..k {
                acc -= out[j] * rhs.coeffs[k - j];
            }
            out[k] = acc / rhs.coeffs[0];
        }
        Jet { coeffs: out }
    }

    pub fn recip(&self) -> Jet {
        Jet::constant(1.0, self.order()).div(self)
    }

    pub fn exp(&self) -> Jet {
        // e' = a' e  =>  k e_k = sum_{j=1..k} j a_j e_{k-j}.
        let n = self.coeffs.len();
        let mut out = vec![0.0; n];
        out[0] = self.coeffs[0].exp();
        for k in 1..n {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * self.coeffs[j] * out[k - j];
            }
            out[k] = acc / k as f64;
        }
        Jet { coeffs: out }
    }

    pub fn ln(&self) -> Jet {
        assert!(self.coeffs[0] > 0.0, "jet ln needs a positive value");
        // a = exp(l)  =>  k a_k = sum_{j=1..k} j l_j a_{k-j}.
        let n = self.coeffs.len();
        let mut out = vec![0.0; n];
        out[0] = self.coeffs[0].ln();
        for k in 1..n {
            let mut acc = k as f64 * self.coeffs[k];
            for j in 1..k {
                acc -= j as f64 * out[j] * self.coeffs[k - j];
            }
            out[k] = acc / (k as f64 * self.coeffs[0]);
        }
        Jet { coeffs: out }
    }

    /// Real power, via exp(p ln .); needs a positive value.
    pub fn powf(&self, p: f64) -> Jet {
        self.ln().scale(p).exp()
    }

    /// Formal antiderivative with prescribed constant term.
    pub fn integrate(&self, constant: f64) -> Jet {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(constant);
        for (k, a) in self.coeffs.iter().enumerate() {
            coeffs.push(a / (k as f64 + 1.0));
        }
        Jet { coeffs }
    }

    /// Formal derivative (order drops by one).
    pub fn differentiate(&self) -> Jet {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, a)| k as f64 * a)
            .collect();
        Jet { coeffs }
    }

    /// Evaluate the truncated polynomial at offset h from the basepoint.
    pub fn eval_offset(&self, h: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, a| acc * h + a)
    }
}

/// Derivatives of u/v from derivative lists of u and v, by the one-pass
/// recurrence
///   (u/v)^{(k)} = (1/v) [ u^{(k)} - k! sum_{j=1..k} v^{(k+1-j)}/(k+1-j)!
///                                   * (u/v)^{(j-1)}/(j-1)! ].
/// Returns derivatives 0..=k.  Singled out (rather than jet division)
/// because symbol audits need derivative lists directly and because the
/// independent route is itself under test.
pub fn quotient_derivative(u: &[f64], v: &[f64], k: usize) -> Result<Vec<f64>> {
    if u.len() <= k || v.len() <= k {
        return Err(LabError::domain(format!(
            "quotient_derivative: need {} derivatives, got u: {}, v: {}",
            k + 1,
            u.len(),
            v.len()
        )));
    }
    if v[0] == 0.0 {
        return Err(LabError::domain(
            "quotient_derivative: denominator vanishes at the basepoint",
        ));
    }
    let mut fact = vec![1.0f64; k + 2];
    for i in 1..=k + 1 {
        fact[i] = fact[i - 1] * i as f64;
    }
    let mut q = Vec::with_capacity(k + 1);
    q.push(u[0] / v[0]);
    for m in 1..=k {
        let mut acc = u[m];
        for j in 1..=m {
            acc -= fact[m] * v[m + 1 - j] / fact[m + 1 - j] * q[j - 1] / fact[j - 1];
        }
        q.push(acc / v[0]);
    }
    Ok(q)
}

/// Derivatives of 1/v by Leibniz on v * (1/v) = 1; independent of
/// `quotient_derivative` so the two can cross-check each other.
pub fn reciprocal_derivative(v: &[f64], k: usize) -> Result<Vec<f64>> {
    if v.len() <= k {
        return Err(LabError::domain(format!(
            "reciprocal_derivative: need {} derivatives, got {}",
            k + 1,
            v.len()
        )));
    }
    if v[0] == 0.0 {
        return Err(LabError::domain(
            "reciprocal_derivative: value vanishes at the basepoint",
        ));
    }
    let mut binom_row = vec![1.0f64];
    let mut r = Vec::with_capacity(k + 1);
    r.push(1.0 / v[0]);
    for m in 1..=k {
        // Pascal update: binom_row[j] = C(m, j).
        let mut next = vec![1.0; m + 1];
        for j in 1..m {
            next[j] = binom_row[j - 1] + binom_row[j];
        }
        binom_row = next;
        let mut acc = 0.0;
        for j in 1..=m {
            acc += binom_row[j] * v[j] * r[m - j];
        }
        r.push(-acc / v[0]);
    }
    Ok(r)
}
