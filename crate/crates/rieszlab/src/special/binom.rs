//! Integer and fractional binomial coefficients, plus the tail bound that
//! lets the semigroup-difference operator pick a truncation level a priori.

use crate::error::{LabError, Result};

/// Exact binomial coefficient as f64 (exact through n = 62; callers here
/// never exceed n ~ 40).
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Generalized binomial coefficient `alpha (alpha-1) ... (alpha-k+1) / k!`
/// by the multiplicative recurrence; exact cancellation to 0 for integer
/// `alpha < k` falls out of the product.
pub fn frac_binomial(alpha: f64, k: u32) -> f64 {
    let mut acc = 1.0f64;
    for i in 0..k {
        // Multiply before dividing: for integer alpha every partial product
        // is itself a binomial coefficient, so small cases stay bit-exact.
        acc = acc * (alpha - i as f64) / (i + 1) as f64;
    }
    acc
}

/// Upper bound for `sum_{k > kk} |binom(alpha, k)|`, valid for `alpha > 0`
/// and `kk > alpha + 1`.
///
/// For k past alpha the ratio of successive terms is `(k - alpha) / (k + 1)
/// <= (k / (k+1))^{1 + alpha}`, so `|b_k| <= |b_{kk+1}| ((kk+1) / k)^{1 +
/// alpha}` and the tail is dominated by `|b_{kk+1}| (kk+1)^{1+alpha}
/// sum_{k >= kk+1} k^{-1-alpha}  <=  |b_{kk+1}| (kk+1)^{1+alpha} kk^{-alpha}
/// / alpha`.  Integer alpha gives a genuinely zero tail.
pub fn frac_binomial_tail_bound(alpha: f64, kk: u32) -> Result<f64> {
    if alpha <= 0.0 {
        return Err(LabError::domain(format!(
            "tail bound needs alpha > 0, got {alpha}"
        )));
    }
    if (kk as f64) <= alpha + 1.0 {
        return Err(LabError::domain(format!(
            "tail bound needs kk > alpha + 1, got kk = {kk}, alpha = {alpha}"
        )));
    }
    if alpha == alpha.floor() {
        return Ok(0.0);
    }
    let first = frac_binomial(alpha, kk + 1).abs();
    let kkf = kk as f64;
    Ok(first * (kkf + 1.0).powf(1.0 + alpha) * kkf.powf(-alpha) / alpha)
}
