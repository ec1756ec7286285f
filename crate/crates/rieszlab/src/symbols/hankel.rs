//! Radial Fourier inversion and its integration-by-parts acceleration.
//!
//! A radial multiplier b(|xi|) on R^n has the radial kernel
//!   a(r) = (2 pi)^{-nu} r^{1-nu} integral over (0, inf) of
//!          b(t) t^nu J_{nu-1}(rt) dt,      nu = n/2,
//! interpreted through exponential regularization e^{-eps t} and the
//! limit eps -> 0 when the plain integral does not converge.  For smooth
//! integrands the identity t^{mu+1} J_mu(rt) = d/dt [t^{mu+1} J_{mu+1}(rt)] / r
//! trades powers of t for derivatives of b, one order of decay per lift;
//! the lifted coefficient arrays come from `radial_derivative_coeffs`.

use crate::error::{LabError, Result};
use crate::quad::gauss_legendre;
use crate::special::bessel::bessel_j;
use crate::symbols::mikhlin::RadialSymbol;

const PANEL_POINTS: usize = 16;
/// Consecutive panels whose contribution bound stays below the floor
/// before the tail is declared negligible.
const QUIET_PANELS: usize = 3;
const MAX_PANELS: usize = 4_000_000;

/// Coefficients c[k-1] = c_{k,m} of the m-fold lift
///   integral f t^nu J_{nu-1}(rt) = (-1)^m r^{-m} sum_k c_{k,m}
///   integral f^{(k)} t^{nu+k-m} J_{nu+m-1}(rt),
/// generated by c_{1,1} = 1, c_{k,m+1} = c_{k-1,m} + (k - 2m) c_{k,m}.
pub fn radial_derivative_coeffs(m: usize) -> Vec<f64> {
    assert!(m >= 1, "the zero-lift case has no coefficients");
    let mut c = vec![1.0];
    for prev in 1..m {
        let mut next = vec![0.0; prev + 1];
        for (i, &v) in c.iter().enumerate() {
            let k = i + 1;
            next[i] += (k as f64 - 2.0 * prev as f64) * v;
            next[i + 1] += v;
        }
        c = next;
    }
    c
}

/// Panel-by-panel Gauss-Legendre sweep of g over [0, end); `end = None`
/// runs until `QUIET_PANELS` consecutive panels bound below `floor`.
fn panel_sweep(
    g: &mut dyn FnMut(f64) -> Result<f64>,
    width: f64,
    end: Option<f64>,
    floor: f64,
) -> Result<f64> {
    let rule = gauss_legendre(PANEL_POINTS);
    let mut acc = 0.0;
    let mut quiet = 0usize;
    let mut left = 0.0f64;
    for _ in 0..MAX_PANELS {
        let right = match end {
            Some(e) if left + width >= e => e,
            _ => left + width,
        };
        let half = (right - left) / 2.0;
        let mid = (right + left) / 2.0;
        let mut panel = 0.0;
        let mut panel_peak = 0.0f64;
        for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
            let v = g(mid + half * x)?;
            panel += w * v;
            panel_peak = panel_peak.max(v.abs());
        }
        acc += half * panel;
        left = right;
        if let Some(e) = end {
            if left >= e {
                return Ok(acc);
            }
        } else {
            if panel_peak * width < floor * (1.0 + acc.abs()) {
                quiet += 1;
                if quiet >= QUIET_PANELS {
                    return Ok(acc);
                }
            } else {
                quiet = 0;
            }
        }
    }
    Err(LabError::numerical(format!(
        "radial integral did not settle within {MAX_PANELS} panels (width {width})"
    )))
}

/// a(r) for the multiplier with values `symbol_values`, by exponentially
/// regularized quadrature and Richardson extrapolation of the damping to
/// zero.  `oscillation_hint` is the symbol's own fastest frequency; the
/// Bessel frequency r is accounted for separately.
pub fn radial_inverse_fourier(
    symbol_values: &dyn Fn(f64) -> Result<f64>,
    half_dim: f64,
    r: f64,
    oscillation_hint: f64,
    tol: f64,
) -> Result<f64> {
    if !(r > 0.0) || !(half_dim >= 0.5) || !(tol > 0.0) || !oscillation_hint.is_finite() {
        return Err(LabError::domain(format!(
            "inversion needs r > 0, half_dim >= 0.5, tol > 0, finite hint; \
             got r = {r}, half_dim = {half_dim}, tol = {tol}"
        )));
    }
    let nu = half_dim;
    let width = std::f64::consts::PI / (r + oscillation_hint.abs() + 2.0);
    let prefactor = (2.0 * std::f64::consts::PI).powf(-nu) * r.powf(1.0 - nu);

    // Damped values F(eps_0 / 2^j); the physical answer is F(0).
    let eps_zero = 0.2;
    let levels = 7usize;
    let mut damped = Vec::with_capacity(levels);
    for j in 0..levels {
        let eps = eps_zero / (1u32 << j) as f64;
        let mut g = |t: f64| -> Result<f64> {
            Ok((-eps * t).exp() * symbol_values(t)? * t.powf(nu) * bessel_j(nu - 1.0, r * t))
        };
        damped.push(prefactor * panel_sweep(&mut g, width, None, 1e-17)?);
    }

    // Richardson triangle for an expansion in integer powers of eps with
    // ratio-2 refinement; watch the diagonal for convergence.
    let mut row = damped;
    let mut diagonal = vec![row[0]];
    let levels = row.len();
    for order in 1..levels {
        let factor = (1u64 << order) as f64;
        for j in 0..levels - order {
            row[j] = (factor * row[j + 1] - row[j]) / (factor - 1.0);
        }
        row.truncate(levels - order);
        diagonal.push(row[0]);
    }
    let last = diagonal[diagonal.len() - 1];
    let prev = diagonal[diagonal.len() - 2];
    if (last - prev).abs() <= tol * (1.0 + last.abs()) {
        Ok(last)
    } else {
        Err(LabError::numerical(format!(
            "damping extrapolation did not converge at r = {r}: \
             final corrections {:.3e} then {:.3e} against tolerance {tol:.1e}",
            (diagonal[diagonal.len() - 3] - prev).abs(),
            (last - prev).abs()
        )))
    }
}

/// integral over (0, inf) of f(t) t^nu J_{nu-1}(rt) dt for compactly
/// supported smooth f, computed through `lifts` integrations by parts:
/// each lift trades one power of 1/r for one derivative of f, which is
/// what makes large-r evaluation accurate.  `lifts = 0` is the plain
/// integral.  The dropped boundary terms are checked at the support end
/// and the offending lift stage is named when one fails to vanish.
pub fn hankel_tail_lift<S: RadialSymbol + ?Sized>(
    f: &S,
    half_dim: f64,
    lifts: usize,
    r: f64,
    support_end: f64,
) -> Result<f64> {
    if !(r > 0.0) || !(half_dim >= 0.5) || !(support_end > 0.0) {
        return Err(LabError::domain(format!(
            "tail lift needs r > 0, half_dim >= 0.5, support_end > 0; \
             got r = {r}, half_dim = {half_dim}, support_end = {support_end}"
        )));
    }
    if lifts > f.max_order() {
        return Err(LabError::domain(format!(
            "{lifts} lifts need derivatives beyond the symbol's order {}",
            f.max_order()
        )));
    }
    let nu = half_dim;
    // Each lift stage j drops boundary terms proportional to f^{(k)} at the
    // ends of the integration range, k < j.  At t -> 0 the Bessel factor
    // supplies t^{nu+j}, so the product vanishes like t^{2 nu + k}; only the
    // upper end can actually fail.
    for k in 0..lifts {
        let fk = f.deriv(k, support_end)?;
        if fk.abs() > 1e-10 {
            return Err(LabError::domain(format!(
                "lift stage {k} drops the boundary term \
                 f^({k})({support_end}) t^{{nu+{k}-m}} J: f^({k}) = {fk:.3e} does not vanish"
            )));
        }
    }
    // Every lift differentiates f once, roughening the integrand; spend
    // quadrature points to match (compact support keeps this cheap).
    let width = std::f64::consts::PI
        / ((r + f.oscillation_scale().abs() + 2.0) * (4.0f64).powi(lifts as i32));
    let value = if lifts == 0 {
        let mut g =
            |t: f64| -> Result<f64> { Ok(f.eval(t) * t.powf(nu) * bessel_j(nu - 1.0, r * t)) };
        panel_sweep(&mut g, width, Some(support_end), 0.0)?
    } else {
        let coeffs = radial_derivative_coeffs(lifts);
        let order = nu + lifts as f64 - 1.0;
        let mut g = |t: f64| -> Result<f64> {
            let row = f.deriv_row(lifts, t)?;
            let mut s = 0.0;
            for (i, &c) in coeffs.iter().enumerate() {
                let k = (i + 1) as f64;
                s += c * row[i + 1] * t.powf(nu + k - lifts as f64);
            }
            Ok(s * bessel_j(order, r * t))
        };
        let sign = if lifts % 2 == 0 { 1.0 } else { -1.0 };
        sign * r.powi(-(lifts as i32)) * panel_sweep(&mut g, width, Some(support_end), 0.0)?
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(LabError::numerical(format!(
            "lifted radial integral lost finiteness at r = {r}"
        )))
    }
}
