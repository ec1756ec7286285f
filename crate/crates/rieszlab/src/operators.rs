//! Operator realizations on the periodic grid.
//!
//! The same fractional derivative is reachable along two independent roads:
//! a truncated hypersingular integral of iterated differences, and powers of
//! the Poisson semigroup.  Each road has a spectral realization (a radial
//! multiplier) and a slower, structurally different realization (numerical
//! y-quadrature of the difference integral; the binomial series over
//! semigroup shifts; physical-space kernel convolution for the extension and
//! the potential).  Cross-checking the realizations against each other is
//! the point, so the slow paths deliberately avoid the symbol layer's
//! closed forms wherever feasible.

use std::collections::HashMap;
use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::fields::{
    apply_radial_multiplier, poisson_constant, DcPolicy, Field, MultiplierOutput,
};
use crate::quad::gauss_legendre;
use crate::special::{binomial, frac_binomial_tail_bound, gamma};
use crate::symbols::transfer::TransferSymbols;

/// Poisson extension P_t f at height t >= 0: multiplier e^{-t |xi|}.
pub fn poisson_extension(field: &Field, t: f64) -> Result<Field> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(LabError::domain(format!(
            "extension height must be finite and >= 0, got {t}"
        )));
    }
    Ok(apply_radial_multiplier(field, &|r| (-t * r).exp(), DcPolicy::Evaluate)?.field)
}

/// Poisson extension through the physical kernel: periodize
/// c_1 t / (t^2 + x^2) over the given number of image boxes on each side and
/// convolve directly.  One-dimensional; the deliberate slow cross-check for
/// `poisson_extension`.
pub fn poisson_kernel_convolution(field: &Field, t: f64, images: usize) -> Result<Field> {
    let grid = field.grid;
    if grid.dim != 1 {
        return Err(LabError::domain(
            "kernel-path Poisson extension is wired for 1-d fields",
        ));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(LabError::domain(format!(
            "kernel-path extension height must be positive, got {t}"
        )));
    }
    let m = grid.points_per_axis;
    let h = grid.spacing();
    let period = 2.0 * grid.half_width;
    let c = poisson_constant(1);
    // Kernel on the difference grid delta = k h, k in -(m-1)..=(m-1).
    let kper: Vec<f64> = (0..2 * m - 1)
        .into_par_iter()
        .map(|i| {
            let delta = (i as i64 - (m as i64 - 1)) as f64 * h;
            let mut s = 0.0;
            for mm in -(images as i64)..=(images as i64) {
                let z = delta + mm as f64 * period;
                s += c * t / (t * t + z * z);
            }
            s
        })
        .collect();
    let values: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut acc = 0.0;
            for (j, f) in field.values.iter().enumerate() {
                acc += f * kper[i + (m - 1) - j];
            }
            acc * h
        })
        .collect();
    Field::new(grid, values)
}

/// Truncated hypersingular derivative along the spectral road: multiplier
/// |xi|^alpha w(eps |xi|) with w the kernel transform of the symbol family.
/// eps = 0 gives the full derivative (w(0) = 1).
pub fn riesz_derivative_spectral(
    field: &Field,
    symbols: &TransferSymbols,
    eps: f64,
) -> Result<Field> {
    if symbols.dim != field.grid.dim {
        return Err(LabError::structural(format!(
            "symbol family is {}-dimensional, field is {}-dimensional",
            symbols.dim, field.grid.dim
        )));
    }
    if !(eps >= 0.0) || !eps.is_finite() {
        return Err(LabError::domain(format!(
            "truncation radius must be finite and >= 0, got {eps}"
        )));
    }
    let alpha = symbols.alpha;
    let table = frequency_table(field, &|r| {
        Ok(r.powf(alpha) * symbols.kernel_transform(eps * r)?)
    })?;
    Ok(apply_radial_multiplier(field, &|r| table[&r.to_bits()], DcPolicy::Evaluate)?.field)
}

/// Truncated hypersingular derivative along the quadrature road, 1-d.  The
/// physical operator integrates the centered difference with doubled step,
///   sum_j (-1)^j binom(ell, j) f(x + (ell - 2j) y),
/// whose Fourier factor is (2i)^ell sin^ell(y xi), against |y|^{-1-alpha}
/// over eps < |y| <= Y with Y = L/(ell+1) (the widest cut keeping every
/// shift inside a half period).  Per frequency that is a cosine sum at the
/// even frequencies (ell - 2j), evaluated in log coordinates with panels
/// matched to the fastest cosine; the only term surviving truncation beyond
/// Y is the constant center weight j = ell/2, whose tail is added
/// analytically.  Requires eps above the grid spacing: below it the
/// difference stencil is not resolved and the comparison would measure the
/// grid, not the operator.
pub fn riesz_derivative_quadrature(
    field: &Field,
    symbols: &TransferSymbols,
    eps: f64,
) -> Result<Field> {
    let grid = field.grid;
    if grid.dim != 1 || symbols.dim != 1 {
        return Err(LabError::domain(
            "quadrature-path derivative is wired for 1-d fields",
        ));
    }
    if !(eps > grid.spacing()) {
        return Err(LabError::domain(format!(
            "inner truncation radius {eps} must exceed the grid spacing {}",
            grid.spacing()
        )));
    }
    let y_cut = grid.half_width / (symbols.ell + 1) as f64;
    if !(eps < y_cut) {
        return Err(LabError::domain(format!(
            "inner truncation radius {eps} must stay below the outer cut {y_cut}"
        )));
    }
    let ell = symbols.ell;
    let alpha = symbols.alpha;
    let d = symbols.normalizing_constant();
    // (frequency |ell - 2j|, signed weight (-1)^j binom(ell, j)) per shift.
    let stencil: Vec<(f64, f64)> = (0..=ell)
        .map(|j| {
            let weight = binomial(ell, j) * if j % 2 == 0 { 1.0 } else { -1.0 };
            ((ell as i64 - 2 * j as i64).unsigned_abs() as f64, weight)
        })
        .collect();
    let center_weight =
        binomial(ell, ell / 2) * if (ell / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let table = frequency_table(field, &|r| {
        truncated_difference_integral(r, &stencil, alpha, eps, y_cut)
            .map(|integral| (2.0 * integral + 2.0 * center_weight * y_cut.powf(-alpha) / alpha) / d)
    })?;
    Ok(apply_radial_multiplier(field, &|r| table[&r.to_bits()], DcPolicy::Evaluate)?.field)
}

/// integral over (eps, Y] of sum_j weight_j cos(freq_j rho r) rho^{-1-alpha}
/// d rho, marched in u = ln rho with panel widths matched to the fastest
/// cosine.
fn truncated_difference_integral(
    r: f64,
    stencil: &[(f64, f64)],
    alpha: f64,
    eps: f64,
    y_cut: f64,
) -> Result<f64> {
    let rule = gauss_legendre(16);
    let top = stencil.iter().map(|&(f, _)| f).fold(0.0, f64::max);
    let u_end = y_cut.ln();
    let mut u = eps.ln();
    let mut acc = 0.0;
    while u < u_end {
        let width = (0.25f64).min(PI / (4.0 * (1.0 + top * r * u.exp())));
        let hi = (u + width).min(u_end);
        let mid = 0.5 * (u + hi);
        let half = 0.5 * (hi - u);
        let mut panel = 0.0;
        for (x, w) in rule.nodes.iter().zip(&rule.weights) {
            let uu = mid + half * x;
            let rho = uu.exp();
            let mut cosine = 0.0;
            for &(freq, weight) in stencil {
                cosine += weight * (freq * rho * r).cos();
            }
            panel += w * (-alpha * uu).exp() * cosine;
        }
        acc += panel * half;
        u = hi;
    }
    Ok(acc)
}

/// Cap on the binomial series length for one frequency.
const DIFFERENCE_SERIES_CAP: u32 = 5_000_000;

/// Normalized fractional semigroup difference t^{-alpha} (I - P_t)^alpha f
/// along the series road: per frequency, the partial binomial sum
///   sum_{k <= K} binom(alpha, k) (-1)^k e^{-k t |xi|}
/// with K chosen so the tail bound times the damping is below tol (capped;
/// the cap only binds at frequencies so low the series barely converges,
/// and the leftover is the tail bound itself, reported by the bound layer).
pub fn normalized_poisson_difference(
    field: &Field,
    alpha: f64,
    t: f64,
    tol: f64,
) -> Result<Field> {
    validate_difference_args(alpha, t)?;
    if !(tol > 0.0) {
        return Err(LabError::domain(format!(
            "series tolerance must be positive, got {tol}"
        )));
    }
    let scale = t.powf(-alpha);
    Ok(apply_radial_multiplier(
        field,
        &|r| scale * difference_series(alpha, t * r, tol),
        DcPolicy::Evaluate,
    )?
    .field)
}

/// The closed form of the same operator: multiplier ((1 - e^{-t |xi|})/t)^alpha.
pub fn normalized_poisson_difference_closed(field: &Field, alpha: f64, t: f64) -> Result<Field> {
    validate_difference_args(alpha, t)?;
    Ok(apply_radial_multiplier(
        field,
        &|r| ((1.0 - (-t * r).exp()) / t).powf(alpha),
        DcPolicy::Evaluate,
    )?
    .field)
}

fn validate_difference_args(alpha: f64, t: f64) -> Result<()> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(LabError::domain(format!(
            "difference order must be positive, got {alpha}"
        )));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(LabError::domain(format!(
            "semigroup step must be positive, got {t}"
        )));
    }
    Ok(())
}

/// Partial sum of (1 - q)^alpha at q = e^{-eta}, eta >= 0.
fn difference_series(alpha: f64, eta: f64, tol: f64) -> f64 {
    if eta == 0.0 {
        // q = 1: the coefficients still sum to (1 - 1)^alpha = 0 (they are
        // absolutely summable for alpha > 0), but at k^{-1-alpha} speed —
        // far past any term cap.  Return the limit instead of a partial sum
        // whose leftover the t^{-alpha} normalization would then amplify.
        return 0.0;
    }
    let mut k_terms: u32 = 64;
    while k_terms < DIFFERENCE_SERIES_CAP {
        let bound = frac_binomial_tail_bound(alpha, k_terms).unwrap_or(f64::INFINITY);
        if bound * (-(k_terms as f64) * eta).exp() <= tol {
            break;
        }
        k_terms *= 2;
    }
    let k_terms = k_terms.min(DIFFERENCE_SERIES_CAP);
    let q = (-eta).exp();
    let mut c = 1.0f64;
    let mut qk = 1.0f64;
    let mut sum = 1.0f64;
    for k in 0..k_terms {
        c *= (k as f64 - alpha) / (k as f64 + 1.0);
        qk *= q;
        sum += c * qk;
        // |c_j| decreases, so the rest is under the geometric envelope.
        if c.abs() * qk * q / (1.0 - q).max(1e-300) <= 0.1 * tol {
            break;
        }
    }
    sum
}

/// gamma_n(alpha) = 2^alpha pi^{n/2} Gamma(alpha/2) / Gamma((n-alpha)/2):
/// the constant making |x|^{alpha-n} / gamma_n(alpha) the kernel of the
/// multiplier |xi|^{-alpha}.
pub fn riesz_constant(n: u32, alpha: f64) -> f64 {
    let nf = n as f64;
    (2.0f64).powf(alpha) * PI.powf(nf / 2.0) * gamma(alpha / 2.0) / gamma((nf - alpha) / 2.0)
}

/// Riesz potential along the spectral road: multiplier |xi|^{-alpha},
/// singular at frequency zero, so the caller chooses the DC policy and the
/// output reports whether mass was discarded.
pub fn riesz_potential(field: &Field, alpha: f64, dc: DcPolicy) -> Result<MultiplierOutput> {
    if !(alpha > 0.0 && alpha < field.grid.dim as f64) {
        return Err(LabError::domain(format!(
            "potential order must satisfy 0 < alpha < n, got {alpha}"
        )));
    }
    apply_radial_multiplier(field, &|r| r.powf(-alpha), dc)
}

/// Riesz potential through the physical kernel, 1-d: convolve with the
/// reference-subtracted periodization of |u|^{alpha-1} / gamma_1(alpha).
/// The image sum converges only against zero-mean data (each image is
/// recentered by its own value at the box center), so nonzero means are
/// rejected.  The central image is averaged against unit hat functions —
/// a second difference of the antiderivative |u|^{alpha+1} /
/// (alpha (alpha+1)) — which makes the nodal sum the exact integral of the
/// kernel against the piecewise-linear interpolant, singularity included.
pub fn riesz_potential_kernel(field: &Field, alpha: f64, images: usize) -> Result<Field> {
    let grid = field.grid;
    if grid.dim != 1 {
        return Err(LabError::domain(
            "kernel-path Riesz potential is wired for 1-d fields",
        ));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(LabError::domain(format!(
            "kernel-path potential order must satisfy 0 < alpha < 1, got {alpha}"
        )));
    }
    if images == 0 {
        return Err(LabError::domain("image count must be at least 1"));
    }
    let m = grid.points_per_axis;
    let h = grid.spacing();
    let mean: f64 = field.values.iter().sum::<f64>() * h;
    let sup = field.sup_norm();
    if mean.abs() > 1e-10 * (1.0 + sup) {
        return Err(LabError::domain(format!(
            "kernel-path Riesz potential needs zero-mean data, got mean {mean:.3e}"
        )));
    }
    let period = 2.0 * grid.half_width;
    let gamma_n = riesz_constant(1, alpha);
    let antideriv2 = |u: f64| u.abs().powf(alpha + 1.0) / (alpha * (alpha + 1.0));
    let kper: Vec<f64> = (0..2 * m - 1)
        .into_par_iter()
        .map(|i| {
            let delta = (i as i64 - (m as i64 - 1)) as f64 * h;
            let hat = |u: f64| {
                (antideriv2(u - h) - 2.0 * antideriv2(u) + antideriv2(u + h)) / (h * h)
            };
            // The difference grid reaches into the wrap singularities at
            // +-2L, so the nearest images need the hat treatment too.
            let mut s = hat(delta) + (hat(delta + period) - period.powf(alpha - 1.0))
                + (hat(delta - period) - period.powf(alpha - 1.0));
            for mm in 2..=images as i64 {
                for z0 in [period * mm as f64, -period * mm as f64] {
                    s += (delta + z0).abs().powf(alpha - 1.0) - z0.abs().powf(alpha - 1.0);
                }
            }
            s / gamma_n
        })
        .collect();
    let values: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut acc = 0.0;
            for (j, f) in field.values.iter().enumerate() {
                acc += f * kper[i + (m - 1) - j];
            }
            acc * h
        })
        .collect();
    Field::new(grid, values)
}

/// Bessel potential: multiplier (1 + |xi|^2)^{-alpha/2}.
pub fn bessel_potential(field: &Field, alpha: f64) -> Result<Field> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(LabError::domain(format!(
            "potential order must be positive, got {alpha}"
        )));
    }
    Ok(apply_radial_multiplier(
        field,
        &|r| (1.0 + r * r).powf(-alpha / 2.0),
        DcPolicy::Evaluate,
    )?
    .field)
}

/// Evaluate a fallible radial symbol once per distinct frequency magnitude,
/// in parallel, keyed by the exact bit pattern the multiplier loop will ask
/// for.
fn frequency_table(
    field: &Field,
    symbol: &(dyn Fn(f64) -> Result<f64> + Sync),
) -> Result<HashMap<u64, f64>> {
    let grid = field.grid;
    let mut rs: Vec<f64> = (0..grid.len()).map(|flat| grid.frequency_norm(flat)).collect();
    rs.sort_by(f64::total_cmp);
    rs.dedup();
    let entries: Result<Vec<(u64, f64)>> = rs
        .par_iter()
        .map(|&r| Ok((r.to_bits(), symbol(r)?)))
        .collect();
    Ok(entries?.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{sample, Grid, TestField};

    fn sup_diff(a: &Field, b: &Field) -> f64 {
        a.values
            .iter()
            .zip(&b.values)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn extension_is_a_semigroup() {
        let grid = Grid::new(1, 20.0, 256).unwrap();
        let f = sample(grid, &TestField::BandLimited { cutoff: 40, seed: 11 }).unwrap();
        let two_step = poisson_extension(&poisson_extension(&f, 0.3).unwrap(), 0.9).unwrap();
        let one_step = poisson_extension(&f, 1.2).unwrap();
        assert!(sup_diff(&two_step, &one_step) < 1e-12);
    }

    #[test]
    fn kernel_and_spectral_extensions_agree() {
        let grid = Grid::new(1, 300.0, 16384).unwrap();
        let f = sample(grid, &TestField::Gaussian { sigma: 1.0 }).unwrap();
        let spectral = poisson_extension(&f, 0.5).unwrap();
        let physical = poisson_kernel_convolution(&f, 0.5, 8).unwrap();
        assert!(
            sup_diff(&spectral, &physical) < 1e-6,
            "sup gap {}",
            sup_diff(&spectral, &physical)
        );
    }

    #[test]
    fn transfer_identity_holds_mode_by_mode() {
        // A(eps xi) w(eps xi) |xi|^alpha equals ((1 - e^{-eps xi})/eps)^alpha
        // exactly; composing the two multiplier routes must agree to
        // near-roundoff.
        let symbols = TransferSymbols::new(1, 2, 0.5).unwrap();
        let grid = Grid::new(1, 20.0, 512).unwrap();
        for seed in [3, 4] {
            let f = sample(grid, &TestField::BandLimited { cutoff: 60, seed }).unwrap();
            for eps in [1.0, 0.1, 0.01] {
                let closed = normalized_poisson_difference_closed(&f, 0.5, eps).unwrap();
                let table = frequency_table(&f, &|r| {
                    Ok(symbols.semigroup_ratio(eps * r)?
                        * symbols.kernel_transform(eps * r)?
                        * r.powf(0.5))
                })
                .unwrap();
                let composed = apply_radial_multiplier(
                    &f,
                    &|r| table[&r.to_bits()],
                    DcPolicy::Evaluate,
                )
                .unwrap()
                .field;
                let gap = sup_diff(&closed, &composed);
                assert!(gap < 1e-10, "eps {eps}: gap {gap}");
            }
        }
    }

    #[test]
    fn series_difference_matches_the_closed_form() {
        let grid = Grid::new(1, 20.0, 512).unwrap();
        let f = sample(grid, &TestField::BandLimited { cutoff: 50, seed: 5 }).unwrap();
        for (alpha, t) in [(0.5, 0.25), (1.5, 0.1), (2.0, 0.4)] {
            let series = normalized_poisson_difference(&f, alpha, t, 1e-12).unwrap();
            let closed = normalized_poisson_difference_closed(&f, alpha, t).unwrap();
            let gap = sup_diff(&series, &closed);
            assert!(gap < 1e-10, "alpha {alpha}, t {t}: gap {gap}");
        }
    }

    #[test]
    fn quadrature_and_spectral_derivatives_agree() {
        let symbols = TransferSymbols::new(1, 2, 0.5).unwrap();
        let grid = Grid::new(1, 40.0, 2048).unwrap();
        let f = sample(grid, &TestField::Gaussian { sigma: 1.0 }).unwrap();
        let quad = riesz_derivative_quadrature(&f, &symbols, 0.1).unwrap();
        let spectral = riesz_derivative_spectral(&f, &symbols, 0.1).unwrap();
        let gap = sup_diff(&quad, &spectral);
        // The quadrature road drops the shifted far-field terms beyond the
        // outer cut; with this box that costs a few 1e-3.
        assert!(gap < 1e-2, "gap {gap}");
        assert!(gap > 1e-5, "suspiciously exact: the roads share code?");
    }

    #[test]
    fn quadrature_road_rejects_unresolved_truncation() {
        let symbols = TransferSymbols::new(1, 2, 0.5).unwrap();
        let grid = Grid::new(1, 40.0, 2048).unwrap();
        let f = sample(grid, &TestField::Gaussian { sigma: 1.0 }).unwrap();
        let err = riesz_derivative_quadrature(&f, &symbols, 0.01).unwrap_err();
        assert!(err.to_string().contains("grid spacing"));
    }

    #[test]
    fn potential_inverts_the_full_derivative() {
        let symbols = TransferSymbols::new(1, 2, 0.5).unwrap();
        let grid = Grid::new(1, 20.0, 512).unwrap();
        let f = sample(grid, &TestField::BandLimited { cutoff: 30, seed: 9 }).unwrap();
        let derivative = riesz_derivative_spectral(&f, &symbols, 0.0).unwrap();
        let roundtrip = riesz_potential(&derivative, 0.5, DcPolicy::Zero).unwrap();
        assert!(!roundtrip.dc_discarded);
        assert!(sup_diff(&roundtrip.field, &f) < 1e-10);
    }

    #[test]
    fn kernel_and_spectral_potentials_agree() {
        let grid = Grid::new(1, 20.0, 2048).unwrap();
        let f = sample(grid, &TestField::BandLimited { cutoff: 12, seed: 7 }).unwrap();
        let spectral = riesz_potential(&f, 0.5, DcPolicy::Zero).unwrap().field;
        let physical = riesz_potential_kernel(&f, 0.5, 500).unwrap();
        let scale = spectral.sup_norm();
        let gap = sup_diff(&spectral, &physical);
        assert!(gap < 5e-4 * scale, "gap {gap} against scale {scale}");
    }

    #[test]
    fn kernel_potential_rejects_nonzero_mean() {
        let grid = Grid::new(1, 20.0, 256).unwrap();
        let f = sample(grid, &TestField::Gaussian { sigma: 1.0 }).unwrap();
        let err = riesz_potential_kernel(&f, 0.5, 100).unwrap_err();
        assert!(err.to_string().contains("zero-mean"));
    }

    #[test]
    fn bessel_potential_reproduces_its_kernel() {
        // Feed a discrete delta; the output is the periodized kernel of
        // (1 + xi^2)^{-1}, which is e^{-|x|}/2.  Spectral truncation of the
        // kernel's corner rings at the 1e-3 scale on this grid.
        let grid = Grid::new(1, 20.0, 2048).unwrap();
        let h = grid.spacing();
        let mut values = vec![0.0; grid.len()];
        values[grid.len() / 2] = 1.0 / h;
        let delta = Field::new(grid, values).unwrap();
        let out = bessel_potential(&delta, 2.0).unwrap();
        for x in [0.5f64, 1.0, 3.0] {
            let j = ((x + grid.half_width) / h).round() as usize;
            let xj = grid.coordinate(j);
            let expect = 0.5 * (-xj.abs()).exp();
            assert!(
                (out.values[j] - expect).abs() < 2e-3,
                "x {xj}: {} vs {expect}",
                out.values[j]
            );
        }
    }
}
