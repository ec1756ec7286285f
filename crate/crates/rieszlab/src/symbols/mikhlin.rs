//! Derivative audits for radial Fourier multipliers.
//!
//! A symbol passes the (radial) derivative condition when
//! sup_r |r^k m^{(k)}(r)| is finite for every k up to the target order.
//! The audit estimates those sups over a finite window, reports their
//! stability under grid densification, flags growth toward the window
//! edge, and verifies the dilation family m(eps r) over correspondingly
//! scaled windows — the functional r^k d^k is exactly dilation invariant,
//! and co-scaling the window realizes that invariance numerically.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::symbols::transfer::TransferSymbols;

/// A radial function with derivative access, the unit the audit consumes.
pub trait RadialSymbol: Sync {
    fn eval(&self, r: f64) -> f64;

    /// k-th derivative at r; deriv(0, r) must equal eval(r) exactly.
    fn deriv(&self, k: usize, r: f64) -> Result<f64>;

    /// Derivatives 0..=k_max at r in one pass.  Override when a single
    /// evaluation can serve every order (jet-backed implementations).
    fn deriv_row(&self, k_max: usize, r: f64) -> Result<Vec<f64>> {
        (0..=k_max).map(|k| self.deriv(k, r)).collect()
    }

    /// Highest derivative order the implementation stands behind.
    fn max_order(&self) -> usize;

    /// Whether eval/deriv are undefined (or unbounded) at r = 0.
    fn singular_at_origin(&self) -> bool {
        false
    }

    /// Limit at infinity, when one exists and is known.
    fn limit_at_infinity(&self) -> Option<f64> {
        None
    }

    /// Intrinsic oscillation frequency, used to pick sampling and panel
    /// widths; 1 for symbols without a faster scale.
    fn oscillation_scale(&self) -> f64 {
        1.0
    }
}

/// Richardson-extrapolated central difference of order k, step scaled to r.
/// The cross-check companion to analytic `deriv` implementations.
pub fn finite_difference_deriv<S: RadialSymbol + ?Sized>(
    symbol: &S,
    k: usize,
    r: f64,
) -> Result<f64> {
    if k == 0 {
        return Ok(symbol.eval(r));
    }
    if k > 4 {
        return Err(LabError::domain(format!(
            "finite-difference cross-check supports k <= 4, got {k}"
        )));
    }
    let stencil = |h: f64| -> f64 {
        let f = |x: f64| symbol.eval(x);
        match k {
            1 => (f(r + h) - f(r - h)) / (2.0 * h),
            2 => (f(r + h) - 2.0 * f(r) + f(r - h)) / (h * h),
            3 => (f(r + 2.0 * h) - 2.0 * f(r + h) + 2.0 * f(r - h) - f(r - 2.0 * h))
                / (2.0 * h * h * h),
            _ => (f(r + 2.0 * h) - 4.0 * f(r + h) + 6.0 * f(r) - 4.0 * f(r - h)
                + f(r - 2.0 * h))
                / (h * h * h * h),
        }
    };
    // Two-level Richardson on the O(h^2) stencils: error model c h^2.
    // The step follows r but is capped at unit scale — features (band
    // transitions, oscillation periods) never live above it.
    let h = r.abs().max(1e-2).min(1.0) * 1e-2 / symbol.oscillation_scale().max(1.0);
    let coarse = stencil(h);
    let fine = stencil(h / 2.0);
    let value = (4.0 * fine - coarse) / 3.0;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(LabError::numerical(format!(
            "finite differences of order {k} at r = {r} did not stay finite"
        )))
    }
}

/// Window and density of an audit grid.  Nodes are log-spaced below the
/// oscillation onset (r = 10) and linearly spaced above it with a step
/// tied to the symbol's oscillation scale, so oscillatory sups are not
/// aliased.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AuditGrid {
    pub r_min: f64,
    pub r_max: f64,
    /// Points in the log-spaced section.
    pub log_points: usize,
    /// Multiplies point counts in both sections; refinement doubles it.
    pub density: u32,
}

impl AuditGrid {
    pub fn standard() -> Self {
        AuditGrid {
            r_min: 1e-3,
            r_max: 1e3,
            log_points: 400,
            density: 1,
        }
    }

    fn nodes(&self, oscillation: f64) -> Vec<f64> {
        let mut out = Vec::new();
        let cross = 10.0f64.min(self.r_max);
        let n_log = self.log_points * self.density as usize;
        let (lo, hi) = (self.r_min.ln(), cross.ln());
        for i in 0..n_log {
            out.push((lo + (hi - lo) * i as f64 / (n_log - 1) as f64).exp());
        }
        if self.r_max > cross {
            let step = std::f64::consts::PI / (8.0 * oscillation.max(1.0)) / self.density as f64;
            let mut r = cross + step;
            while r <= self.r_max {
                out.push(r);
                r += step;
            }
            out.push(self.r_max);
        }
        out
    }
}

/// Result of one derivative audit.
#[derive(Debug, Clone, Serialize)]
pub struct MikhlinAudit {
    pub k_max: usize,
    /// sup_r |r^k m^{(k)}(r)| over the window, k = 0..=k_max.
    pub sup_bounds: Vec<f64>,
    /// Relative change of each sup under grid doubling.
    pub refinement_delta: Vec<f64>,
    /// True where the sup keeps growing toward the window edge
    /// (full-window sup exceeding 3x the sup over the first quarter):
    /// evidence the supremum over the half-line is infinite.
    pub divergence_flagged: Vec<bool>,
    /// Worst relative deviation, over dilations eps in 10^{-3}..10^3 and
    /// all k, of the co-scaled-window sup from the eps = 1 sup.
    pub dilation_max_deviation: f64,
    pub grid: AuditGrid,
}

struct Dilated<'a, S: RadialSymbol + ?Sized> {
    inner: &'a S,
    eps: f64,
}

impl<S: RadialSymbol + ?Sized> RadialSymbol for Dilated<'_, S> {
    fn eval(&self, r: f64) -> f64 {
        self.inner.eval(self.eps * r)
    }

    fn deriv(&self, k: usize, r: f64) -> Result<f64> {
        Ok(self.eps.powi(k as i32) * self.inner.deriv(k, self.eps * r)?)
    }

    fn deriv_row(&self, k_max: usize, r: f64) -> Result<Vec<f64>> {
        let mut row = self.inner.deriv_row(k_max, self.eps * r)?;
        for (k, v) in row.iter_mut().enumerate() {
            *v *= self.eps.powi(k as i32);
        }
        Ok(row)
    }

    fn max_order(&self) -> usize {
        self.inner.max_order()
    }

    fn singular_at_origin(&self) -> bool {
        self.inner.singular_at_origin()
    }

    fn limit_at_infinity(&self) -> Option<f64> {
        self.inner.limit_at_infinity()
    }

    fn oscillation_scale(&self) -> f64 {
        self.eps * self.inner.oscillation_scale()
    }
}

fn sup_scan<S: RadialSymbol + ?Sized>(
    symbol: &S,
    k_max: usize,
    nodes: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let rows: Vec<Result<Vec<f64>>> = nodes
        .par_iter()
        .map(|&r| {
            let row = symbol.deriv_row(k_max, r).map_err(|e| {
                LabError::numerical(format!("derivative estimation failed at r = {r}: {e}"))
            })?;
            Ok(row
                .into_iter()
                .enumerate()
                .map(|(k, v)| r.powi(k as i32).abs() * v.abs())
                .collect())
        })
        .collect();
    let mut sup = vec![0.0f64; k_max + 1];
    let mut quarter_sup = vec![0.0f64; k_max + 1];
    let r_quarter = nodes[0] + (nodes[nodes.len() - 1] - nodes[0]) / 4.0;
    for (row, &r) in rows.into_iter().zip(nodes) {
        for (k, v) in row?.into_iter().enumerate() {
            sup[k] = sup[k].max(v);
            if r <= r_quarter {
                quarter_sup[k] = quarter_sup[k].max(v);
            }
        }
    }
    Ok((sup, quarter_sup))
}

/// Audit sup_r |r^k m^{(k)}(r)| for k = 0..=k_max over `grid`, with
/// refinement stability, edge-growth flags, and dilation uniformity over
/// co-scaled windows.
pub fn mikhlin_audit<S: RadialSymbol + ?Sized>(
    symbol: &S,
    k_max: usize,
    grid: AuditGrid,
) -> Result<MikhlinAudit> {
    if k_max > symbol.max_order() {
        return Err(LabError::domain(format!(
            "audit order {k_max} exceeds the symbol's supported order {}",
            symbol.max_order()
        )));
    }
    if !(grid.r_min > 0.0 && grid.r_min < grid.r_max) || grid.log_points < 2 {
        return Err(LabError::domain(
            "audit window must satisfy 0 < r_min < r_max with at least 2 log points",
        ));
    }
    let osc = symbol.oscillation_scale();
    let base_nodes = grid.nodes(osc);
    let (sup, quarter) = sup_scan(symbol, k_max, &base_nodes)?;
    let doubled = AuditGrid {
        density: grid.density * 2,
        ..grid
    };
    let (sup_fine, _) = sup_scan(symbol, k_max, &doubled.nodes(osc))?;
    let refinement_delta = sup
        .iter()
        .zip(&sup_fine)
        .map(|(a, b)| if *b > 0.0 { (a - b).abs() / b } else { 0.0 })
        .collect();
    let divergence_flagged = sup
        .iter()
        .zip(&quarter)
        .map(|(full, q)| *q > 0.0 && full / q > 3.0)
        .collect();

    // Dilation family over co-scaled windows: nodes r_i/eps probe the inner
    // symbol at exactly the base arguments, realizing the exact dilation
    // invariance of the functional.
    let mut dilation_max_deviation = 0.0f64;
    for exp in -3..=3 {
        let eps = 10.0f64.powi(exp);
        if eps == 1.0 {
            continue;
        }
        let dilated = Dilated { inner: symbol, eps };
        let scaled: Vec<f64> = base_nodes.iter().map(|r| r / eps).collect();
        let (dsup, _) = sup_scan(&dilated, k_max, &scaled)?;
        for (k, (a, b)) in sup.iter().zip(&dsup).enumerate() {
            if *a > 0.0 {
                dilation_max_deviation = dilation_max_deviation.max((a - b).abs() / a);
            } else if *b > 0.0 {
                return Err(LabError::numerical(format!(
                    "dilated sup at k = {k}, eps = {eps} is nonzero where the base sup vanishes"
                )));
            }
        }
    }

    Ok(MikhlinAudit {
        k_max,
        sup_bounds: sup,
        refinement_delta,
        divergence_flagged,
        dilation_max_deviation,
        grid,
    })
}

/// m == constant: the reference symbol with all higher bounds zero.
pub struct ConstantSymbol(pub f64);

impl RadialSymbol for ConstantSymbol {
    fn eval(&self, _r: f64) -> f64 {
        self.0
    }

    fn deriv(&self, k: usize, _r: f64) -> Result<f64> {
        Ok(if k == 0 { self.0 } else { 0.0 })
    }

    fn max_order(&self) -> usize {
        usize::MAX
    }

    fn limit_at_infinity(&self) -> Option<f64> {
        Some(self.0)
    }
}

/// sin(r): bounded, but r cos(r) is not — the canonical divergence probe.
pub struct SineSymbol;

impl RadialSymbol for SineSymbol {
    fn eval(&self, r: f64) -> f64 {
        r.sin()
    }

    fn deriv(&self, k: usize, r: f64) -> Result<f64> {
        Ok(match k % 4 {
            0 => r.sin(),
            1 => r.cos(),
            2 => -r.sin(),
            _ => -r.cos(),
        })
    }

    fn max_order(&self) -> usize {
        usize::MAX
    }
}

/// A(r) = ((1-e^{-r})/r)^alpha / w(r) as an auditable symbol.
pub struct SemigroupRatioSymbol<'a>(&'a TransferSymbols);

/// B(r) = 1/A(r) as an auditable symbol.
pub struct HypersingularRatioSymbol<'a>(&'a TransferSymbols);

impl TransferSymbols {
    pub fn semigroup_ratio_symbol(&self) -> SemigroupRatioSymbol<'_> {
        SemigroupRatioSymbol(self)
    }

    pub fn hypersingular_ratio_symbol(&self) -> HypersingularRatioSymbol<'_> {
        HypersingularRatioSymbol(self)
    }
}

impl RadialSymbol for SemigroupRatioSymbol<'_> {
    fn eval(&self, r: f64) -> f64 {
        self.0.semigroup_ratio(r).unwrap_or(f64::NAN)
    }

    fn deriv(&self, k: usize, r: f64) -> Result<f64> {
        if k == 0 {
            return self.0.semigroup_ratio(r);
        }
        Ok(self.0.semigroup_ratio_jet(r, k)?.derivatives()[k])
    }

    fn deriv_row(&self, k_max: usize, r: f64) -> Result<Vec<f64>> {
        let mut row = self.0.semigroup_ratio_jet(r, k_max)?.derivatives();
        row[0] = self.0.semigroup_ratio(r)?;
        Ok(row)
    }

    // The derivative condition in dimension n only ever needs orders <= n.
    fn max_order(&self) -> usize {
        self.0.dim as usize
    }

    fn limit_at_infinity(&self) -> Option<f64> {
        Some(1.0 / self.0.ratio_limit())
    }

    fn oscillation_scale(&self) -> f64 {
        self.0.ell as f64
    }
}

/// window(r) * (B(r) - B(inf)): one smoothly localized piece of the ratio's
/// tail, the unit the kernel-realization studies integrate.
pub struct LocalizedTailSymbol<'a, W> {
    symbols: &'a TransferSymbols,
    window: W,
}

impl TransferSymbols {
    pub fn localized_tail_symbol<W: RadialSymbol>(
        &self,
        window: W,
    ) -> LocalizedTailSymbol<'_, W> {
        LocalizedTailSymbol {
            symbols: self,
            window,
        }
    }
}

impl<W: RadialSymbol> RadialSymbol for LocalizedTailSymbol<'_, W> {
    fn eval(&self, r: f64) -> f64 {
        match self.symbols.hypersingular_ratio(r) {
            Ok(b) => self.window.eval(r) * (b - self.symbols.ratio_limit()),
            Err(_) => f64::NAN,
        }
    }

    fn deriv(&self, k: usize, r: f64) -> Result<f64> {
        Ok(self.deriv_row(k, r)?[k])
    }

    fn deriv_row(&self, k_max: usize, r: f64) -> Result<Vec<f64>> {
        let win = self.window.deriv_row(k_max, r)?;
        let mut tail = self.symbols.hypersingular_ratio_symbol().deriv_row(k_max, r)?;
        tail[0] -= self.symbols.ratio_limit();
        Ok((0..=k_max)
            .map(|k| {
                (0..=k)
                    .map(|j| crate::special::binomial(k as u32, j as u32) * win[j] * tail[k - j])
                    .sum()
            })
            .collect())
    }

    fn max_order(&self) -> usize {
        self.window
            .max_order()
            .min(self.symbols.hypersingular_ratio_symbol().max_order())
    }

    fn limit_at_infinity(&self) -> Option<f64> {
        // Either the window dies or the tail does.
        Some(0.0)
    }

    fn oscillation_scale(&self) -> f64 {
        self.symbols.ell as f64
    }
}

impl RadialSymbol for HypersingularRatioSymbol<'_> {
    fn eval(&self, r: f64) -> f64 {
        self.0.hypersingular_ratio(r).unwrap_or(f64::NAN)
    }

    fn deriv(&self, k: usize, r: f64) -> Result<f64> {
        if k == 0 {
            return self.0.hypersingular_ratio(r);
        }
        Ok(self.0.hypersingular_ratio_derivatives(r, k)?[k])
    }

    fn deriv_row(&self, k_max: usize, r: f64) -> Result<Vec<f64>> {
        let mut row = self.0.hypersingular_ratio_derivatives(r, k_max)?;
        row[0] = self.0.hypersingular_ratio(r)?;
        Ok(row)
    }

    fn max_order(&self) -> usize {
        self.0.dim as usize
    }

    fn limit_at_infinity(&self) -> Option<f64> {
        Some(self.0.ratio_limit())
    }

    fn oscillation_scale(&self) -> f64 {
        self.0.ell as f64
    }
}
