//! Variable-exponent Lebesgue machinery on the periodized box: modulars,
//! Luxemburg norms, conjugate exponents, and the two regularity certificates
//! (local log-continuity, decay at infinity) that the norm theory requires
//! of an exponent field.
//!
//! The Luxemburg norm is the unique lambda with modular(f / lambda) = 1,
//! found by geometric bisection: the modular is continuous and strictly
//! decreasing in lambda for nonzero f, so the bracket below cannot lie.

use rand::Rng;
use rand::SeedableRng;

use crate::error::{LabError, Result};
use crate::fields::{Field, Grid};

/// A sampled exponent function p(x) together with its declared value at
/// infinity.  Construction enforces `1 < p_minus <= p_plus < infinity`.
#[derive(Debug, Clone)]
pub struct ExponentField {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub p_infinity: f64,
    p_minus: f64,
    p_plus: f64,
}

impl ExponentField {
    pub fn new(grid: Grid, values: Vec<f64>, p_infinity: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(LabError::structural(format!(
                "exponent field length {} does not match grid length {}",
                values.len(),
                grid.len()
            )));
        }
        let mut p_minus = f64::INFINITY;
        let mut p_plus = 0.0f64;
        for &p in &values {
            if !p.is_finite() {
                return Err(LabError::domain("exponent field contains a non-finite value"));
            }
            p_minus = p_minus.min(p);
            p_plus = p_plus.max(p);
        }
        if !(p_minus > 1.0) {
            return Err(LabError::domain(format!(
                "exponent field needs p_minus > 1, got {p_minus}"
            )));
        }
        if !(p_infinity > 1.0 && p_infinity.is_finite()) {
            return Err(LabError::domain(format!(
                "declared p_infinity must be finite and > 1, got {p_infinity}"
            )));
        }
        Ok(ExponentField {
            grid,
            values,
            p_infinity,
            p_minus,
            p_plus,
        })
    }

    pub fn p_minus(&self) -> f64 {
        self.p_minus
    }

    pub fn p_plus(&self) -> f64 {
        self.p_plus
    }

    /// Pointwise conjugate exponent p/(p-1); p_minus > 1 keeps it finite.
    pub fn conjugate(&self) -> ExponentField {
        let values = self.values.iter().map(|p| p / (p - 1.0)).collect();
        ExponentField {
            grid: self.grid,
            values,
            p_infinity: self.p_infinity / (self.p_infinity - 1.0),
            p_minus: self.p_plus / (self.p_plus - 1.0),
            p_plus: self.p_minus / (self.p_minus - 1.0),
        }
    }
}

/// Reproducible exponent catalogue.
#[derive(Debug, Clone, PartialEq)]
pub enum ExponentFamily {
    Constant { p: f64 },
    /// p(x) = p_inf + amplitude / (1 + |x|^2).
    RationalDecay { p_inf: f64, amplitude: f64 },
    /// p(x) = p_inf + amplitude / ln(e + |x|^2): slower, log-scale decay.
    LogDecay { p_inf: f64, amplitude: f64 },
}

pub fn sample_exponent(grid: Grid, family: &ExponentFamily) -> Result<ExponentField> {
    let eval = |x: &[f64]| -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        match family {
            ExponentFamily::Constant { p } => *p,
            ExponentFamily::RationalDecay { p_inf, amplitude } => p_inf + amplitude / (1.0 + r2),
            ExponentFamily::LogDecay { p_inf, amplitude } => {
                p_inf + amplitude / (std::f64::consts::E + r2).ln()
            }
        }
    };
    let values = (0..grid.len())
        .map(|flat| {
            let p = grid.point(flat);
            eval(&p[..grid.dim as usize])
        })
        .collect();
    let p_infinity = match family {
        ExponentFamily::Constant { p } => *p,
        ExponentFamily::RationalDecay { p_inf, .. } => *p_inf,
        ExponentFamily::LogDecay { p_inf, .. } => *p_inf,
    };
    ExponentField::new(grid, values, p_infinity)
}

/// The modular `∫ |f(x)|^{p(x)} dx` as a Riemann sum.
pub fn modular(f: &Field, p: &ExponentField) -> Result<f64> {
    if f.grid != p.grid {
        return Err(LabError::structural(
            "field and exponent live on different grids",
        ));
    }
    Ok(f.grid.cell_volume()
        * f.values
            .iter()
            .zip(&p.values)
            .map(|(v, pe)| v.abs().powf(*pe))
            .sum::<f64>())
}

/// Luxemburg norm: the lambda with modular(f/lambda) = 1, bisected until
/// |modular - 1| <= tol.  Zero fields have norm 0.
pub fn luxemburg_norm(f: &Field, p: &ExponentField, tol: f64) -> Result<f64> {
    if f.grid != p.grid {
        return Err(LabError::structural(
            "field and exponent live on different grids",
        ));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(LabError::domain(format!(
            "luxemburg tolerance must be in (0, 1), got {tol}"
        )));
    }
    let sup = f.sup_norm();
    if sup == 0.0 {
        return Ok(0.0);
    }
    let modular_at = |lambda: f64| -> f64 {
        f.grid.cell_volume()
            * f.values
                .iter()
                .zip(&p.values)
                .map(|(v, pe)| (v.abs() / lambda).powf(*pe))
                .sum::<f64>()
    };
    // Upper bracket: lambda = sup |f| * measure^{1/p_minus} forces every
    // summand (|f|/lambda)^p <= measure^{-p/p_minus} <= measure^{-1} when the
    // base is < 1, hence modular <= 1.  (When measure < 1 the exponent flips
    // the inequality the right way as well since base <= measure^{-1/p_minus}.)
    let measure = f.grid.box_volume();
    let mut hi = sup * measure.powf(1.0 / p.p_minus);
    if modular_at(hi) > 1.0 {
        // Paranoia for measure < 1 corner cases: expand geometrically.
        for _ in 0..200 {
            hi *= 2.0;
            if modular_at(hi) <= 1.0 {
                break;
            }
        }
    }
    let mut lo = hi;
    for _ in 0..2000 {
        lo *= 0.5;
        if modular_at(lo) >= 1.0 {
            break;
        }
    }
    if modular_at(lo) < 1.0 {
        return Err(LabError::numerical(
            "luxemburg bracket search failed to straddle modular = 1",
        ));
    }
    // Geometric bisection on [lo, hi].
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        let m = modular_at(mid);
        if (m - 1.0).abs() <= tol {
            return Ok(mid);
        }
        if m > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(LabError::numerical(format!(
        "luxemburg bisection did not reach |modular - 1| <= {tol} \
         (bracket [{lo:.6e}, {hi:.6e}])"
    )))
}

/// Outcome of a regularity scan over an exponent field.
#[derive(Debug, Clone)]
pub struct ConditionCertificate {
    /// The empirical constant (supremum of the tested functional).
    pub constant: f64,
    /// Point achieving it.
    pub witness: [f64; 3],
    /// Second point of the pair for pairwise conditions.
    pub witness_partner: Option<[f64; 3]>,
    /// Number of evaluations performed.
    pub samples: usize,
    /// True when every qualifying configuration was examined.
    pub exhaustive: bool,
}

/// Empirical local log-continuity constant:
///   sup { |p(x)-p(y)| * ln(1/|x-y|) : 0 < |x-y| <= 1/2 }
/// over grid pairs, with plain (non-periodic) distance — regularity is a
/// statement about the function, not its periodization.  If `pair_budget`
/// covers every qualifying pair the scan is exhaustive; otherwise it
/// examines a seeded random subsample plus all nearest-neighbor pairs (the
/// short-distance end dominates the supremum for smooth families).
pub fn check_log_condition(
    p: &ExponentField,
    pair_budget: usize,
    seed: u64,
) -> ConditionCertificate {
    let grid = p.grid;
    let h = grid.spacing();
    let window = (0.5 / h).floor() as i64; // offsets with |delta| h <= 1/2 qualify
    let dim = grid.dim as usize;
    let m = grid.points_per_axis as i64;

    // Count qualifying ordered offsets (excluding 0) with |offset| h <= 1/2.
    let mut offsets: Vec<[i64; 3]> = Vec::new();
    let mut probe = [0i64; 3];
    collect_offsets(dim, window, h, &mut probe, 0, &mut offsets);
    let total_pairs = offsets.len() * grid.len();

    let score = |a: usize, b_idx: [i64; 3]| -> Option<(f64, usize)> {
        let ia = grid.unflatten(a);
        let mut flat_b = 0usize;
        let mut dist2 = 0.0f64;
        for axis in 0..dim {
            let jb = ia[axis] as i64 + b_idx[axis];
            if jb < 0 || jb >= m {
                return None; // non-periodic: pairs must stay inside the box
            }
            flat_b = flat_b * grid.points_per_axis + jb as usize;
            let d = b_idx[axis] as f64 * h;
            dist2 += d * d;
        }
        let dist = dist2.sqrt();
        if dist == 0.0 || dist > 0.5 {
            return None;
        }
        let gap = (p.values[a] - p.values[flat_b]).abs();
        Some((gap * (1.0 / dist).ln(), flat_b))
    };

    let mut best = (0.0f64, 0usize, 0usize);
    let mut samples = 0usize;
    let exhaustive = total_pairs <= pair_budget;
    if exhaustive {
        for a in 0..grid.len() {
            for off in &offsets {
                if let Some((val, b)) = score(a, *off) {
                    samples += 1;
                    if val > best.0 {
                        best = (val, a, b);
                    }
                }
            }
        }
    } else {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        // Deterministic core: all unit-offset pairs.
        let mut units: Vec<[i64; 3]> = Vec::new();
        for axis in 0..dim {
            let mut u = [0i64; 3];
            u[axis] = 1;
            units.push(u);
            u[axis] = -1;
            units.push(u);
        }
        for a in 0..grid.len() {
            for off in &units {
                if let Some((val, b)) = score(a, *off) {
                    samples += 1;
                    if val > best.0 {
                        best = (val, a, b);
                    }
                }
            }
        }
        while samples < pair_budget {
            let a = rng.gen_range(0..grid.len());
            let off = offsets[rng.gen_range(0..offsets.len())];
            samples += 1;
            if let Some((val, b)) = score(a, off) {
                if val > best.0 {
                    best = (val, a, b);
                }
            }
        }
    }
    ConditionCertificate {
        constant: best.0,
        witness: grid.point(best.1),
        witness_partner: Some(grid.point(best.2)),
        samples,
        exhaustive,
    }
}

fn collect_offsets(
    dim: usize,
    window: i64,
    h: f64,
    probe: &mut [i64; 3],
    axis: usize,
    out: &mut Vec<[i64; 3]>,
) {
    if axis == dim {
        let dist2: f64 = probe[..dim]
            .iter()
            .map(|d| (*d as f64 * h) * (*d as f64 * h))
            .sum();
        if dist2 > 0.0 && dist2.sqrt() <= 0.5 {
            out.push(*probe);
        }
        return;
    }
    for d in -window..=window {
        probe[axis] = d;
        collect_offsets(dim, window, h, probe, axis + 1, out);
    }
}

/// Empirical decay constant: `sup |p(x) - p_infinity| * ln(2 + |x|)` over
/// the whole grid.  Always exhaustive — it is a single pass.
pub fn check_decay_condition(p: &ExponentField) -> ConditionCertificate {
    let grid = p.grid;
    let mut best = (0.0f64, 0usize);
    for flat in 0..grid.len() {
        let x = grid.point(flat);
        let r = x
            .iter()
            .take(grid.dim as usize)
            .map(|v| v * v)
            .sum::<f64>()
            .sqrt();
        let val = (p.values[flat] - p.p_infinity).abs() * (2.0 + r).ln();
        if val > best.0 {
            best = (val, flat);
        }
    }
    ConditionCertificate {
        constant: best.0,
        witness: grid.point(best.1),
        witness_partner: None,
        samples: grid.len(),
        exhaustive: true,
    }
}
