//! Quadrature rules shared across the symbol and operator stacks.
//!
//! Gauss–Legendre nodes come from Newton iteration on the Legendre recurrence;
//! rules are cached by size because the oscillatory-integral code requests the
//! same sizes thousands of times.  Chebyshev–Gauss handles the `(1-t^2)^{-1/2}`
//! endpoint weight that shows up in the two-dimensional sphere reduction.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;

use crate::error::{LabError, Result};

/// Nodes and weights on the reference interval `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "rule size must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        // Symmetric rule: solve for the first half, mirror the rest.
        for i in 0..(n + 1) / 2 {
            // Tricomi initial guess, accurate enough for Newton from any n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, d) = legendre_and_derivative(n, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre_and_derivative(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Integrate `f` over `[a, b]` with this rule.
    pub fn integrate(&self, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

static RULE_CACHE: Lazy<Mutex<HashMap<usize, Arc<GaussLegendre>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Cached Gauss–Legendre rule of size `n`.
pub fn gauss_legendre(n: usize) -> Arc<GaussLegendre> {
    let mut cache = RULE_CACHE.lock().unwrap();
    cache
        .entry(n)
        .or_insert_with(|| Arc::new(GaussLegendre::new(n)))
        .clone()
}

/// Chebyshev–Gauss rule for `∫_{-1}^{1} g(t) (1-t^2)^{-1/2} dt ≈ Σ w g(t_i)`,
/// exact for polynomial `g` up to degree `2n-1`.  The weight is uniform.
pub fn chebyshev_gauss(n: usize) -> (Vec<f64>, f64) {
    assert!(n >= 1);
    let w = std::f64::consts::PI / n as f64;
    let nodes = (0..n)
        .map(|i| (std::f64::consts::PI * (2.0 * i as f64 + 1.0) / (2.0 * n as f64)).cos())
        .collect();
    (nodes, w)
}

/// Panel-adaptive Gauss–Legendre: bisect until the 20- and 40-point answers on
/// a panel agree to the panel's share of `tol`.  Smooth integrands only; the
/// depth cap converts endpoint singularities into `Numerical` errors instead
/// of hanging.
pub fn integrate_adaptive(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Result<f64> {
    let coarse = gauss_legendre(20);
    let fine = gauss_legendre(40);
    fn recurse(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        tol: f64,
        depth: u32,
        coarse: &GaussLegendre,
        fine: &GaussLegendre,
    ) -> Result<f64> {
        let lo = coarse.integrate(a, b, f);
        let hi = fine.integrate(a, b, f);
        if (lo - hi).abs() <= tol {
            return Ok(hi);
        }
        if depth == 0 {
            return Err(LabError::numerical(format!(
                "adaptive quadrature failed on [{a:.6e}, {b:.6e}]: panel disagreement {:.3e} > {tol:.3e}",
                (lo - hi).abs()
            )));
        }
        let mid = 0.5 * (a + b);
        let left = recurse(f, a, mid, 0.5 * tol, depth - 1, coarse, fine)?;
        let right = recurse(f, mid, b, 0.5 * tol, depth - 1, coarse, fine)?;
        Ok(left + right)
    }
    recurse(f, a, b, tol, max_depth, &coarse, &fine)
}
