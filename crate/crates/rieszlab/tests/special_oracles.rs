//! Independent oracles for the special-function layer.
//!
//! The implementations under test use power series / Hankel asymptotics and
//! closed Bessel expansions; every oracle here goes a different route —
//! tanh-sinh quadrature of integral representations, direct sphere
//! quadrature, stratified Monte Carlo — so agreement is meaningful.

use rieszlab::special::{bessel_j, sphere_area, SphericalSineIntegral};

/// Tanh-sinh (double-exponential) quadrature on [-1, 1].  Handles algebraic
/// endpoint singularities like (1-t^2)^{p}, p > -1, which defeat plain
/// Gauss rules; level-doubling reuses previous nodes.  The integrand receives
/// (t, 1-t^2) with the second argument computed as sech^2 of the transform —
/// near the endpoints tanh saturates to exactly 1.0 in f64, so deriving
/// 1-t^2 from t would collapse to a hard zero under the singular weight.
fn tanh_sinh(g: &dyn Fn(f64, f64) -> f64, tol: f64) -> f64 {
    // Cutoff 5.0 keeps the truncation tail below 1e-20 even for integrands
    // as singular as (1-t^2)^{-0.9}.
    let cutoff = 5.0f64;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let eval = |u: f64| -> f64 {
        let s = half_pi * u.sinh();
        let t = s.tanh();
        let sech2 = 1.0 / (s.cosh() * s.cosh());
        if sech2 == 0.0 {
            return 0.0; // fully saturated: weight underflowed first
        }
        let w = half_pi * u.cosh() * sech2;
        w * g(t, sech2)
    };
    // Level 0: h = 1.
    let mut h = 1.0f64;
    let mut total = eval(0.0);
    let mut j = 1;
    while (j as f64) * h <= cutoff {
        total += eval(j as f64 * h) + eval(-(j as f64) * h);
        j += 1;
    }
    let mut estimate = h * total;
    for _level in 0..12 {
        h *= 0.5;
        // New nodes are the odd multiples of the new h.
        let mut k = 1;
        while (k as f64) * h <= cutoff {
            total += eval(k as f64 * h) + eval(-(k as f64) * h);
            k += 2;
        }
        let next = h * total;
        let done = (next - estimate).abs() <= tol * (1.0 + next.abs());
        estimate = next;
        if done {
            break;
        }
    }
    estimate
}

/// J_nu(x) from the Poisson-type integral
///   J_nu(x) = (x/2)^nu / (sqrt(pi) Gamma(nu + 1/2))
///             * ∫_{-1}^{1} cos(x t) (1 - t^2)^{nu - 1/2} dt,   nu > -1/2.
fn bessel_oracle(nu: f64, x: f64) -> f64 {
    assert!(nu > -0.5);
    let p = nu - 0.5;
    let integral = tanh_sinh(&|t: f64, omts: f64| (x * t).cos() * omts.powf(p), 1e-13);
    let prefactor = (0.5 * x).powf(nu)
        / (std::f64::consts::PI.sqrt() * rieszlab::special::gamma::gamma(nu + 0.5));
    prefactor * integral
}

#[test]
fn bessel_matches_poisson_integral_oracle() {
    let orders = [0.0, 0.25, 0.5, 1.0, 1.5, 2.5, 3.7, 5.0, 6.5, 8.0];
    let args = [
        0.01, 0.1, 0.5, 1.0, 2.0, 4.0, 7.5, 10.0, 13.0, 14.9, 15.1, 18.0, 25.0, 40.0,
    ];
    for &nu in &orders {
        for &x in &args {
            let want = bessel_oracle(nu, x);
            let got = bessel_j(nu, x);
            assert!(
                (got - want).abs() < 1e-10,
                "J_{nu}({x}): {got} vs oracle {want}"
            );
        }
    }
}

#[test]
fn bessel_negative_orders_via_recurrence_oracle() {
    // J_{nu-1}(x) = (2 nu / x) J_nu - J_{nu+1} walks the oracle down below
    // -1/2 where the integral representation stops converging.
    for &(nu, x) in &[(-0.3f64, 2.0f64), (-0.3, 9.0), (-1.25, 3.0), (-1.25, 12.0)] {
        // Express J_nu in terms of oracle values at nu+1, nu+2.
        let up1 = bessel_oracle(nu + 1.0, x);
        let up2 = bessel_oracle(nu + 2.0, x);
        let want = 2.0 * (nu + 1.0) / x * up1 - up2;
        let got = bessel_j(nu, x);
        assert!(
            (got - want).abs() < 1e-9,
            "J_{nu}({x}): {got} vs recurrence oracle {want}"
        );
    }
}

#[test]
fn bessel_five_halves_closed_form_far_out() {
    // Terminating asymptotics = closed polynomial form; large arguments
    // exercise the phase handling.
    for &x in &[20.0f64, 100.0, 1000.0] {
        let amp = (2.0 / (std::f64::consts::PI * x)).sqrt();
        let want = amp * ((3.0 / (x * x) - 1.0) * x.sin() - 3.0 / x * x.cos());
        let got = bessel_j(2.5, x);
        assert!(
            (got - want).abs() < 1e-12,
            "J_2.5({x}): {got} vs {want}"
        );
    }
}

/// Direct quadrature of ∫_{S^{n-1}} sin^ell(rho sigma_1) dsigma through the
/// zonal reduction, with rho-scaled node counts.  No Bessel functions and no
/// sinc-reduction: this is the independent path.
fn spherical_oracle(n: u32, ell: u32, rho: f64) -> f64 {
    let nodes = (4.0 * ell as f64 * rho) as usize + 64;
    match n {
        1 => 2.0 * rho.sin().powi(ell as i32),
        2 => {
            let (ts, w) = rieszlab::quad::chebyshev_gauss(nodes);
            sphere_area(1)
                * ts.iter()
                    .map(|t| w * (rho * t).sin().powi(ell as i32))
                    .sum::<f64>()
        }
        3 => {
            let rule = rieszlab::quad::gauss_legendre(nodes);
            sphere_area(2) * rule.integrate(-1.0, 1.0, |t| (rho * t).sin().powi(ell as i32))
        }
        _ => unreachable!("oracle wired for n <= 3"),
    }
}

#[test]
fn spherical_integral_matches_quadrature_oracle() {
    for n in 1..=3u32 {
        for ell in [2u32, 4, 6] {
            let v = SphericalSineIntegral::new(n, ell).unwrap();
            for &rho in &[0.1, 0.7, 1.0, 2.3, 5.0, 10.0, 20.0] {
                let want = spherical_oracle(n, ell, rho);
                let got = v.eval(rho);
                assert!(
                    (got - want).abs() < 1e-9 * (1.0 + want.abs()),
                    "n={n} ell={ell} rho={rho}: {got} vs oracle {want}"
                );
            }
        }
    }
}

#[test]
fn spherical_integral_matches_monte_carlo_in_3d() {
    // Stratified z = sigma_1 sampling (area on S^2 is uniform in z): an
    // entirely quadrature-free cross-check.
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
    let v = SphericalSineIntegral::new(3, 4).unwrap();
    let rho = 1.9;
    let n_samples = 2_000_000usize;
    let mut acc = 0.0;
    for i in 0..n_samples {
        // Stratify: one uniform draw inside each of n_samples equal z-slabs.
        let z = -1.0 + 2.0 * (i as f64 + rng.gen::<f64>()) / n_samples as f64;
        acc += (rho * z).sin().powi(4);
    }
    let mc = sphere_area(3) * acc / n_samples as f64;
    let got = v.eval(rho);
    assert!(
        (got - mc).abs() < 5e-3,
        "Monte Carlo {mc} vs expansion {got}"
    );
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn spherical_integral_stays_in_band(
            n in 1u32..=3,
            half_ell in 1u32..=4,
            rho in 0.0f64..30.0,
        ) {
            // 0 <= sin^ell <= 1 pointwise forces 0 <= V <= |S^{n-1}|.
            let v = SphericalSineIntegral::new(n, 2 * half_ell).unwrap();
            let val = v.eval(rho);
            prop_assert!(val >= -1e-9, "V({rho}) = {val} below zero");
            prop_assert!(
                val <= sphere_area(n) + 1e-9,
                "V({rho}) = {val} above the sphere area"
            );
        }

        #[test]
        fn reduced_and_plain_forms_agree(
            n in 1u32..=3,
            half_ell in 1u32..=3,
            rho in 0.05f64..2.5,
        ) {
            let v = SphericalSineIntegral::new(n, 2 * half_ell).unwrap();
            let plain = v.eval(rho);
            let reduced = v.eval_reduced(rho) * rho.powi(2 * half_ell as i32);
            prop_assert!(
                (plain - reduced).abs() < 1e-10 * (1.0 + plain.abs()),
                "n={n} ell={} rho={rho}: {plain} vs {reduced}", 2 * half_ell
            );
        }
    }
}
