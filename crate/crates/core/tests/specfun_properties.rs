use std::f64::consts::PI;

use latsum::specfun::{bessel_k, dirichlet_beta, gamma, hurwitz_zeta, ln_gamma, xi1, xi_beta, zeta};
use latsum::specfun::zeta::hurwitz_zeta_est;
use latsum::EvalContext;
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(10_000))]

    #[test]
    fn conjugate_symmetry(sigma in -2.0f64..3.0, t in 0.1f64..50.0) {
        let ctx = EvalContext::default();
        let z = c(sigma, t);
        type F = fn(Complex64, &EvalContext) -> latsum::Result<Complex64>;
        let fns: [(&str, F); 5] = [
            ("gamma", |z, _| gamma(z)),
            ("zeta", zeta),
            ("dirichlet_beta", dirichlet_beta),
            ("xi1", xi1),
            ("xi_beta", xi_beta),
        ];
        for (name, f) in fns {
            let (Ok(up), Ok(down)) = (f(z, &ctx), f(z.conj(), &ctx)) else { continue };
            prop_assert!(rel(down, up.conj()) < 1e-12, "{name} at {z}: {up} vs {down}");
        }
    }
}

proptest! {
    #![proptest_config(config(400))]

    #[test]
    fn gamma_reflection(sigma in -2.0f64..3.0, t in 0.1f64..20.0) {
        let z = c(sigma, t);
        let lhs = gamma(z).unwrap() * gamma(c(1.0, 0.0) - z).unwrap();
        let rhs = PI / (z * PI).sin();
        prop_assert!(rel(lhs, rhs) < 1e-11);
    }

    #[test]
    fn gamma_duplication(sigma in 0.1f64..3.0, t in 0.0f64..50.0) {
        let z = c(sigma, t);
        let lhs = ln_gamma(z).unwrap() + ln_gamma(z + 0.5).unwrap();
        let rhs = (1.0 - 2.0 * z) * 2f64.ln() + 0.5 * PI.ln() + ln_gamma(2.0 * z).unwrap();
        let d = lhs - rhs;
        let wrapped = (d.im / (2.0 * PI)).round() * 2.0 * PI;
        prop_assert!(d.re.abs() < 1e-11 * (1.0 + lhs.norm()));
        prop_assert!((d.im - wrapped).abs() < 1e-11 * (1.0 + lhs.norm()));
    }

    #[test]
    fn xi_functions_are_symmetric(sigma in -2.0f64..3.0, t in 0.5f64..50.0) {
        let ctx = EvalContext::default();
        let z = c(sigma, t);
        let w = c(1.0, 0.0) - z;
        prop_assert!(rel(xi1(w, &ctx).unwrap(), xi1(z, &ctx).unwrap()) < 1e-10);
        prop_assert!(rel(xi_beta(w, &ctx).unwrap(), xi_beta(z, &ctx).unwrap()) < 1e-10);
    }

    #[test]
    fn zeta_functional_equation(sigma in -2.0f64..3.0, t in 0.5f64..50.0) {
        let ctx = EvalContext::default();
        let z = c(sigma, t);
        let w = c(1.0, 0.0) - z;
        // ζ(z) = 2^z π^{z-1} sin(πz/2) Γ(1-z) ζ(1-z)
        let chi = (z * 2f64.ln() + (z - 1.0) * PI.ln() + ln_gamma(w).unwrap()).exp() * (z * PI / 2.0).sin();
        prop_assert!(rel(zeta(z, &ctx).unwrap(), chi * zeta(w, &ctx).unwrap()) < 1e-9);
    }

    #[test]
    fn zeta_and_beta_from_hurwitz(sigma in 0.5f64..3.0, t in 0.5f64..50.0) {
        let ctx = EvalContext::default();
        let z = c(sigma, t);
        // ζ(z, 1/2) = (2^z - 1) ζ(z)
        let half = hurwitz_zeta(z, 0.5, &ctx).unwrap();
        let two_z = (z * 2f64.ln()).exp();
        prop_assert!(rel((two_z - 1.0) * zeta(z, &ctx).unwrap(), half) < 1e-10);
        // 4^z L₋₄(z) = ζ(z, 1/4) - ζ(z, 3/4)
        let diff = hurwitz_zeta(z, 0.25, &ctx).unwrap() - hurwitz_zeta(z, 0.75, &ctx).unwrap();
        prop_assert!(rel(two_z * two_z * dirichlet_beta(z, &ctx).unwrap(), diff) < 1e-10);
    }

    #[test]
    fn bessel_half_integer_orders(x in 0.05f64..40.0) {
        let ctx = EvalContext::default();
        let half = (PI / (2.0 * x)).sqrt() * (-x).exp();
        let k12 = bessel_k(c(0.5, 0.0), x, &ctx).unwrap().value;
        let k32 = bessel_k(c(1.5, 0.0), x, &ctx).unwrap().value;
        prop_assert!(rel(k12, c(half, 0.0)) < 1e-12);
        prop_assert!(rel(k32, c(half * (1.0 + 1.0 / x), 0.0)) < 1e-12);
    }

    #[test]
    fn bessel_order_recurrence(nu_re in -3.0f64..3.0, nu_im in -30.0f64..30.0, x in 0.2f64..20.0) {
        let ctx = EvalContext::default();
        let nu = c(nu_re, nu_im);
        let k = |o: Complex64| bessel_k(o, x, &ctx).unwrap();
        let (lo, mid, hi) = (k(nu - 1.0), k(nu), k(nu + 1.0));
        prop_assume!(!lo.underflow && !mid.underflow && !hi.underflow);
        // K_{ν+1} = K_{ν-1} + (2ν/x) K_ν
        let rhs = lo.value + nu * 2.0 / x * mid.value;
        let scale = hi.value.norm().max(lo.value.norm()).max((nu * 2.0 / x * mid.value).norm());
        prop_assert!((hi.value - rhs).norm() < 1e-9 * scale);
    }

    #[test]
    fn bessel_is_even_in_the_order(nu_re in -3.0f64..3.0, nu_im in -30.0f64..30.0, x in 0.2f64..20.0) {
        let ctx = EvalContext::default();
        let a = bessel_k(c(nu_re, nu_im), x, &ctx).unwrap();
        let b = bessel_k(c(-nu_re, -nu_im), x, &ctx).unwrap();
        prop_assume!(!a.underflow);
        prop_assert!(rel(b.value, a.value) < 1e-12);
    }

    #[test]
    fn bessel_error_estimate_bounds_refinement(nu_re in -3.0f64..3.0, nu_im in -30.0f64..30.0, x in 0.2f64..20.0) {
        let ctx = EvalContext::default();
        let nu = c(nu_re, nu_im);
        let coarse = bessel_k(nu, x, &ctx).unwrap();
        let fine = bessel_k(nu, x, &ctx.refined()).unwrap();
        prop_assume!(!coarse.underflow);
        prop_assert!((coarse.value - fine.value).norm() <= coarse.err + fine.err + 1e-15 * fine.value.norm());
    }

    #[test]
    fn hurwitz_error_estimate_bounds_refinement(sigma in 0.5f64..3.0, t in 0.0f64..100.0, a in 0.1f64..3.0) {
        let ctx = EvalContext::default();
        let z = c(sigma, t);
        prop_assume!((z - 1.0).norm() > 1e-3);
        let coarse = hurwitz_zeta_est(z, a, &ctx).unwrap();
        let fine = hurwitz_zeta_est(z, a, &ctx.refined()).unwrap();
        prop_assert!((coarse.value - fine.value).norm() <= coarse.err + fine.err + 1e-14 * fine.value.norm());
    }
}

#[test]
fn zeta_and_beta_special_values() {
    let ctx = EvalContext::default();
    let catalan = 0.915_965_594_177_219;
    assert!((zeta(c(2.0, 0.0), &ctx).unwrap().re - PI * PI / 6.0).abs() < 1e-14);
    assert!((zeta(c(-1.0, 0.0), &ctx).unwrap().re + 1.0 / 12.0).abs() < 1e-14);
    assert!((zeta(c(0.0, 0.0), &ctx).unwrap().re + 0.5).abs() < 1e-14);
    assert!((dirichlet_beta(c(2.0, 0.0), &ctx).unwrap().re - catalan).abs() < 1e-14);
    assert!((dirichlet_beta(c(1.0, 0.0), &ctx).unwrap().re - PI / 4.0).abs() < 1e-14);
    assert!((dirichlet_beta(c(0.0, 0.0), &ctx).unwrap().re - 0.5).abs() < 1e-14);
    assert!(zeta(c(0.5, 14.134_725_141_734_693), &ctx).unwrap().norm() < 1e-12);
    assert!(dirichlet_beta(c(0.5, 6.020_948_904_697_597), &ctx).unwrap().norm() < 1e-12);
}
