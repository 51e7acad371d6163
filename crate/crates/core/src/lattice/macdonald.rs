//! MacDonald double sums 𝒦(n, m; s; λ) = πⁿ Σ_{p₁,p₂≥1} p₂^{s-1/2+n} p₁^{-(s-1/2-n)} K_{s-1/2+m}(2πp₁p₂λ).
//!
//! Terms are grouped by the product N = p₁p₂ so that each Bessel value is
//! computed once: the coefficient of K_ν(2πNλ) is Nⁿ Σ_{d|N} (d²/N)^{s-1/2}.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{LatticeParams, MacIndices};
use crate::context::EvalContext;
use crate::error::{Error, Result};
use crate::specfun::bessel_k;

/// Relative error above which [`mac_k`] refuses to return a value.
const ACCURACY_LIMIT: f64 = 1e-9;

fn divisor_coefficient(n_prod: u64, n: u32, a: Complex64) -> Complex64 {
    let nf = n_prod as f64;
    let ln_n = nf.ln();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut d = 1u64;
    while d * d <= n_prod {
        if n_prod.is_multiple_of(d) {
            let e = n_prod / d;
            acc += (a * (2.0 * (d as f64).ln() - ln_n)).exp();
            if e != d {
                acc += (a * (2.0 * (e as f64).ln() - ln_n)).exp();
            }
        }
        d += 1;
    }
    acc * nf.powi(n as i32)
}

/// 𝒦(n, m; s; λ) with an absolute error estimate.
pub fn mac_k_est(idx: MacIndices, s: Complex64, params: LatticeParams, ctx: &EvalContext) -> Result<(Complex64, f64)> {
    let lambda = params.lambda;
    let a = s - 0.5;
    let nu = a + idx.m as f64;
    let nu_abs = nu.norm();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut quiet = 0;
    let mut n_prod = 1u64;
    loop {
        let x = 2.0 * PI * n_prod as f64 * lambda;
        let k = bessel_k(nu, x, ctx)?;
        let coef = divisor_coefficient(n_prod, idx.n, a);
        let term = coef * k.value;
        sum += term;
        err += coef.norm() * k.err;
        if k.underflow {
            break;
        }
        if x > 1.3 * nu_abs && term.norm() <= ctx.target_rel_err * 1e-2 * sum.norm() {
            quiet += 1;
            if quiet >= 3 {
                err += term.norm();
                break;
            }
        } else {
            quiet = 0;
        }
        n_prod += 1;
        if n_prod as usize > ctx.max_terms {
            return Err(Error::NotConvergent(format!("𝒦({}, {}; {s}) exceeded {} terms", idx.n, idx.m, ctx.max_terms)));
        }
    }
    let scale = PI.powi(idx.n as i32);
    Ok((sum * scale, err * scale + 4.0 * f64::EPSILON * sum.norm() * scale))
}

/// 𝒦(n, m; s; λ). Fails with `AccuracyLoss` when cancellation inside the
/// Bessel quadratures leaves fewer than about nine significant digits; for
/// large |s| at λ = 1 use the closed forms in [`super::square`].
pub fn mac_k(idx: MacIndices, s: Complex64, params: LatticeParams, ctx: &EvalContext) -> Result<Complex64> {
    let (value, err) = mac_k_est(idx, s, params, ctx)?;
    if err > ACCURACY_LIMIT * value.norm() {
        return Err(Error::AccuracyLoss(format!(
            "𝒦({}, {}; {s}; {}) relative error {:.1e}",
            idx.n,
            idx.m,
            params.lambda,
            err / value.norm()
        )));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Plain double loop over (p₁, p₂), without grouping.
    fn brute(idx: MacIndices, s: Complex64, lambda: f64) -> Complex64 {
        let ctx = EvalContext::default();
        let a = s - 0.5;
        let mut acc = c(0.0, 0.0);
        for p1 in 1..40u32 {
            for p2 in 1..40u32 {
                let x = 2.0 * PI * (p1 * p2) as f64 * lambda;
                if x > 120.0 {
                    continue;
                }
                let k = bessel_k(a + idx.m as f64, x, &ctx).unwrap().value;
                let w = ((a + idx.n as f64) * (p2 as f64).ln() - (a - idx.n as f64) * (p1 as f64).ln()).exp();
                acc += w * k;
            }
        }
        acc * PI.powi(idx.n as i32)
    }

    #[test]
    fn grouping_matches_double_loop() {
        for &(n, m) in &[(0, 0), (1, 1), (1, -1), (2, 0)] {
            let idx = MacIndices::new(n, m);
            let s = c(0.3, 2.0);
            let p = LatticeParams::new(1.1).unwrap();
            let v = mac_k(idx, s, p, &EvalContext::default()).unwrap();
            let b = brute(idx, s, 1.1);
            assert!((v - b).norm() < 1e-12 * b.norm(), "({n},{m}) {v} {b}");
        }
    }

    #[test]
    fn reflection_in_m() {
        // 𝒦(n, -m; s) = 𝒦(n, m; 1 - s)
        let ctx = EvalContext::default();
        let p = LatticeParams::square();
        let s = c(0.2, 3.0);
        let a = mac_k(MacIndices::new(1, -1), s, p, &ctx).unwrap();
        let b = mac_k(MacIndices::new(1, 1), c(1.0, 0.0) - s, p, &ctx).unwrap();
        assert!((a - b).norm() < 1e-12 * a.norm());
    }

    #[test]
    fn real_at_half() {
        let v = mac_k(MacIndices::new(0, 0), c(0.5, 0.0), LatticeParams::square(), &EvalContext::default()).unwrap();
        assert!(v.im.abs() < 1e-15);
    }
}
