//! Brute-force evaluation of S₀(s; λ) = Σ' (p₁² + λ²p₂²)^{-s} in its region of
//! absolute convergence. Used as an independent check on the Kober form.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::LatticeParams;
use crate::context::EvalContext;
use crate::error::{Error, Result};
use crate::specfun::gamma::ln_gamma;
use crate::specfun::{hurwitz_zeta, zeta};

/// Σ_{p≥1} (p² + c²)^{-s}: explicit terms up to M, then the binomial
/// expansion (p² + c²)^{-s} = Σ_j C(-s, j) c^{2j} p^{-2s-2j}, summed in
/// closed form through Hurwitz zeta values at M + 1.
fn row_sum(s: Complex64, c: f64, ctx: &EvalContext) -> Result<Complex64> {
    let m = (2.0 * c).ceil() as usize + 20;
    let c2 = c * c;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 1..=m {
        acc += (-s * (p as f64 * p as f64 + c2).ln()).exp();
    }
    let a = (m + 1) as f64;
    let mut binom = Complex64::new(1.0, 0.0);
    let mut cpow = 1.0;
    for j in 0..400 {
        let term = binom * cpow * hurwitz_zeta(s * 2.0 + 2.0 * j as f64, a, ctx)?;
        acc += term;
        if term.norm() <= ctx.target_rel_err * 1e-2 * acc.norm() {
            return Ok(acc);
        }
        binom *= (-s - j as f64) / (j as f64 + 1.0);
        cpow *= c2;
    }
    Err(Error::NotConvergent(format!("row tail of S₀ at s = {s}, c = {c}")))
}

/// Brute-force S₀(s; λ) for Re s > 1.
///
/// The two axes are 2ζ(2s)(1 + λ^{-2s}). The open quadrant is summed row by
/// row (fixed p₂) for p₂ ≤ P; beyond that each row equals its integral
/// √π Γ(s-1/2) c^{1-2s} / (2Γ(s)) minus c^{-2s}/2 up to O(e^{-2πc}),
/// c = λp₂, and the remaining rows are summed in closed form.
pub fn s0_direct(s: Complex64, params: LatticeParams, ctx: &EvalContext) -> Result<Complex64> {
    if s.re <= 1.0 {
        return Err(Error::NotConvergent(format!("the lattice sum diverges at Re s = {} ≤ 1", s.re)));
    }
    let lambda = params.lambda;
    let ll = lambda.ln();
    let axes = zeta(s * 2.0, ctx)? * 2.0 * (1.0 + (-s * 2.0 * ll).exp());

    // rows with 2πλp₂ below this are summed explicitly
    let cutoff = 16.0 + (1.0 / ctx.target_rel_err).ln();
    let rows = (cutoff / (2.0 * PI * lambda)).ceil() as usize;
    if rows > ctx.max_terms {
        return Err(Error::NotConvergent(format!("λ = {lambda} needs {rows} explicit rows")));
    }
    let mut quadrant = Complex64::new(0.0, 0.0);
    for p2 in 1..=rows {
        quadrant += row_sum(s, lambda * p2 as f64, ctx)?;
    }
    let a = (rows + 1) as f64;
    let half_gamma = (ln_gamma(s - 0.5)? - ln_gamma(s)?).exp() * (PI.sqrt() / 2.0);
    let far = half_gamma * ((1.0 - s * 2.0) * ll).exp() * hurwitz_zeta(s * 2.0 - 1.0, a, ctx)?
        - (-s * 2.0 * ll).exp() * hurwitz_zeta(s * 2.0, a, ctx)? * 0.5;
    Ok(axes + (quadrant + far) * 4.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn square_at_two() {
        let v = s0_direct(c(2.0, 0.0), LatticeParams::square(), &EvalContext::default()).unwrap();
        assert!((v.re - 6.0268120396).abs() < 1e-9, "{v}");
    }

    #[test]
    fn plain_truncation_agrees_at_large_sigma() {
        // at s = 4 a naive box sum over |p| ≤ 60 has tail below 1e-11
        let s = c(4.0, 1.5);
        let lambda = 1.3;
        let mut naive = c(0.0, 0.0);
        for p1 in -60i64..=60 {
            for p2 in -60i64..=60 {
                if p1 == 0 && p2 == 0 {
                    continue;
                }
                let q = (p1 * p1) as f64 + lambda * lambda * (p2 * p2) as f64;
                naive += (-s * q.ln()).exp();
            }
        }
        let v = s0_direct(s, LatticeParams::new(lambda).unwrap(), &EvalContext::default()).unwrap();
        assert!((v - naive).norm() < 1e-10 * v.norm());
    }

    #[test]
    fn ratio_symmetry() {
        // λ^s S₀(s; λ) = λ^{-s} S₀(s; 1/λ)
        let ctx = EvalContext::default();
        let s = c(3.0, 0.0);
        let a = s0_direct(s, LatticeParams::new(2.0).unwrap(), &ctx).unwrap() * 8.0;
        let b = s0_direct(s, LatticeParams::new(0.5).unwrap(), &ctx).unwrap() / 8.0;
        assert!((a - b).norm() < 1e-10 * a.norm());
    }

    #[test]
    fn rejects_divergent_region() {
        assert!(s0_direct(c(1.0, 3.0), LatticeParams::square(), &EvalContext::default()).is_err());
    }
}
