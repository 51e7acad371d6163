//! S₀(s; λ) through its Kober representation, valid for every s, and the
//! ξ₁ combinations 𝒯±(s; λ).

use std::f64::consts::PI;

use num_complex::Complex64;

use super::macdonald::mac_k;
use super::{rgamma, LatticeParams, MacIndices};
use crate::context::EvalContext;
use crate::error::{Error, Result};
use crate::specfun::gamma::{ln_gamma, LN_PI};
use crate::specfun::{xi1, zeta};

/// Distance from s = 1/2 inside which the two singular Kober terms are
/// reported as a near pole rather than summed.
const NEAR_HALF: f64 = 1e-6;

fn check_t_poles(s: Complex64) -> Result<()> {
    for p in [0.0, 0.5, 1.0] {
        if s == Complex64::new(p, 0.0) {
            return Err(Error::PoleAt(s));
        }
    }
    Ok(())
}

/// ξ₁(2s) λ^{-s} and ξ₁(2s-1) λ^{s-1}.
fn xi_pair(s: Complex64, lambda: f64, ctx: &EvalContext) -> Result<(Complex64, Complex64)> {
    check_t_poles(s)?;
    let ll = lambda.ln();
    let a = xi1(s * 2.0, ctx)? * (-s * ll).exp();
    let b = xi1(s * 2.0 - 1.0, ctx)? * ((s - 1.0) * ll).exp();
    Ok((a, b))
}

/// 𝒯₊(s; λ) = [ξ₁(2s)/λ^s + ξ₁(2s-1)/λ^{1-s}] / 4.
pub fn t_plus(s: Complex64, params: LatticeParams, ctx: &EvalContext) -> Result<Complex64> {
    let (a, b) = xi_pair(s, params.lambda, ctx)?;
    Ok((a + b) * 0.25)
}

/// 𝒯₋(s; λ) = [ξ₁(2s)/λ^s - ξ₁(2s-1)/λ^{1-s}] / 4.
pub fn t_minus(s: Complex64, params: LatticeParams, ctx: &EvalContext) -> Result<Complex64> {
    let (a, b) = xi_pair(s, params.lambda, ctx)?;
    Ok((a - b) * 0.25)
}

/// S₀(s; μ) with the MacDonald sum taken at 1/μ. Converges for every μ > 0,
/// fastest for μ ≤ 1.
fn kober_small_ratio(s: Complex64, mu: f64, ctx: &EvalContext) -> Result<Complex64> {
    let lm = mu.ln();
    let first = zeta(s * 2.0, ctx)? * 2.0 * (-s * 2.0 * lm).exp();
    let rg = rgamma(s)?;
    let second = if rg == Complex64::new(0.0, 0.0) {
        Complex64::new(0.0, 0.0)
    } else {
        // 2√π Γ(s-1/2) ζ(2s-1) / (Γ(s) μ)
        let ratio = (ln_gamma(s - 0.5)? - ln_gamma(s)?).exp();
        ratio * zeta(s * 2.0 - 1.0, ctx)? * (2.0 * PI.sqrt() / mu)
    };
    let k = mac_k(MacIndices::new(0, 0), s, LatticeParams { lambda: 1.0 / mu }, ctx)?;
    let pref = (s * LN_PI - (s + 0.5) * lm).exp() * rg * 8.0;
    Ok(first + second + pref * k)
}

/// S₀(s; λ) = 2ζ(2s)/λ^{2s} + 2√π Γ(s-1/2)ζ(2s-1)/(Γ(s)λ) + 8π^s/(Γ(s)λ^{s+1/2}) 𝒦(0,0;s;1/λ).
/// For λ > 1 the sum is evaluated at 1/λ and mapped back with
/// S₀(s; λ) = λ^{-2s} S₀(s; 1/λ), so the MacDonald sum always runs at ratio ≥ 1.
pub fn s0_kober(s: Complex64, params: LatticeParams, ctx: &EvalContext) -> Result<Complex64> {
    check_kober_poles(s)?;
    let lambda = params.lambda;
    if lambda <= 1.0 {
        kober_small_ratio(s, lambda, ctx)
    } else {
        Ok(kober_small_ratio(s, 1.0 / lambda, ctx)? * (-s * 2.0 * lambda.ln()).exp())
    }
}

fn check_kober_poles(s: Complex64) -> Result<()> {
    if s == Complex64::new(1.0, 0.0) || s == Complex64::new(0.5, 0.0) {
        return Err(Error::PoleAt(s));
    }
    let dist = (s - 0.5).norm();
    if dist < NEAR_HALF {
        return Err(Error::NearPole { pole: Complex64::new(0.5, 0.0), distance: dist });
    }
    Ok(())
}

/// S₀(s; λ) from the Kober form at λ itself, without the λ → 1/λ mapping
/// used by [`s0_kober`]. Slower for λ > 1; used where that mapping is the
/// property under test.
pub(crate) fn s0_kober_unmapped(s: Complex64, lambda: f64, ctx: &EvalContext) -> Result<Complex64> {
    check_kober_poles(s)?;
    kober_small_ratio(s, lambda, ctx)
}

/// λ^s Γ(s) S₀(s; λ) / (8π^s), the quantity invariant under λ → 1/λ and s → 1 - s.
pub fn s0_symmetrised(s: Complex64, params: LatticeParams, ctx: &EvalContext) -> Result<Complex64> {
    let s0 = s0_kober(s, params, ctx)?;
    let lf = s * params.lambda.ln() + ln_gamma(s)? - s * LN_PI;
    Ok(lf.exp() * s0 / 8.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::dirichlet_beta;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn square_lattice_product_form() {
        let ctx = EvalContext::default();
        for s in [c(2.0, 0.0), c(0.3, 4.0), c(-0.7, 11.0), c(1.5, 40.0)] {
            let k = s0_kober(s, LatticeParams::square(), &ctx).unwrap();
            let p = zeta(s, &ctx).unwrap() * dirichlet_beta(s, &ctx).unwrap() * 4.0;
            assert!((k - p).norm() < 1e-10 * p.norm(), "s={s} {k} {p}");
        }
        let v = s0_kober(c(2.0, 0.0), LatticeParams::square(), &ctx).unwrap();
        assert!((v.re - 6.0268120396).abs() < 1e-9);
    }

    /// λ^{s+1/2} Γ(s) S₀ / (8π^s) = ξ₁(2s)/(4λ^{s-1/2}) + λ^{s-1/2} ξ₁(2s-1)/4 + 𝒦(0,0;s;1/λ),
    /// which holds only with ξ₁(z) = π^{-z/2}Γ(z/2)ζ(z).
    #[test]
    fn xi_form_matches_zeta_form() {
        use rand::{Rng, SeedableRng};
        let ctx = EvalContext::default();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20);
        for _ in 0..20 {
            let s = c(rng.gen_range(-1.0..2.0), rng.gen_range(0.5..30.0));
            let lambda: f64 = rng.gen_range(0.5..2.0);
            let ll = lambda.ln();
            let lhs = ((s + 0.5) * ll + ln_gamma(s).unwrap() - s * LN_PI).exp() / 8.0
                * s0_kober(s, LatticeParams::new(lambda).unwrap(), &ctx).unwrap();
            let k = mac_k(MacIndices::new(0, 0), s, LatticeParams { lambda: 1.0 / lambda }, &ctx).unwrap();
            let rhs = xi1(s * 2.0, &ctx).unwrap() * (-(s - 0.5) * ll).exp() * 0.25
                + xi1(s * 2.0 - 1.0, &ctx).unwrap() * ((s - 0.5) * ll).exp() * 0.25
                + k;
            assert!((lhs - rhs).norm() < 1e-10 * rhs.norm(), "s = {s}, λ = {lambda}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn ratio_inversion() {
        let ctx = EvalContext::default();
        let s = c(0.6, 3.0);
        let a = s0_symmetrised(s, LatticeParams::new(1.7).unwrap(), &ctx).unwrap();
        let b = s0_symmetrised(s, LatticeParams::new(1.0 / 1.7).unwrap(), &ctx).unwrap();
        let r = s0_symmetrised(c(1.0, 0.0) - s, LatticeParams::new(1.7).unwrap(), &ctx).unwrap();
        assert!((a - b).norm() < 1e-11 * a.norm());
        assert!((a - r).norm() < 1e-11 * a.norm());
    }

    #[test]
    fn poles() {
        let ctx = EvalContext::default();
        let p = LatticeParams::square();
        assert!(matches!(s0_kober(c(1.0, 0.0), p, &ctx), Err(Error::PoleAt(_))));
        assert!(matches!(s0_kober(c(0.5 + 1e-8, 0.0), p, &ctx), Err(Error::NearPole { .. })));
        assert!(matches!(t_plus(c(0.0, 0.0), p, &ctx), Err(Error::PoleAt(_))));
        // S₀(0; λ) = -1
        let z = s0_kober(c(0.0, 0.0), LatticeParams::new(1.3).unwrap(), &ctx).unwrap();
        assert!((z.re + 1.0).abs() < 1e-13);
    }

    #[test]
    fn t_parities_on_square() {
        let ctx = EvalContext::default();
        let p = LatticeParams::square();
        let s = c(0.8, 9.0);
        let r = c(1.0, 0.0) - s;
        let tp = t_plus(s, p, &ctx).unwrap();
        let tm = t_minus(s, p, &ctx).unwrap();
        assert!((tp - t_plus(r, p, &ctx).unwrap()).norm() < 1e-12 * tp.norm());
        assert!((tm + t_minus(r, p, &ctx).unwrap()).norm() < 1e-12 * tm.norm());
        let line = c(0.5, 9.0);
        assert!(t_plus(line, p, &ctx).unwrap().im.abs() < 1e-12 * tp.norm());
        assert!(t_minus(line, p, &ctx).unwrap().re.abs() < 1e-12 * tm.norm());
    }
}
