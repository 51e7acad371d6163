//! The square-lattice (λ = 1) family, built from ξ₁(2s), ξ₁(2s-1) and
//! S̃₀(s) = Γ(s) π^{-s} ζ(s) L₋₄(s) / 2.
//!
//! Along the critical line every member carries the factor |Γ(s)π^{-s}|, which
//! underflows near t ≈ 450. A [`SquarePoint`] therefore stores its values
//! divided by that positive real scale; ratios, signs, and arguments are
//! unaffected.

use num_complex::Complex64;

use crate::context::EvalContext;
use crate::error::{Error, Result};
use crate::specfun::gamma::{ln_gamma, LN_PI};
use crate::specfun::{dirichlet_beta, xi1_factored, zeta};

/// Relative size of 𝒦(0,0) below which the evaluation is repeated with a
/// refined context.
const CANCELLATION_GUARD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquarePoint {
    pub s: Complex64,
    /// Stored values equal true values times exp(-ln_scale).
    pub ln_scale: f64,
    /// ξ₁(2s)
    pub xi_2s: Complex64,
    /// ξ₁(2s - 1)
    pub xi_2s_1: Complex64,
    pub s0_tilde: Complex64,
    /// ζ(w) and L₋₄(w) at w = s, or w = 1 - s when Re s < 1/2 (unscaled).
    pub zeta_w: Complex64,
    pub beta_w: Complex64,
}

/// log of Γ(w)π^{-w}/2 and the factors ζ(w), L₋₄(w), with w the reflection
/// of s into Re w ≥ 1/2.
fn s0_tilde_parts(s: Complex64, ctx: &EvalContext) -> Result<(Complex64, Complex64, Complex64)> {
    let w = if s.re < 0.5 { Complex64::new(1.0, 0.0) - s } else { s };
    if w == Complex64::new(1.0, 0.0) {
        return Err(Error::PoleAt(s));
    }
    let ln_factor = ln_gamma(w)? - w * LN_PI - 2f64.ln();
    Ok((ln_factor, zeta(w, ctx)?, dirichlet_beta(w, ctx)?))
}

impl SquarePoint {
    pub fn new(s: Complex64, ctx: &EvalContext) -> Result<Self> {
        for p in [0.0, 0.5, 1.0] {
            if s == Complex64::new(p, 0.0) {
                return Err(Error::PoleAt(s));
            }
        }
        let ln_scale = (ln_gamma(s)? - s * LN_PI).re;
        let xi_2s = xi1_factored(s * 2.0, ctx)?.scaled(ln_scale);
        let xi_2s_1 = xi1_factored(s * 2.0 - 1.0, ctx)?.scaled(ln_scale);
        let (lf, zeta_w, beta_w) = s0_tilde_parts(s, ctx)?;
        let s0_tilde = (lf - ln_scale).exp() * zeta_w * beta_w;
        Ok(Self { s, ln_scale, xi_2s, xi_2s_1, s0_tilde, zeta_w, beta_w })
    }

    /// Undo the scaling of a stored value.
    pub fn unscale(&self, v: Complex64) -> Complex64 {
        v * self.ln_scale.exp()
    }

    pub fn t_plus(&self) -> Complex64 {
        (self.xi_2s + self.xi_2s_1) * 0.25
    }

    pub fn t_minus(&self) -> Complex64 {
        (self.xi_2s - self.xi_2s_1) * 0.25
    }

    /// 𝒦(0,0;s) = S̃₀ - 𝒯₊.
    pub fn k00(&self) -> Complex64 {
        self.s0_tilde - self.t_plus()
    }

    /// 𝒦_λ(0,0;s) = -S̃₀/2 - (s - 1/2)𝒯₋.
    pub fn k00_lambda(&self) -> Complex64 {
        -self.s0_tilde * 0.5 - (self.s - 0.5) * self.t_minus()
    }

    /// ℒ(s) = s ξ₁(2s) + (1 - s) ξ₁(2s - 1).
    pub fn l(&self) -> Complex64 {
        self.s * self.xi_2s + (1.0 - self.s) * self.xi_2s_1
    }

    /// ℒ₋(s) = s ξ₁(2s) - (1 - s) ξ₁(2s - 1).
    pub fn l_minus(&self) -> Complex64 {
        self.s * self.xi_2s - (1.0 - self.s) * self.xi_2s_1
    }

    /// 𝒦(1,1;s) = s S̃₀/2 - (s - 1/2) ξ₁(2s - 1)/4.
    pub fn k11(&self) -> Complex64 {
        self.s * self.s0_tilde * 0.5 - (self.s - 0.5) * self.xi_2s_1 * 0.25
    }

    /// 𝒦(1,1;1-s) = (1 - s) S̃₀/2 + (s - 1/2) ξ₁(2s)/4.
    pub fn k11_reflected(&self) -> Complex64 {
        (1.0 - self.s) * self.s0_tilde * 0.5 + (self.s - 0.5) * self.xi_2s * 0.25
    }
}

fn point_checked(s: Complex64, ctx: &EvalContext) -> Result<SquarePoint> {
    let p = SquarePoint::new(s, ctx)?;
    if p.k00().norm() < CANCELLATION_GUARD * p.s0_tilde.norm() {
        return SquarePoint::new(s, &ctx.refined());
    }
    Ok(p)
}

/// S̃₀(s) = Γ(s) S₀(s; 1) / (8π^s), from the product 4ζ(s)L₋₄(s).
pub fn s0_tilde(s: Complex64, ctx: &EvalContext) -> Result<Complex64> {
    let (lf, z, b) = s0_tilde_parts(s, ctx)?;
    Ok(lf.exp() * z * b)
}

/// 𝒦(0,0;s;1).
pub fn k00(s: Complex64, ctx: &EvalContext) -> Result<Complex64> {
    let p = point_checked(s, ctx)?;
    Ok(p.unscale(p.k00()))
}

/// ∂𝒦(0,0;s;λ)/∂λ at λ = 1.
pub fn k00_lambda(s: Complex64, ctx: &EvalContext) -> Result<Complex64> {
    let p = point_checked(s, ctx)?;
    Ok(p.unscale(p.k00_lambda()))
}

pub fn l_func(s: Complex64, ctx: &EvalContext) -> Result<Complex64> {
    let p = SquarePoint::new(s, ctx)?;
    Ok(p.unscale(p.l()))
}

pub fn l_minus(s: Complex64, ctx: &EvalContext) -> Result<Complex64> {
    let p = SquarePoint::new(s, ctx)?;
    Ok(p.unscale(p.l_minus()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{mac_k, s0_direct, t_minus, t_plus, LatticeParams, MacIndices};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ctx() -> EvalContext {
        EvalContext::default()
    }

    #[test]
    fn s0_tilde_at_two() {
        let direct = s0_direct(c(2.0, 0.0), LatticeParams::square(), &ctx()).unwrap();
        let expect = direct / (8.0 * std::f64::consts::PI.powi(2));
        let v = s0_tilde(c(2.0, 0.0), &ctx()).unwrap();
        assert!((v - expect).norm() < 1e-12 * v.norm());
        assert!((v.re - 0.0763304662).abs() < 1e-9);
    }

    #[test]
    fn s0_tilde_symmetric_and_real_on_line() {
        let s = c(0.8, 17.0);
        let a = s0_tilde(s, &ctx()).unwrap();
        let b = s0_tilde(c(1.0, 0.0) - s, &ctx()).unwrap();
        assert!((a - b).norm() < 1e-12 * a.norm());
        let on = s0_tilde(c(0.5, 17.0), &ctx()).unwrap();
        assert!(on.im.abs() < 1e-12 * on.norm());
    }

    #[test]
    fn k00_matches_macdonald_sum() {
        let s = c(0.3, 2.0);
        let a = k00(s, &ctx()).unwrap();
        let b = mac_k(MacIndices::new(0, 0), s, LatticeParams::square(), &ctx()).unwrap();
        assert!((a - b).norm() < 1e-10 * b.norm(), "{a} {b}");
    }

    #[test]
    fn k00_lambda_matches_derivative_sum() {
        // 𝒦_λ = -[𝒦(1,1) + 𝒦(1,-1)]
        let s = c(0.3, 2.0);
        let p = LatticeParams::square();
        let d = -(mac_k(MacIndices::new(1, 1), s, p, &ctx()).unwrap() + mac_k(MacIndices::new(1, -1), s, p, &ctx()).unwrap());
        let a = k00_lambda(s, &ctx()).unwrap();
        assert!((a - d).norm() < 1e-10 * d.norm(), "{a} {d}");
    }

    #[test]
    fn l_identities() {
        let s = c(0.5, 13.0);
        let p = SquarePoint::new(s, &ctx()).unwrap();
        assert!((p.l() + p.k00() * 2.0 + p.k00_lambda() * 4.0).norm() < 1e-12 * p.l().norm());
        // ℒ₋ = -4 ∂𝒯₋/∂λ works out to +2[𝒯₋ + (2s-1)𝒯₊]
        let lm = p.l_minus() - (p.t_minus() + (s * 2.0 - 1.0) * p.t_plus()) * 2.0;
        assert!(lm.norm() < 1e-12 * p.l_minus().norm());
        assert!(p.l().im.abs() < 1e-12 * p.l().norm());
        assert!(p.l_minus().re.abs() < 1e-12 * p.l_minus().norm());
    }

    #[test]
    fn scaled_family_agrees_with_general_lambda_forms() {
        let s = c(0.7, 6.0);
        let p = SquarePoint::new(s, &ctx()).unwrap();
        let tp = t_plus(s, LatticeParams::square(), &ctx()).unwrap();
        let tm = t_minus(s, LatticeParams::square(), &ctx()).unwrap();
        assert!((p.unscale(p.t_plus()) - tp).norm() < 1e-12 * tp.norm());
        assert!((p.unscale(p.t_minus()) - tm).norm() < 1e-12 * tm.norm());
    }

    #[test]
    fn high_on_the_line_stays_finite() {
        let p = SquarePoint::new(c(0.5, 1400.0), &ctx()).unwrap();
        assert!(p.xi_2s.norm() > 1e-6 && p.xi_2s.norm().is_finite());
        assert!((p.xi_2s.norm() - p.xi_2s_1.norm()).abs() < 1e-10 * p.xi_2s.norm());
    }
}
