//! Real-valued functions of t whose sign changes bracket the critical-line
//! zeros of each family. Each is exactly real (or exactly imaginary, then
//! rotated) on σ = 1/2, so a sign change is a zero up to evaluation error.

use num_complex::Complex64;

use crate::context::EvalContext;
use crate::error::{Error, Result};
use crate::function::FunctionId;
use crate::lattice::SquarePoint;
use crate::specfun::gamma::{ln_gamma, LN_PI};
use crate::specfun::xi1_factored;
use crate::specfun::zeta::ln_beta_completion;
use crate::specfun::{dirichlet_beta, zeta};

/// Families with surrogates, in the order used by [`surrogates_from_point`].
pub const SURROGATE_FAMILIES: [FunctionId; 9] = [
    FunctionId::S0Tilde,
    FunctionId::TPlus,
    FunctionId::TMinus,
    FunctionId::L,
    FunctionId::LMinus,
    FunctionId::K,
    FunctionId::KLambda,
    FunctionId::Zeta,
    FunctionId::L4,
];

pub fn surrogate_index(id: FunctionId) -> Result<usize> {
    SURROGATE_FAMILIES
        .iter()
        .position(|&f| f == id)
        .ok_or_else(|| Error::InvalidInput(format!("{id} has no real surrogate on the critical line")))
}

/// ζ(1/2+it) rotated by the argument of its completing factor, i.e.
/// ξ₁(1/2+it) divided by the modulus of π^{-s/2}Γ(s/2).
pub(crate) fn zeta_rotation(s: Complex64) -> Result<Complex64> {
    let lf = ln_gamma(s * 0.5)? - s * 0.5 * LN_PI;
    Ok(Complex64::from_polar(1.0, lf.im))
}

pub(crate) fn beta_rotation(s: Complex64) -> Result<Complex64> {
    Ok(Complex64::from_polar(1.0, ln_beta_completion(s)?.im))
}

/// All nine surrogates at a line point.
pub fn surrogates_from_point(p: &SquarePoint) -> Result<[f64; 9]> {
    let s = p.s;
    Ok([
        p.s0_tilde.re,
        p.t_plus().re,
        p.t_minus().im,
        p.l().re,
        p.l_minus().im,
        p.k00().re,
        p.k00_lambda().re,
        (zeta_rotation(s)? * p.zeta_w).re,
        (beta_rotation(s)? * p.beta_w).re,
    ])
}

/// Surrogate of one family at t, computing only the factors it needs.
pub fn real_surrogate(id: FunctionId, t: f64, ctx: &EvalContext) -> Result<f64> {
    ctx.check_t(t)?;
    surrogate_unchecked(id, t, ctx)
}

pub(crate) fn surrogate_unchecked(id: FunctionId, t: f64, ctx: &EvalContext) -> Result<f64> {
    let s = Complex64::new(0.5, t);
    match id {
        FunctionId::Zeta => Ok((zeta_rotation(s)? * zeta(s, ctx)?).re),
        FunctionId::L4 => Ok((beta_rotation(s)? * dirichlet_beta(s, ctx)?).re),
        FunctionId::TPlus | FunctionId::TMinus | FunctionId::L | FunctionId::LMinus => {
            // only ξ₁(2s) is needed: on the line ξ₁(2s-1) = conj ξ₁(2s)
            let f = xi1_factored(s * 2.0, ctx)?;
            let a = f.scaled(f.ln_factor.re);
            let b = a.conj();
            Ok(match id {
                FunctionId::TPlus => ((a + b) * 0.25).re,
                FunctionId::TMinus => ((a - b) * 0.25).im,
                FunctionId::L => (s * a + (1.0 - s) * b).re,
                _ => (s * a - (1.0 - s) * b).im,
            })
        }
        FunctionId::S0Tilde | FunctionId::K | FunctionId::KLambda => {
            let p = SquarePoint::new(s, ctx)?;
            Ok(surrogates_from_point(&p)?[surrogate_index(id)?])
        }
        other => Err(Error::InvalidInput(format!("{other} has no real surrogate on the critical line"))),
    }
}
