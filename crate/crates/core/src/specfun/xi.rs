//! Completed zeta functions ξ₁(z) = π^{-z/2} Γ(z/2) ζ(z) and
//! ξ_β(z) = (π/4)^{-(z+1)/2} Γ((z+1)/2) L₋₄(z), kept in factored form so that
//! values at large heights can be rescaled before exponentiation.

use num_complex::Complex64;

use super::gamma::{ln_gamma, LN_PI};
use super::zeta::{dirichlet_beta, ln_beta_completion, zeta};
use crate::context::EvalContext;
use crate::error::{Error, Result};

/// `exp(ln_factor) * core`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Factored {
    pub ln_factor: Complex64,
    pub core: Complex64,
}

impl Factored {
    pub fn value(&self) -> Complex64 {
        self.ln_factor.exp() * self.core
    }

    /// The value divided by `exp(ln_scale)`.
    pub fn scaled(&self, ln_scale: f64) -> Complex64 {
        (self.ln_factor - ln_scale).exp() * self.core
    }
}

/// ξ₁(z), using ξ₁(z) = ξ₁(1 - z) for Re z < 1/2. Poles at z = 0 and z = 1.
pub fn xi1_factored(z: Complex64, ctx: &EvalContext) -> Result<Factored> {
    let w = if z.re < 0.5 { Complex64::new(1.0, 0.0) - z } else { z };
    if w == Complex64::new(1.0, 0.0) {
        return Err(Error::PoleAt(z));
    }
    let ln_factor = -w * 0.5 * LN_PI + ln_gamma(w * 0.5)?;
    Ok(Factored { ln_factor, core: zeta(w, ctx)? })
}

pub fn xi1(z: Complex64, ctx: &EvalContext) -> Result<Complex64> {
    Ok(xi1_factored(z, ctx)?.value())
}

/// ξ_β(z), entire, with ξ_β(z) = ξ_β(1 - z).
pub fn xi_beta_factored(z: Complex64, ctx: &EvalContext) -> Result<Factored> {
    let w = if z.re < 0.5 { Complex64::new(1.0, 0.0) - z } else { z };
    Ok(Factored { ln_factor: ln_beta_completion(w)?, core: dirichlet_beta(w, ctx)? })
}

pub fn xi_beta(z: Complex64, ctx: &EvalContext) -> Result<Complex64> {
    Ok(xi_beta_factored(z, ctx)?.value())
}
