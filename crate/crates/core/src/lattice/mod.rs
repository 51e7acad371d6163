//! The rectangular lattice sum S₀(s; λ) and its derived function family.

pub mod direct;
pub mod identities;
pub mod kober;
pub mod macdonald;
pub mod square;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::gamma::{is_nonpositive_integer, ln_gamma};

pub use direct::s0_direct;
pub use identities::{identity_residual, identity_residuals, IdentityResidual, IDENTITY_NAMES};
pub use kober::{s0_kober, s0_symmetrised, t_minus, t_plus};
pub use macdonald::{mac_k, mac_k_est};
pub use square::{k00, k00_lambda, l_func, l_minus, s0_tilde, SquarePoint};

/// Period ratio of the rectangular lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeParams {
    pub lambda: f64,
}

impl LatticeParams {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidInput(format!("lattice ratio must be positive, got {lambda}")));
        }
        Ok(Self { lambda })
    }

    pub fn square() -> Self {
        Self { lambda: 1.0 }
    }
}

/// Indices (n, m) of the MacDonald double sum 𝒦(n, m; s; λ).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MacIndices {
    pub n: u32,
    pub m: i32,
}

impl MacIndices {
    pub fn new(n: u32, m: i32) -> Self {
        Self { n, m }
    }
}

/// 1/Γ(z), entire.
pub(crate) fn rgamma(z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(z) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok((-ln_gamma(z)?).exp())
}
