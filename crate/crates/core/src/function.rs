//! Identifiers for the function families and point evaluation by identifier.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::context::EvalContext;
use crate::error::{Error, Result};
use crate::lattice::{s0_kober, t_minus, t_plus, LatticeParams, SquarePoint};
use crate::specfun::{dirichlet_beta, zeta};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum FunctionId {
    S0,
    S0Tilde,
    K,
    KLambda,
    TPlus,
    TMinus,
    L,
    LMinus,
    /// ζ(s); its critical zeros are the ζ-factor zeros of S₀.
    Zeta,
    /// L₋₄(s); its critical zeros are the L₋₄-factor zeros of S₀.
    L4,
    U,
    V,
    UK,
    VK,
    F,
    G,
}

impl FunctionId {
    pub const ALL: [FunctionId; 16] = [
        Self::S0,
        Self::S0Tilde,
        Self::K,
        Self::KLambda,
        Self::TPlus,
        Self::TMinus,
        Self::L,
        Self::LMinus,
        Self::Zeta,
        Self::L4,
        Self::U,
        Self::V,
        Self::UK,
        Self::VK,
        Self::F,
        Self::G,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            Self::S0 => "S0",
            Self::S0Tilde => "S0t",
            Self::K => "K",
            Self::KLambda => "Kl",
            Self::TPlus => "T+",
            Self::TMinus => "T-",
            Self::L => "L",
            Self::LMinus => "L-",
            Self::Zeta => "zeta",
            Self::L4 => "L-4",
            Self::U => "U",
            Self::V => "V",
            Self::UK => "UK",
            Self::VK => "VK",
            Self::F => "F",
            Self::G => "G",
        }
    }

    /// Whether the function has a real-valued surrogate on the critical line
    /// usable for zero finding.
    pub fn has_surrogate(self) -> bool {
        matches!(
            self,
            Self::S0Tilde | Self::TPlus | Self::TMinus | Self::L | Self::LMinus | Self::K | Self::KLambda | Self::Zeta | Self::L4
        )
    }
}

impl fmt::Display for FunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for FunctionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim();
        Self::ALL
            .iter()
            .copied()
            .find(|id| id.short_name().eq_ignore_ascii_case(key))
            .or(match key {
                "S0tilde" | "s0_tilde" => Some(Self::S0Tilde),
                "Klambda" | "K_lambda" => Some(Self::KLambda),
                "Tplus" => Some(Self::TPlus),
                "Tminus" => Some(Self::TMinus),
                "Lminus" => Some(Self::LMinus),
                "L4" | "beta" => Some(Self::L4),
                _ => None,
            })
            .ok_or_else(|| Error::InvalidInput(format!("unknown function `{s}`")))
    }
}

impl From<FunctionId> for String {
    fn from(id: FunctionId) -> Self {
        id.short_name().to_string()
    }
}

impl TryFrom<String> for FunctionId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// Value of `id` at `s`. Only S₀, 𝒯₊ and 𝒯₋ depend on λ; every other family
/// is defined on the square lattice and rejects λ ≠ 1.
pub fn evaluate(id: FunctionId, s: Complex64, params: LatticeParams, ctx: &EvalContext) -> Result<Complex64> {
    let square = params.lambda == 1.0;
    match id {
        FunctionId::S0 if square => Ok(zeta(s, ctx)? * dirichlet_beta(s, ctx)? * 4.0),
        FunctionId::S0 => s0_kober(s, params, ctx),
        FunctionId::TPlus => t_plus(s, params, ctx),
        FunctionId::TMinus => t_minus(s, params, ctx),
        FunctionId::Zeta => zeta(s, ctx),
        FunctionId::L4 => dirichlet_beta(s, ctx),
        _ if !square => Err(Error::InvalidInput(format!("{id} is only defined at λ = 1"))),
        _ => {
            let p = SquarePoint::new(s, ctx)?;
            Ok(match id {
                FunctionId::S0Tilde => p.unscale(p.s0_tilde),
                FunctionId::K => p.unscale(p.k00()),
                FunctionId::KLambda => p.unscale(p.k00_lambda()),
                FunctionId::L => p.unscale(p.l()),
                FunctionId::LMinus => p.unscale(p.l_minus()),
                FunctionId::U => p.u()?,
                FunctionId::V => p.v()?,
                FunctionId::UK => p.u_k()?,
                FunctionId::VK => p.v_k()?,
                FunctionId::F => p.f()?,
                FunctionId::G => p.g()?,
                _ => unreachable!("handled above"),
            })
        }
    }
}
