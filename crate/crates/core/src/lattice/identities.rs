//! Residuals of the identities tying the lattice family together. Each side
//! of an identity is evaluated by a different route (MacDonald sums, Kober
//! form, ξ₁ closed forms, finite differences in λ), so a small residual is
//! evidence that the routes agree.

use num_complex::Complex64;
use serde::Serialize;

use super::kober::s0_kober_unmapped;
use super::macdonald::mac_k;
use super::square::SquarePoint;
use super::{t_minus, t_plus, LatticeParams, MacIndices};
use crate::context::EvalContext;
use crate::error::Result;
use crate::specfun::gamma::{ln_gamma, LN_PI};
use crate::specfun::xi1;

/// Relative tolerance for identities evaluated without differencing.
pub const EXACT_TOL: f64 = 1e-9;
/// Relative tolerance where a λ-derivative comes from finite differences.
pub const FD_TOL: f64 = 1e-6;

/// Every identity name, in report order.
pub const IDENTITY_NAMES: [&str; 20] = [
    "k_index_reflection",
    "s0_four_fold_symmetry",
    "s0_lambda_derivative",
    "k00_ratio_inversion",
    "l_from_k00",
    "l_lambda_derivative",
    "l_minus_from_t",
    "l_minus_lambda_derivative",
    "k_lambda_derivative",
    "k_index_recurrence",
    "k11_from_k00",
    "k11_symmetric_part",
    "k11_antisymmetric_part",
    "uk_vk_reflection",
    "v_u_normal_form",
    "vk_over_v_product",
    "vk_over_v_shifted",
    "uk_over_u_product",
    "uk_over_u_shifted",
    "t_parity",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityResidual {
    pub name: &'static str,
    /// |lhs - rhs| of the worst component.
    pub residual: f64,
    /// Magnitude the residual is measured against.
    pub scale: f64,
    pub tolerance: f64,
    pub finite_differences: bool,
    /// Set when a side could not be evaluated; the residual is then NaN.
    pub error: Option<String>,
}

impl IdentityResidual {
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.residual / self.scale
        } else {
            self.residual
        }
    }

    pub fn passes(&self) -> bool {
        self.error.is_none() && self.relative() <= self.tolerance
    }
}

/// One component of an identity: |lhs - rhs| and the scale it is judged by.
#[derive(Debug, Clone, Copy)]
struct Part {
    diff: f64,
    scale: f64,
}

impl Part {
    fn new(lhs: Complex64, rhs: Complex64) -> Self {
        Self { diff: (lhs - rhs).norm(), scale: lhs.norm().max(rhs.norm()) }
    }

    fn with_scale(lhs: Complex64, rhs: Complex64, scale: f64) -> Self {
        Self { diff: (lhs - rhs).norm(), scale }
    }

    fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.diff / self.scale
        } else {
            self.diff
        }
    }
}

fn worst(parts: impl IntoIterator<Item = Part>) -> Part {
    parts.into_iter().fold(Part { diff: 0.0, scale: 1.0 }, |a, b| if b.relative() > a.relative() { b } else { a })
}

fn finish(name: &'static str, fd: bool, part: Result<Part>) -> IdentityResidual {
    let tolerance = if fd { FD_TOL } else { EXACT_TOL };
    match part {
        Ok(p) => IdentityResidual { name, residual: p.diff, scale: p.scale, tolerance, finite_differences: fd, error: None },
        Err(e) => IdentityResidual {
            name,
            residual: f64::NAN,
            scale: f64::NAN,
            tolerance,
            finite_differences: fd,
            error: Some(e.to_string()),
        },
    }
}

/// Step for central differences in λ.
pub fn fd_step(s: Complex64) -> f64 {
    1e-4 * s.norm().max(1.0)
}

/// ∂f/∂λ at λ by central differences with step h and one Richardson level.
pub fn lambda_derivative(f: impl Fn(f64) -> Result<Complex64>, lambda: f64, h: f64) -> Result<Complex64> {
    let central = |h: f64| -> Result<Complex64> { Ok((f(lambda + h)? - f(lambda - h)?) / (2.0 * h)) };
    let coarse = central(h)?;
    let fine = central(0.5 * h)?;
    Ok((fine * 4.0 - coarse) / 3.0)
}

struct Eval<'a> {
    s: Complex64,
    lambda: f64,
    ctx: &'a EvalContext,
}

impl Eval<'_> {
    fn k(&self, n: u32, m: i32, s: Complex64, lambda: f64) -> Result<Complex64> {
        mac_k(MacIndices::new(n, m), s, LatticeParams { lambda }, self.ctx)
    }

    fn reflected(&self) -> Complex64 {
        Complex64::new(1.0, 0.0) - self.s
    }

    /// λ^s Γ(s) S₀(s; λ) / (8π^s) with S₀ taken straight from the Kober form.
    fn symmetrised(&self, s: Complex64, lambda: f64) -> Result<Complex64> {
        let s0 = s0_kober_unmapped(s, lambda, self.ctx)?;
        Ok((s * lambda.ln() + ln_gamma(s)? - s * LN_PI).exp() * s0 / 8.0)
    }

    /// 𝒦_λ(0,0;s;λ): the closed form at λ = 1, finite differences elsewhere.
    fn k00_lambda(&self) -> Result<(Complex64, bool)> {
        if self.lambda == 1.0 {
            let p = SquarePoint::new(self.s, self.ctx)?;
            Ok((p.unscale(p.k00_lambda()), false))
        } else {
            let d = lambda_derivative(|l| self.k(0, 0, self.s, l), self.lambda, fd_step(self.s))?;
            Ok((d, true))
        }
    }

    /// 𝒦(n,-m;s) = 𝒦(n,m;1-s).
    fn k_index_reflection(&self) -> Result<Part> {
        let r = self.reflected();
        let mut parts = Vec::new();
        for (n, m) in [(0, 0), (0, 1), (1, 1), (2, 1)] {
            parts.push(Part::new(self.k(n, -m, self.s, self.lambda)?, self.k(n, m, r, self.lambda)?));
        }
        Ok(worst(parts))
    }

    /// The symmetrised S₀ takes one value at (s, λ), (s, 1/λ), (1-s, λ) and (1-s, 1/λ).
    fn s0_four_fold(&self) -> Result<Part> {
        let r = self.reflected();
        let base = self.symmetrised(self.s, self.lambda)?;
        let others = [
            self.symmetrised(self.s, 1.0 / self.lambda)?,
            self.symmetrised(r, self.lambda)?,
            self.symmetrised(r, 1.0 / self.lambda)?,
        ];
        Ok(worst(others.map(|o| Part::new(base, o))))
    }

    /// ∂S₀(s;λ)/∂λ = -s S₀(s;1) at λ = 1.
    fn s0_lambda_derivative(&self) -> Result<Part> {
        let d = lambda_derivative(|l| s0_kober_unmapped(self.s, l, self.ctx), 1.0, fd_step(self.s))?;
        let rhs = -self.s * s0_kober_unmapped(self.s, 1.0, self.ctx)?;
        Ok(Part::with_scale(d, rhs, rhs.norm()))
    }

    /// ¼[ξ₁(2s)(λ^{-s} - λ^s) + ξ₁(2s-1)(λ^{s-1} - λ^{1-s})] = √λ 𝒦(0,0;s;λ) - 𝒦(0,0;s;1/λ)/√λ.
    fn k00_ratio_inversion(&self) -> Result<Part> {
        let s = self.s;
        let ll = self.lambda.ln();
        let pw = |e: Complex64| (e * ll).exp();
        let lhs = (xi1(s * 2.0, self.ctx)? * (pw(-s) - pw(s)) + xi1(s * 2.0 - 1.0, self.ctx)? * (pw(s - 1.0) - pw(1.0 - s))) * 0.25;
        let sq = self.lambda.sqrt();
        let a = self.k(0, 0, s, self.lambda)? * sq;
        let b = self.k(0, 0, s, 1.0 / self.lambda)? / sq;
        Ok(Part::with_scale(lhs, a - b, a.norm() + b.norm()))
    }

    /// ℒ(s) = -2𝒦(0,0;s;1) - 4𝒦_λ(0,0;s;1), with 𝒦_λ = -[𝒦(1,1) + 𝒦(1,-1)].
    fn l_from_k00(&self) -> Result<Part> {
        let p = SquarePoint::new(self.s, self.ctx)?;
        let l = p.unscale(p.l());
        let k = self.k(0, 0, self.s, 1.0)?;
        let kl = -(self.k(1, 1, self.s, 1.0)? + self.k(1, -1, self.s, 1.0)?);
        Ok(Part::with_scale(l, -k * 2.0 - kl * 4.0, l.norm() + 2.0 * k.norm() + 4.0 * kl.norm()))
    }

    /// ℒ(s) = -4 ∂𝒯₊/∂λ at λ = 1.
    fn l_lambda_derivative(&self) -> Result<Part> {
        let p = SquarePoint::new(self.s, self.ctx)?;
        let d = lambda_derivative(|l| t_plus(self.s, LatticeParams { lambda: l }, self.ctx), 1.0, fd_step(self.s))?;
        Ok(Part::new(p.unscale(p.l()), -d * 4.0))
    }

    /// ℒ₋(s) = 2[𝒯₋(s) + (2s - 1)𝒯₊(s)].
    fn l_minus_from_t(&self) -> Result<Part> {
        let p = SquarePoint::new(self.s, self.ctx)?;
        let lm = p.unscale(p.l_minus());
        let tp = t_plus(self.s, LatticeParams::square(), self.ctx)?;
        let tm = t_minus(self.s, LatticeParams::square(), self.ctx)?;
        let rhs = (tm + (self.s * 2.0 - 1.0) * tp) * 2.0;
        Ok(Part::with_scale(lm, rhs, lm.norm().max(2.0 * tm.norm() + 2.0 * ((self.s * 2.0 - 1.0) * tp).norm())))
    }

    /// ℒ₋(s) = -4 ∂𝒯₋/∂λ at λ = 1.
    fn l_minus_lambda_derivative(&self) -> Result<Part> {
        let p = SquarePoint::new(self.s, self.ctx)?;
        let d = lambda_derivative(|l| t_minus(self.s, LatticeParams { lambda: l }, self.ctx), 1.0, fd_step(self.s))?;
        Ok(Part::new(p.unscale(p.l_minus()), -d * 4.0))
    }

    /// ∂𝒦(n,m)/∂λ = -[𝒦(n+1,m+1) + 𝒦(n+1,m-1)] for (n, m) = (0, 0) and (1, 1).
    fn k_lambda_derivative(&self) -> Result<Part> {
        let mut parts = Vec::new();
        for (n, m) in [(0u32, 0i32), (1, 1)] {
            let d = lambda_derivative(|l| self.k(n, m, self.s, l), self.lambda, fd_step(self.s))?;
            let up = self.k(n + 1, m + 1, self.s, self.lambda)?;
            let down = self.k(n + 1, m - 1, self.s, self.lambda)?;
            parts.push(Part::with_scale(d, -(up + down), d.norm().max(up.norm() + down.norm())));
        }
        Ok(worst(parts))
    }

    /// (m + s - 1/2)/λ 𝒦(n,m) = 𝒦(n+1,m+1) - 𝒦(n+1,m-1) for (n, m) = (0, 0) and (0, 1).
    fn k_index_recurrence(&self) -> Result<Part> {
        let mut parts = Vec::new();
        for (n, m) in [(0u32, 0i32), (0, 1)] {
            let lhs = (self.s + m as f64 - 0.5) / self.lambda * self.k(n, m, self.s, self.lambda)?;
            let up = self.k(n + 1, m + 1, self.s, self.lambda)?;
            let down = self.k(n + 1, m - 1, self.s, self.lambda)?;
            parts.push(Part::with_scale(lhs, up - down, lhs.norm().max(up.norm() + down.norm())));
        }
        Ok(worst(parts))
    }

    /// 𝒦(1,1) = -½𝒦_λ(0,0) + (s - 1/2)/(2λ) 𝒦(0,0).
    fn k11_from_k00(&self) -> Result<(Part, bool)> {
        let (kl, fd) = self.k00_lambda()?;
        let k11 = self.k(1, 1, self.s, self.lambda)?;
        let k00 = self.k(0, 0, self.s, self.lambda)?;
        let a = -kl * 0.5;
        let b = (self.s - 0.5) / (2.0 * self.lambda) * k00;
        Ok((Part::with_scale(k11, a + b, k11.norm().max(a.norm() + b.norm())), fd))
    }

    /// 𝒦(1,1;s) + 𝒦(1,1;1-s) = -𝒦_λ(0,0;s).
    fn k11_symmetric_part(&self) -> Result<(Part, bool)> {
        let (kl, fd) = self.k00_lambda()?;
        let a = self.k(1, 1, self.s, self.lambda)?;
        let b = self.k(1, 1, self.reflected(), self.lambda)?;
        Ok((Part::with_scale(a + b, -kl, kl.norm().max(a.norm() + b.norm())), fd))
    }

    /// 𝒦(1,1;s) - 𝒦(1,1;1-s) = (s - 1/2)/λ 𝒦(0,0;s).
    fn k11_antisymmetric_part(&self) -> Result<Part> {
        let a = self.k(1, 1, self.s, self.lambda)?;
        let b = self.k(1, 1, self.reflected(), self.lambda)?;
        let rhs = (self.s - 0.5) / self.lambda * self.k(0, 0, self.s, self.lambda)?;
        Ok(Part::with_scale(a - b, rhs, rhs.norm().max(a.norm() + b.norm())))
    }

    /// 𝒰_K = 𝒦(1,1;s)/𝒦(1,-1;s) and 𝒱_K = -(s - 1/2)𝒦(0,0)/(λ𝒦_λ(0,0)), both
    /// from MacDonald sums at the given point.
    fn uk_vk_at(&self, s: Complex64) -> Result<(Complex64, Complex64)> {
        let up = self.k(1, 1, s, self.lambda)?;
        let down = self.k(1, -1, s, self.lambda)?;
        let k00 = self.k(0, 0, s, self.lambda)?;
        Ok((up / down, -(s - 0.5) * k00 / (-(up + down) * self.lambda)))
    }

    /// 𝒰_K(1-s) = 1/𝒰_K(s) and 𝒱_K(1-s) = -𝒱_K(s).
    fn uk_vk_reflection(&self) -> Result<Part> {
        let (uk, vk) = self.uk_vk_at(self.s)?;
        let (uk_r, vk_r) = self.uk_vk_at(self.reflected())?;
        let one = Complex64::new(1.0, 0.0);
        Ok(worst([Part::new(uk * uk_r, one), Part::with_scale(vk_r, -vk, vk.norm().max(vk_r.norm()))]))
    }
}

/// 𝒰 from ξ₁, 𝒱 from the Kober-module 𝒯±, 𝒰_K from MacDonald sums and 𝒱_K
/// from the closed forms, all at λ = 1.
struct Ratios {
    u: Complex64,
    v: Complex64,
    uk: Complex64,
    vk: Complex64,
}

impl Ratios {
    fn new(e: &Eval) -> Result<Self> {
        let p = SquarePoint::new(e.s, e.ctx)?;
        let u = p.u()?;
        let v = t_plus(e.s, LatticeParams::square(), e.ctx)? / t_minus(e.s, LatticeParams::square(), e.ctx)?;
        let uk = e.k(1, 1, e.s, 1.0)? / e.k(1, -1, e.s, 1.0)?;
        let vk = p.v_k()?;
        Ok(Self { u, v, uk, vk })
    }

    /// (𝒱 - i)/(𝒱 + i) = i(𝒰 - i)/(𝒰 + i).
    fn normal_form(&self) -> Part {
        let i = Complex64::i();
        Part::new((self.v - i) / (self.v + i), i * (self.u - i) / (self.u + i))
    }

    /// 𝒱_K/𝒱 = -(1 - 𝒰)(1 - 𝒰_K)/((1 + 𝒰)(1 + 𝒰_K)), also in expanded form.
    fn vk_over_v_product(&self) -> Part {
        let (u, uk) = (self.u, self.uk);
        let lhs = self.vk / self.v;
        let product = -(1.0 - u) * (1.0 - uk) / ((1.0 + u) * (1.0 + uk));
        let expanded = -(1.0 + u * uk - u - uk) / (1.0 + u * uk + u + uk);
        worst([Part::new(lhs, product), Part::new(lhs, expanded)])
    }

    /// 𝒱_K/𝒱 ± 1 in terms of 𝒰 and 𝒰_K.
    fn vk_over_v_shifted(&self) -> Part {
        let (u, uk) = (self.u, self.uk);
        let r = self.vk / self.v;
        let den = (1.0 + u) * (1.0 + uk);
        worst([Part::new(r + 1.0, (u + uk) * 2.0 / den), Part::new(r - 1.0, -(1.0 + u * uk) * 2.0 / den)])
    }

    /// 𝒰_K/𝒰 = (𝒱 + 1)(1 + 𝒱_K)/((𝒱 - 1)(1 - 𝒱_K)), also in expanded form.
    fn uk_over_u_product(&self) -> Part {
        let (v, vk) = (self.v, self.vk);
        let lhs = self.uk / self.u;
        let product = (v + 1.0) * (1.0 + vk) / ((v - 1.0) * (1.0 - vk));
        let expanded = -(1.0 + v * vk + v + vk) / (1.0 + v * vk - v - vk);
        worst([Part::new(lhs, product), Part::new(lhs, expanded)])
    }

    /// 𝒰_K/𝒰 ± 1 in terms of 𝒱 and 𝒱_K.
    fn uk_over_u_shifted(&self) -> Part {
        let (v, vk) = (self.v, self.vk);
        let r = self.uk / self.u;
        let den = (v - 1.0) * (1.0 - vk);
        worst([Part::new(r + 1.0, (v + vk) * 2.0 / den), Part::new(r - 1.0, (1.0 + v * vk) * 2.0 / den)])
    }
}

/// 𝒯₊(s;1) is even and 𝒯₋(s;1) odd under s → 1 - s.
fn t_parity(e: &Eval) -> Result<Part> {
    let r = e.reflected();
    let sq = LatticeParams::square();
    let tp = t_plus(e.s, sq, e.ctx)?;
    let tm = t_minus(e.s, sq, e.ctx)?;
    Ok(worst([Part::new(tp, t_plus(r, sq, e.ctx)?), Part::new(tm, -t_minus(r, sq, e.ctx)?)]))
}

/// Residuals of every identity at (s, λ). Identities that only hold on the
/// square lattice (those involving ℒ, ℒ₋, 𝒰, 𝒱, the λ-derivative of S₀, and
/// the parity of 𝒯±) are evaluated at λ = 1 whatever `params` says. The
/// MacDonald sums limit this to moderate |Im s|; outside that range the
/// affected entries carry an error instead of a residual.
pub fn identity_residuals(s: Complex64, params: LatticeParams, ctx: &EvalContext) -> Vec<IdentityResidual> {
    IDENTITY_NAMES.iter().map(|name| identity_residual(name, s, params, ctx).expect("known name")).collect()
}

/// Residual of the named identity, or None for an unknown name.
pub fn identity_residual(name: &str, s: Complex64, params: LatticeParams, ctx: &EvalContext) -> Option<IdentityResidual> {
    let e = Eval { s, lambda: params.lambda, ctx };
    let name = *IDENTITY_NAMES.iter().find(|n| **n == name)?;
    let ratios = || Ratios::new(&e);
    let with_fd = |r: Result<(Part, bool)>| match r {
        Ok((p, fd)) => finish(name, fd, Ok(p)),
        Err(err) => finish(name, params.lambda != 1.0, Err(err)),
    };
    Some(match name {
        "k_index_reflection" => finish(name, false, e.k_index_reflection()),
        "s0_four_fold_symmetry" => finish(name, false, e.s0_four_fold()),
        "s0_lambda_derivative" => finish(name, true, e.s0_lambda_derivative()),
        "k00_ratio_inversion" => finish(name, false, e.k00_ratio_inversion()),
        "l_from_k00" => finish(name, false, e.l_from_k00()),
        "l_lambda_derivative" => finish(name, true, e.l_lambda_derivative()),
        "l_minus_from_t" => finish(name, false, e.l_minus_from_t()),
        "l_minus_lambda_derivative" => finish(name, true, e.l_minus_lambda_derivative()),
        "k_lambda_derivative" => finish(name, true, e.k_lambda_derivative()),
        "k_index_recurrence" => finish(name, false, e.k_index_recurrence()),
        "k11_from_k00" => with_fd(e.k11_from_k00()),
        "k11_symmetric_part" => with_fd(e.k11_symmetric_part()),
        "k11_antisymmetric_part" => finish(name, false, e.k11_antisymmetric_part()),
        "uk_vk_reflection" => finish(name, false, e.uk_vk_reflection()),
        "v_u_normal_form" => finish(name, false, ratios().map(|r| r.normal_form())),
        "vk_over_v_product" => finish(name, false, ratios().map(|r| r.vk_over_v_product())),
        "vk_over_v_shifted" => finish(name, false, ratios().map(|r| r.vk_over_v_shifted())),
        "uk_over_u_product" => finish(name, false, ratios().map(|r| r.uk_over_u_product())),
        "uk_over_u_shifted" => finish(name, false, ratios().map(|r| r.uk_over_u_shifted())),
        "t_parity" => finish(name, false, t_parity(&e)),
        _ => unreachable!(),
    })
}
