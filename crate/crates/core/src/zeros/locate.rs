//! Zero localization on the critical line by sign changes of the real
//! surrogates.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::surrogate::{surrogate_index, surrogate_unchecked};
use crate::context::EvalContext;
use crate::error::{Error, Result};
use crate::function::FunctionId;
use crate::geometry::region::RegionKind;
use crate::lattice::SquarePoint;
use crate::ratios::phase::base_step;

/// Final bracket width for localized zeros.
pub const ZERO_BRACKET: f64 = 1.6e-9;
/// Tolerance on |ℱ + 1| and |𝒱_K/𝒱 + 1| at a localized S₀ zero.
pub const S0_RATIO_TOL: f64 = 1e-6;
/// Relative size of ℒ at an S₀ zero below which ℒ and S₀ zeros cannot be told
/// apart.
const DISCRIMINATION_MARGIN: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZeroMethod {
    SurrogateBisection,
    PhasePi,
    Winding,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroRecord {
    pub function: FunctionId,
    pub t: f64,
    /// Half-width of the final bracket.
    pub err: f64,
    pub method: ZeroMethod,
    /// Winding count around a small circle; 0 when not yet checked.
    pub multiplicity: u32,
    pub island_index: Option<usize>,
    pub region: Option<RegionKind>,
}

impl ZeroRecord {
    pub fn bracketed(function: FunctionId, t: f64, err: f64) -> Self {
        Self { function, t, err, method: ZeroMethod::SurrogateBisection, multiplicity: 0, island_index: None, region: None }
    }
}

/// Brent's method on a bracket [a, b] with f(a) f(b) < 0. Returns the centre
/// and half-width of a final bracket no wider than `width`.
pub fn refine_root(
    mut f: impl FnMut(f64) -> Result<f64>,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    width: f64,
) -> Result<(f64, f64)> {
    if fa == 0.0 {
        return Ok((a, 0.0));
    }
    if fb == 0.0 {
        return Ok((b, 0.0));
    }
    if fa.signum() == fb.signum() {
        return Err(Error::InvalidInput(format!("no sign change on [{a}, {b}]")));
    }
    let (mut a, mut b, mut fa, mut fb) = (a, b, fa, fb);
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.25 * width;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            if fb == 0.0 {
                return Ok((b, 0.0));
            }
            return Ok((0.5 * (b + c), 0.5 * (c - b).abs()));
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
    }
    Err(Error::NotConvergent(format!("root refinement near {b}")))
}

/// Localize a zero of `id` bracketed by [a, b].
pub fn refine_zero(id: FunctionId, a: f64, b: f64, fa: f64, fb: f64, ctx: &EvalContext) -> Result<ZeroRecord> {
    let (t, err) = refine_root(|t| surrogate_unchecked(id, t, ctx), a, b, fa, fb, ZERO_BRACKET)?;
    Ok(ZeroRecord::bracketed(id, t, err))
}

/// The ordinates of the standard scan grid in [t_lo, t_hi].
pub fn scan_grid(t_lo: f64, t_hi: f64) -> Vec<f64> {
    let mut ts = vec![t_lo];
    let mut t = t_lo;
    while t < t_hi {
        t = (t + base_step(t)).min(t_hi);
        ts.push(t);
    }
    ts
}

/// All zeros of one family on [t_lo, t_hi], bracketed on the scan grid.
pub fn find_zeros(id: FunctionId, t_lo: f64, t_hi: f64, ctx: &EvalContext) -> Result<Vec<ZeroRecord>> {
    surrogate_index(id)?;
    ctx.check_t(t_lo)?;
    if !(t_hi > t_lo) {
        return Err(Error::InvalidInput(format!("empty range [{t_lo}, {t_hi}]")));
    }
    let grid = scan_grid(t_lo, t_hi);
    let values: Vec<f64> = grid.iter().map(|&t| surrogate_unchecked(id, t, ctx)).collect::<Result<_>>()?;
    let mut out: Vec<ZeroRecord> = Vec::new();
    for k in 0..grid.len() - 1 {
        let (fa, fb) = (values[k], values[k + 1]);
        if fa == 0.0 || fa.signum() != fb.signum() && fb != 0.0 {
            let z = refine_zero(id, grid[k], grid[k + 1], fa, fb, ctx)?;
            if out.last().is_none_or(|p| (z.t - p.t).abs() > p.err + z.err) {
                out.push(z);
            }
        }
    }
    Ok(out)
}

/// Result of checking ℱ = -1 and 𝒱_K/𝒱 = -1 at a located zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct S0ZeroRatios {
    pub f_plus_one: f64,
    pub vk_over_v_plus_one: f64,
    /// |ℒ| relative to |𝒯₊| + |𝒯₋| at the zero.
    pub l_margin: f64,
    /// Amplification 2/|1 - 𝒰²| of an error in ℱ into 𝒱_K/𝒱, which is 0/0
    /// where 𝒰 = ±1.
    pub vk_condition: f64,
}

impl S0ZeroRatios {
    pub fn passes(&self) -> bool {
        self.f_plus_one <= S0_RATIO_TOL && self.vk_over_v_plus_one <= S0_RATIO_TOL * self.vk_condition.max(1.0)
    }
}

pub fn s0_zero_ratios(t: f64, ctx: &EvalContext) -> Result<S0ZeroRatios> {
    let p = SquarePoint::new(Complex64::new(0.5, t), ctx)?;
    let f = p.f()?;
    let ratio = p.v_k()? / p.v()?;
    let l_margin = p.l().norm() / (p.t_plus().norm() + p.t_minus().norm());
    let u = p.u()?;
    let vk_condition = 2.0 / (1.0 - u * u).norm();
    Ok(S0ZeroRatios { f_plus_one: (f + 1.0).norm(), vk_over_v_plus_one: (ratio + 1.0).norm(), l_margin, vk_condition })
}

/// Zeros of S₀(s; 1) on the line: the union of the ζ and L₋₄ zeros, each
/// confirmed through ℱ = -1.
pub fn find_s0_zeros(t_lo: f64, t_hi: f64, ctx: &EvalContext) -> Result<Vec<ZeroRecord>> {
    let mut all = find_zeros(FunctionId::Zeta, t_lo, t_hi, ctx)?;
    all.extend(find_zeros(FunctionId::L4, t_lo, t_hi, ctx)?);
    all.sort_by(|a, b| a.t.total_cmp(&b.t));
    let mut out = Vec::with_capacity(all.len());
    for z in all {
        let check = s0_zero_ratios(z.t, ctx)?;
        if check.l_margin < DISCRIMINATION_MARGIN {
            return Err(Error::AmbiguousRoot { t: z.t, margin: check.l_margin });
        }
        if !check.passes() {
            return Err(Error::AccuracyLoss(format!("S₀ zero at t = {} fails ℱ = -1 by {:.1e}", z.t, check.f_plus_one)));
        }
        out.push(ZeroRecord { function: FunctionId::S0, ..z });
    }
    Ok(out)
}
