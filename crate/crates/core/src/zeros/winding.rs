//! Argument-principle winding numbers along closed polygons.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::context::EvalContext;
use crate::error::{Error, Result};
use crate::function::FunctionId;
use crate::lattice::SquarePoint;
use crate::ratios::phase::wrap_phase;
use crate::specfun::{dirichlet_beta, xi1_factored, xi_beta_factored, zeta};

/// Largest phase step accepted between neighbouring samples.
const MAX_STEP_ARG: f64 = PI / 4.0;
const MAX_DEPTH: u32 = 40;

/// Value of a family at s with a positive real scale removed; the argument is
/// exact, the modulus is only meaningful relative to nearby values.
pub fn family_value(id: FunctionId, s: Complex64, ctx: &EvalContext) -> Result<Complex64> {
    match id {
        FunctionId::Zeta => zeta(s, ctx),
        FunctionId::L4 => dirichlet_beta(s, ctx),
        FunctionId::S0 => Ok(zeta(s, ctx)? * dirichlet_beta(s, ctx)?),
        _ => {
            let p = SquarePoint::new(s, ctx)?;
            match id {
                FunctionId::S0Tilde => Ok(p.s0_tilde),
                FunctionId::TPlus => Ok(p.t_plus()),
                FunctionId::TMinus => Ok(p.t_minus()),
                FunctionId::L => Ok(p.l()),
                FunctionId::LMinus => Ok(p.l_minus()),
                FunctionId::K => Ok(p.k00()),
                FunctionId::KLambda => Ok(p.k00_lambda()),
                FunctionId::U => p.u(),
                FunctionId::V => p.v(),
                FunctionId::UK => p.u_k(),
                FunctionId::VK => p.v_k(),
                FunctionId::F => p.f(),
                _ => p.g(),
            }
        }
    }
}

/// ξ₁(s) or ξ_β(s) scaled to unit factor modulus, for zero-count audits.
pub fn completed_value(id: FunctionId, s: Complex64, ctx: &EvalContext) -> Result<Complex64> {
    let f = match id {
        FunctionId::Zeta => xi1_factored(s, ctx)?,
        FunctionId::L4 => xi_beta_factored(s, ctx)?,
        other => return Err(Error::InvalidInput(format!("no completed form for {other}"))),
    };
    Ok(f.scaled(f.ln_factor.re))
}

fn segment_change(
    f: &mut dyn FnMut(Complex64) -> Result<Complex64>,
    p: Complex64,
    fp: Complex64,
    q: Complex64,
    fq: Complex64,
    depth: u32,
) -> Result<f64> {
    let d = wrap_phase(fq.arg() - fp.arg());
    if d.abs() <= MAX_STEP_ARG {
        return Ok(d);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::ContourThroughZero(0.5 * (p + q)));
    }
    let m = 0.5 * (p + q);
    let fm = f(m)?;
    if fm.norm() == 0.0 || !fm.norm().is_finite() {
        return Err(Error::ContourThroughZero(m));
    }
    Ok(segment_change(f, p, fp, m, fm, depth + 1)? + segment_change(f, m, fm, q, fq, depth + 1)?)
}

/// Number of angles θ + 2πk lying between α and α + d.
pub fn count_crossings(alpha: f64, d: f64, theta: f64) -> u32 {
    let (lo, hi) = if d >= 0.0 { (alpha, alpha + d) } else { (alpha + d, alpha) };
    (((hi - theta) / TAU).floor() - ((lo - theta) / TAU).floor()) as u32
}

fn segment_crossings(
    f: &mut dyn FnMut(Complex64) -> Result<Complex64>,
    p: Complex64,
    fp: Complex64,
    q: Complex64,
    fq: Complex64,
    theta: f64,
    depth: u32,
) -> Result<u32> {
    let d = wrap_phase(fq.arg() - fp.arg());
    if d.abs() <= MAX_STEP_ARG {
        return Ok(count_crossings(fp.arg(), d, theta));
    }
    if depth >= MAX_DEPTH {
        return Err(Error::ContourThroughZero(0.5 * (p + q)));
    }
    let m = 0.5 * (p + q);
    let fm = f(m)?;
    Ok(segment_crossings(f, p, fp, m, fm, theta, depth + 1)? + segment_crossings(f, m, fm, q, fq, theta, depth + 1)?)
}

/// Number of points on the open polyline where arg f passes through θ
/// (mod 2π).
pub fn phase_crossings(points: &[Complex64], theta: f64, mut f: impl FnMut(Complex64) -> Result<Complex64>) -> Result<u32> {
    let mut vals = Vec::with_capacity(points.len());
    for &p in points {
        vals.push(f(p)?);
    }
    let mut n = 0;
    for k in 1..points.len() {
        n += segment_crossings(&mut f, points[k - 1], vals[k - 1], points[k], vals[k], theta, 0)?;
    }
    Ok(n)
}

/// Total change of arg f along the closed polygon through `vertices`
/// (the last vertex joins the first). Long edges are split so that no
/// initial piece is longer than `max_len`.
pub fn argument_change(
    vertices: &[Complex64],
    max_len: f64,
    f: impl FnMut(Complex64) -> Result<Complex64>,
) -> Result<f64> {
    if vertices.len() < 3 {
        return Err(Error::InvalidInput("a closed contour needs at least three vertices".into()));
    }
    let mut closed = vertices.to_vec();
    closed.push(vertices[0]);
    path_argument_change(&closed, max_len, f)
}

/// Total change of arg f along the open polyline through `vertices`.
pub fn path_argument_change(
    vertices: &[Complex64],
    max_len: f64,
    mut f: impl FnMut(Complex64) -> Result<Complex64>,
) -> Result<f64> {
    let mut pts = Vec::new();
    for k in 1..vertices.len() {
        let (a, b) = (vertices[k - 1], vertices[k]);
        let n = ((b - a).norm() / max_len).ceil().max(1.0) as usize;
        for j in 0..n {
            pts.push(a + (b - a) * (j as f64 / n as f64));
        }
    }
    if let Some(&last) = vertices.last() {
        pts.push(last);
    }
    let mut vals = Vec::with_capacity(pts.len());
    for &p in &pts {
        let v = f(p)?;
        if v.norm() == 0.0 || !v.norm().is_finite() {
            return Err(Error::ContourThroughZero(p));
        }
        vals.push(v);
    }
    let mut total = 0.0;
    for k in 1..pts.len() {
        total += segment_change(&mut f, pts[k - 1], vals[k - 1], pts[k], vals[k], 0)?;
    }
    Ok(total)
}

/// Winding number of f around a closed polygon (counter-clockwise positive).
pub fn winding_number(vertices: &[Complex64], max_len: f64, f: impl FnMut(Complex64) -> Result<Complex64>) -> Result<i64> {
    let change = argument_change(vertices, max_len, f)?;
    let w = change / TAU;
    if (w - w.round()).abs() > 0.05 {
        return Err(Error::AccuracyLoss(format!("winding {w:.3} is not close to an integer")));
    }
    Ok(w.round() as i64)
}

/// Counter-clockwise regular polygon approximating a circle.
pub fn circle(center: Complex64, radius: f64, n: usize) -> Vec<Complex64> {
    (0..n).map(|k| center + Complex64::from_polar(radius, TAU * k as f64 / n as f64)).collect()
}

/// Counter-clockwise rectangle [σ₀, σ₁] × [t₀, t₁].
pub fn rectangle(sigma0: f64, sigma1: f64, t0: f64, t1: f64) -> Vec<Complex64> {
    vec![
        Complex64::new(sigma0, t0),
        Complex64::new(sigma1, t0),
        Complex64::new(sigma1, t1),
        Complex64::new(sigma0, t1),
    ]
}

/// Number of zeros (with multiplicity, minus poles) of a family inside the
/// circle.
pub fn winding_multiplicity(center: Complex64, radius: f64, id: FunctionId, ctx: &EvalContext) -> Result<i64> {
    if !(radius > 0.0) {
        return Err(Error::InvalidInput("radius must be positive".into()));
    }
    winding_number(&circle(center, radius, 16), radius, |s| family_value(id, s, ctx))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn polynomial_windings() {
        let f = |s: Complex64| Ok((s - 0.3) * (s - 0.3) * (s + 2.0));
        assert_eq!(winding_number(&circle(c(0.0, 0.0), 1.0, 8), 0.5, f).unwrap(), 2);
        assert_eq!(winding_number(&circle(c(0.0, 0.0), 3.0, 8), 0.5, f).unwrap(), 3);
        assert_eq!(winding_number(&rectangle(1.0, 2.0, -1.0, 1.0), 0.5, f).unwrap(), 0);
        let g = |s: Complex64| Ok(s.inv());
        assert_eq!(winding_number(&circle(c(0.0, 0.0), 1.0, 8), 0.5, g).unwrap(), -1);
    }

    #[test]
    fn first_zeta_zero_is_simple() {
        let ctx = EvalContext::default();
        let w = winding_multiplicity(c(0.5, 14.134725), 0.05, FunctionId::Zeta, &ctx).unwrap();
        assert_eq!(w, 1);
        let none = winding_multiplicity(c(0.5, 17.0), 0.05, FunctionId::Zeta, &ctx).unwrap();
        assert_eq!(none, 0);
    }

    #[test]
    fn xi_rectangle_counts_zeros() {
        // ζ zeros in (10, 33): 14.13, 21.02, 25.01, 30.42, 32.94
        let ctx = EvalContext::default();
        let n = winding_number(&rectangle(-1.0, 2.0, 10.0, 33.5), 0.25, |s| completed_value(FunctionId::Zeta, s, &ctx)).unwrap();
        assert_eq!(n, 5);
    }

    #[test]
    fn crossings_along_a_path() {
        // arg s runs from -π/2 to π/2 on the right half of the unit circle
        let pts: Vec<Complex64> = (0..=20).map(|k| Complex64::from_polar(1.0, -PI / 2.0 + PI * k as f64 / 20.0)).collect();
        assert_eq!(phase_crossings(&pts, 0.0, Ok).unwrap(), 1);
        assert_eq!(phase_crossings(&pts, PI, Ok).unwrap(), 0);
        assert_eq!(phase_crossings(&pts, 0.0, |s| Ok(s * s * s)).unwrap(), 1);
        assert_eq!(phase_crossings(&pts, PI, |s| Ok(s * s * s)).unwrap(), 2);
        assert_eq!(count_crossings(3.0, 0.3, PI), 1);
        assert_eq!(count_crossings(-3.0, 0.3, PI), 0);
    }

    #[test]
    fn through_zero_is_reported() {
        let f = |s: Complex64| Ok(s - c(1.0, 0.0));
        assert!(matches!(winding_number(&circle(c(0.0, 0.0), 1.0, 4), 0.5, f), Err(Error::ContourThroughZero(_))));
    }
}
