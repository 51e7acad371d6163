//! Predictor-corrector tracing of the curves |𝒰_K(s)| = 1 and |ℱ(s)| = 1.
//!
//! The curves are level sets φ = log|target| = 0. With g = log target,
//! ∇φ = conj(g') and the tangent is i·conj(g'). Off-line branches meet the
//! critical line (itself a level set) at the region boundaries, so traces
//! start a small distance δ to the right of the line and stop when they come
//! back to it.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::context::EvalContext;
use crate::error::{Error, Result};
use crate::function::FunctionId;
use crate::lattice::SquarePoint;
use crate::zeros::locate::refine_root;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContourKind {
    UnitModUK,
    UnitModF,
}

impl ContourKind {
    pub fn function(self) -> FunctionId {
        match self {
            Self::UnitModUK => FunctionId::UK,
            Self::UnitModF => FunctionId::F,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contour {
    pub kind: ContourKind,
    pub points: Vec<Complex64>,
    pub enclosed_singularity: Option<(FunctionId, Complex64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceOptions {
    /// Distance of trace end points from the critical line.
    pub delta: f64,
    pub min_step: f64,
    pub max_step: f64,
    pub max_points: usize,
    /// Traces wandering beyond this σ are abandoned.
    pub sigma_max: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self { delta: 5e-3, min_step: 1e-4, max_step: 0.1, max_points: 50_000, sigma_max: 10.0 }
    }
}

const CORRECTOR_TOL: f64 = 1e-10;
const CORRECTOR_ITERS: usize = 8;
const DIFF_STEP: f64 = 1e-5;
const MAX_TURN: f64 = 0.3;
const MAX_CORRECTION: f64 = 0.25;
/// Largest step, in units of δ, allowed for the step that reaches the line.
const LANDING_STEP: f64 = 4.0;

pub fn target_value(kind: ContourKind, s: Complex64, ctx: &EvalContext) -> Result<Complex64> {
    let p = SquarePoint::new(s, ctx)?;
    match kind {
        ContourKind::UnitModUK => p.u_k(),
        ContourKind::UnitModF => p.f(),
    }
}

fn log_modulus(kind: ContourKind, s: Complex64, ctx: &EvalContext) -> Result<f64> {
    Ok(target_value(kind, s, ctx)?.norm().ln())
}

/// (log target)' by a central difference.
fn log_derivative(kind: ContourKind, s: Complex64, ctx: &EvalContext) -> Result<Complex64> {
    let h = DIFF_STEP;
    let up = target_value(kind, s + h, ctx)?;
    let down = target_value(kind, s - h, ctx)?;
    Ok((up / down).ln() / (2.0 * h))
}

fn unit(z: Complex64) -> Result<Complex64> {
    let n = z.norm();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::TraceDiverged("vanishing gradient".into()));
    }
    Ok(z / n)
}

/// Newton iteration along the gradient back onto φ = 0.
fn correct(kind: ContourKind, mut s: Complex64, ctx: &EvalContext) -> Result<Option<(Complex64, usize)>> {
    for it in 0..CORRECTOR_ITERS {
        let phi = log_modulus(kind, s, ctx)?;
        if phi.abs() < CORRECTOR_TOL {
            return Ok(Some((s, it)));
        }
        let g = log_derivative(kind, s, ctx)?;
        let n2 = g.norm_sqr();
        if !(n2 > 0.0) {
            return Ok(None);
        }
        s -= g.conj() * (phi / n2);
    }
    Ok(None)
}

/// Solve φ(σ + it) = 0 for t in [t0, t1].
fn solve_on_vertical(kind: ContourKind, sigma: f64, t0: f64, t1: f64, ctx: &EvalContext) -> Result<Option<f64>> {
    let f = |t: f64| log_modulus(kind, Complex64::new(sigma, t), ctx);
    let (fa, fb) = (f(t0)?, f(t1)?);
    if (fa > 0.0) == (fb > 0.0) {
        return Ok(None);
    }
    Ok(Some(refine_root(f, t0, t1, fa, fb, 1e-12)?.0))
}

/// Point on the level curve at σ = 1/2 + δ next to a crossing of the line
/// at `t_b`.
pub fn seed_near_line(kind: ContourKind, t_b: f64, opts: &TraceOptions, ctx: &EvalContext) -> Result<Complex64> {
    let sigma = 0.5 + opts.delta;
    let mut w = 2.0 * opts.delta;
    for _ in 0..8 {
        if let Some(t) = solve_on_vertical(kind, sigma, t_b - w, t_b + w, ctx)? {
            return Ok(Complex64::new(sigma, t));
        }
        w *= 2.0;
    }
    Err(Error::TraceDiverged(format!("no level crossing at σ = {sigma} near t = {t_b}")))
}

enum Stop {
    Line,
    Closed,
}

/// March from `start` with initial direction `dir` until the curve returns
/// to σ = 1/2 + δ, or closes on `start`.
fn march(
    kind: ContourKind,
    start: Complex64,
    mut dir: Complex64,
    opts: &TraceOptions,
    ctx: &EvalContext,
) -> Result<(Vec<Complex64>, Stop)> {
    let line = 0.5 + opts.delta;
    let mut pts = vec![start];
    let mut s = start;
    let mut step = (10.0 * opts.min_step).min(opts.max_step);
    let mut left_line = start.re > line + opts.delta;
    let mut travelled = 0.0;
    while pts.len() < opts.max_points {
        let g = log_derivative(kind, s, ctx)?;
        let mut tan = unit(Complex64::i() * g.conj())?;
        if (tan * dir.conj()).re < 0.0 {
            tan = -tan;
        }
        let predicted = s + tan * step;
        let accepted = match correct(kind, predicted, ctx)? {
            Some((c, iters)) if (c - predicted).norm() < MAX_CORRECTION * step => {
                let turn = ((c - s) * tan.conj()).arg().abs();
                if turn > MAX_TURN {
                    None
                } else {
                    Some((c, iters))
                }
            }
            _ => None,
        };
        let Some((next, iters)) = accepted else {
            step *= 0.5;
            if step < opts.min_step {
                return Err(Error::TraceDiverged(format!("corrector failed near {s}")));
            }
            continue;
        };
        if left_line && next.re <= line && step > LANDING_STEP * opts.delta {
            // approach the line in short steps so the corrector cannot jump
            // onto the line itself, which is also a level curve of 𝒰_K
            step = LANDING_STEP * opts.delta;
            continue;
        }
        dir = unit(next - s)?;
        travelled += (next - s).norm();
        if next.re > opts.sigma_max {
            return Err(Error::TraceDiverged(format!("trace left the strip at {next}")));
        }
        if left_line && next.re <= line {
            // land exactly on σ = 1/2 + δ
            let (lo, hi) = if s.im < next.im { (s.im, next.im) } else { (next.im, s.im) };
            let pad = 0.5 * step;
            let t = solve_on_vertical(kind, line, lo - pad, hi + pad, ctx)?.unwrap_or(next.im);
            pts.push(Complex64::new(line, t));
            return Ok((pts, Stop::Line));
        }
        if next.re > line + opts.delta {
            left_line = true;
        }
        if travelled > 4.0 * step && (next - start).norm() < step {
            pts.push(start);
            return Ok((pts, Stop::Closed));
        }
        pts.push(next);
        s = next;
        if iters <= 2 {
            step = (step * 1.5).min(opts.max_step);
        }
    }
    Err(Error::TraceDiverged(format!("no return to the line after {} points", opts.max_points)))
}

/// The off-line branch of the level curve that meets the critical line at
/// `t_b`, followed to the right of the line until it returns. The first and
/// last points lie on σ = 1/2 + δ.
pub fn trace_from_line(kind: ContourKind, t_b: f64, opts: &TraceOptions, ctx: &EvalContext) -> Result<Contour> {
    let seed = seed_near_line(kind, t_b, opts, ctx)?;
    match march(kind, seed, Complex64::new(1.0, 0.0), opts, ctx)? {
        (points, Stop::Line) => Ok(Contour { kind, points, enclosed_singularity: None }),
        (_, Stop::Closed) => Err(Error::TraceDiverged(format!("trace from t = {t_b} closed without returning"))),
    }
}

const MAX_BRIDGES: usize = 16;

/// Like `trace_from_line`, but a return to σ = 1/2 + δ farther than `tol`
/// from every ordinate in `crossings` is taken as the curve running along
/// the line closer than δ. The trace then follows σ = 1/2 + δ in its
/// direction of travel to the next level crossing, and either ends there
/// (next to a line crossing) or marches on from it.
pub fn trace_to_crossing(
    kind: ContourKind,
    t_b: f64,
    crossings: &[f64],
    tol: f64,
    opts: &TraceOptions,
    ctx: &EvalContext,
) -> Result<Contour> {
    let near_crossing = |t: f64| crossings.iter().any(|&c| (c - t).abs() <= tol);
    let mut c = trace_from_line(kind, t_b, opts, ctx)?;
    for _ in 0..MAX_BRIDGES {
        let n = c.points.len();
        let end = c.points[n - 1];
        if near_crossing(end.im) {
            return Ok(c);
        }
        let dir = if end.im >= c.points[n - 2].im { 1.0 } else { -1.0 };
        let resume = next_level_crossing(kind, end, dir, opts, ctx)?;
        if near_crossing(resume.im) {
            c.points.push(resume);
            return Ok(c);
        }
        match march(kind, resume, Complex64::new(1.0, 0.0), opts, ctx)? {
            (more, Stop::Line) => c.points.extend(more),
            (_, Stop::Closed) => {
                return Err(Error::TraceDiverged(format!("bridged trace from t = {t_b} closed without returning")))
            }
        }
    }
    Err(Error::TraceDiverged(format!("trace from t = {t_b} did not return next to a line crossing")))
}

/// The next solution of |target| = 1 on the vertical through `from`, moving
/// in direction `dir` of t.
fn next_level_crossing(kind: ContourKind, from: Complex64, dir: f64, opts: &TraceOptions, ctx: &EvalContext) -> Result<Complex64> {
    let f = |t: f64| log_modulus(kind, Complex64::new(from.re, t), ctx);
    let mut prev = (from.im + dir * 1e-8, 0.0);
    prev.1 = f(prev.0)?;
    let step = opts.delta;
    let mut t = from.im;
    while (t - from.im).abs() < 20.0 {
        t += dir * step;
        let ft = f(t)?;
        if (ft > 0.0) != (prev.1 > 0.0) {
            let ((a, fa), (b, fb)) = if dir > 0.0 { (prev, (t, ft)) } else { ((t, ft), prev) };
            return Ok(Complex64::new(from.re, refine_root(f, a, b, fa, fb, 1e-12)?.0));
        }
        prev = (t, ft);
    }
    Err(Error::TraceDiverged(format!("no level crossing near t = {} on σ = {}", from.im, from.re)))
}

/// Mirror image s → 1 - conj(s).
pub fn reflect(s: Complex64) -> Complex64 {
    Complex64::new(1.0 - s.re, s.im)
}

/// Close a half-plane trace with its mirror image.
pub fn mirror_close(half: &Contour) -> Contour {
    let mut points = half.points.clone();
    points.extend(half.points.iter().rev().map(|&s| reflect(s)));
    Contour { kind: half.kind, points, enclosed_singularity: half.enclosed_singularity }
}

/// Trace the closed curve |target| = 1 through `seed` (σ > 1/2). A curve
/// that meets the line is completed by reflection in it.
pub fn trace_contour(kind: ContourKind, seed: Complex64, ctx: &EvalContext) -> Result<Contour> {
    let opts = TraceOptions::default();
    let phi = log_modulus(kind, seed, ctx)?;
    if phi.abs() > 1e-6 {
        return Err(Error::InvalidInput(format!("seed is off the level curve: log|target| = {phi:.2e}")));
    }
    let (start, _) = correct(kind, seed, ctx)?.ok_or_else(|| Error::TraceDiverged("seed does not converge".into()))?;
    let g = log_derivative(kind, start, ctx)?;
    let tan = unit(Complex64::i() * g.conj())?;
    let (forward, stop) = march(kind, start, tan, &opts, ctx)?;
    if let Stop::Closed = stop {
        return Ok(Contour { kind, points: forward, enclosed_singularity: None });
    }
    let (backward, stop) = march(kind, start, -tan, &opts, ctx)?;
    if let Stop::Closed = stop {
        return Ok(Contour { kind, points: backward, enclosed_singularity: None });
    }
    let mut points: Vec<Complex64> = backward.into_iter().rev().collect();
    points.extend(forward.into_iter().skip(1));
    Ok(mirror_close(&Contour { kind, points, enclosed_singularity: None }))
}

/// Largest deviation of log|target| from zero over the contour points.
pub fn max_level_error(contour: &Contour, ctx: &EvalContext) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &s in &contour.points {
        worst = worst.max(log_modulus(contour.kind, s, ctx)?.abs());
    }
    Ok(worst)
}

/// Counter-clockwise closed polygon: the trace followed by the segment of
/// σ = 1/2 + δ between its end points.
pub fn closed_with_line(trace: &Contour) -> Vec<Complex64> {
    let mut pts = trace.points.clone();
    if signed_area(&pts) < 0.0 {
        pts.reverse();
    }
    pts
}

pub fn signed_area(pts: &[Complex64]) -> f64 {
    let n = pts.len();
    (0..n).map(|k| {
        let (a, b) = (pts[k], pts[(k + 1) % n]);
        a.re * b.im - b.re * a.im
    })
    .sum::<f64>()
        * 0.5
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::line::scan_line;
    use crate::geometry::region::BoundarySource;

    #[test]
    fn island_near_13_boundary_returns_to_line() {
        let ctx = EvalContext::default();
        let scan = scan_line(11.0, 16.0, &ctx).unwrap();
        let uk: Vec<f64> = scan.boundaries.iter().filter(|b| b.source == BoundarySource::UK).map(|b| b.t).collect();
        assert!(uk.len() >= 2, "{uk:?}");
        let trace = trace_from_line(ContourKind::UnitModUK, uk[0], &TraceOptions::default(), &ctx).unwrap();
        let end = trace.points.last().unwrap().im;
        assert!((end - uk[uk.len() - 1]).abs() < 0.05, "returned at {end}, boundaries {uk:?}");
        assert!(max_level_error(&trace, &ctx).unwrap() < 1e-8);
        let closed = mirror_close(&trace);
        for (a, b) in closed.points.iter().zip(closed.points.iter().rev()) {
            assert!((reflect(*a) - *b).norm() < 1e-12);
        }
    }

    #[test]
    fn polygon_orientation() {
        let c = Contour {
            kind: ContourKind::UnitModUK,
            points: vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.5)],
            enclosed_singularity: None,
        };
        assert!(signed_area(&closed_with_line(&c)) > 0.0);
    }
}
