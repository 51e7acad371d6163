//! Continuous arguments of 𝒰, 𝒰_K and ℱ along the critical line.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::context::EvalContext;
use crate::error::{Error, Result};
use crate::function::FunctionId;
use crate::lattice::SquarePoint;

/// Offset used by the five-point derivative stencil.
pub const DERIV_STEP: f64 = 1e-3;
const MIN_DERIV_STEP: f64 = 1e-7;
/// Largest phase change across the stencil before it is narrowed.
const MAX_STENCIL_ARG: f64 = 0.2;
/// Adaptive tracking gives up below this step.
const MIN_STEP: f64 = 1e-9;

/// Reduce an angle to (-π, π].
pub fn wrap_phase(x: f64) -> f64 {
    let mut y = x % TAU;
    if y > PI {
        y -= TAU;
    } else if y <= -PI {
        y += TAU;
    }
    y
}

pub fn line_point(t: f64, ctx: &EvalContext) -> Result<SquarePoint> {
    SquarePoint::new(Complex64::new(0.5, t), ctx)
}

fn ratio_index(id: FunctionId) -> Result<usize> {
    match id {
        FunctionId::U => Ok(0),
        FunctionId::UK => Ok(1),
        FunctionId::F => Ok(2),
        other => Err(Error::InvalidInput(format!("phase tracking supports U, UK and F, not {other}"))),
    }
}

fn ratio_value(p: &SquarePoint, id: FunctionId) -> Result<Complex64> {
    match id {
        FunctionId::U => p.u(),
        FunctionId::UK => p.u_k(),
        _ => p.f(),
    }
}

/// t-derivatives of arg 𝒰, arg 𝒰_K, arg ℱ at one ordinate, from a shared
/// five-point stencil.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineDerivatives {
    pub t: f64,
    /// Principal arguments at t: [𝒰, 𝒰_K, ℱ].
    pub args: [f64; 3],
    /// d arg/dt: [𝒰, 𝒰_K, ℱ].
    pub slopes: [f64; 3],
}

impl LineDerivatives {
    pub fn at(t: f64, ctx: &EvalContext) -> Result<Self> {
        Self::with_centre(t, &line_point(t, ctx)?, ctx)
    }

    /// As [`LineDerivatives::at`], reusing an already evaluated centre point.
    /// The stencil shrinks until the five-point and central estimates agree,
    /// which resolves zero-pole pairs lying very close to the line.
    pub fn with_centre(t: f64, centre_point: &SquarePoint, ctx: &EvalContext) -> Result<Self> {
        let centre = centre_point.ratio_args();
        let mut h = DERIV_STEP;
        loop {
            let mut rel = [[0.0; 3]; 4];
            for (k, off) in [-2.0, -1.0, 1.0, 2.0].iter().enumerate() {
                let a = line_point(t + off * h, ctx)?.ratio_args();
                for j in 0..3 {
                    rel[k][j] = wrap_phase(a[j] - centre[j]);
                }
            }
            let mut slopes = [0.0; 3];
            let mut consistent = true;
            for j in 0..3 {
                slopes[j] = (rel[0][j] - 8.0 * rel[1][j] + 8.0 * rel[2][j] - rel[3][j]) / (12.0 * h);
                let central = (rel[2][j] - rel[1][j]) / (2.0 * h);
                let spread = rel[0][j].abs().max(rel[3][j].abs());
                consistent &= spread <= MAX_STENCIL_ARG && (slopes[j] - central).abs() <= 1e-3 * slopes[j].abs().max(1.0);
            }
            if consistent || h <= MIN_DERIV_STEP {
                return Ok(Self { t, args: centre, slopes });
            }
            h /= 8.0;
        }
    }

    pub fn slope(&self, id: FunctionId) -> Result<f64> {
        Ok(self.slopes[ratio_index(id)?])
    }
}

/// d arg f(1/2 + it)/dt for f ∈ {𝒰, 𝒰_K, ℱ}.
pub fn arg_derivative(id: FunctionId, t: f64, ctx: &EvalContext) -> Result<f64> {
    ratio_index(id)?;
    LineDerivatives::at(t, ctx)?.slope(id)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSample {
    pub t: f64,
    pub value: Complex64,
    pub unwrapped_arg: f64,
    pub d_arg_dt: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseTrack {
    pub function: FunctionId,
    pub t_start: f64,
    pub t_end: f64,
    pub samples: Vec<PhaseSample>,
}

impl PhaseTrack {
    pub fn total_change(&self) -> f64 {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => b.unwrapped_arg - a.unwrapped_arg,
            _ => 0.0,
        }
    }
}

/// Base sampling step at height t.
pub fn base_step(t: f64) -> f64 {
    (0.5 / t.max(2.0).ln()).min(0.05)
}

/// Sample arg f(1/2 + it) on [t0, t1] with steps small enough that no two
/// consecutive samples differ in phase by more than π/2 and each step agrees
/// with the trapezoid rule on the end slopes, so fast turns are not aliased.
pub fn track_phase(id: FunctionId, t0: f64, t1: f64, ctx: &EvalContext) -> Result<PhaseTrack> {
    let j = ratio_index(id)?;
    ctx.check_t(t0)?;
    if !(t1 > t0) {
        return Err(Error::InvalidInput(format!("empty phase range [{t0}, {t1}]")));
    }
    let sample = |t: f64| -> Result<(PhaseSample, f64)> {
        let p = line_point(t, ctx)?;
        let d = LineDerivatives::with_centre(t, &p, ctx)?;
        let value = ratio_value(&p, id)?;
        Ok((PhaseSample { t, value, unwrapped_arg: 0.0, d_arg_dt: d.slopes[j] }, d.args[j]))
    };
    let (mut prev, mut prev_arg) = sample(t0)?;
    prev.unwrapped_arg = prev_arg;
    let mut samples = vec![prev];
    let mut step = base_step(t0);
    while prev.t < t1 {
        let next_t = (prev.t + step).min(t1);
        let (mut next, arg) = sample(next_t)?;
        let h = next_t - prev.t;
        let delta = wrap_phase(arg - prev_arg);
        let predicted = 0.5 * h * (prev.d_arg_dt + next.d_arg_dt);
        if delta.abs() > PI / 2.0 || (delta - predicted).abs() > PI / 4.0 {
            step = 0.5 * h;
            if step < MIN_STEP {
                return Err(Error::StepCollapse { t: prev.t });
            }
            continue;
        }
        next.unwrapped_arg = prev.unwrapped_arg + delta;
        samples.push(next);
        prev = next;
        prev_arg = arg;
        step = (step * 1.5).min(base_step(prev.t));
    }
    Ok(PhaseTrack { function: id, t_start: t0, t_end: t1, samples })
}
