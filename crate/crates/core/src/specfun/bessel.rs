//! Modified Bessel function of the second kind K_ν(x) for complex order and
//! positive real argument.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use crate::context::EvalContext;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselK {
    pub value: Complex64,
    /// Absolute error estimate.
    pub err: f64,
    /// Set when the true value lies below the representable range and `value`
    /// is an exact zero.
    pub underflow: bool,
}

/// K_ν(x) = ∫₀^∞ e^{-x cosh u} cosh(νu) du.
pub fn bessel_k(order: Complex64, x: f64, ctx: &EvalContext) -> Result<BesselK> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidInput(format!("Bessel argument must be positive, got {x}")));
    }
    let nu_abs = order.norm();
    if x > (2.0 * nu_abs * nu_abs).max(30.0) {
        if let Some(k) = asymptotic(order, x, ctx) {
            return Ok(k);
        }
    }
    quadrature(order, x, ctx)
}

/// Hankel expansion √(π/2x) e^{-x} Σ a_k(ν) x^{-k}; `None` if the series does
/// not reach the target before its terms begin to grow.
fn asymptotic(nu: Complex64, x: f64, ctx: &EvalContext) -> Option<BesselK> {
    let mu = nu * nu * 4.0;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let j = (2 * k - 1) as f64;
        term *= (mu - j * j) / (8.0 * k as f64 * x);
        let size = term.norm();
        if size > prev {
            return None;
        }
        sum += term;
        prev = size;
        if size <= ctx.target_rel_err * 1e-2 * sum.norm() {
            let pref = (PI / (2.0 * x)).sqrt() * (-x).exp();
            if pref == 0.0 {
                return Some(BesselK { value: Complex64::new(0.0, 0.0), err: 0.0, underflow: true });
            }
            let value = sum * pref;
            let err = (size + 4.0 * f64::EPSILON * sum.norm()) * pref;
            return Some(BesselK { value, err, underflow: false });
        }
    }
    None
}

/// Trapezoid rule for ½∫ exp(-x cosh u + νu) du along Im u = θ. The shift θ
/// moves the path toward the saddle of the exponent so that, for large
/// |Im ν|, the integrand is not much larger than the result.
fn quadrature(nu: Complex64, x: f64, ctx: &EvalContext) -> Result<BesselK> {
    if nu.im < 0.0 {
        let k = quadrature(nu.conj(), x, ctx)?;
        return Ok(BesselK { value: k.value.conj(), ..k });
    }
    let (alpha, beta) = (nu.re, nu.im);
    let margin = if beta > 0.0 { (3.0 / beta).min(FRAC_PI_2) } else { FRAC_PI_2 };
    let theta = (beta / x).min(1.0).asin().min(FRAC_PI_2 - margin).max(0.0);
    let strip = FRAC_PI_2 - theta;
    let damp = x * theta.cos();
    // real part of the exponent along the path
    let m = |v: f64| -damp * v.cosh() + alpha * v;
    let v_peak = (alpha / damp).asinh();
    let top = m(v_peak);
    let e0 = top - beta * theta;
    if e0 < -740.0 {
        return Ok(BesselK { value: Complex64::new(0.0, 0.0), err: 0.0, underflow: true });
    }
    let cut = 16.0 + (1.0 / ctx.target_rel_err).ln().max(0.0);
    let mut hi = v_peak + 0.5;
    while top - m(hi) < cut {
        hi += 0.25;
    }
    let mut lo = v_peak - 0.5;
    while top - m(lo) < cut {
        lo -= 0.25;
    }
    let i_theta = Complex64::new(0.0, theta);
    let f = |v: f64| {
        let u = i_theta + v;
        (-u.cosh() * x + nu * u - e0).exp()
    };
    // trapezoid error ~ exp(-2πd/h) times the integrand size a distance d off the path
    let d = 0.9 * strip;
    let resolution = (ctx.quad_nodes as f64 / 16.0).max(0.25);
    let mut h = (2.0 * PI * d / (cut + beta * d)).min(0.5) / resolution;
    let span = hi - lo;
    let nodes_for = |h: f64| (span / h).ceil() as usize;
    let sum_on = |h: f64, offset: f64| -> (Complex64, f64) {
        let n = nodes_for(h);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut abs = 0.0;
        for k in 0..=n {
            let v = f(lo + offset + k as f64 * h);
            acc += v;
            abs += v.norm();
        }
        (acc, abs)
    };
    let (s0, a0) = sum_on(h, 0.0);
    let mut coarse = s0 * h;
    let mut abs_sum = a0 * h;
    loop {
        if nodes_for(h) * 2 > ctx.max_terms {
            return Err(Error::NotConvergent(format!("K_{nu}({x}) quadrature exceeded {} nodes", ctx.max_terms)));
        }
        let (mid, amid) = sum_on(h, 0.5 * h);
        let fine = (coarse + mid * h) * 0.5;
        abs_sum = (abs_sum + amid * h) * 0.5;
        h *= 0.5;
        let roundoff = 4.0 * f64::EPSILON * abs_sum * (nodes_for(h) as f64).sqrt();
        let diff = (fine - coarse).norm();
        if diff <= ctx.target_rel_err * fine.norm() || diff <= roundoff {
            let scale = 0.5 * e0.exp();
            let err = (diff.min(1e-3 * fine.norm()) + roundoff) * scale;
            return Ok(BesselK { value: fine * scale, err, underflow: false });
        }
        coarse = fine;
    }
}
