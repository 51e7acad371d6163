//! Riemann ζ, Hurwitz ζ and the Dirichlet beta function L₋₄ by
//! Euler–Maclaurin summation, continued left of Re z = 1/2 through the
//! functional equations.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::{ln_gamma, ln_sin_pi, LN_PI};
use crate::context::EvalContext;
use crate::error::{Error, Result};

/// B_{2k} / (2k)!, k = 1..=30.
#[allow(clippy::excessive_precision)]
const BERNOULLI_OVER_FACT: [f64; 30] = [
    0.083333333333333333,
    -0.0013888888888888889,
    3.3068783068783069e-5,
    -8.2671957671957672e-7,
    2.0876756987868099e-8,
    -5.2841901386874932e-10,
    1.3382536530684679e-11,
    -3.3896802963225829e-13,
    8.5860620562778446e-15,
    -2.1748686985580619e-16,
    5.5090028283602295e-18,
    -1.3954464685812523e-19,
    3.5347070396294675e-21,
    -8.9535174270375469e-23,
    2.2679524523376831e-24,
    -5.7447906688722024e-26,
    1.4551724756148649e-27,
    -3.6859949406653102e-29,
    9.3367342570950447e-31,
    -2.3650224157006299e-32,
    5.9906717624821343e-34,
    -1.5174548844682903e-35,
    3.8437581254541882e-37,
    -9.736353072646691e-39,
    2.466247044200681e-40,
    -6.2470767418207437e-42,
    1.5824030244644914e-43,
    -4.008273685948936e-45,
    1.0153075855569556e-46,
    -2.5718041582418717e-48,
];

/// A value together with an estimate of its absolute error.
#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: Complex64,
    pub err: f64,
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// (e^x - 1) / x
fn exprel(x: Complex64) -> Complex64 {
    if x.norm() < 1e-3 {
        one() + x * (0.5 + x * (1.0 / 6.0 + x / 24.0))
    } else {
        (x.exp() - 1.0) / x
    }
}

fn terms_for(s: Complex64, ctx: &EvalContext) -> usize {
    let m = ctx.em_order as f64;
    (0.5 * (s.norm() + 2.0 * m)).ceil() as usize + 2
}

/// Euler–Maclaurin tail corrections Σ_k B_{2k}/(2k)! (s)_{2k-1} x^{-s-2k+1}
/// given x^{-s} and 1/x. Returns the correction and the magnitude of the first
/// omitted term.
fn em_corrections(s: Complex64, x_pow_neg_s: Complex64, inv_x: f64, order: usize) -> (Complex64, f64) {
    let mut poch = s; // (s)_{2k-1}
    let mut xp = x_pow_neg_s * inv_x; // x^{-s-2k+1}
    let mut acc = Complex64::new(0.0, 0.0);
    let inv_x2 = inv_x * inv_x;
    for (k, b) in BERNOULLI_OVER_FACT.iter().enumerate().take(order) {
        acc += poch * xp * *b;
        let j = (2 * k + 1) as f64;
        poch *= (s + j) * (s + j + 1.0);
        xp *= inv_x2;
    }
    let next = BERNOULLI_OVER_FACT.get(order).copied().unwrap_or(BERNOULLI_OVER_FACT[29] * 1e-2);
    let omitted = (poch * xp).norm() * next.abs();
    (acc, 2.0 * omitted)
}

/// Hurwitz zeta ζ(s, a) = Σ_{n≥0} (n+a)^{-s} for a > 0 and s ≠ 1.
/// Accurate to the context tolerance when Re s ≥ 1/2 (and for moderate |s|
/// somewhat beyond).
pub fn hurwitz_zeta(s: Complex64, a: f64, ctx: &EvalContext) -> Result<Complex64> {
    Ok(hurwitz_zeta_est(s, a, ctx)?.value)
}

pub fn hurwitz_zeta_est(s: Complex64, a: f64, ctx: &EvalContext) -> Result<Estimate> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidInput(format!("Hurwitz parameter a = {a} must be positive")));
    }
    if s == one() {
        return Err(Error::PoleAt(s));
    }
    let mut n = terms_for(s, ctx).saturating_sub(a.floor() as usize).max(1);
    loop {
        if n > ctx.max_terms {
            return Err(Error::NotConvergent(format!("ζ({s}, {a}) needs more than {} terms", ctx.max_terms)));
        }
        let mut direct = Complex64::new(0.0, 0.0);
        for k in 0..n {
            direct += (-s * (k as f64 + a).ln()).exp();
        }
        let x = n as f64 + a;
        let lx = x.ln();
        let x_neg_s = (-s * lx).exp();
        let integral = x_neg_s * x / (s - 1.0);
        let (corr, omitted) = em_corrections(s, x_neg_s, 1.0 / x, ctx.em_order);
        let value = direct + integral + x_neg_s * 0.5 + corr;
        let err = omitted + 4.0 * f64::EPSILON * (n as f64).sqrt() * (1.0 + s.im.abs() * lx) * direct.norm().max(1.0);
        if omitted <= ctx.target_rel_err * value.norm() || omitted == 0.0 {
            return Ok(Estimate { value, err });
        }
        n = n * 3 / 2 + 1;
    }
}

/// Riemann ζ(z). Euler–Maclaurin for Re z ≥ 1/2, functional equation otherwise.
pub fn zeta(z: Complex64, ctx: &EvalContext) -> Result<Complex64> {
    if z == one() {
        return Err(Error::PoleAt(z));
    }
    if z.re >= 0.5 {
        return hurwitz_zeta(z, 1.0, ctx);
    }
    if z.im == 0.0 {
        if z.re == 0.0 {
            return Ok(Complex64::new(-0.5, 0.0));
        }
        if z.re < 0.0 && z.re % 2.0 == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
    }
    let w = one() - z;
    let log_chi = z * 2f64.ln() + (z - 1.0) * LN_PI + ln_sin_pi(z * 0.5) + ln_gamma(w)?;
    Ok(log_chi.exp() * hurwitz_zeta(w, 1.0, ctx)?)
}

/// log of (π/4)^{-(z+1)/2} Γ((z+1)/2), the completing factor of L₋₄.
pub(crate) fn ln_beta_completion(z: Complex64) -> Result<Complex64> {
    Ok(-(z + 1.0) * 0.5 * (PI / 4.0).ln() + ln_gamma((z + 1.0) * 0.5)?)
}

/// L₋₄(z) = Σ_{n≥0} (-1)^n (2n+1)^{-z} for Re z ≥ 1/2 (no continuation).
fn beta_right(z: Complex64, ctx: &EvalContext) -> Result<Estimate> {
    let mut n = terms_for(z, ctx);
    loop {
        if n > ctx.max_terms {
            return Err(Error::NotConvergent(format!("L₋₄({z}) needs more than {} terms", ctx.max_terms)));
        }
        let mut direct = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let k = k as f64;
            direct += (-z * (k + 0.25).ln()).exp() - (-z * (k + 0.75).ln()).exp();
        }
        let xa = n as f64 + 0.25;
        let xb = n as f64 + 0.75;
        let (la, lb) = (xa.ln(), xb.ln());
        let pa = (-z * la).exp();
        let pb = (-z * lb).exp();
        // [(xa)^{1-z} - (xb)^{1-z}] / (z-1), stable as z → 1
        let w = one() - z;
        let integral = -(w * lb).exp() * (la - lb) * exprel(w * (la - lb));
        let (ca, oa) = em_corrections(z, pa, 1.0 / xa, ctx.em_order);
        let (cb, ob) = em_corrections(z, pb, 1.0 / xb, ctx.em_order);
        let sum = direct + integral + (pa - pb) * 0.5 + ca - cb;
        let scale = (-z * 4f64.ln()).exp();
        let value = sum * scale;
        let omitted = (oa + ob) * scale.norm();
        let err = omitted + 8.0 * f64::EPSILON * (n as f64).sqrt() * (1.0 + z.im.abs() * la) * value.norm().max(scale.norm());
        if omitted <= ctx.target_rel_err * value.norm() || omitted == 0.0 {
            return Ok(Estimate { value, err });
        }
        n = n * 3 / 2 + 1;
    }
}

/// Dirichlet beta function L₋₄(z); entire.
pub fn dirichlet_beta(z: Complex64, ctx: &EvalContext) -> Result<Complex64> {
    if z.re >= 0.5 {
        return Ok(beta_right(z, ctx)?.value);
    }
    // trivial zeros at z = -1, -3, ...
    if z.im == 0.0 && z.re < 0.0 && (z.re - 1.0) % 2.0 == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let w = one() - z;
    let factor = (ln_beta_completion(w)? - ln_beta_completion(z)?).exp();
    Ok(factor * beta_right(w, ctx)?.value)
}
