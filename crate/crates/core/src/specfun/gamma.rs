//! Complex Γ and log Γ.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
pub(crate) const LN_PI: f64 = 1.144_729_885_849_400_2;

/// B_{2k} / (2k (2k-1)) for the Stirling series.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

/// Stirling series is used once |z| reaches this radius.
const STIRLING_RADIUS: f64 = 15.0;

pub(crate) fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// log Γ(z). The imaginary part is determined only modulo 2π, which is all
/// the phase bookkeeping downstream relies on.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(z) {
        return Err(Error::PoleAt(z));
    }
    if z.re < 0.5 {
        let one = Complex64::new(1.0, 0.0);
        Ok(Complex64::new(LN_PI, 0.0) - ln_sin_pi(z) - ln_gamma_right(one - z))
    } else {
        Ok(ln_gamma_right(z))
    }
}

fn ln_gamma_right(z: Complex64) -> Complex64 {
    let mut w = z;
    let mut prod = Complex64::new(1.0, 0.0);
    let mut shifted = false;
    while w.norm() < STIRLING_RADIUS {
        prod *= w;
        w += 1.0;
        shifted = true;
    }
    let series = stirling(w);
    if shifted {
        series - prod.ln()
    } else {
        series
    }
}

fn stirling(w: Complex64) -> Complex64 {
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut term = inv;
    let mut acc = Complex64::new(0.0, 0.0);
    for c in STIRLING {
        acc += term * c;
        term *= inv2;
    }
    (w - 0.5) * w.ln() - w + LN_SQRT_2PI + acc
}

/// log sin(πz), stable for large |Im z|.
pub(crate) fn ln_sin_pi(z: Complex64) -> Complex64 {
    if z.im > 0.0 {
        let i = Complex64::i();
        let e = (i * 2.0 * PI * z).exp();
        -i * PI * z + (Complex64::new(1.0, 0.0) - e).ln() - Complex64::new(2f64.ln(), -PI / 2.0)
    } else if z.im < 0.0 {
        ln_sin_pi(z.conj()).conj()
    } else {
        Complex64::new((PI * z.re).sin(), 0.0).ln()
    }
}

/// Γ(z) for complex z; reflection is applied left of Re z = 1/2.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    if is_nonpositive_integer(z) {
        return Err(Error::PoleAt(z));
    }
    if z.im == 0.0 && z.re >= 1.0 && z.re <= 171.0 && z.re == z.re.round() {
        let n = z.re as u32;
        let fact = (1..n).fold(1.0f64, |acc, k| acc * k as f64);
        return Ok(Complex64::new(fact, 0.0));
    }
    Ok(ln_gamma(z)?.exp())
}
