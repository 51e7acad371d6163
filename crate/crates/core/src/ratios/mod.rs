//! Ratio functions 𝒰, 𝒱, 𝒰_K, 𝒱_K, ℱ, 𝒢 on the square lattice.

pub mod phase;

use num_complex::Complex64;

use crate::context::EvalContext;
use crate::error::{Error, Result};
use crate::lattice::SquarePoint;

pub use phase::{arg_derivative, line_point, track_phase, wrap_phase, LineDerivatives, PhaseSample, PhaseTrack};

/// Denominators smaller than this fraction of the numerator are treated as
/// poles.
const POLE_RATIO: f64 = 1e-15;

fn ratio(s: Complex64, num: Complex64, den: Complex64) -> Result<Complex64> {
    if den.norm() <= POLE_RATIO * num.norm() || den.norm() == 0.0 {
        return Err(Error::PoleAt(s));
    }
    Ok(num / den)
}

impl SquarePoint {
    /// 𝒰(s) = ξ₁(2s-1)/ξ₁(2s).
    pub fn u(&self) -> Result<Complex64> {
        ratio(self.s, self.xi_2s_1, self.xi_2s)
    }

    /// 𝒱(s) = 𝒯₊/𝒯₋ = (1 + 𝒰)/(1 - 𝒰).
    pub fn v(&self) -> Result<Complex64> {
        ratio(self.s, self.t_plus(), self.t_minus())
    }

    /// 𝒰_K(s) = 𝒦(1,1;s)/𝒦(1,1;1-s).
    pub fn u_k(&self) -> Result<Complex64> {
        ratio(self.s, self.k11(), self.k11_reflected())
    }

    /// 𝒱_K(s) = (𝒰_K - 1)/(𝒰_K + 1), written through 𝒦(1,1) directly.
    pub fn v_k(&self) -> Result<Complex64> {
        let (p, q) = (self.k11(), self.k11_reflected());
        ratio(self.s, p - q, p + q)
    }

    /// ℱ(s) = 𝒰_K/𝒰.
    pub fn f(&self) -> Result<Complex64> {
        ratio(self.s, self.k11() * self.xi_2s, self.k11_reflected() * self.xi_2s_1)
    }

    /// 𝒢(s) = (ℱ - 1)/(ℱ + 1).
    pub fn g(&self) -> Result<Complex64> {
        let p = self.k11() * self.xi_2s;
        let q = self.k11_reflected() * self.xi_2s_1;
        ratio(self.s, p - q, p + q)
    }

    /// Principal arguments of 𝒰, 𝒰_K and ℱ, computed from factor arguments
    /// so that no division is needed.
    pub fn ratio_args(&self) -> [f64; 3] {
        let u = self.xi_2s_1.arg() - self.xi_2s.arg();
        let uk = self.k11().arg() - self.k11_reflected().arg();
        [wrap_phase(u), wrap_phase(uk), wrap_phase(uk - u)]
    }
}

pub fn u(s: Complex64, ctx: &EvalContext) -> Result<Complex64> {
    SquarePoint::new(s, ctx)?.u()
}

pub fn v(s: Complex64, ctx: &EvalContext) -> Result<Complex64> {
    SquarePoint::new(s, ctx)?.v()
}

pub fn u_k(s: Complex64, ctx: &EvalContext) -> Result<Complex64> {
    SquarePoint::new(s, ctx)?.u_k()
}

pub fn v_k(s: Complex64, ctx: &EvalContext) -> Result<Complex64> {
    SquarePoint::new(s, ctx)?.v_k()
}

pub fn f(s: Complex64, ctx: &EvalContext) -> Result<Complex64> {
    SquarePoint::new(s, ctx)?.f()
}

pub fn g(s: Complex64, ctx: &EvalContext) -> Result<Complex64> {
    SquarePoint::new(s, ctx)?.g()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ctx() -> EvalContext {
        EvalContext::default()
    }

    #[test]
    fn unit_modulus_on_line() {
        let p = SquarePoint::new(c(0.5, 20.0), &ctx()).unwrap();
        assert!((p.u().unwrap().norm() - 1.0).abs() < 1e-12);
        assert!((p.u_k().unwrap().norm() - 1.0).abs() < 1e-12);
        assert!((p.f().unwrap().norm() - 1.0).abs() < 1e-12);
        let v = p.v().unwrap();
        assert!(v.re.abs() < 1e-10 * v.norm());
        let vk = p.v_k().unwrap();
        assert!(vk.re.abs() < 1e-10 * vk.norm());
    }

    #[test]
    fn u_inside_right_half() {
        assert!(u(c(0.7, 20.0), &ctx()).unwrap().norm() < 1.0);
        assert!(u(c(0.3, 20.0), &ctx()).unwrap().norm() > 1.0);
    }

    #[test]
    fn moebius_forms() {
        let s = c(0.63, 31.0);
        let p = SquarePoint::new(s, &ctx()).unwrap();
        let (uu, vv) = (p.u().unwrap(), p.v().unwrap());
        assert!((vv - (1.0 + uu) / (1.0 - uu)).norm() < 1e-10 * vv.norm());
        let i = Complex64::i();
        let lhs = (vv - i) / (vv + i);
        let rhs = i * (uu - i) / (uu + i);
        assert!((lhs - rhs).norm() < 1e-10 * lhs.norm());
        let (uk, vk) = (p.u_k().unwrap(), p.v_k().unwrap());
        assert!((uk - (1.0 + vk) / (1.0 - vk)).norm() < 1e-10 * uk.norm());
        let ff = p.f().unwrap();
        assert!((ff - uk / uu).norm() < 1e-12 * ff.norm());
        assert!((p.g().unwrap() - (ff - 1.0) / (ff + 1.0)).norm() < 1e-12);
    }

    #[test]
    fn reflection_symmetries() {
        let s = c(0.71, 23.5);
        let r = c(1.0, 0.0) - s;
        let a = SquarePoint::new(s, &ctx()).unwrap();
        let b = SquarePoint::new(r, &ctx()).unwrap();
        assert!((a.u_k().unwrap() * b.u_k().unwrap() - 1.0).norm() < 1e-10);
        assert!((a.v_k().unwrap() + b.v_k().unwrap()).norm() < 1e-10 * a.v_k().unwrap().norm());
    }

    #[test]
    fn uk_grows_far_right() {
        let s = c(6.0, 100.0);
        let uk = u_k(s, &ctx()).unwrap();
        let two_s = (s * (-2f64.ln())).exp();
        let asym = s * 2.0 * (1.0 + two_s - (std::f64::consts::PI / s).sqrt())
            / (1.0 - (s - 1.0) * ((1.0 - s) * 2f64.ln()).exp());
        assert!(uk.norm() > 50.0);
        assert!((uk - asym).norm() < 0.05 * asym.norm(), "{uk} {asym}");
    }
}
