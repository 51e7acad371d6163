use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Lowest ordinate at which the ratio functions are known to behave
/// (unit-modulus split and zero confinement of the ξ₁ combinations).
pub const VALIDITY_THRESHOLD: f64 = 3.9125;

/// Precision, truncation and tolerance settings shared by every evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalContext {
    pub target_rel_err: f64,
    pub max_terms: usize,
    /// Number of Bernoulli correction terms in Euler–Maclaurin sums.
    pub em_order: usize,
    /// Resolution scale for the Bessel-K trapezoid rule (nodes per unit of u).
    pub quad_nodes: usize,
    pub t_min_scan: f64,
}

impl Default for EvalContext {
    fn default() -> Self {
        Self {
            target_rel_err: 1e-13,
            max_terms: 1 << 20,
            em_order: 12,
            quad_nodes: 16,
            t_min_scan: 5.0,
        }
    }
}

impl EvalContext {
    pub fn validate(&self) -> Result<()> {
        if !(self.target_rel_err > 0.0) {
            return Err(Error::InvalidInput("target_rel_err must be positive".into()));
        }
        if self.max_terms < 16 {
            return Err(Error::InvalidInput("max_terms must be at least 16".into()));
        }
        if !(self.t_min_scan > VALIDITY_THRESHOLD) {
            return Err(Error::InvalidInput(format!(
                "t_min_scan must exceed {VALIDITY_THRESHOLD}"
            )));
        }
        if self.em_order == 0 || self.em_order > 30 {
            return Err(Error::InvalidInput("em_order must be in 1..=30".into()));
        }
        if self.quad_nodes == 0 {
            return Err(Error::InvalidInput("quad_nodes must be positive".into()));
        }
        Ok(())
    }

    /// Same settings with truncation limits doubled; used to re-check
    /// near-cancellation results.
    pub fn refined(&self) -> Self {
        Self {
            target_rel_err: self.target_rel_err * 1e-2,
            max_terms: self.max_terms * 2,
            em_order: (self.em_order * 2).min(30),
            quad_nodes: self.quad_nodes * 2,
            t_min_scan: self.t_min_scan,
        }
    }

    pub fn with_t_min(mut self, t_min: f64) -> Self {
        self.t_min_scan = t_min;
        self
    }

    pub(crate) fn check_t(&self, t: f64) -> Result<()> {
        if t < self.t_min_scan {
            return Err(Error::InvalidInput(format!(
                "t = {t} is below t_min_scan = {}",
                self.t_min_scan
            )));
        }
        Ok(())
    }
}
