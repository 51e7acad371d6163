//! Cell-by-cell sampling of the critical line.
//!
//! Each cell of the scan grid is subdivided until every ratio phase moves by
//! less than π/2 across a leaf and the zero counts implied by the phases
//! agree with the surrogate sign changes. Leaves then yield the sign changes
//! of d arg 𝒰_K/dt and d arg ℱ/dt (region boundaries) and the zeros of every
//! surrogate family.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::region::{Boundary, BoundarySource, RegionKind};
use crate::context::EvalContext;
use crate::error::{Error, Result};
use crate::ratios::phase::{line_point, wrap_phase, LineDerivatives};
use crate::zeros::locate::{refine_zero, ZeroRecord};
use crate::zeros::surrogate::{surrogates_from_point, SURROGATE_FAMILIES};
use crate::zeros::winding::count_crossings;

/// Boundaries are bisected to this half-width.
pub const BOUNDARY_TOL: f64 = 1e-6;
/// Subdivision driven by curvature heuristics stops at this width.
pub const SOFT_MIN_WIDTH: f64 = 1e-5;
/// Subdivision required for correctness stops here and logs an anomaly.
pub const HARD_MIN_WIDTH: f64 = 1e-8;
/// Allowed gap between the phase change and its trapezoid estimate.
const TRAPEZOID_TOL: f64 = 0.1;
/// Below this height the monotonicity of arg 𝒰 is not expected.
pub const U_MONOTONE_FROM: f64 = 10.0;

const IDX_U: usize = 0;
const IDX_UK: usize = 1;
const IDX_F: usize = 2;

/// Phases, phase slopes and surrogates at one ordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineSample {
    pub t: f64,
    /// Principal arguments of 𝒰, 𝒰_K, ℱ.
    pub args: [f64; 3],
    /// d arg/dt of 𝒰, 𝒰_K, ℱ.
    pub slopes: [f64; 3],
    /// Surrogates in [`SURROGATE_FAMILIES`] order.
    pub surrogates: [f64; 9],
}

impl LineSample {
    pub fn at(t: f64, ctx: &EvalContext) -> Result<Self> {
        let p = line_point(t, ctx)?;
        let d = LineDerivatives::with_centre(t, &p, ctx)?;
        Ok(Self { t, args: d.args, slopes: d.slopes, surrogates: surrogates_from_point(&p)? })
    }
}

/// Signs of the two classifying derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlopeState {
    pub uk_rising: bool,
    pub f_rising: bool,
}

impl SlopeState {
    pub fn of(slopes: &[f64; 3]) -> Self {
        Self { uk_rising: slopes[IDX_UK] > 0.0, f_rising: slopes[IDX_F] > 0.0 }
    }

    /// Kind from the derivative signs alone; a rising 𝒰_K phase is reported
    /// as Extended since telling enclaves apart needs the boundary contours.
    pub fn kind(self) -> RegionKind {
        if self.uk_rising {
            RegionKind::Extended
        } else if self.f_rising {
            RegionKind::IslandOuter
        } else {
            RegionKind::InnerIsland
        }
    }

    pub fn flip(&mut self, source: BoundarySource) {
        match source {
            BoundarySource::UK => self.uk_rising = !self.uk_rising,
            BoundarySource::F => self.f_rising = !self.f_rising,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Anomaly {
    pub t: f64,
    pub detail: String,
}

/// Everything found on a stretch of the line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineScan {
    pub t_lo: f64,
    pub t_hi: f64,
    pub start: SlopeState,
    pub boundaries: Vec<Boundary>,
    /// Zeros of the surrogate families, sorted by t.
    pub zeros: Vec<ZeroRecord>,
    /// Unwrapped change of arg 𝒰 over the stretch.
    pub u_phase_change: f64,
    /// Unwrapped change of arg 𝒰_K over the stretch.
    pub uk_phase_change: f64,
    /// Sampled ordinates (t ≥ 10) where d arg 𝒰/dt ≥ 0.
    pub u_monotone_violations: Vec<f64>,
    pub anomalies: Vec<Anomaly>,
    pub samples: usize,
}

impl LineScan {
    fn empty(first: &LineSample) -> Self {
        Self {
            t_lo: first.t,
            t_hi: first.t,
            start: SlopeState::of(&first.slopes),
            boundaries: Vec::new(),
            zeros: Vec::new(),
            u_phase_change: 0.0,
            uk_phase_change: 0.0,
            u_monotone_violations: Vec::new(),
            anomalies: Vec::new(),
            samples: 1,
        }
    }

    /// Append the scan of the stretch that starts where this one ends.
    pub fn append(&mut self, next: LineScan) -> Result<()> {
        if next.t_lo != self.t_hi {
            return Err(Error::InvalidInput(format!(
                "line scans do not abut: {} then {}",
                self.t_hi, next.t_lo
            )));
        }
        self.t_hi = next.t_hi;
        self.boundaries.extend(next.boundaries);
        self.zeros.extend(next.zeros);
        self.u_phase_change += next.u_phase_change;
        self.uk_phase_change += next.uk_phase_change;
        self.u_monotone_violations.extend(next.u_monotone_violations);
        self.anomalies.extend(next.anomalies);
        self.samples += next.samples - 1;
        Ok(())
    }

    /// Region kind (enclaves not yet separated) just after `t`.
    pub fn state_at(&self, t: f64) -> SlopeState {
        let mut s = self.start;
        for b in self.boundaries.iter().take_while(|b| b.t <= t) {
            s.flip(b.source);
        }
        s
    }
}

fn sign_changes(a: &LineSample, b: &LineSample) -> [u32; 9] {
    std::array::from_fn(|k| ((a.surrogates[k] > 0.0) != (b.surrogates[k] > 0.0)) as u32)
}

/// Whether the cubic Hermite interpolant of a phase with end slopes m0, m1
/// of equal sign has a derivative sign change inside the cell.
fn hermite_turns(d: f64, m0: f64, m1: f64) -> bool {
    if (m0 > 0.0) != (m1 > 0.0) {
        return false;
    }
    let a = -6.0 * d + 3.0 * m0 + 3.0 * m1;
    let b = 6.0 * d - 4.0 * m0 - 2.0 * m1;
    if a == 0.0 {
        return false;
    }
    let x = -b / (2.0 * a);
    if !(x > 0.0 && x < 1.0) {
        return false;
    }
    let q = a * x * x + b * x + m0;
    (q > 0.0) != (m0 > 0.0)
}

enum Split {
    None,
    Soft,
    Hard(&'static str),
}

fn split_reason(a: &LineSample, b: &LineSample) -> Split {
    let w = b.t - a.t;
    let mut d = [0.0; 3];
    let mut soft = false;
    for j in 0..3 {
        d[j] = wrap_phase(b.args[j] - a.args[j]);
        if d[j].abs() > PI / 2.0 {
            return Split::Hard("phase step above π/2");
        }
        let (m0, m1) = (a.slopes[j] * w, b.slopes[j] * w);
        if (d[j] - 0.5 * (m0 + m1)).abs() > TRAPEZOID_TOL || hermite_turns(d[j], m0, m1) {
            soft = true;
        }
    }
    let sc = sign_changes(a, b);
    let cross = |j: usize, theta: f64| count_crossings(a.args[j], d[j], theta);
    let consistent = cross(IDX_U, 0.0) == sc[2]
        && cross(IDX_U, PI) == sc[1]
        && cross(IDX_UK, 0.0) == sc[5]
        && cross(IDX_UK, PI) == sc[6]
        && cross(IDX_F, PI) == sc[0] + sc[3]
        && sc[7] + sc[8] == sc[0];
    if !consistent {
        Split::Hard("phase crossings disagree with surrogate signs")
    } else if soft {
        Split::Soft
    } else {
        Split::None
    }
}

fn subdivide(
    a: LineSample,
    b: LineSample,
    ctx: &EvalContext,
    leaves: &mut Vec<LineSample>,
    anomalies: &mut Vec<Anomaly>,
) -> Result<()> {
    let w = b.t - a.t;
    let split = match split_reason(&a, &b) {
        Split::None => false,
        Split::Soft => w > SOFT_MIN_WIDTH,
        Split::Hard(reason) => {
            if w > HARD_MIN_WIDTH {
                true
            } else {
                anomalies.push(Anomaly { t: a.t, detail: format!("{reason} on [{}, {}]", a.t, b.t) });
                false
            }
        }
    };
    if split {
        let m = LineSample::at(0.5 * (a.t + b.t), ctx)?;
        subdivide(a, m, ctx, leaves, anomalies)?;
        subdivide(m, b, ctx, leaves, anomalies)?;
    } else {
        leaves.push(b);
    }
    Ok(())
}

fn bisect_boundary(a: &LineSample, b: &LineSample, j: usize, ctx: &EvalContext) -> Result<Boundary> {
    let lo_rising = a.slopes[j] > 0.0;
    let (mut lo, mut hi) = (a.t, b.t);
    while hi - lo > 2.0 * BOUNDARY_TOL {
        let m = 0.5 * (lo + hi);
        if (LineDerivatives::at(m, ctx)?.slopes[j] > 0.0) == lo_rising {
            lo = m;
        } else {
            hi = m;
        }
    }
    let source = if j == IDX_UK { BoundarySource::UK } else { BoundarySource::F };
    Ok(Boundary { t: 0.5 * (lo + hi), err: 0.5 * (hi - lo), source, rising: !lo_rising })
}

/// Scan one grid cell whose end samples are already known.
fn scan_cell(a: &LineSample, b: &LineSample, ctx: &EvalContext, out: &mut LineScan) -> Result<()> {
    let mut leaves = vec![*a];
    subdivide(*a, *b, ctx, &mut leaves, &mut out.anomalies)?;
    out.samples += leaves.len() - 1;
    for pair in leaves.windows(2) {
        let (x, y) = (&pair[0], &pair[1]);
        for j in [IDX_UK, IDX_F] {
            if (x.slopes[j] > 0.0) != (y.slopes[j] > 0.0) {
                out.boundaries.push(bisect_boundary(x, y, j, ctx)?);
            }
        }
        for (k, &id) in SURROGATE_FAMILIES.iter().enumerate() {
            let (fa, fb) = (x.surrogates[k], y.surrogates[k]);
            if (fa > 0.0) != (fb > 0.0) {
                out.zeros.push(refine_zero(id, x.t, y.t, fa, fb, ctx)?);
            }
        }
        out.u_phase_change += wrap_phase(y.args[IDX_U] - x.args[IDX_U]);
        out.uk_phase_change += wrap_phase(y.args[IDX_UK] - x.args[IDX_UK]);
        if y.t >= U_MONOTONE_FROM && y.slopes[IDX_U] >= 0.0 {
            out.u_monotone_violations.push(y.t);
        }
    }
    out.t_hi = b.t;
    Ok(())
}

/// The scan grid on [t_lo, t_hi]: steps of `base_step(t)` from t_lo.
pub fn line_grid(t_lo: f64, t_hi: f64) -> Vec<f64> {
    crate::zeros::locate::scan_grid(t_lo, t_hi)
}

/// Scan the consecutive cells of `grid`.
pub fn scan_cells(grid: &[f64], ctx: &EvalContext) -> Result<LineScan> {
    if grid.len() < 2 {
        return Err(Error::InvalidInput("a line scan needs at least one cell".into()));
    }
    ctx.check_t(grid[0])?;
    let mut prev = LineSample::at(grid[0], ctx)?;
    let mut out = LineScan::empty(&prev);
    for &t in &grid[1..] {
        let next = LineSample::at(t, ctx)?;
        scan_cell(&prev, &next, ctx, &mut out)?;
        prev = next;
    }
    out.boundaries.sort_by(|a, b| a.t.total_cmp(&b.t));
    out.zeros.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.function.cmp(&b.function)));
    Ok(out)
}

/// Scan [t_lo, t_hi] on the standard grid.
pub fn scan_line(t_lo: f64, t_hi: f64, ctx: &EvalContext) -> Result<LineScan> {
    if !(t_hi > t_lo) {
        return Err(Error::InvalidInput(format!("empty range [{t_lo}, {t_hi}]")));
    }
    let mut out = scan_cells(&line_grid(t_lo, t_hi), ctx)?;
    if t_lo >= U_MONOTONE_FROM {
        let first = LineDerivatives::at(t_lo, ctx)?;
        if first.slopes[IDX_U] >= 0.0 {
            out.u_monotone_violations.insert(0, t_lo);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::FunctionId;

    #[test]
    fn hermite_detects_dip() {
        // phase rises at both ends but falls in the middle
        assert!(hermite_turns(-0.2, 0.5, 0.5));
        assert!(!hermite_turns(0.5, 0.5, 0.5));
    }

    #[test]
    fn scan_finds_zeta_zeros_and_boundaries() {
        let ctx = EvalContext::default();
        let scan = scan_line(12.0, 22.0, &ctx).unwrap();
        let zeta: Vec<f64> = scan.zeros.iter().filter(|z| z.function == FunctionId::Zeta).map(|z| z.t).collect();
        assert_eq!(zeta.len(), 2);
        assert!((zeta[0] - 14.134725141734693).abs() < 1e-8);
        assert!((zeta[1] - 21.022039638771555).abs() < 1e-8);
        for z in &scan.zeros {
            assert!(z.err <= 1e-9);
        }
        // the small-t island sits near 13
        assert!(scan.boundaries.iter().any(|b| b.source == BoundarySource::UK && (b.t - 13.0).abs() < 1.5));
        assert!(scan.u_monotone_violations.is_empty());
        assert!(scan.anomalies.is_empty(), "{:?}", scan.anomalies);
    }

    #[test]
    fn appended_scans_match_single_scan() {
        let ctx = EvalContext::default();
        let grid = line_grid(30.0, 34.0);
        let whole = scan_cells(&grid, &ctx).unwrap();
        let mid = grid.len() / 2;
        let mut left = scan_cells(&grid[..=mid], &ctx).unwrap();
        left.append(scan_cells(&grid[mid..], &ctx).unwrap()).unwrap();
        assert_eq!(left, whole);
    }
}
