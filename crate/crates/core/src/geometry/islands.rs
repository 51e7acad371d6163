//! Regions, islands and their zero censuses from a line scan.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::contour::{signed_area, trace_to_crossing, Contour, ContourKind, TraceOptions};
use super::line::{scan_line, Anomaly, LineScan, SlopeState};
use super::region::{BoundarySource, InnerIslandEnds, Interval, Island, RegionKind, TAG_FAMILIES};
use crate::context::EvalContext;
use crate::error::{Error, Result};
use crate::function::FunctionId;
use crate::ratios::phase::{base_step, line_point, LineDerivatives};
use crate::zeros::locate::ZeroRecord;
use crate::zeros::winding::{family_value, path_argument_change, phase_crossings, winding_number};

/// Families whose island counts are reported.
pub const COUNTED_FAMILIES: [FunctionId; 6] =
    [FunctionId::K, FunctionId::KLambda, FunctionId::TPlus, FunctionId::TMinus, FunctionId::U, FunctionId::UK];

/// Edge subdivision for contour windings.
const WINDING_EDGE: f64 = 0.05;
const WINDING_GAP: f64 = 1e-4;
/// How far below a rising stretch `classify_point` looks for line crossings.
const CLASSIFY_LOOKBACK: f64 = 20.0;
/// Line crossings closer than this are taken to be the same one.
const SAME_CROSSING: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryOptions {
    pub trace: TraceOptions,
    /// Wind the counted families round island contours.
    pub contour_counts: bool,
    /// A trace must come back within this distance of a boundary.
    pub return_tol: f64,
}

impl Default for GeometryOptions {
    fn default() -> Self {
        Self { trace: TraceOptions::default(), contour_counts: true, return_tol: 0.05 }
    }
}

/// Classified line with its islands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineGeometry {
    /// Consecutive intervals covering the scanned range.
    pub intervals: Vec<Interval>,
    pub islands: Vec<Island>,
    pub anomalies: Vec<Anomaly>,
}

impl LineGeometry {
    /// Index of the interval containing t.
    pub fn interval_index(&self, t: f64) -> Option<usize> {
        let k = self.intervals.partition_point(|iv| iv.t_lo <= t);
        (k > 0 && t <= self.intervals[k - 1].t_hi).then(|| k - 1)
    }

    pub fn island_index(&self, t: f64) -> Option<usize> {
        self.islands.iter().position(|i| i.contains(t))
    }

    /// Fill in `region` and `island_index` of each zero.
    pub fn assign(&self, zeros: &mut [ZeroRecord]) {
        for z in zeros {
            z.region = self.interval_index(z.t).map(|k| self.intervals[k].kind);
            z.island_index = self.island_index(z.t).map(|k| self.islands[k].index);
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    t_lo: f64,
    t_hi: f64,
    state: SlopeState,
}

fn segments(scan: &LineScan) -> Vec<Segment> {
    let mut out: Vec<Segment> = Vec::new();
    let mut state = scan.start;
    let mut lo = scan.t_lo;
    let push = |out: &mut Vec<Segment>, seg: Segment| {
        if let Some(last) = out.last_mut() {
            let same = if last.state.uk_rising || seg.state.uk_rising {
                last.state.uk_rising == seg.state.uk_rising
            } else {
                last.state.f_rising == seg.state.f_rising
            };
            if same {
                last.t_hi = seg.t_hi;
                return;
            }
        }
        out.push(seg);
    };
    for b in &scan.boundaries {
        push(&mut out, Segment { t_lo: lo, t_hi: b.t, state });
        state.flip(b.source);
        lo = b.t;
    }
    push(&mut out, Segment { t_lo: lo, t_hi: scan.t_hi, state });
    out
}

struct RisingOutcome {
    kind: RegionKind,
    trace: Option<Contour>,
    anomaly: Option<Anomaly>,
}

/// Decide whether a rising stretch [p_lo, p_hi] is an enclave by following
/// the level curve that leaves the line at p_lo: an enclave boundary comes
/// back at p_hi, the boundary of the preceding island comes back below p_lo.
/// `crossings` are the ordinates where d arg 𝒰_K/dt changes sign.
fn classify_rising(
    p_lo: f64,
    p_hi: f64,
    range_hi: f64,
    crossings: &[f64],
    opts: &GeometryOptions,
    ctx: &EvalContext,
) -> RisingOutcome {
    let width = p_hi - p_lo;
    let mut trace_opts = opts.trace;
    let mut tol = opts.return_tol;
    let mut traced = trace_to_crossing(ContourKind::UnitModUK, p_lo, crossings, tol, &trace_opts, ctx);
    if traced.is_err() && width < 20.0 * trace_opts.delta {
        // a stretch this narrow can have a level curve that never gets δ
        // away from the line
        trace_opts.delta = width / 20.0;
        trace_opts.min_step = trace_opts.min_step.min(trace_opts.delta / 10.0);
        trace_opts.max_step = trace_opts.max_step.min(width);
        tol = tol.min(width / 4.0);
        traced = trace_to_crossing(ContourKind::UnitModUK, p_lo, crossings, tol, &trace_opts, ctx);
    }
    let trace = match traced {
        Ok(c) => c,
        Err(e) => {
            return RisingOutcome {
                kind: RegionKind::Extended,
                trace: None,
                anomaly: Some(Anomaly { t: p_lo, detail: format!("boundary trace failed: {e}") }),
            }
        }
    };
    let t_end = trace.points.last().map_or(p_lo, |p| p.im);
    // the line crossing the trace came back to
    let back = crossings
        .iter()
        .copied()
        .filter(|c| (c - t_end).abs() <= tol)
        .min_by(|a, b| (a - t_end).abs().total_cmp(&(b - t_end).abs()))
        .unwrap_or(t_end);
    if back < p_lo - SAME_CROSSING {
        return RisingOutcome { kind: RegionKind::Extended, trace: Some(trace), anomaly: None };
    }
    if back > p_lo + SAME_CROSSING && ((back - p_hi).abs() <= SAME_CROSSING || p_hi >= range_hi) {
        return RisingOutcome { kind: RegionKind::Enclave, trace: Some(trace), anomaly: None };
    }
    RisingOutcome {
        kind: RegionKind::Extended,
        trace: Some(trace),
        anomaly: Some(Anomaly {
            t: p_lo,
            detail: format!("boundary trace from {p_lo} came back at {t_end}, stretch ends at {p_hi}"),
        }),
    }
}

fn tags_in(zeros: &[ZeroRecord], t_lo: f64, t_hi: f64) -> Vec<(FunctionId, f64)> {
    let start = zeros.partition_point(|z| z.t < t_lo);
    zeros[start..]
        .iter()
        .take_while(|z| z.t < t_hi)
        .filter(|z| TAG_FAMILIES.contains(&z.function))
        .map(|z| (z.function, z.t))
        .collect()
}

fn count_in(zeros: &[ZeroRecord], id: FunctionId, t_lo: f64, t_hi: f64) -> i64 {
    zeros.iter().filter(|z| z.function == id && z.t > t_lo && z.t < t_hi).count() as i64
}

/// arg[-ℱ(1/2 + it)] in (-π, π].
pub fn mu_at(t: f64, ctx: &EvalContext) -> Result<f64> {
    Ok((-line_point(t, ctx)?.f()?).arg())
}

/// Endpoint arguments of every inner island of an island.
pub fn endpoint_mu(island: &Island, ctx: &EvalContext) -> Result<Vec<InnerIslandEnds>> {
    island
        .intervals
        .iter()
        .filter(|iv| iv.kind == RegionKind::InnerIsland)
        .map(|iv| Ok(InnerIslandEnds { t_lo: iv.t_lo, t_hi: iv.t_hi, mu_l: mu_at(iv.t_lo, ctx)?, mu_u: mu_at(iv.t_hi, ctx)? }))
        .collect()
}

/// The traced curve ordered by increasing t at its ends, joined to
/// σ = 1/2 + `gap` at both ends.
fn joined_path(trace: &Contour, gap: f64) -> Vec<Complex64> {
    let mut pts = trace.points.clone();
    if pts[0].im > pts[pts.len() - 1].im {
        pts.reverse();
    }
    let (first, last) = (pts[0], pts[pts.len() - 1]);
    pts.insert(0, Complex64::new(0.5 + gap, first.im));
    pts.push(Complex64::new(0.5 + gap, last.im));
    pts
}

fn winding_of(polygon: &[Complex64], id: FunctionId, ctx: &EvalContext) -> Result<i64> {
    winding_number(polygon, WINDING_EDGE, |s| family_value(id, s, ctx))
}

/// Windings of 𝒰 and 𝒰_K round the region between `trace` and the line.
/// Both have unit modulus on σ = 1/2, where zero-pole pairs can straddle the
/// line closer than any practical sampling, so the line part of the contour
/// is taken from the line scan phase tracker rather than by sampling.
fn unit_ratio_windings(trace: &Contour, ctx: &EvalContext) -> Result<(i64, i64)> {
    let path = joined_path(trace, 0.0);
    let (t_a, t_b) = (path[0].im, path[path.len() - 1].im);
    let scan = scan_line(t_a, t_b, ctx)?;
    let mut out = [0i64; 2];
    for (k, (id, line_change)) in [(FunctionId::U, scan.u_phase_change), (FunctionId::UK, scan.uk_phase_change)].into_iter().enumerate() {
        let curve_change = path_argument_change(&path, WINDING_EDGE, |s| family_value(id, s, ctx))?;
        let w = (curve_change - line_change) / TAU;
        if (w - w.round()).abs() > 0.05 {
            return Err(Error::AccuracyLoss(format!("{id} winding {w:.3} round the contour from t = {t_a} is not close to an integer")));
        }
        out[k] = w.round() as i64;
    }
    Ok((out[0], out[1]))
}

/// N_Z values from on-line zeros plus the zeros enclosed by the island
/// contour in σ > 1/2.
fn contour_counts(
    island: &Island,
    outer: &Contour,
    enclaves: &[&Contour],
    zeros: &[ZeroRecord],
    ctx: &EvalContext,
) -> Result<(BTreeMap<FunctionId, i64>, i64)> {
    let mut polygon = joined_path(outer, WINDING_GAP);
    if signed_area(&polygon) < 0.0 {
        polygon.reverse();
    }
    let mut counts = BTreeMap::new();
    // 𝒦 and 𝒦_λ vanish where 𝒰_K = 1 and -1, which off the line happens on
    // the level curves themselves
    let uk = |s: Complex64| family_value(FunctionId::UK, s, ctx);
    for (id, theta) in [(FunctionId::K, 0.0), (FunctionId::KLambda, PI)] {
        let mut n = count_in(zeros, id, island.t_lo, island.t_hi);
        for curve in std::iter::once(outer).chain(enclaves.iter().copied()) {
            n += phase_crossings(&joined_path(curve, WINDING_GAP), theta, uk)? as i64;
        }
        counts.insert(id, n);
    }
    for id in [FunctionId::TPlus, FunctionId::TMinus] {
        counts.insert(id, count_in(zeros, id, island.t_lo, island.t_hi) + winding_of(&polygon, id, ctx)?);
    }
    let (u, uk_outer) = unit_ratio_windings(outer, ctx)?;
    counts.insert(FunctionId::U, u);
    let mut enclave_winding = 0;
    for e in enclaves {
        enclave_winding -= unit_ratio_windings(e, ctx)?.1;
    }
    counts.insert(FunctionId::UK, uk_outer + enclave_winding);
    Ok((counts, enclave_winding))
}

fn online_counts(island: &Island, zeros: &[ZeroRecord]) -> BTreeMap<FunctionId, i64> {
    [FunctionId::K, FunctionId::KLambda, FunctionId::TPlus, FunctionId::TMinus]
        .into_iter()
        .map(|id| (id, count_in(zeros, id, island.t_lo, island.t_hi)))
        .collect()
}

/// Classify a scanned stretch of the line and build its islands. Zeros must
/// be sorted by t.
pub fn analyse_line(
    scan: &LineScan,
    zeros: &[ZeroRecord],
    opts: &GeometryOptions,
    ctx: &EvalContext,
) -> Result<LineGeometry> {
    let segs = segments(scan);
    let crossings: Vec<f64> =
        scan.boundaries.iter().filter(|b| b.source == BoundarySource::UK).map(|b| b.t).collect();
    let outcomes: Vec<Option<RisingOutcome>> = segs
        .par_iter()
        .map(|seg| {
            (seg.state.uk_rising && seg.t_lo > scan.t_lo).then(|| classify_rising(seg.t_lo, seg.t_hi, scan.t_hi, &crossings, opts, ctx))
        })
        .collect();

    let mut anomalies = Vec::new();
    let mut kinds = Vec::with_capacity(segs.len());
    // traces keyed by the segment start they were launched from
    let mut island_traces: Vec<(f64, Contour)> = Vec::new();
    let mut enclave_traces: Vec<(f64, Contour)> = Vec::new();
    for (seg, out) in segs.iter().zip(outcomes) {
        let kind = match out {
            None => seg.state.kind(),
            Some(o) => {
                anomalies.extend(o.anomaly);
                if let Some(tr) = o.trace {
                    match o.kind {
                        RegionKind::Enclave => enclave_traces.push((seg.t_lo, tr)),
                        _ => island_traces.push((seg.t_lo, tr)),
                    }
                }
                o.kind
            }
        };
        kinds.push(kind);
    }

    let intervals: Vec<Interval> = segs
        .iter()
        .zip(&kinds)
        .map(|(seg, &kind)| Interval::new(seg.t_lo, seg.t_hi, kind, tags_in(zeros, seg.t_lo, seg.t_hi)))
        .collect();

    // maximal runs of island intervals
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut k = 0;
    while k < intervals.len() {
        if intervals[k].kind.in_island() {
            let start = k;
            while k < intervals.len() && intervals[k].kind.in_island() {
                k += 1;
            }
            runs.push((start, k));
        } else {
            k += 1;
        }
    }

    let populated: Vec<(Island, Option<Anomaly>)> = runs
        .par_iter()
        .enumerate()
        .map(|(index, &(a, b))| {
            let ivs = intervals[a..b].to_vec();
            let (t_lo, t_hi) = (ivs[0].t_lo, ivs[ivs.len() - 1].t_hi);
            let enclave_count = ivs.iter().filter(|iv| iv.kind == RegionKind::Enclave).count();
            let complete = t_lo > scan.t_lo && t_hi < scan.t_hi;
            let mut island = Island {
                index,
                t_lo,
                t_hi,
                structure_string: Island::structure(&ivs),
                intervals: ivs,
                enclave_count,
                counts: BTreeMap::new(),
                inner_islands: Vec::new(),
                complete,
                enclave_winding: None,
                contour_error: None,
            };
            let mut anomaly = None;
            match endpoint_mu(&island, ctx) {
                Ok(mu) => island.inner_islands = mu,
                Err(e) => anomaly = Some(Anomaly { t: t_lo, detail: format!("inner-island endpoints: {e}") }),
            }
            island.counts = online_counts(&island, zeros);
            if complete && opts.contour_counts {
                let outer = island_traces
                    .iter()
                    .find(|(t, _)| *t == t_hi)
                    .map(|(_, c)| c)
                    .filter(|c| c.points.first().is_some_and(|p| (p.im - t_lo).abs() <= opts.return_tol)
                        || c.points.last().is_some_and(|p| (p.im - t_lo).abs() <= opts.return_tol));
                let enclaves: Vec<&Contour> =
                    enclave_traces.iter().filter(|(t, _)| *t > t_lo && *t < t_hi).map(|(_, c)| c).collect();
                match outer {
                    None => island.contour_error = Some("no closed boundary contour".into()),
                    Some(outer) => match contour_counts(&island, outer, &enclaves, zeros, ctx) {
                        Ok((counts, ew)) => {
                            island.counts = counts;
                            island.enclave_winding = Some(ew);
                        }
                        Err(e) => island.contour_error = Some(e.to_string()),
                    },
                }
            }
            (island, anomaly)
        })
        .collect();

    let mut islands = Vec::with_capacity(populated.len());
    for (island, anomaly) in populated {
        anomalies.extend(anomaly);
        islands.push(island);
    }
    Ok(LineGeometry { intervals, islands, anomalies })
}

/// Outcome of the counting identities for one island.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountCheck {
    /// N_Z(𝒦_λ) = N_Z(𝒦) = N_Z(𝒰_K) + N_E = N_Z(𝒯₋).
    pub chain: Option<bool>,
    /// N_Z(𝒰) = ⌊(N_Z(𝒯₊) + N_Z(𝒯₋))/2⌋.
    pub floor_formula: Option<bool>,
    /// Every enclave contour winds once negatively round a pole of 𝒰_K.
    pub enclaves: Option<bool>,
    pub detail: String,
}

impl CountCheck {
    pub fn passes(&self) -> bool {
        self.chain != Some(false) && self.floor_formula != Some(false) && self.enclaves != Some(false)
    }
}

pub fn verify_counts(island: &Island) -> CountCheck {
    let c = |id: FunctionId| island.counts.get(&id).copied();
    let ne = island.enclave_count as i64;
    let chain = match (c(FunctionId::KLambda), c(FunctionId::K), c(FunctionId::UK), c(FunctionId::TMinus)) {
        (Some(kl), Some(k), Some(uk), Some(tm)) => Some(kl == k && k == uk + ne && uk + ne == tm),
        _ => None,
    };
    let floor_formula = match (c(FunctionId::U), c(FunctionId::TPlus), c(FunctionId::TMinus)) {
        (Some(u), Some(tp), Some(tm)) if island.enclave_winding.is_some() => Some(u == (tp + tm).div_euclid(2)),
        _ => None,
    };
    let enclaves = island.enclave_winding.map(|w| w == ne);
    let detail = format!(
        "N_Z: {} N_E = {ne}",
        island.counts.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ")
    );
    CountCheck { chain, floor_formula, enclaves, detail }
}

/// Islands of [t_lo, t_hi], fully populated.
pub fn find_islands(t_lo: f64, t_hi: f64, ctx: &EvalContext) -> Result<Vec<Island>> {
    let scan = scan_line(t_lo, t_hi, ctx)?;
    Ok(analyse_line(&scan, &scan.zeros, &GeometryOptions::default(), ctx)?.islands)
}

fn uk_rising(t: f64, ctx: &EvalContext) -> Result<bool> {
    Ok(LineDerivatives::at(t, ctx)?.slopes[1] > 0.0)
}

/// Walk from t in direction `dir` until d arg 𝒰_K/dt changes sign, then
/// bisect; None when t_min_scan or `limit` is reached first.
fn nearest_uk_boundary(t: f64, dir: f64, limit: f64, ctx: &EvalContext) -> Result<Option<f64>> {
    let rising = uk_rising(t, ctx)?;
    let mut a = t;
    loop {
        let b = a + dir * base_step(a);
        if b < ctx.t_min_scan || (dir > 0.0 && b > limit) || (dir < 0.0 && b < limit) {
            return Ok(None);
        }
        if uk_rising(b, ctx)? != rising {
            let (mut lo, mut hi) = if dir > 0.0 { (a, b) } else { (b, a) };
            let lo_rising = if dir > 0.0 { rising } else { !rising };
            while hi - lo > 2e-6 {
                let m = 0.5 * (lo + hi);
                if uk_rising(m, ctx)? == lo_rising {
                    lo = m;
                } else {
                    hi = m;
                }
            }
            return Ok(Some(0.5 * (lo + hi)));
        }
        a = b;
    }
}

/// Region kind of the line point 1/2 + it.
pub fn classify_point(t: f64, band: f64, ctx: &EvalContext) -> Result<RegionKind> {
    ctx.check_t(t)?;
    let centre = SlopeState::of(&LineDerivatives::at(t, ctx)?.slopes);
    for probe in [t - band, t + band] {
        if probe >= ctx.t_min_scan && SlopeState::of(&LineDerivatives::at(probe, ctx)?.slopes) != centre {
            return Err(Error::BoundaryIndeterminate { t, band });
        }
    }
    if !centre.uk_rising {
        return Ok(centre.kind());
    }
    let Some(p_lo) = nearest_uk_boundary(t, -1.0, t - 100.0, ctx)? else {
        return Ok(RegionKind::Extended);
    };
    let p_hi = nearest_uk_boundary(t, 1.0, t + 100.0, ctx)?.unwrap_or(f64::INFINITY);
    // crossings where the traced boundary may come back
    let scan = scan_line((p_lo - CLASSIFY_LOOKBACK).max(ctx.t_min_scan), p_hi.min(t + 1.0) + 0.1, ctx)?;
    let crossings: Vec<f64> =
        scan.boundaries.iter().filter(|b| b.source == BoundarySource::UK).map(|b| b.t).collect();
    Ok(classify_rising(p_lo, p_hi, f64::INFINITY, &crossings, &GeometryOptions::default(), ctx).kind)
}
