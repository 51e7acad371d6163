//! Structural checks over a populated scan report. Failures are data: each one
//! carries the ordinate where it occurred.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ScanReport;
use crate::context::EvalContext;
use crate::function::FunctionId;
use crate::geometry::islands::verify_counts;
use crate::geometry::{InnerIslandEnds, Interval, Island, RegionKind};
use crate::zeros::locate::{s0_zero_ratios, ZeroRecord};
use crate::zeros::winding::{completed_value, count_crossings, rectangle, winding_number};

/// Largest height of a zero-count audit rectangle.
const AUDIT_HEIGHT: f64 = 5.0;
/// Abscissae of the audit rectangles' vertical sides.
const AUDIT_SIGMA: (f64, f64) = (-0.5, 1.5);
const AUDIT_EDGE: f64 = 0.25;
/// ζ and L₋₄ zeros closer than this would be a double zero of S₀.
const COINCIDENCE_GAP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckFailure {
    pub t: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub pass: usize,
    pub fail: usize,
    /// Cases that could not be decided (missing data, unverified range).
    pub skipped: usize,
    pub count: usize,
    pub failures: Vec<CheckFailure>,
}

impl CheckResult {
    pub fn pass(&mut self) {
        self.pass += 1;
        self.count += 1;
    }

    pub fn fail(&mut self, t: f64, detail: impl Into<String>) {
        self.fail += 1;
        self.count += 1;
        self.failures.push(CheckFailure { t, detail: detail.into() });
    }

    pub fn skip(&mut self) {
        self.skipped += 1;
        self.count += 1;
    }

    pub fn record(&mut self, ok: bool, t: f64, detail: impl FnOnce() -> String) {
        if ok {
            self.pass();
        } else {
            self.fail(t, detail());
        }
    }

    /// No failures and at least one case decided.
    pub fn passed(&self) -> bool {
        self.fail == 0 && self.pass > 0
    }

    fn sorted(mut self) -> Self {
        self.failures.sort_by(|a, b| a.t.total_cmp(&b.t));
        self
    }
}

fn count_in(zeros: &[ZeroRecord], id: FunctionId, t_lo: f64, t_hi: f64) -> usize {
    zeros.iter().filter(|z| z.function == id && z.t > t_lo && z.t < t_hi).count()
}

fn complete_islands(report: &ScanReport) -> impl Iterator<Item = &Island> {
    report.islands.iter().filter(|i| i.complete)
}

/// Every located zero winds once round its own small circle.
fn simplicity(report: &ScanReport) -> CheckResult {
    let mut out = CheckResult::default();
    for z in &report.zeros {
        match z.multiplicity {
            0 => out.skip(),
            m => out.record(m == 1, z.t, || format!("{} zero has winding multiplicity {m}", z.function)),
        }
    }
    out
}

/// ℱ = -1 and 𝒱_K/𝒱 = -1 at every S₀ zero.
fn s0_zero_values(report: &ScanReport, ctx: &EvalContext) -> CheckResult {
    let zs: Vec<&ZeroRecord> =
        report.zeros.iter().filter(|z| matches!(z.function, FunctionId::Zeta | FunctionId::L4)).collect();
    let results: Vec<_> = zs.par_iter().map(|z| s0_zero_ratios(z.t, ctx)).collect();
    let mut out = CheckResult::default();
    for (z, r) in zs.iter().zip(results) {
        match r {
            Ok(c) => out.record(c.passes(), z.t, || {
                format!("|ℱ+1| = {:.1e}, |𝒱_K/𝒱+1| = {:.1e}", c.f_plus_one, c.vk_over_v_plus_one)
            }),
            Err(e) => out.fail(z.t, format!("evaluation failed: {e}")),
        }
    }
    out
}

/// Audit tiles: edges midway between consecutive zeros, at most
/// `AUDIT_HEIGHT` high where the zeros allow.
fn audit_tiles(ts: &[f64], t_lo: f64, t_hi: f64) -> Vec<(f64, f64)> {
    let mut edges = vec![t_lo];
    edges.extend(ts.windows(2).map(|w| 0.5 * (w[0] + w[1])));
    edges.push(t_hi);
    let mut tiles = Vec::new();
    let mut k = 0;
    while k + 1 < edges.len() {
        let mut j = k + 1;
        while j + 1 < edges.len() && edges[j + 1] - edges[k] <= AUDIT_HEIGHT {
            j += 1;
        }
        tiles.push((edges[k], edges[j]));
        k = j;
    }
    tiles
}

/// Compare the located zeros of ζ or L₋₄ with the winding of the completed
/// function round rectangles covering the critical strip.
fn zero_audit(report: &ScanReport, id: FunctionId, ctx: &EvalContext) -> CheckResult {
    let ts: Vec<f64> = report.zeros_of(id).map(|z| z.t).collect();
    let tiles = audit_tiles(&ts, report.t_lo, report.t_hi);
    let results: Vec<Option<(usize, crate::error::Result<i64>)>> = tiles
        .par_iter()
        .map(|&(a, b)| {
            if !report.verified_at(a) || !report.verified_at(b) || report.unverified.iter().any(|u| u.t_lo < b && u.t_hi > a) {
                return None;
            }
            let found = ts.iter().filter(|&&t| t > a && t < b).count();
            let w = winding_number(&rectangle(AUDIT_SIGMA.0, AUDIT_SIGMA.1, a, b), AUDIT_EDGE, |s| completed_value(id, s, ctx));
            Some((found, w))
        })
        .collect();
    let mut out = CheckResult::default();
    for (&(a, b), r) in tiles.iter().zip(results) {
        match r {
            None => out.skip(),
            Some((found, Ok(w))) => {
                out.record(w == found as i64, a, || format!("{found} zeros located in ({a}, {b}), winding {w}"))
            }
            Some((_, Err(e))) => out.fail(a, format!("winding over ({a}, {b}) failed: {e}")),
        }
    }
    out
}

fn zero_coincidence(report: &ScanReport) -> CheckResult {
    let l4: Vec<f64> = report.zeros_of(FunctionId::L4).map(|z| z.t).collect();
    let mut out = CheckResult::default();
    for z in report.zeros_of(FunctionId::Zeta) {
        let k = l4.partition_point(|&t| t < z.t);
        let gap = [k.checked_sub(1), Some(k)]
            .into_iter()
            .flatten()
            .filter_map(|j| l4.get(j))
            .map(|t| (t - z.t).abs())
            .fold(f64::INFINITY, f64::min);
        out.record(gap >= COINCIDENCE_GAP, z.t, || format!("L₋₄ zero within {gap:.1e}"));
    }
    out
}

fn u_monotone(report: &ScanReport) -> CheckResult {
    let mut out = CheckResult::default();
    let n = report.line_samples.saturating_sub(report.u_monotone_violations.len());
    out.pass = n;
    out.count = n;
    for &t in &report.u_monotone_violations {
        out.fail(t, "d arg 𝒰/dt ≥ 0");
    }
    out
}

fn crosses_unverified(report: &ScanReport, a: f64, b: f64) -> bool {
    report.unverified.iter().any(|u| u.t_lo < b && u.t_hi > a)
}

/// 𝒯₊ and 𝒯₋ zeros alternate on the line, as 𝒰 = ∓1 at them and arg 𝒰
/// is monotone.
fn t_alternation(report: &ScanReport) -> CheckResult {
    let ts: Vec<&ZeroRecord> =
        report.zeros.iter().filter(|z| matches!(z.function, FunctionId::TPlus | FunctionId::TMinus)).collect();
    let mut out = CheckResult::default();
    for w in ts.windows(2) {
        if crosses_unverified(report, w[0].t, w[1].t) {
            out.skip();
        } else {
            out.record(w[0].function != w[1].function, w[1].t, || {
                format!("two {} zeros in a row ({} and {})", w[1].function, w[0].t, w[1].t)
            });
        }
    }
    out
}

/// Poles of 𝒱_K (zeros of 𝒦_λ) only on the line: the contour count of
/// 𝒦_λ in each island equals its on-line count.
fn kl_on_line(report: &ScanReport) -> CheckResult {
    let mut out = CheckResult::default();
    for island in complete_islands(report) {
        match (island.enclave_winding, island.counts.get(&FunctionId::KLambda)) {
            (Some(_), Some(&n)) => {
                let on_line = count_in(&report.zeros, FunctionId::KLambda, island.t_lo, island.t_hi) as i64;
                out.record(n == on_line, island.t_lo, || format!("{} 𝒦_λ zeros off the line", n - on_line));
            }
            _ => out.skip(),
        }
    }
    out
}

fn triples_one_to_one(report: &ScanReport) -> CheckResult {
    let mut out = CheckResult::default();
    for t in &report.triples {
        out.record(true, t.l.t, String::new);
    }
    for z in &report.unpaired {
        out.fail(z.t, format!("{} zero without a triple", z.function));
    }
    out
}

fn triples_kind_region(report: &ScanReport) -> CheckResult {
    let mut out = CheckResult::default();
    for t in &report.triples {
        match (t.kind, t.region) {
            (None, _) => out.fail(t.l.t, "𝒯₋ zero after the ℒ zero"),
            (_, None) => out.skip(),
            (Some(kind), Some(region)) => out.record(kind.allowed_in(region), t.l.t, || {
                format!("{} triple in a {region:?} interval", kind.label())
            }),
        }
    }
    out
}

fn enclave_tags(report: &ScanReport) -> CheckResult {
    let mut expected = vec![FunctionId::K, FunctionId::KLambda, FunctionId::TMinus, FunctionId::L];
    expected.sort();
    let mut out = CheckResult::default();
    for iv in report.intervals.iter().filter(|iv| iv.kind == RegionKind::Enclave) {
        let mut tags: Vec<FunctionId> = iv.zero_tags.iter().map(|(id, _)| *id).collect();
        tags.sort();
        out.record(tags == expected, iv.t_lo, || format!("enclave holds {}", iv.bracket_string));
    }
    out
}

fn count_identities(report: &ScanReport) -> [CheckResult; 3] {
    let mut out: [CheckResult; 3] = Default::default();
    for island in complete_islands(report) {
        let c = verify_counts(island);
        for (k, v) in [c.chain, c.floor_formula, c.enclaves].into_iter().enumerate() {
            match (v, &island.contour_error) {
                (Some(ok), _) => out[k].record(ok, island.t_lo, || format!("[{}, {}] {}", island.t_lo, island.t_hi, c.detail)),
                (None, Some(e)) => out[k].fail(island.t_lo, format!("counts unavailable: {e}")),
                (None, None) => out[k].skip(),
            }
        }
    }
    out
}

fn inner_islands(report: &ScanReport) -> Vec<(&Island, &InnerIslandEnds)> {
    complete_islands(report).flat_map(|i| i.inner_islands.iter().map(move |e| (i, e))).collect()
}

/// Interior points of an inner island where ℱ = +1. arg[-ℱ] decreases
/// monotonically across an inner island, so its unwrapped change is the
/// first μ_u - μ_l - 2πk < 0 that crosses 0 as often as S₀ and ℒ vanish there.
fn f_unit_crossings(e: &InnerIslandEnds, zero_crossings: usize) -> Option<u32> {
    (0..8).map(|k| e.mu_u - e.mu_l - TAU * k as f64).filter(|&d| d < 0.0).find_map(|d| {
        (count_crossings(e.mu_l, d, 0.0) as usize == zero_crossings).then(|| count_crossings(e.mu_l, d, PI))
    })
}

fn endpoints(report: &ScanReport) -> CheckResult {
    let mut out = CheckResult::default();
    for (_, e) in inner_islands(report) {
        out.record(e.mu_l > 0.0 && e.mu_u < 0.0, e.t_lo, || {
            let n = f_crossings(report, e.t_lo, e.t_hi);
            let unit = f_unit_crossings(e, n).map_or("?".to_string(), |k| k.to_string());
            format!(
                "[{}, {}] μ_l = {:.4}, μ_u = {:.4}; {n} zeros of S₀ and ℒ and {unit} points with ℱ = +1 inside",
                e.t_lo, e.t_hi, e.mu_l, e.mu_u
            )
        });
    }
    out
}

/// arg[-ℱ] = 0 exactly at zeros of S₀ and ℒ on the line.
fn f_crossings(report: &ScanReport, a: f64, b: f64) -> usize {
    count_in(&report.zeros, FunctionId::S0Tilde, a, b) + count_in(&report.zeros, FunctionId::L, a, b)
}

fn one_crossing_per_inner_island(report: &ScanReport) -> CheckResult {
    let mut out = CheckResult::default();
    for (_, e) in inner_islands(report) {
        let n = f_crossings(report, e.t_lo, e.t_hi);
        out.record(n == 1, e.t_lo, || format!("{n} zeros of S₀ and ℒ in the inner island"));
    }
    out
}

fn between_inner_islands(report: &ScanReport) -> CheckResult {
    let ends = inner_islands(report);
    let mut out = CheckResult::default();
    for w in ends.windows(2) {
        let (a, b) = (w[0].1.t_hi, w[1].1.t_lo);
        if crosses_unverified(report, a, b) {
            out.skip();
        } else {
            out.record(f_crossings(report, a, b) > 0, a, || format!("no arg[-ℱ] = 0 point in ({a}, {b})"));
        }
    }
    out
}

/// Labels of the schematic cases for an inner island holding no ℒ zero,
/// from whether the nearest ℒ zeros of its island on either side lie in
/// enclaves. A missing neighbour counts as outside an enclave.
pub fn schematic_label(island: &Island, inner: &Interval, zeros: &[ZeroRecord]) -> &'static str {
    let ls: Vec<&ZeroRecord> =
        zeros.iter().filter(|z| z.function == FunctionId::L && island.contains(z.t)).collect();
    let in_enclave = |z: Option<&&ZeroRecord>| z.is_some_and(|z| z.region == Some(RegionKind::Enclave));
    let below = in_enclave(ls.iter().rev().find(|z| z.t < inner.t_lo));
    let above = in_enclave(ls.iter().find(|z| z.t > inner.t_hi));
    match (below, above) {
        (false, false) => "no_enclave",
        (true, false) => "enclave_below",
        (false, true) => "enclave_above",
        (true, true) => "enclaves_both",
    }
}

fn schematic(report: &ScanReport) -> BTreeMap<String, CheckResult> {
    let mut out: BTreeMap<String, CheckResult> = ["no_enclave", "enclave_below", "enclave_above", "enclaves_both"]
        .into_iter()
        .map(|l| (format!("schematic.{l}"), CheckResult::default()))
        .collect();
    for island in complete_islands(report) {
        for iv in island.intervals.iter().filter(|iv| iv.kind == RegionKind::InnerIsland) {
            if count_in(&report.zeros, FunctionId::L, iv.t_lo, iv.t_hi) > 0 {
                continue;
            }
            let label = schematic_label(island, iv, &report.zeros);
            let n = count_in(&report.zeros, FunctionId::S0Tilde, iv.t_lo, iv.t_hi);
            out.get_mut(&format!("schematic.{label}"))
                .unwrap()
                .record(n == 1, iv.t_lo, || format!("{n} S₀ zeros in the inner island [{}, {}]", iv.t_lo, iv.t_hi));
        }
    }
    out
}

/// Intervals tile the verified parts of the range.
fn coverage(report: &ScanReport) -> CheckResult {
    let mut out = CheckResult::default();
    let mut expect = report.t_lo;
    let mut gaps = report.unverified.iter().map(|u| (u.t_lo, u.t_hi)).collect::<Vec<_>>();
    gaps.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut g = gaps.into_iter().peekable();
    for iv in &report.intervals {
        while let Some(&(lo, hi)) = g.peek() {
            if lo == expect {
                expect = hi;
                g.next();
            } else {
                break;
            }
        }
        out.record(iv.t_lo == expect && iv.t_hi > iv.t_lo, iv.t_lo, || format!("interval starts at {} after {expect}", iv.t_lo));
        expect = iv.t_hi;
    }
    for (lo, hi) in g {
        if lo == expect {
            expect = hi;
        }
    }
    out.record(expect == report.t_hi, expect, || format!("intervals end at {expect}, range at {}", report.t_hi));
    out
}

/// Evaluate every named check over the report.
pub fn verify_all(report: &ScanReport, ctx: &EvalContext) -> BTreeMap<String, CheckResult> {
    let mut out = BTreeMap::new();
    out.insert("simplicity".into(), simplicity(report));
    out.insert("s0_zeros.ratio_values".into(), s0_zero_values(report, ctx));
    out.insert("zero_audit.zeta".into(), zero_audit(report, FunctionId::Zeta, ctx));
    out.insert("zero_audit.l4".into(), zero_audit(report, FunctionId::L4, ctx));
    out.insert("zero_coincidence".into(), zero_coincidence(report));
    out.insert("phase.u_monotone".into(), u_monotone(report));
    out.insert("phase.t_alternation".into(), t_alternation(report));
    out.insert("kl_on_line".into(), kl_on_line(report));
    out.insert("triples.one_to_one".into(), triples_one_to_one(report));
    out.insert("triples.kind_region".into(), triples_kind_region(report));
    out.insert("triples.enclave_tags".into(), enclave_tags(report));
    let [chain, floor, enclaves] = count_identities(report);
    out.insert("counts.chain".into(), chain);
    out.insert("counts.floor".into(), floor);
    out.insert("counts.enclaves".into(), enclaves);
    out.insert("inner.endpoint_signs".into(), endpoints(report));
    out.insert("inner.one_crossing".into(), one_crossing_per_inner_island(report));
    out.insert("inner.crossing_between".into(), between_inner_islands(report));
    out.extend(schematic(report));
    out.insert("coverage".into(), coverage(report));
    out.into_iter().map(|(k, v)| (k, v.sorted())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiles_respect_height_and_zeros() {
        let ts = [6.0, 8.0, 9.0, 13.0, 20.0, 21.0];
        let tiles = audit_tiles(&ts, 5.0, 25.0);
        assert_eq!(tiles, vec![(5.0, 8.5), (8.5, 11.0), (11.0, 16.5), (16.5, 20.5), (20.5, 25.0)]);
    }

    #[test]
    fn result_bookkeeping() {
        let mut r = CheckResult::default();
        r.pass();
        r.skip();
        r.fail(3.0, "bad");
        assert_eq!((r.pass, r.fail, r.skipped, r.count), (1, 1, 1, 3));
        assert!(!r.passed());
        assert_eq!(r.failures[0].t, 3.0);
    }
}
