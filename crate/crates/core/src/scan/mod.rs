//! Full-range analysis: windowed line scans with checkpoints, report
//! assembly, the inner-island fraction and the structural checks.

pub mod checks;
pub mod export;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::context::EvalContext;
use crate::error::{Error, Result};
use crate::function::FunctionId;
use crate::geometry::islands::{analyse_line, GeometryOptions, LineGeometry};
use crate::geometry::line::{line_grid, scan_cells, scan_line, Anomaly, LineScan, U_MONOTONE_FROM};
use crate::geometry::{Interval, Island, RegionKind};
use crate::ratios::phase::{base_step, LineDerivatives};
use crate::zeros::locate::ZeroRecord;
use crate::zeros::triples::{associate_triples, TripleRecord};
use crate::zeros::winding::winding_multiplicity;

pub use checks::{verify_all, CheckFailure, CheckResult};

/// Version of the report and checkpoint JSON layout.
pub const SCHEMA_VERSION: u32 = 1;
/// Largest step of the line grid.
pub const MAX_SCAN_STEP: f64 = 0.05;
/// Fewest ζ zeros for which the inner-island fraction is reported.
pub const MIN_FRACTION_ZEROS: usize = 200;
/// Zeros this close to an end of the range may have triple partners outside.
const TRIPLE_EDGE_MARGIN: f64 = 2.0;
/// Radius cap for the multiplicity circles.
const MULTIPLICITY_RADIUS: f64 = 0.01;
/// Seam re-scans compare zeros within this fraction of the overlap.
const SEAM_CORE: f64 = 0.5;
/// Zeros from the two sides of a seam closer than this are the same zero.
const SEAM_MATCH: f64 = 1e-7;
/// Environment variable naming the default checkpoint directory.
pub const CHECKPOINT_ENV: &str = "LATSUM_CHECKPOINT_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScanConfig {
    pub t_lo: f64,
    pub t_hi: f64,
    pub window: f64,
    /// Half-width of the independent re-scan at each window seam.
    pub overlap: f64,
    pub workers: usize,
    /// Directory for per-window checkpoints; none disables checkpointing.
    pub checkpoint_path: Option<PathBuf>,
    pub ctx: EvalContext,
    /// Points this close to a region boundary are not classified.
    pub exclusion_band: f64,
    /// Wind the counted families round island contours.
    pub contour_counts: bool,
    /// Wind each located zero's family round a small circle.
    pub multiplicity: bool,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            t_lo: 5.0,
            t_hi: 500.0,
            window: 25.0,
            overlap: 1.0,
            workers: 1,
            checkpoint_path: None,
            ctx: EvalContext::default(),
            exclusion_band: 1e-5,
            contour_counts: true,
            multiplicity: false,
        }
    }
}

impl ScanConfig {
    pub fn new(t_lo: f64, t_hi: f64) -> Self {
        Self { t_lo, t_hi, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        self.ctx.validate()?;
        if !(self.t_lo >= self.ctx.t_min_scan) {
            return Err(Error::InvalidInput(format!(
                "t_lo = {} is below t_min_scan = {}; the ratio functions are only characterised above it",
                self.t_lo, self.ctx.t_min_scan
            )));
        }
        if !(self.t_hi > self.t_lo) || !self.t_hi.is_finite() {
            return Err(Error::InvalidInput(format!("empty range [{}, {}]", self.t_lo, self.t_hi)));
        }
        if !(self.window >= 2.0 * MAX_SCAN_STEP) {
            return Err(Error::InvalidInput(format!("window must be at least {}", 2.0 * MAX_SCAN_STEP)));
        }
        if !(self.overlap >= 2.0 * MAX_SCAN_STEP) {
            return Err(Error::InvalidInput(format!("overlap must be at least {}", 2.0 * MAX_SCAN_STEP)));
        }
        if self.workers == 0 {
            return Err(Error::InvalidInput("workers must be at least 1".into()));
        }
        if !(self.exclusion_band > 0.0) {
            return Err(Error::InvalidInput("exclusion_band must be positive".into()));
        }
        Ok(())
    }

    /// The settings that determine the report: everything except the
    /// worker count and the checkpoint location.
    pub fn settings(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("config serializes");
        if let Some(map) = v.as_object_mut() {
            map.remove("workers");
            map.remove("checkpoint_path");
        }
        v
    }

    /// SHA-256 of the report-determining settings and the code version.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(env!("CARGO_PKG_VERSION").as_bytes());
        h.update(self.settings().to_string().as_bytes());
        hex::encode(h.finalize())
    }

    fn geometry_options(&self) -> GeometryOptions {
        GeometryOptions { contour_counts: self.contour_counts, ..Default::default() }
    }
}

/// A stretch of the line whose window failed twice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnverifiedRange {
    pub t_lo: f64,
    pub t_hi: f64,
    pub error: String,
}

/// Run details excluded from report comparisons.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RuntimeInfo {
    pub started_unix: f64,
    pub finished_unix: f64,
    pub elapsed_seconds: f64,
    pub workers: usize,
    pub checkpoint_path: Option<PathBuf>,
    pub windows_computed: usize,
    pub windows_resumed: usize,
    pub windows_retried: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub code_version: String,
    pub config: serde_json::Value,
    pub config_hash: String,
    pub runtime: RuntimeInfo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub schema_version: u32,
    pub t_lo: f64,
    pub t_hi: f64,
    pub intervals: Vec<Interval>,
    pub islands: Vec<Island>,
    /// Zeros of every surrogate family, sorted by t.
    pub zeros: Vec<ZeroRecord>,
    pub triples: Vec<TripleRecord>,
    /// Zeros left without triple partners away from the range ends.
    pub unpaired: Vec<ZeroRecord>,
    /// Zeros near the range ends whose partners may lie outside it.
    pub edge_unpaired: Vec<ZeroRecord>,
    /// None when fewer than `MIN_FRACTION_ZEROS` ζ zeros were found.
    pub fraction_outside_inner: Option<f64>,
    /// Sampled ordinates (t ≥ 10) where d arg 𝒰/dt ≥ 0.
    pub u_monotone_violations: Vec<f64>,
    /// Number of line samples behind `u_monotone_violations`.
    pub line_samples: usize,
    pub checks: BTreeMap<String, CheckResult>,
    pub anomalies: Vec<Anomaly>,
    pub unverified: Vec<UnverifiedRange>,
    pub provenance: Provenance,
}

impl ScanReport {
    /// The report with run details cleared, for comparing runs.
    pub fn without_runtime(&self) -> Self {
        let mut r = self.clone();
        r.provenance.runtime = RuntimeInfo::default();
        r
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let r: Self = serde_json::from_str(text)?;
        if r.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidInput(format!(
                "report schema version {} is not the supported version {SCHEMA_VERSION}",
                r.schema_version
            )));
        }
        Ok(r)
    }

    pub fn zeros_of(&self, id: FunctionId) -> impl Iterator<Item = &ZeroRecord> {
        self.zeros.iter().filter(move |z| z.function == id)
    }

    /// The island whose span contains t.
    pub fn island_at(&self, t: f64) -> Option<&Island> {
        self.islands.iter().find(|i| i.contains(t))
    }

    /// Whether t lies in a stretch that was scanned successfully.
    pub fn verified_at(&self, t: f64) -> bool {
        t >= self.t_lo && t <= self.t_hi && !self.unverified.iter().any(|u| t >= u.t_lo && t <= u.t_hi)
    }
}

/// Fraction of ζ zeros lying outside every inner-island interval.
pub fn fraction_statistic(report: &ScanReport) -> Result<f64> {
    let zeta: Vec<&ZeroRecord> = report.zeros_of(FunctionId::Zeta).collect();
    if zeta.len() < MIN_FRACTION_ZEROS {
        return Err(Error::InsufficientData(format!(
            "{} ζ zeros in [{}, {}]; the fraction needs at least {MIN_FRACTION_ZEROS}",
            zeta.len(),
            report.t_lo,
            report.t_hi
        )));
    }
    let inside = zeta
        .iter()
        .filter(|z| report.intervals.iter().any(|iv| iv.kind == RegionKind::InnerIsland && iv.contains(z.t)))
        .count();
    Ok((zeta.len() - inside) as f64 / zeta.len() as f64)
}

/// Merge two zero lists: records of the same family whose error bars
/// overlap are one zero, kept with the smaller error.
pub fn merge_zeros(a: &[ZeroRecord], b: &[ZeroRecord]) -> Vec<ZeroRecord> {
    let mut all: Vec<ZeroRecord> = a.iter().chain(b).copied().collect();
    all.sort_by(|x, y| x.function.cmp(&y.function).then(x.t.total_cmp(&y.t)));
    let mut out: Vec<ZeroRecord> = Vec::with_capacity(all.len());
    for z in all {
        match out.last_mut() {
            Some(p) if p.function == z.function && (z.t - p.t).abs() <= p.err + z.err => {
                if z.err < p.err {
                    *p = z;
                }
            }
            _ => out.push(z),
        }
    }
    out.sort_by(|x, y| x.t.total_cmp(&y.t).then(x.function.cmp(&y.function)));
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Window {
    index: usize,
    /// Grid indices of the window ends.
    first: usize,
    last: usize,
}

/// Tile the grid into windows of about `width`, split at grid points.
fn windows(grid: &[f64], t_lo: f64, width: f64) -> Vec<Window> {
    let mut cuts = vec![0];
    let mut k = 1;
    loop {
        let target = t_lo + k as f64 * width;
        let i = grid.partition_point(|&t| t < target);
        if i >= grid.len() - 1 {
            break;
        }
        if i > *cuts.last().unwrap() {
            cuts.push(i);
        }
        k += 1;
    }
    cuts.push(grid.len() - 1);
    cuts.windows(2).enumerate().map(|(index, c)| Window { index, first: c[0], last: c[1] }).collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct WindowCheckpoint {
    schema_version: u32,
    config_hash: String,
    t_lo: f64,
    t_hi: f64,
    scan: LineScan,
}

fn checkpoint_file(dir: &Path, hash: &str, t_lo: f64, t_hi: f64) -> PathBuf {
    dir.join(format!("window_{t_lo:.6}_{t_hi:.6}_{}.json", &hash[..16]))
}

fn load_checkpoint(path: &Path, hash: &str, t_lo: f64, t_hi: f64) -> Option<LineScan> {
    let text = std::fs::read_to_string(path).ok()?;
    let cp: WindowCheckpoint = serde_json::from_str(&text).ok()?;
    (cp.schema_version == SCHEMA_VERSION && cp.config_hash == hash && cp.t_lo == t_lo && cp.t_hi == t_hi)
        .then_some(cp.scan)
}

fn write_checkpoint(path: &Path, cp: &WindowCheckpoint) -> Result<()> {
    let tmp = path.with_extension("json.tmp");
    std::fs::write(&tmp, serde_json::to_string(cp)?)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

enum WindowOutcome {
    Resumed(LineScan),
    Computed { scan: LineScan, retried: bool },
    Failed(String),
}

fn run_window(w: Window, grid: &[f64], config: &ScanConfig, hash: &str) -> Result<WindowOutcome> {
    let cells = &grid[w.first..=w.last];
    let (t_lo, t_hi) = (cells[0], cells[cells.len() - 1]);
    let path = config.checkpoint_path.as_deref().map(|d| checkpoint_file(d, hash, t_lo, t_hi));
    if let Some(scan) = path.as_deref().and_then(|p| load_checkpoint(p, hash, t_lo, t_hi)) {
        return Ok(WindowOutcome::Resumed(scan));
    }
    let (scan, retried) = match scan_cells(cells, &config.ctx) {
        Ok(scan) => (scan, false),
        Err(first) => {
            log::warn!("window [{t_lo}, {t_hi}] failed ({first}); retrying with refined settings");
            match scan_cells(cells, &config.ctx.refined()) {
                Ok(scan) => (scan, true),
                Err(second) => return Ok(WindowOutcome::Failed(format!("{first}; retry: {second}"))),
            }
        }
    };
    if let Some(p) = path {
        let cp = WindowCheckpoint { schema_version: SCHEMA_VERSION, config_hash: hash.to_string(), t_lo, t_hi, scan };
        write_checkpoint(&p, &cp)?;
        return Ok(WindowOutcome::Computed { scan: cp.scan, retried });
    }
    Ok(WindowOutcome::Computed { scan, retried })
}

/// A run of consecutive successful windows.
struct Chunk {
    scan: LineScan,
}

fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

/// Scan [t_lo, t_hi] and assemble the verified report.
pub fn scan(config: &ScanConfig) -> Result<ScanReport> {
    config.validate()?;
    let started = Instant::now();
    let started_unix = unix_now();
    let hash = config.hash();
    if let Some(dir) = &config.checkpoint_path {
        std::fs::create_dir_all(dir)?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    pool.install(|| assemble(config, &hash, started, started_unix))
}

fn assemble(config: &ScanConfig, hash: &str, started: Instant, started_unix: f64) -> Result<ScanReport> {
    let ctx = &config.ctx;
    let grid = line_grid(config.t_lo, config.t_hi);
    let wins = windows(&grid, config.t_lo, config.window);
    let outcomes: Vec<WindowOutcome> =
        wins.par_iter().map(|&w| run_window(w, &grid, config, hash)).collect::<Result<_>>()?;

    let mut runtime = RuntimeInfo {
        started_unix,
        workers: config.workers,
        checkpoint_path: config.checkpoint_path.clone(),
        ..Default::default()
    };
    let mut chunks: Vec<Chunk> = Vec::new();
    let mut unverified: Vec<UnverifiedRange> = Vec::new();
    let mut open = false;
    for (w, outcome) in wins.iter().zip(outcomes) {
        let scan = match outcome {
            WindowOutcome::Resumed(s) => {
                runtime.windows_resumed += 1;
                s
            }
            WindowOutcome::Computed { scan, retried } => {
                runtime.windows_computed += 1;
                runtime.windows_retried += retried as usize;
                scan
            }
            WindowOutcome::Failed(error) => {
                runtime.windows_retried += 1;
                unverified.push(UnverifiedRange { t_lo: grid[w.first], t_hi: grid[w.last], error });
                open = false;
                continue;
            }
        };
        match chunks.last_mut() {
            Some(c) if open => c.scan.append(scan)?,
            _ => chunks.push(Chunk { scan }),
        }
        open = true;
    }

    let opts = config.geometry_options();
    let mut intervals = Vec::new();
    let mut islands: Vec<Island> = Vec::new();
    let mut zeros = Vec::new();
    let mut anomalies = Vec::new();
    let mut u_monotone_violations = Vec::new();
    let mut line_samples = 0;
    for chunk in &chunks {
        let scan = &chunk.scan;
        let geometry: LineGeometry = analyse_line(scan, &scan.zeros, &opts, ctx)?;
        let offset = islands.len();
        let mut chunk_zeros = scan.zeros.clone();
        geometry.assign(&mut chunk_zeros);
        for z in &mut chunk_zeros {
            z.island_index = z.island_index.map(|k| k + offset);
        }
        zeros.extend(chunk_zeros);
        islands.extend(geometry.islands.into_iter().map(|mut i| {
            i.index += offset;
            i
        }));
        intervals.extend(geometry.intervals);
        anomalies.extend(scan.anomalies.iter().cloned());
        anomalies.extend(geometry.anomalies);
        u_monotone_violations.extend(scan.u_monotone_violations.iter().copied());
        line_samples += scan.samples;
        if scan.t_lo >= U_MONOTONE_FROM && LineDerivatives::at(scan.t_lo, ctx)?.slope(FunctionId::U)? >= 0.0 {
            u_monotone_violations.push(scan.t_lo);
        }
    }
    u_monotone_violations.sort_by(f64::total_cmp);

    if config.multiplicity {
        let mult: Vec<u32> = zeros.par_iter().map(|z| multiplicity_of(z, &zeros, ctx)).collect();
        for (z, m) in zeros.iter_mut().zip(mult) {
            z.multiplicity = m;
        }
    }

    let census = associate_triples(&zeros, config.t_lo, config.t_hi, TRIPLE_EDGE_MARGIN);
    let mut report = ScanReport {
        schema_version: SCHEMA_VERSION,
        t_lo: config.t_lo,
        t_hi: config.t_hi,
        intervals,
        islands,
        zeros,
        triples: census.triples,
        unpaired: census.orphans,
        edge_unpaired: census.edge_skipped,
        fraction_outside_inner: None,
        u_monotone_violations,
        line_samples,
        checks: BTreeMap::new(),
        anomalies,
        unverified,
        provenance: Provenance {
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            config: config.settings(),
            config_hash: hash.to_string(),
            runtime: RuntimeInfo::default(),
        },
    };
    report.fraction_outside_inner = fraction_statistic(&report).ok();
    report.checks = verify_all(&report, ctx);
    let seams = seam_check(&report, &grid, &wins, config);
    report.checks.insert("seam.consistency".into(), seams);

    runtime.finished_unix = unix_now();
    runtime.elapsed_seconds = started.elapsed().as_secs_f64();
    report.provenance.runtime = runtime;
    Ok(report)
}

/// Winding of the zero's family round a circle small enough to exclude its
/// on-line neighbours; 0 when the winding could not be evaluated.
fn multiplicity_of(z: &ZeroRecord, zeros: &[ZeroRecord], ctx: &EvalContext) -> u32 {
    let gap = zeros
        .iter()
        .filter(|o| o.function == z.function && o.t != z.t)
        .map(|o| (o.t - z.t).abs())
        .fold(f64::INFINITY, f64::min);
    let radius = MULTIPLICITY_RADIUS.min(0.4 * gap).min(0.4 * base_step(z.t));
    let centre = num_complex::Complex64::new(0.5, z.t);
    match winding_multiplicity(centre, radius, z.function, ctx) {
        Ok(w) if w > 0 => w as u32,
        Ok(_) => 0,
        Err(e) => {
            log::warn!("multiplicity of {} at t = {}: {e}", z.function, z.t);
            0
        }
    }
}

/// Re-scan each window seam on its own grid and check that it finds the
/// same zeros near the seam as the windowed scan.
fn seam_check(report: &ScanReport, grid: &[f64], wins: &[Window], config: &ScanConfig) -> CheckResult {
    let mut out = CheckResult::default();
    for w in &wins[1..] {
        let seam = grid[w.first];
        let (lo, hi) = ((seam - config.overlap).max(config.t_lo), (seam + config.overlap).min(config.t_hi));
        if !report.verified_at(lo) || !report.verified_at(hi) {
            out.skip();
            continue;
        }
        let core = SEAM_CORE * config.overlap;
        let near = |z: &&ZeroRecord| (z.t - seam).abs() < core;
        let mine: Vec<ZeroRecord> = report.zeros.iter().filter(near).copied().collect();
        match scan_line(lo, hi, &config.ctx) {
            Ok(rescan) => {
                let theirs: Vec<ZeroRecord> = rescan.zeros.iter().filter(near).copied().collect();
                let widened = |v: &[ZeroRecord]| -> Vec<ZeroRecord> {
                    v.iter().map(|z| ZeroRecord { err: z.err.max(SEAM_MATCH), ..*z }).collect()
                };
                let merged = merge_zeros(&widened(&mine), &widened(&theirs));
                if merged.len() == mine.len() && merged.len() == theirs.len() {
                    out.pass();
                } else {
                    out.fail(seam, format!("windowed scan has {} zeros, seam re-scan {}", mine.len(), theirs.len()));
                }
            }
            Err(e) => out.fail(seam, format!("seam re-scan failed: {e}")),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn windows_tile_the_grid() {
        let grid = line_grid(5.0, 80.0);
        let ws = windows(&grid, 5.0, 25.0);
        assert_eq!(ws.len(), 3);
        assert_eq!(ws[0].first, 0);
        assert_eq!(ws[2].last, grid.len() - 1);
        for p in ws.windows(2) {
            assert_eq!(p[0].last, p[1].first);
        }
        assert!((grid[ws[1].first] - 30.0).abs() <= MAX_SCAN_STEP);
        // a short range is one window
        let grid = line_grid(5.0, 6.0);
        assert_eq!(windows(&grid, 5.0, 25.0).len(), 1);
    }

    #[test]
    fn config_hash_ignores_workers_and_path() {
        let a = ScanConfig::new(10.0, 20.0);
        let b = ScanConfig { workers: 8, checkpoint_path: Some("/tmp/x".into()), ..a.clone() };
        assert_eq!(a.hash(), b.hash());
        let c = ScanConfig { window: 10.0, ..a.clone() };
        assert_ne!(a.hash(), c.hash());
    }

    #[test]
    fn validation_messages() {
        assert!(ScanConfig::new(4.0, 20.0).validate().is_err());
        assert!(ScanConfig::new(20.0, 10.0).validate().is_err());
        assert!(ScanConfig { overlap: 0.05, ..ScanConfig::new(10.0, 20.0) }.validate().is_err());
        assert!(ScanConfig { workers: 0, ..ScanConfig::new(10.0, 20.0) }.validate().is_err());
        ScanConfig::new(10.0, 20.0).validate().unwrap();
    }

    fn zr(id: FunctionId, t: f64, err: f64) -> ZeroRecord {
        ZeroRecord::bracketed(id, t, err)
    }

    #[test]
    fn merge_keeps_the_tighter_copy() {
        let a = vec![zr(FunctionId::L, 1.0, 1e-6), zr(FunctionId::K, 2.0, 1e-9)];
        let b = vec![zr(FunctionId::L, 1.0 + 5e-7, 1e-8), zr(FunctionId::K, 3.0, 1e-9)];
        let m = merge_zeros(&a, &b);
        assert_eq!(m.len(), 3);
        assert_eq!(m[0].err, 1e-8);
        assert_eq!(merge_zeros(&m, &m), m);
    }
}
