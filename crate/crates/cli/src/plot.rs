//! Tab-separated plot data. Every stream starts with a `#` header line
//! naming its columns.

use std::io::Write;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Result};
use clap::{Args, ValueEnum};

use latsum::geometry::contour::{mirror_close, trace_to_crossing, ContourKind, TraceOptions};
use latsum::geometry::islands::find_islands;
use latsum::geometry::line::scan_line;
use latsum::geometry::{BoundarySource, Island};
use latsum::ratios::{line_point, track_phase};
use latsum::zeros::surrogate::surrogates_from_point;
use latsum::zeros::{find_zeros, SURROGATE_FAMILIES};
use latsum::{EvalContext, FunctionId};

use crate::parse_range;

#[derive(Clone, Copy, ValueEnum)]
pub enum What {
    /// 𝒱_K/𝒱 on the line with its zeros, poles and the zeros of ℒ and S₀ marked
    VkRatio,
    /// Unwrapped argument of U, UK or F and its t-derivative
    Phase,
    /// Closed |𝒰_K| = 1 curve of the island containing --island
    Contour,
    /// Real surrogates of the on-line families, scaled by 1/|Γ(s)π^{-s}|
    Surrogate,
}

#[derive(Args)]
pub struct PlotArgs {
    #[arg(long, value_enum)]
    what: What,
    /// Ordinate range t0:t1
    #[arg(long)]
    range: Option<String>,
    /// Function for --what phase
    #[arg(long = "fn", default_value = "U")]
    function: String,
    /// Ordinate inside the island for --what contour
    #[arg(long)]
    island: Option<f64>,
    /// Number of sample points
    #[arg(long, default_value_t = 2000)]
    points: usize,
}

/// Half-width of the stretch searched for the island of --what contour.
const ISLAND_SEARCH: f64 = 15.0;
/// Returns of a contour trace this close to a line crossing end the trace.
const CROSSING_TOL: f64 = 0.05;

fn grid(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n).map(|k| t0 + (t1 - t0) * k as f64 / (n - 1) as f64).collect()
}

fn range_of(a: &PlotArgs, ctx: &EvalContext) -> Result<(f64, f64)> {
    let text = a.range.as_deref().ok_or_else(|| anyhow!("--range t0:t1 is required for this plot"))?;
    parse_range(text, ctx)
}

fn vk_ratio(a: &PlotArgs, out: &mut impl Write, ctx: &EvalContext) -> Result<()> {
    let (t0, t1) = range_of(a, ctx)?;
    let events = [
        (FunctionId::K, "zero:K"),
        (FunctionId::TMinus, "zero:T-"),
        (FunctionId::KLambda, "pole:Kl"),
        (FunctionId::TPlus, "pole:T+"),
        (FunctionId::L, "L"),
        (FunctionId::Zeta, "S0:zeta"),
        (FunctionId::L4, "S0:L-4"),
    ];
    let mut rows: Vec<(f64, &str)> = grid(t0, t1, a.points).into_iter().map(|t| (t, "")).collect();
    for (id, label) in events {
        rows.extend(find_zeros(id, t0, t1, ctx)?.into_iter().map(|z| (z.t, label)));
    }
    rows.sort_by(|x, y| x.0.total_cmp(&y.0));
    writeln!(out, "# t\tvk_over_v\tevent")?;
    for (t, label) in rows {
        let p = line_point(t, ctx)?;
        let value = p.v_k().and_then(|vk| Ok(vk / p.v()?));
        match value {
            Ok(v) => writeln!(out, "{t}\t{}\t{label}", v.re)?,
            Err(_) => writeln!(out, "{t}\tinf\t{label}")?,
        }
    }
    Ok(())
}

fn phase(a: &PlotArgs, out: &mut impl Write, ctx: &EvalContext) -> Result<()> {
    let (t0, t1) = range_of(a, ctx)?;
    let id: FunctionId = a.function.parse()?;
    let track = track_phase(id, t0, t1, ctx)?;
    writeln!(out, "# t\targ_{id}_unwrapped\td_arg_dt")?;
    for s in &track.samples {
        writeln!(out, "{}\t{}\t{}", s.t, s.unwrapped_arg, s.d_arg_dt)?;
    }
    Ok(())
}

fn contour(a: &PlotArgs, out: &mut impl Write, ctx: &EvalContext) -> Result<()> {
    let t = a.island.ok_or_else(|| anyhow!("--island <t> is required for --what contour"))?;
    let lo = (t - ISLAND_SEARCH).max(ctx.t_min_scan);
    let hi = t + ISLAND_SEARCH;
    if t < ctx.t_min_scan {
        bail!("--island {t} is below t_min_scan = {}", ctx.t_min_scan);
    }
    // the island containing t, or failing that the nearest one
    let distance = |i: &Island| (i.t_lo - t).max(t - i.t_hi).max(0.0);
    let island = find_islands(lo, hi, ctx)?
        .into_iter()
        .min_by(|a, b| distance(a).total_cmp(&distance(b)))
        .ok_or_else(|| anyhow!("no island within {ISLAND_SEARCH} of t = {t}"))?;
    if !island.complete {
        bail!("the island around t = {t} reaches past [{lo}, {hi}]");
    }
    let crossings: Vec<f64> = scan_line(lo, hi, ctx)?
        .boundaries
        .iter()
        .filter(|b| b.source == BoundarySource::UK)
        .map(|b| b.t)
        .collect();
    let half = trace_to_crossing(ContourKind::UnitModUK, island.t_lo, &crossings, CROSSING_TOL, &TraceOptions::default(), ctx)?;
    let closed = mirror_close(&half);
    writeln!(out, "# index\tsigma\tt\t(island [{}, {}])", island.t_lo, island.t_hi)?;
    for (k, s) in closed.points.iter().chain(closed.points.first()).enumerate() {
        writeln!(out, "{k}\t{}\t{}", s.re, s.im)?;
    }
    Ok(())
}

fn surrogate(a: &PlotArgs, out: &mut impl Write, ctx: &EvalContext) -> Result<()> {
    let (t0, t1) = range_of(a, ctx)?;
    let names: Vec<&str> = SURROGATE_FAMILIES.iter().map(|f| f.short_name()).collect();
    writeln!(out, "# t\t{}", names.join("\t"))?;
    for t in grid(t0, t1, a.points) {
        let values = surrogates_from_point(&line_point(t, ctx)?)?;
        let cols: Vec<String> = values.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{t}\t{}", cols.join("\t"))?;
    }
    Ok(())
}

pub fn run(a: &PlotArgs) -> Result<ExitCode> {
    let ctx = EvalContext::default();
    let mut out = std::io::BufWriter::new(std::io::stdout().lock());
    match a.what {
        What::VkRatio => vk_ratio(a, &mut out, &ctx)?,
        What::Phase => phase(a, &mut out, &ctx)?,
        What::Contour => contour(a, &mut out, &ctx)?,
        What::Surrogate => surrogate(a, &mut out, &ctx)?,
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}
