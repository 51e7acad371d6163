mod plot;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::json;

use latsum::context::VALIDITY_THRESHOLD;
use latsum::geometry::islands::{find_islands, COUNTED_FAMILIES};
use latsum::lattice::{identity_residuals, LatticeParams};
use latsum::scan::{export, scan, ScanConfig, ScanReport, CHECKPOINT_ENV, SCHEMA_VERSION};
use latsum::zeros::{find_s0_zeros, find_zeros};
use latsum::{evaluate, EvalContext, FunctionId};

#[derive(Parser)]
#[command(name = "latsum", version, about = "Square-lattice sums and the zero geometry of their function family")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one function at a point
    Eval(EvalArgs),
    /// Zeros of one family on the critical line
    Zeros(ZerosArgs),
    /// Islands, their intervals and zero counts
    Islands(IslandsArgs),
    /// Full windowed scan with checkpoints and structural checks
    Scan(ScanArgs),
    /// Scan and run the structural checks; exit 1 if any selected check fails
    Verify(VerifyArgs),
    /// Tab-separated data for plots
    PlotData(plot::PlotArgs),
    /// Summarise a saved scan report
    Report(ReportArgs),
}

#[derive(Args)]
struct EvalArgs {
    /// Function name: S0 S0t K Kl T+ T- L L- zeta L-4 U V UK VK F G
    #[arg(long = "fn")]
    function: String,
    /// Point as re,im
    #[arg(long, allow_hyphen_values = true)]
    s: String,
    /// Lattice period ratio
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    /// Also print the identity residuals at this point
    #[arg(long)]
    check: bool,
    /// Print the bare value without an error bound
    #[arg(long)]
    raw: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ZerosArgs {
    #[arg(long = "fn")]
    function: String,
    /// Ordinate range t0:t1
    #[arg(long)]
    range: String,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct IslandsArgs {
    #[arg(long)]
    range: String,
    /// Skip contour windings (on-line counts only)
    #[arg(long)]
    no_contours: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Clone)]
struct ScanOptions {
    #[arg(long)]
    range: String,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Checkpoint directory
    #[arg(long, env = CHECKPOINT_ENV)]
    checkpoint: Option<PathBuf>,
    #[arg(long, default_value_t = 25.0)]
    window: f64,
    #[arg(long, default_value_t = 1.0)]
    overlap: f64,
    /// Skip contour windings (on-line counts only)
    #[arg(long)]
    no_contours: bool,
    /// Wind each located zero's family round a small circle
    #[arg(long)]
    multiplicity: bool,
}

impl ScanOptions {
    fn config(&self) -> Result<ScanConfig> {
        let (t_lo, t_hi) = parse_range(&self.range, &EvalContext::default())?;
        let config = ScanConfig {
            window: self.window,
            overlap: self.overlap,
            workers: self.workers,
            checkpoint_path: self.checkpoint.clone(),
            contour_counts: !self.no_contours,
            multiplicity: self.multiplicity,
            ..ScanConfig::new(t_lo, t_hi)
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Args)]
struct ScanArgs {
    #[command(flatten)]
    scan: ScanOptions,
    /// Write the JSON report here ("-" for standard output)
    #[arg(long)]
    json: Option<PathBuf>,
    /// Write CSV tables into this directory
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    scan: ScanOptions,
    /// Only checks whose name starts with this (counts, inner, triples, zeros, s0_zeros, phase, schematic, ...)
    #[arg(long, alias = "theorem")]
    check: Option<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ReportArgs {
    /// Saved JSON report
    input: PathBuf,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

fn parse_point(text: &str) -> Result<Complex64> {
    let (re, im) = text.split_once(',').ok_or_else(|| anyhow!("expected re,im for the point, got `{text}`"))?;
    let re: f64 = re.trim().parse().with_context(|| format!("bad real part `{re}`"))?;
    let im: f64 = im.trim().parse().with_context(|| format!("bad imaginary part `{im}`"))?;
    Ok(Complex64::new(re, im))
}

/// Parse t0:t1 and check it against the scan threshold.
pub(crate) fn parse_range(text: &str, ctx: &EvalContext) -> Result<(f64, f64)> {
    let (a, b) = text.split_once(':').ok_or_else(|| anyhow!("expected a range t0:t1, got `{text}`"))?;
    let t0: f64 = a.trim().parse().with_context(|| format!("bad range start `{a}`"))?;
    let t1: f64 = b.trim().parse().with_context(|| format!("bad range end `{b}`"))?;
    if t1.partial_cmp(&t0) != Some(std::cmp::Ordering::Greater) {
        bail!("empty range {t0}:{t1}; the end must exceed the start");
    }
    if t0 < ctx.t_min_scan {
        bail!(
            "range starts at t = {t0}, below t_min_scan = {}. The ratio functions are only characterised above t = {VALIDITY_THRESHOLD}; \
             start the range at {} or higher, e.g. --range {}:{}",
            ctx.t_min_scan,
            ctx.t_min_scan,
            ctx.t_min_scan,
            t1.max(ctx.t_min_scan + 10.0)
        );
    }
    Ok((t0, t1))
}

fn parse_function(name: &str) -> Result<FunctionId> {
    name.parse::<FunctionId>().map_err(|_| {
        let names: Vec<&str> = FunctionId::ALL.iter().map(|f| f.short_name()).collect();
        anyhow!("unknown function `{name}`; expected one of {}", names.join(" "))
    })
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn eval_cmd(a: &EvalArgs) -> Result<ExitCode> {
    let id = parse_function(&a.function)?;
    let s = parse_point(&a.s)?;
    let params = LatticeParams::new(a.lambda)?;
    let ctx = EvalContext::default();
    let value = evaluate(id, s, params, &ctx)?;
    // the same value with every truncation tightened bounds the error
    let refined = evaluate(id, s, params, &ctx.refined())?;
    let err = (value - refined).norm().max(4.0 * f64::EPSILON * value.norm());
    let residuals = if a.check { identity_residuals(s, params, &ctx) } else { Vec::new() };
    if a.json {
        print_json(&json!({
            "schema_version": SCHEMA_VERSION,
            "function": id,
            "s": [s.re, s.im],
            "lambda": a.lambda,
            "value": [value.re, value.im],
            "abs": value.norm(),
            "err": err,
            "identities": residuals,
        }))?;
    } else if a.raw {
        println!("{} {}", value.re, value.im);
    } else {
        println!("{id}({s}; λ={}) = {} {:+}i  ± {err:.1e}", a.lambda, value.re, value.im);
        println!("|value| = {}  arg = {}", value.norm(), value.arg());
    }
    if a.check && !a.json {
        println!("{:<28} {:>10} {:>10}  status", "identity", "relative", "tolerance");
        for r in &residuals {
            let status = match &r.error {
                Some(e) => format!("not evaluated: {e}"),
                None if r.passes() => "ok".to_string(),
                None => "FAIL".to_string(),
            };
            println!("{:<28} {:>10.2e} {:>10.0e}  {status}", r.name, r.relative(), r.tolerance);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn zeros_cmd(a: &ZerosArgs) -> Result<ExitCode> {
    let ctx = EvalContext::default();
    let id = parse_function(&a.function)?;
    let (t0, t1) = parse_range(&a.range, &ctx)?;
    let zeros = match id {
        FunctionId::S0 => find_s0_zeros(t0, t1, &ctx)?,
        _ => find_zeros(id, t0, t1, &ctx).map_err(|e| anyhow!("{e}; zero finding covers S0 S0t K Kl T+ T- L L- zeta L-4"))?,
    };
    if a.json {
        print_json(&json!({ "schema_version": SCHEMA_VERSION, "function": id, "range": [t0, t1], "zeros": zeros }))?;
    } else {
        println!("# zeros of {id} on 1/2 + it, t in [{t0}, {t1}]: {}", zeros.len());
        println!("t\terr");
        for z in &zeros {
            println!("{}\t{:.1e}", z.t, z.err);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn islands_cmd(a: &IslandsArgs) -> Result<ExitCode> {
    let ctx = EvalContext::default();
    let (t0, t1) = parse_range(&a.range, &ctx)?;
    let islands = if a.no_contours {
        let config = ScanConfig { contour_counts: false, ..ScanConfig::new(t0, t1) };
        scan(&config)?.islands
    } else {
        find_islands(t0, t1, &ctx)?
    };
    if a.json {
        print_json(&json!({ "schema_version": SCHEMA_VERSION, "range": [t0, t1], "islands": islands }))?;
        return Ok(ExitCode::SUCCESS);
    }
    println!("# {} islands in [{t0}, {t1}]", islands.len());
    for i in &islands {
        let counts: Vec<String> = COUNTED_FAMILIES
            .iter()
            .filter_map(|id| i.counts.get(id).map(|n| format!("N_Z({id})={n}")))
            .collect();
        println!(
            "[{:.6}, {:.6}]{} intervals={} enclaves={} {}",
            i.t_lo,
            i.t_hi,
            if i.complete { "" } else { " (cut by range end)" },
            i.intervals.len(),
            i.enclave_count,
            counts.join(" ")
        );
        println!("  {}", i.structure_string);
        if let Some(e) = &i.contour_error {
            println!("  contour: {e}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn summary(report: &ScanReport) {
    println!("range [{}, {}]", report.t_lo, report.t_hi);
    println!("islands {}  intervals {}  zeros {}  triples {}", report.islands.len(), report.intervals.len(), report.zeros.len(), report.triples.len());
    match report.fraction_outside_inner {
        Some(f) => println!("fraction of ζ zeros outside inner islands {f:.4}"),
        None => println!("fraction of ζ zeros outside inner islands: fewer than 200 ζ zeros"),
    }
    for u in &report.unverified {
        println!("UNVERIFIED [{}, {}]: {}", u.t_lo, u.t_hi, u.error);
    }
    for a in &report.anomalies {
        println!("anomaly at t = {}: {}", a.t, a.detail);
    }
    let r = &report.provenance.runtime;
    println!(
        "{:.1} s on {} workers; windows computed {}, resumed {}, retried {}",
        r.elapsed_seconds, r.workers, r.windows_computed, r.windows_resumed, r.windows_retried
    );
}

fn check_table(report: &ScanReport, filter: Option<&str>) -> bool {
    println!("{:<28} {:>6} {:>6} {:>7}  first failure", "check", "pass", "fail", "skipped");
    let mut ok = true;
    for (name, c) in report.checks.iter().filter(|(n, _)| filter.is_none_or(|f| n.starts_with(f))) {
        ok &= c.fail == 0;
        let first = c.failures.first().map_or(String::new(), |f| format!("t = {:.6}: {}", f.t, f.detail));
        println!("{name:<28} {:>6} {:>6} {:>7}  {first}", c.pass, c.fail, c.skipped);
    }
    ok
}

fn scan_cmd(a: &ScanArgs) -> Result<ExitCode> {
    let report = scan(&a.scan.config()?)?;
    if let Some(path) = &a.json {
        let text = report.to_json()?;
        if path.as_os_str() == "-" {
            println!("{text}");
        } else {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
        }
    }
    if let Some(dir) = &a.csv {
        export::write_all_csv(&report, dir)?;
    }
    if a.json.as_deref().is_none_or(|p| p.as_os_str() != "-") {
        summary(&report);
        check_table(&report, None);
    }
    Ok(ExitCode::SUCCESS)
}

fn verify_cmd(a: &VerifyArgs) -> Result<ExitCode> {
    let report = scan(&a.scan.config()?)?;
    let filter = a.check.as_deref();
    let selected: Vec<_> = report.checks.iter().filter(|(n, _)| filter.is_none_or(|f| n.starts_with(f))).collect();
    if selected.is_empty() {
        let names: Vec<&str> = report.checks.keys().map(String::as_str).collect();
        bail!("no check matches `{}`; available: {}", filter.unwrap_or(""), names.join(" "));
    }
    let ok = selected.iter().all(|(_, c)| c.fail == 0) && report.unverified.is_empty();
    if a.json {
        let checks: serde_json::Map<String, serde_json::Value> =
            selected.iter().map(|(n, c)| (n.to_string(), serde_json::to_value(c).unwrap())).collect();
        print_json(&json!({
            "schema_version": SCHEMA_VERSION,
            "range": [report.t_lo, report.t_hi],
            "passed": ok,
            "unverified": report.unverified,
            "checks": checks,
        }))?;
    } else {
        if filter.is_some_and(|f| f.starts_with("counts")) {
            island_counts(&report);
        }
        check_table(&report, filter);
        for u in &report.unverified {
            println!("UNVERIFIED [{}, {}]: {}", u.t_lo, u.t_hi, u.error);
        }
        println!("{}", if ok { "all selected checks pass" } else { "some selected checks fail" });
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn island_counts(report: &ScanReport) {
    print!("{:<24}", "island");
    for id in COUNTED_FAMILIES {
        print!(" {:>6}", format!("N({id})"));
    }
    println!(" {:>4} {:>5}", "N_E", "wind");
    for i in &report.islands {
        print!("{:<24}", format!("[{:.4}, {:.4}]", i.t_lo, i.t_hi));
        for id in COUNTED_FAMILIES {
            print!(" {:>6}", i.counts.get(&id).map_or("-".to_string(), |n| n.to_string()));
        }
        println!(" {:>4} {:>5}", i.enclave_count, i.enclave_winding.map_or("-".to_string(), |n| n.to_string()));
    }
}

fn report_cmd(a: &ReportArgs) -> Result<ExitCode> {
    let text = std::fs::read_to_string(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let report = ScanReport::from_json(&text)?;
    if let Some(dir) = &a.csv {
        export::write_all_csv(&report, dir)?;
    }
    if a.json {
        print_json(&json!({
            "schema_version": SCHEMA_VERSION,
            "range": [report.t_lo, report.t_hi],
            "islands": report.islands.len(),
            "zeros": report.zeros.len(),
            "triples": report.triples.len(),
            "fraction_outside_inner": report.fraction_outside_inner,
            "checks": report.checks,
        }))?;
    } else {
        summary(&report);
        check_table(&report, None);
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Eval(a) => eval_cmd(a),
        Command::Zeros(a) => zeros_cmd(a),
        Command::Islands(a) => islands_cmd(a),
        Command::Scan(a) => scan_cmd(a),
        Command::Verify(a) => verify_cmd(a),
        Command::PlotData(a) => plot::run(a),
        Command::Report(a) => report_cmd(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn points_and_ranges() {
        assert_eq!(parse_point("0.5, -3").unwrap(), Complex64::new(0.5, -3.0));
        assert!(parse_point("0.5").is_err());
        let ctx = EvalContext::default();
        assert_eq!(parse_range("10:20.5", &ctx).unwrap(), (10.0, 20.5));
        assert!(parse_range("20:10", &ctx).is_err());
        let low = parse_range("4:5", &ctx).unwrap_err().to_string();
        assert!(low.contains("t_min_scan") && low.contains("--range 5:15"), "{low}");
    }

    #[test]
    fn function_names() {
        assert_eq!(parse_function("Kl").unwrap(), FunctionId::KLambda);
        assert!(parse_function("nope").unwrap_err().to_string().contains("S0"));
    }

    #[test]
    fn command_line_shape() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
