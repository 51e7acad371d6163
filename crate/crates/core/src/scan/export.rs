//! Flat CSV tables of a scan report.

use std::io::Write;

use serde::Serialize;

use super::ScanReport;
use crate::error::{Error, Result};
use crate::function::FunctionId;
use crate::geometry::islands::COUNTED_FAMILIES;

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidInput(format!("csv: {other:?}")),
    }
}

fn write_rows<W: Write, R: Serialize>(out: W, rows: impl IntoIterator<Item = R>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn region_name<T: std::fmt::Debug>(r: Option<T>) -> String {
    r.map(|r| format!("{r:?}")).unwrap_or_default()
}

#[derive(Serialize)]
struct ZeroRow {
    function: String,
    t: f64,
    err: f64,
    multiplicity: u32,
    island: Option<usize>,
    region: String,
}

pub fn write_zeros_csv<W: Write>(report: &ScanReport, out: W) -> Result<()> {
    write_rows(
        out,
        report.zeros.iter().map(|z| ZeroRow {
            function: z.function.to_string(),
            t: z.t,
            err: z.err,
            multiplicity: z.multiplicity,
            island: z.island_index,
            region: region_name(z.region),
        }),
    )
}

#[derive(Serialize)]
struct IntervalRow<'a> {
    t_lo: f64,
    t_hi: f64,
    kind: String,
    brackets: &'a str,
}

pub fn write_intervals_csv<W: Write>(report: &ScanReport, out: W) -> Result<()> {
    write_rows(
        out,
        report.intervals.iter().map(|iv| IntervalRow {
            t_lo: iv.t_lo,
            t_hi: iv.t_hi,
            kind: format!("{:?}", iv.kind),
            brackets: &iv.bracket_string,
        }),
    )
}

pub fn write_islands_csv<W: Write>(report: &ScanReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> =
        ["index", "t_lo", "t_hi", "complete", "intervals", "enclaves", "enclave_winding"].map(String::from).to_vec();
    header.extend(COUNTED_FAMILIES.iter().map(|id| format!("n_{id}")));
    header.extend(["contour_error", "structure"].map(String::from));
    w.write_record(&header).map_err(csv_error)?;
    for i in &report.islands {
        let count = |id: &FunctionId| i.counts.get(id).map(|n| n.to_string()).unwrap_or_default();
        let mut row = vec![
            i.index.to_string(),
            i.t_lo.to_string(),
            i.t_hi.to_string(),
            i.complete.to_string(),
            i.intervals.len().to_string(),
            i.enclave_count.to_string(),
            i.enclave_winding.map(|n| n.to_string()).unwrap_or_default(),
        ];
        row.extend(COUNTED_FAMILIES.iter().map(count));
        row.push(i.contour_error.clone().unwrap_or_default());
        row.push(i.structure_string.clone());
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct TripleRow {
    kind: String,
    t_k_lambda: f64,
    t_t_minus: f64,
    t_l: f64,
    region: String,
    consistent: Option<bool>,
}

pub fn write_triples_csv<W: Write>(report: &ScanReport, out: W) -> Result<()> {
    write_rows(
        out,
        report.triples.iter().map(|t| TripleRow {
            kind: t.kind.map(|k| k.label().to_string()).unwrap_or_default(),
            t_k_lambda: t.k_lambda.t,
            t_t_minus: t.t_minus.t,
            t_l: t.l.t,
            region: region_name(t.region),
            consistent: t.consistent(),
        }),
    )
}

#[derive(Serialize)]
struct CheckRow<'a> {
    check: &'a str,
    pass: usize,
    fail: usize,
    skipped: usize,
    count: usize,
    first_failure_t: Option<f64>,
    first_failure: &'a str,
}

pub fn write_checks_csv<W: Write>(report: &ScanReport, out: W) -> Result<()> {
    write_rows(
        out,
        report.checks.iter().map(|(name, c)| CheckRow {
            check: name,
            pass: c.pass,
            fail: c.fail,
            skipped: c.skipped,
            count: c.count,
            first_failure_t: c.failures.first().map(|f| f.t),
            first_failure: c.failures.first().map_or("", |f| f.detail.as_str()),
        }),
    )
}

/// Write every table into `dir` as zeros.csv, intervals.csv, islands.csv,
/// triples.csv and checks.csv.
pub fn write_all_csv(report: &ScanReport, dir: &std::path::Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let open = |name: &str| std::fs::File::create(dir.join(name)).map(std::io::BufWriter::new);
    write_zeros_csv(report, open("zeros.csv")?)?;
    write_intervals_csv(report, open("intervals.csv")?)?;
    write_islands_csv(report, open("islands.csv")?)?;
    write_triples_csv(report, open("triples.csv")?)?;
    write_checks_csv(report, open("checks.csv")?)?;
    Ok(())
}
