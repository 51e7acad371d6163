use criterion::{black_box, criterion_group, criterion_main, Criterion};
use num_complex::Complex64;

use latsum::geometry::line::scan_line;
use latsum::lattice::{mac_k, s0_direct, s0_kober, LatticeParams, MacIndices, SquarePoint};
use latsum::scan::{scan, ScanConfig};
use latsum::specfun::{bessel_k, zeta};
use latsum::EvalContext;
use latsum_bench::line_points;

fn special_functions(c: &mut Criterion) {
    let ctx = EvalContext::default();
    let mut g = c.benchmark_group("specfun");
    for s in line_points(&[20.0, 500.0]) {
        g.bench_function(format!("zeta t={}", s.im), |b| b.iter(|| zeta(black_box(s), &ctx).unwrap()));
    }
    g.bench_function("bessel_k nu=0.1+3i x=6.3", |b| {
        b.iter(|| bessel_k(black_box(Complex64::new(0.1, 3.0)), black_box(6.3), &ctx).unwrap())
    });
    g.finish();
}

fn lattice_sums(c: &mut Criterion) {
    let ctx = EvalContext::default();
    let s = Complex64::new(1.5, 2.0);
    let p = LatticeParams::new(1.3).unwrap();
    let mut g = c.benchmark_group("lattice");
    g.bench_function("s0_kober", |b| b.iter(|| s0_kober(black_box(s), p, &ctx).unwrap()));
    g.bench_function("s0_direct", |b| b.iter(|| s0_direct(black_box(s), p, &ctx).unwrap()));
    g.bench_function("mac_k(1,1)", |b| b.iter(|| mac_k(MacIndices::new(1, 1), black_box(s), p, &ctx).unwrap()));
    for s in line_points(&[100.0, 1000.0]) {
        g.bench_function(format!("square point t={}", s.im), |b| b.iter(|| SquarePoint::new(black_box(s), &ctx).unwrap()));
    }
    g.finish();
}

fn line_scans(c: &mut Criterion) {
    let ctx = EvalContext::default();
    let mut g = c.benchmark_group("scan");
    g.sample_size(10);
    g.bench_function("scan_line 350..360", |b| b.iter(|| scan_line(350.0, 360.0, &ctx).unwrap()));
    let config = ScanConfig { contour_counts: false, ..ScanConfig::new(5.0, 60.0) };
    g.bench_function("scan 5..60 without contours", |b| b.iter(|| scan(&config).unwrap()));
    g.finish();
}

criterion_group!(benches, special_functions, lattice_sums, line_scans);
criterion_main!(benches);
