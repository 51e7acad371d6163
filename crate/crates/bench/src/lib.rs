//! Benchmark-only crate; the benchmarks live in `benches/`.

use num_complex::Complex64;

/// Points on the critical line at the given heights.
pub fn line_points(ts: &[f64]) -> Vec<Complex64> {
    ts.iter().map(|&t| Complex64::new(0.5, t)).collect()
}
