use std::f64::consts::PI;
use std::process::{Command, Output};

use serde_json::Value;

/// Catalan's constant, L₋₄(2).
const CATALAN: f64 = 0.915_965_594_177_219;

fn latsum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latsum")).args(args).env_remove("LATSUM_CHECKPOINT_DIR").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

/// Data rows of a TSV stream, without the header.
fn tsv(o: &Output) -> Vec<Vec<String>> {
    stdout(o)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split('\t').map(String::from).collect())
        .collect()
}

#[test]
fn eval_s0_at_two_matches_zeta_times_catalan() {
    let o = latsum(&["eval", "--fn", "S0", "--s", "2,0", "--lambda", "1", "--json"]);
    assert!(o.status.success());
    let v = json(&o);
    let expected = 4.0 * PI * PI / 6.0 * CATALAN;
    assert!((v["value"][0].as_f64().unwrap() - expected).abs() < 1e-10);
    assert!(v["err"].as_f64().unwrap() < 1e-10);
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn eval_u_has_unit_modulus_on_the_line() {
    let v = json(&latsum(&["eval", "--fn", "U", "--s", "0.5,20", "--json"]));
    assert!((v["abs"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn eval_check_reports_l_identity() {
    let o = latsum(&["eval", "--fn", "L", "--s", "0.5,13", "--check", "--json"]);
    assert!(o.status.success());
    let v = json(&o);
    let ids = v["identities"].as_array().unwrap();
    let l = ids.iter().find(|r| r["name"] == "l_from_k00").unwrap();
    assert!(l["residual"].as_f64().unwrap() / l["scale"].as_f64().unwrap() < 1e-10);
    let text = stdout(&latsum(&["eval", "--fn", "L", "--s", "0.5,13", "--check"]));
    assert!(text.contains("l_from_k00") && text.contains("ok"));
}

#[test]
fn usage_errors_exit_with_two() {
    let pole = latsum(&["eval", "--fn", "S0", "--s", "1,0"]);
    assert_eq!(pole.status.code(), Some(2));
    let low = latsum(&["verify", "--range", "4:5"]);
    assert_eq!(low.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&low.stderr).contains("t_min_scan"));
    let empty = latsum(&["plot-data", "--what", "surrogate", "--range", "20:20"]);
    assert_eq!(empty.status.code(), Some(2));
    let unknown = latsum(&["eval", "--fn", "Q", "--s", "0.5,20"]);
    assert_eq!(unknown.status.code(), Some(2));
}

#[test]
fn phase_of_u_decreases() {
    let o = latsum(&["plot-data", "--what", "phase", "--range", "10:50", "--fn", "U"]);
    assert!(o.status.success());
    let args: Vec<f64> = tsv(&o).iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(args.len() > 100);
    assert!(args.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn contour_of_the_355_island_is_closed_and_meets_the_line_twice() {
    let o = latsum(&["plot-data", "--what", "contour", "--island", "355"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let pts: Vec<(f64, f64)> = tsv(&o).iter().map(|r| (r[1].parse().unwrap(), r[2].parse().unwrap())).collect();
    assert_eq!(pts.first(), pts.last());
    let crossings = pts.windows(2).filter(|w| (w[0].0 - 0.5) * (w[1].0 - 0.5) < 0.0).count();
    assert_eq!(crossings, 2);
}

#[test]
fn vk_ratio_shows_the_kl_tm_l_triple() {
    let o = latsum(&["plot-data", "--what", "vk-ratio", "--range", "355:358", "--points", "200"]);
    assert!(o.status.success());
    let rows = tsv(&o);
    let events: Vec<&str> = rows.iter().map(|r| r[2].as_str()).filter(|e| !e.is_empty()).collect();
    assert!(events.windows(3).any(|w| w == ["pole:Kl", "zero:T-", "L"]));
    // 𝒱_K/𝒱 = -1 at the zeros of ℒ and of S₀
    for r in rows.iter().filter(|r| r[2] == "L" || r[2].starts_with("S0")) {
        assert!((r[1].parse::<f64>().unwrap() + 1.0).abs() < 1e-4, "{r:?}");
    }
}

#[test]
fn zeros_of_zeta_match_known_ordinates() {
    let v = json(&latsum(&["zeros", "--fn", "zeta", "--range", "10:30", "--json"]));
    let ts: Vec<f64> = v["zeros"].as_array().unwrap().iter().map(|z| z["t"].as_f64().unwrap()).collect();
    let known = [14.134_725_141_734_69, 21.022_039_638_771_55, 25.010_857_580_145_69];
    assert_eq!(ts.len(), known.len());
    for (t, k) in ts.iter().zip(known) {
        assert!((t - k).abs() < 1e-8);
    }
}

#[test]
fn scan_json_and_csv_feed_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let csv = dir.path().join("tables");
    let o = latsum(&[
        "scan",
        "--range",
        "5:40",
        "--json",
        path.to_str().unwrap(),
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for name in ["zeros.csv", "intervals.csv", "islands.csv", "triples.csv", "checks.csv"] {
        assert!(csv.join(name).exists());
    }
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let r = json(&latsum(&["report", path.to_str().unwrap(), "--json"]));
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["islands"].as_u64().unwrap() as usize, saved["islands"].as_array().unwrap().len());
    assert_eq!(r["zeros"].as_u64().unwrap() as usize, saved["zeros"].as_array().unwrap().len());
}

#[test]
fn verify_counts_lists_the_355_island() {
    let o = latsum(&["verify", "--range", "300:400", "--theorem", "counts"]);
    assert!(matches!(o.status.code(), Some(0) | Some(1)));
    let text = stdout(&o);
    assert!(text.contains("[355.4347, 358.6201]"), "{text}");
    assert!(text.contains("counts.chain") && !text.contains("inner.endpoint_signs"));
}

#[test]
fn verify_json_selects_checks() {
    let o = latsum(&["verify", "--range", "5:40", "--check", "triples", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["passed"], true);
    let names: Vec<&String> = v["checks"].as_object().unwrap().keys().collect();
    assert!(!names.is_empty() && names.iter().all(|n| n.starts_with("triples.")));
}
