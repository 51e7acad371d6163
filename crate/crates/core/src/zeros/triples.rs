//! Association of each ℒ zero with a 𝒯₋ zero and a 𝒦_λ zero, and the
//! ordering of the three.

use serde::{Deserialize, Serialize};

use super::locate::ZeroRecord;
use crate::error::{Error, Result};
use crate::function::FunctionId;
use crate::geometry::region::RegionKind;

/// Order of the three zeros along the line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TripleKind {
    /// 𝒦_λ, 𝒯₋, ℒ
    KlTmL,
    /// 𝒯₋, 𝒦_λ, ℒ
    TmKlL,
    /// 𝒯₋, ℒ, 𝒦_λ
    TmLKl,
}

impl TripleKind {
    /// Ordering of the given ordinates, if it is one of the three kinds.
    pub fn of(t_kl: f64, t_tm: f64, t_l: f64) -> Option<Self> {
        if t_kl <= t_tm && t_tm <= t_l {
            Some(Self::KlTmL)
        } else if t_tm <= t_kl && t_kl <= t_l {
            Some(Self::TmKlL)
        } else if t_tm <= t_l && t_l <= t_kl {
            Some(Self::TmLKl)
        } else {
            None
        }
    }

    /// Kinds allowed in a region: 𝒯₋,ℒ,𝒦_λ in enclaves and between islands,
    /// the other two elsewhere in islands.
    pub fn allowed_in(self, region: RegionKind) -> bool {
        match region {
            RegionKind::Extended | RegionKind::Enclave => self == Self::TmLKl,
            RegionKind::IslandOuter | RegionKind::InnerIsland => self != Self::TmLKl,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::KlTmL => "Kl,T-,L",
            Self::TmKlL => "T-,Kl,L",
            Self::TmLKl => "T-,L,Kl",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripleRecord {
    /// None when the members are in no admissible order (𝒯₋ after ℒ).
    pub kind: Option<TripleKind>,
    pub k_lambda: ZeroRecord,
    pub t_minus: ZeroRecord,
    pub l: ZeroRecord,
    /// Region of the ℒ zero.
    pub region: Option<RegionKind>,
}

impl TripleRecord {
    pub fn diameter(&self) -> f64 {
        let ts = [self.k_lambda.t, self.t_minus.t, self.l.t];
        ts.iter().copied().fold(f64::MIN, f64::max) - ts.iter().copied().fold(f64::MAX, f64::min)
    }

    /// Kind matches the region of the ℒ zero; None when either is unknown.
    pub fn consistent(&self) -> Option<bool> {
        Some(self.kind?.allowed_in(self.region?))
    }
}

/// Outcome of associating complete zero lists over a range.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TripleCensus {
    pub triples: Vec<TripleRecord>,
    /// Zeros left without partners away from the range ends.
    pub orphans: Vec<ZeroRecord>,
    /// Zeros left without partners within the edge margin of the range.
    pub edge_skipped: Vec<ZeroRecord>,
}

/// Partners are looked for this far beyond the ℒ zero and its 𝒯₋ partner.
const PARTNER_WINDOW: f64 = 2.0;

fn of_family(zeros: &[ZeroRecord], id: FunctionId) -> Vec<ZeroRecord> {
    let mut v: Vec<ZeroRecord> = zeros.iter().filter(|z| z.function == id).copied().collect();
    v.sort_by(|a, b| a.t.total_cmp(&b.t));
    v
}

/// Greedy association over the zeros of [t_lo, t_hi]: each ℒ zero takes the
/// nearest 𝒯₋ zero at or below it and the 𝒦_λ zero minimizing the triple's
/// diameter. Zeros within `edge_margin` of an end whose partners may lie
/// outside the range are set aside rather than reported as orphans.
pub fn associate_triples(zeros: &[ZeroRecord], t_lo: f64, t_hi: f64, edge_margin: f64) -> TripleCensus {
    let kl = of_family(zeros, FunctionId::KLambda);
    let tm = of_family(zeros, FunctionId::TMinus);
    let ls = of_family(zeros, FunctionId::L);
    let mut kl_used = vec![false; kl.len()];
    let mut tm_used = vec![false; tm.len()];
    let near_edge = |t: f64| t - t_lo < edge_margin || t_hi - t < edge_margin;
    let mut out = TripleCensus::default();
    let set_aside = |z: ZeroRecord, out: &mut TripleCensus| {
        if near_edge(z.t) {
            out.edge_skipped.push(z);
        } else {
            out.orphans.push(z);
        }
    };

    for l in ls {
        let below = tm.partition_point(|z| z.t <= l.t);
        let Some(j) = below.checked_sub(1).filter(|&j| !tm_used[j]) else {
            set_aside(l, &mut out);
            continue;
        };
        let t_m = tm[j];
        let lo = kl.partition_point(|z| z.t < t_m.t.min(l.t) - PARTNER_WINDOW);
        let hi = kl.partition_point(|z| z.t <= l.t + PARTNER_WINDOW);
        let diameter = |k: &ZeroRecord| k.t.max(l.t) - k.t.min(t_m.t);
        let best = (lo..hi).filter(|&k| !kl_used[k]).min_by(|&a, &b| diameter(&kl[a]).total_cmp(&diameter(&kl[b])));
        let Some(k) = best else {
            set_aside(l, &mut out);
            continue;
        };
        tm_used[j] = true;
        kl_used[k] = true;
        out.triples.push(TripleRecord {
            kind: TripleKind::of(kl[k].t, t_m.t, l.t),
            k_lambda: kl[k],
            t_minus: t_m,
            l,
            region: l.region,
        });
    }
    for (z, used) in tm.iter().zip(&tm_used).chain(kl.iter().zip(&kl_used)) {
        if !used {
            set_aside(*z, &mut out);
        }
    }
    out.orphans.sort_by(|a, b| a.t.total_cmp(&b.t));
    out.edge_skipped.sort_by(|a, b| a.t.total_cmp(&b.t));
    out
}

/// As [`associate_triples`], failing on the first orphan.
pub fn classify_triples(zeros: &[ZeroRecord], t_lo: f64, t_hi: f64, edge_margin: f64) -> Result<Vec<TripleRecord>> {
    let census = associate_triples(zeros, t_lo, t_hi, edge_margin);
    if let Some(z) = census.orphans.first() {
        return Err(Error::OrphanZero { function: z.function.to_string(), t: z.t });
    }
    Ok(census.triples)
}
