//! Region classification records for the critical line.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::function::FunctionId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RegionKind {
    Extended,
    IslandOuter,
    InnerIsland,
    Enclave,
}

impl RegionKind {
    /// Part of an island (enclaves included).
    pub fn in_island(self) -> bool {
        !matches!(self, Self::Extended)
    }

    fn brackets(self) -> (&'static str, &'static str) {
        match self {
            Self::InnerIsland => ("(", ")"),
            Self::Enclave => ("[", "]"),
            Self::IslandOuter => ("<", ">"),
            Self::Extended => ("{", "}"),
        }
    }
}

/// Which phase derivative changes sign at a boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundarySource {
    /// d arg 𝒰_K/dt
    UK,
    /// d arg ℱ/dt
    F,
}

/// A sign change of a phase derivative on the line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Boundary {
    pub t: f64,
    /// Half-width of the final bisection bracket.
    pub err: f64,
    pub source: BoundarySource,
    /// True when the derivative goes from negative to positive as t grows.
    pub rising: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub t_lo: f64,
    pub t_hi: f64,
    pub kind: RegionKind,
    pub zero_tags: Vec<(FunctionId, f64)>,
    pub bracket_string: String,
}

/// Families shown in bracket notation.
pub const TAG_FAMILIES: [FunctionId; 7] = [
    FunctionId::K,
    FunctionId::KLambda,
    FunctionId::TPlus,
    FunctionId::TMinus,
    FunctionId::L,
    FunctionId::Zeta,
    FunctionId::L4,
];

impl Interval {
    pub fn new(t_lo: f64, t_hi: f64, kind: RegionKind, mut zero_tags: Vec<(FunctionId, f64)>) -> Self {
        zero_tags.sort_by(|a, b| a.1.total_cmp(&b.1));
        let bracket_string = bracket_notation(kind, &zero_tags);
        Self { t_lo, t_hi, kind, zero_tags, bracket_string }
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.t_lo && t < self.t_hi
    }

    pub fn width(&self) -> f64 {
        self.t_hi - self.t_lo
    }
}

pub fn bracket_notation(kind: RegionKind, tags: &[(FunctionId, f64)]) -> String {
    let (open, close) = kind.brackets();
    let names: Vec<&str> = tags.iter().map(|(f, _)| f.short_name()).collect();
    format!("{open}{}{close}", names.join(","))
}

/// Endpoint arguments arg[-ℱ] of one inner island.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnerIslandEnds {
    pub t_lo: f64,
    pub t_hi: f64,
    pub mu_l: f64,
    pub mu_u: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Island {
    pub index: usize,
    pub t_lo: f64,
    pub t_hi: f64,
    pub intervals: Vec<Interval>,
    pub enclave_count: usize,
    /// N_Z values: zeros in σ ≥ 1/2 inside the island.
    pub counts: BTreeMap<FunctionId, i64>,
    pub inner_islands: Vec<InnerIslandEnds>,
    pub structure_string: String,
    /// False when the island touches an end of the scanned range.
    pub complete: bool,
    /// Minus the summed winding of 𝒰_K round the enclave contours; equals
    /// `enclave_count` when every enclave holds one pole.
    pub enclave_winding: Option<i64>,
    /// Set when a contour could not be traced or wound; counts are then
    /// on-line counts only.
    pub contour_error: Option<String>,
}

impl Island {
    pub fn contains(&self, t: f64) -> bool {
        t >= self.t_lo && t < self.t_hi
    }

    pub fn structure(intervals: &[Interval]) -> String {
        intervals.iter().map(|i| i.bracket_string.as_str()).collect::<Vec<_>>().join("; ")
    }
}
