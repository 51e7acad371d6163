//! Sign structure of the ratio phases along the critical line.

pub mod contour;
pub mod islands;
pub mod line;
pub mod region;

pub use region::{Boundary, BoundarySource, InnerIslandEnds, Interval, Island, RegionKind};
