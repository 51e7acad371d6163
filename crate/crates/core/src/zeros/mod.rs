//! Zero location on the critical line, multiplicities and triples.

pub mod locate;
pub mod surrogate;
pub mod triples;
pub mod winding;

pub use locate::{find_s0_zeros, find_zeros, s0_zero_ratios, refine_root, S0ZeroRatios, ZeroMethod, ZeroRecord};
pub use surrogate::{real_surrogate, SURROGATE_FAMILIES};
pub use triples::{associate_triples, classify_triples, TripleCensus, TripleKind, TripleRecord};
pub use winding::{family_value, winding_multiplicity, winding_number};
