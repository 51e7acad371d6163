// Comparisons are written as !(x > y) where NaN must be rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod context;
pub mod error;
pub mod function;
pub mod geometry;
pub mod lattice;
pub mod ratios;
pub mod scan;
pub mod specfun;
pub mod zeros;

pub use context::EvalContext;
pub use error::{Error, Result};
pub use function::{evaluate, FunctionId};
