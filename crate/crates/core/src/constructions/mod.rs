//! Effectively closed sets with prescribed capacity: nested clopen sets
//! tracking a decreasing target list, and a measure-zero set of positive
//! capacity cut out by sparse coordinate constraints.

mod sparse;
mod usc;

pub use sparse::{
    build_measure_zero_positive_capacity, capacity_sparse, sparse_step, stage_threshold,
    SparseConstraint, SparseResult,
};
pub use usc::{build_usc_capacity, Removal, UscStage, UscTrace, DEFAULT_LEAF_BUDGET};
