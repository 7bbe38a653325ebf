//! Finite combinatorics of Cantor space: bit strings, pruned trees and
//! their ternary codes, and the Boolean algebra of clopen sets.

mod bits;
mod clopen;
mod tree;

pub use bits::{bs, BitString};
pub use clopen::ClopenSet;
pub use tree::{
    enumerate_trees, tree_count, CodeWalker, PrunedTree, TernaryCode, TreeEnumerator,
    DEFAULT_MAX_ENUM_DEPTH,
};
