//! Exact measure, capacity and algorithmic-randomness computations for the
//! space of closed subsets of Cantor space.
//!
//! Closed sets are handled through their finite approximations: pruned trees
//! of bounded height and the ternary codes that index them. A measure on
//! codes induces a distribution of random closed sets, and its hitting
//! probabilities define a capacity on clopen sets. All values are exact
//! rationals.

pub mod acceptance;
pub mod cantor;
pub mod capacity;
pub mod cli;
pub mod constructions;
pub mod error;
pub mod measure;
pub mod random_lab;
pub mod rational;

pub use error::{Error, Result};
pub use rational::Rational;
