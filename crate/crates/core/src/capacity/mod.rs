//! Capacities of clopen sets: the hitting probability `T_d(Q)` of a random
//! closed set, computed by the splitting recursion for uniform measures or
//! by summing over the full distribution of trees.

mod choquet;
mod table;

use std::cell::RefCell;
use std::collections::HashMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cantor::{enumerate_trees, BitString, ClopenSet, PrunedTree};
use crate::error::{Error, Result};
use crate::measure::MeasureSpec;
use crate::rational::{serde_text, Rational};

pub use choquet::{choquet_invert, recover_mu_star, CROSS_CHECK_MAX_DEPTH};
pub use table::{CapacityEntry, CapacityTable};

/// Anything that can report the capacity of a clopen set.
pub trait CapacityOracle {
    fn capacity(&self, q: &ClopenSet) -> Result<Rational>;
}

impl<T: CapacityOracle + ?Sized> CapacityOracle for &T {
    fn capacity(&self, q: &ClopenSet) -> Result<Rational> {
        (**self).capacity(q)
    }
}

/// Exact capacity under a uniform measure via the splitting recursion
/// `T(Q) = (1−b1)·T(Q0) + (1−b0)·T(Q1) − b2·T(Q0)·T(Q1)`.
#[derive(Clone, Debug)]
pub struct UniformCapacity {
    b0: Rational,
    b1: Rational,
    b2: Rational,
}

impl UniformCapacity {
    pub fn new(spec: &MeasureSpec) -> Result<Self> {
        let [b0, b1, b2] = spec.weights().ok_or(Error::NonUniformSpec)?;
        spec.ensure_valid()?;
        Ok(UniformCapacity { b0, b1, b2 })
    }

    /// `T(0⌢Q0 ∪ 1⌢Q1)` from `q0 = T(Q0)` and `q1 = T(Q1)`.
    pub fn combine(&self, q0: &Rational, q1: &Rational) -> Rational {
        let one = Rational::one();
        (&one - &self.b1) * q0 + (&one - &self.b0) * q1 - &self.b2 * q0 * q1
    }

    pub fn eval(&self, q: &ClopenSet) -> Rational {
        if q.is_empty() {
            return Rational::zero();
        }
        if q.is_full() {
            return Rational::one();
        }
        let (q0, q1) = q.split();
        self.combine(&self.eval(&q0), &self.eval(&q1))
    }
}

impl CapacityOracle for UniformCapacity {
    fn capacity(&self, q: &ClopenSet) -> Result<Rational> {
        Ok(self.eval(q))
    }
}

pub fn capacity_clopen(spec: &MeasureSpec, q: &ClopenSet) -> Result<Rational> {
    Ok(UniformCapacity::new(spec)?.eval(q))
}

/// The exact distribution of a random closed set's tree up to one height.
#[derive(Clone, Debug)]
pub struct TreeDistribution {
    height: usize,
    entries: Vec<(PrunedTree, Rational)>,
}

impl TreeDistribution {
    pub fn new(spec: &MeasureSpec, height: usize, max_depth: usize) -> Result<Self> {
        let entries = enumerate_trees(height, max_depth)?
            .map(|t| {
                let mass = spec.mu_star_tree(&t)?;
                Ok((t, mass))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(TreeDistribution { height, entries })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn entries(&self) -> &[(PrunedTree, Rational)] {
        &self.entries
    }

    /// Total mass of trees whose top level meets `q`.
    pub fn hitting_mass(&self, q: &ClopenSet) -> Result<Rational> {
        if q.max_leaf_len() > self.height {
            return Err(Error::DepthExceeded {
                requested: q.max_leaf_len(),
                height: self.height,
            });
        }
        Ok(self
            .entries
            .iter()
            .filter(|(t, _)| t.level(self.height).iter().any(|s| q.covers(s)))
            .map(|(_, m)| m)
            .sum())
    }
}

pub fn capacity_bruteforce(
    spec: &MeasureSpec,
    q: &ClopenSet,
    depth: usize,
    max_depth: usize,
) -> Result<Rational> {
    if depth > max_depth {
        return Err(Error::BoundExceeded {
            requested: depth,
            bound: max_depth,
        });
    }
    if q.max_leaf_len() > depth {
        return Err(Error::DepthExceeded {
            requested: q.max_leaf_len(),
            height: depth,
        });
    }
    TreeDistribution::new(spec, depth, max_depth)?.hitting_mass(q)
}

/// Brute-force oracle for any spec; caches one distribution per height.
#[derive(Debug)]
pub struct BruteForceCapacity {
    spec: MeasureSpec,
    max_depth: usize,
    cache: RefCell<HashMap<usize, TreeDistribution>>,
}

impl BruteForceCapacity {
    pub fn new(spec: MeasureSpec, max_depth: usize) -> Self {
        BruteForceCapacity {
            spec,
            max_depth,
            cache: RefCell::new(HashMap::new()),
        }
    }
}

impl CapacityOracle for BruteForceCapacity {
    fn capacity(&self, q: &ClopenSet) -> Result<Rational> {
        let height = q.max_leaf_len();
        if !self.cache.borrow().contains_key(&height) {
            let dist = TreeDistribution::new(&self.spec, height, self.max_depth)?;
            self.cache.borrow_mut().insert(height, dist);
        }
        self.cache.borrow()[&height].hitting_mass(q)
    }
}

/// Splitting recursion for uniform specs, brute force otherwise.
pub fn oracle_for(spec: &MeasureSpec, max_depth: usize) -> Result<Box<dyn CapacityOracle>> {
    spec.ensure_valid()?;
    if spec.is_uniform() {
        Ok(Box::new(UniformCapacity::new(spec)?))
    } else {
        Ok(Box::new(BruteForceCapacity::new(spec.clone(), max_depth)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlternatingReport {
    /// `T(Q1 ∩ … ∩ Qn)`.
    #[serde(with = "serde_text")]
    pub lhs: Rational,
    /// `Σ_{∅≠I} (−1)^{|I|+1} T(⋃_{i∈I} Qi)`.
    #[serde(with = "serde_text")]
    pub rhs: Rational,
    pub holds: bool,
}

/// Checks one instance of the alternating-of-infinite-order inequality.
pub fn check_alternating(
    cap: &dyn CapacityOracle,
    sets: &[ClopenSet],
) -> Result<AlternatingReport> {
    let n = sets.len();
    if !(2..=4).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "alternating check takes 2 to 4 sets, got {n}"
        )));
    }
    let meet = sets[1..]
        .iter()
        .fold(sets[0].clone(), |acc, s| acc.intersection(s));
    let lhs = cap.capacity(&meet)?;
    let mut rhs = Rational::zero();
    for mask in 1u32..(1 << n) {
        let union = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .fold(ClopenSet::empty(), |acc, i| acc.union(&sets[i]));
        let value = cap.capacity(&union)?;
        if mask.count_ones() % 2 == 1 {
            rhs += value;
        } else {
            rhs -= value;
        }
    }
    let holds = lhs <= rhs;
    Ok(AlternatingReport { lhs, rhs, holds })
}

/// Every clopen set whose leaves have length at most `depth`, as subsets of
/// `{0,1}^depth`. There are `2^(2^depth)` of them.
pub fn all_clopen_sets(depth: usize) -> Result<Vec<ClopenSet>> {
    if depth > 4 {
        return Err(Error::BoundExceeded {
            requested: depth,
            bound: 4,
        });
    }
    let strings = BitString::empty().extensions(depth);
    let count = 1u64 << strings.len();
    Ok((0..count)
        .map(|mask| {
            let chosen = strings
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, s)| s.clone());
            ClopenSet::from_strings(depth, chosen)
        })
        .collect())
}
