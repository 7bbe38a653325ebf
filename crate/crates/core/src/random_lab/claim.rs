//! Exhaustive pair sums over trees of small height: the exact intersection
//! probability and the Markov-type bound on sets that are hit often.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::cantor::enumerate_trees;
use crate::error::{Error, Result};
use crate::measure::MeasureSpec;
use crate::rational::{self, dyadic, int, pow, serde_text, Rational};

/// Height bound for pair sums; the number of distinct top levels is
/// `2^(2^m) − 1`, so `m = 4` already means billions of pairs.
pub const PAIR_SUM_MAX_DEPTH: usize = 3;

/// μ* mass of each possible top level of a height-`m` tree, keyed by the
/// level as a bitmask over `{0,1}^m`.
fn level_masses(spec: &MeasureSpec, m: usize) -> Result<BTreeMap<u32, Rational>> {
    if m > PAIR_SUM_MAX_DEPTH {
        return Err(Error::BoundExceeded {
            requested: m,
            bound: PAIR_SUM_MAX_DEPTH,
        });
    }
    spec.ensure_valid()?;
    let mut out: BTreeMap<u32, Rational> = BTreeMap::new();
    for tree in enumerate_trees(m, PAIR_SUM_MAX_DEPTH)? {
        let mask = tree
            .level(m)
            .iter()
            .map(|s| s.bits().iter().fold(0u32, |acc, &b| 2 * acc + b as u32))
            .fold(0u32, |acc, i| acc | 1 << i);
        *out.entry(mask).or_insert_with(Rational::zero) += spec.mu_star_tree(&tree)?;
    }
    Ok(out)
}

/// Probability that a height-`m` pattern with top level `mask` is met by an
/// independent random one.
fn hit_mass(masses: &BTreeMap<u32, Rational>, mask: u32) -> Rational {
    masses
        .iter()
        .filter(|(k, _)| *k & mask != 0)
        .map(|(_, v)| v)
        .sum()
}

/// `Σ μ*(Q)·μ*(K)` over pairs of height-`m` trees whose top levels meet.
pub fn pair_intersection_probability(spec: &MeasureSpec, m: usize) -> Result<Rational> {
    let masses = level_masses(spec, m)?;
    Ok(masses.iter().map(|(&q, w)| w * hit_mass(&masses, q)).sum())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Claim1Report {
    pub m: usize,
    pub n: usize,
    /// μ* mass of patterns met with probability at least `2^(−n)`.
    #[serde(with = "serde_text")]
    pub lhs: Rational,
    pub lhs_approx: f64,
    /// `2^n · p_m`.
    #[serde(with = "serde_text")]
    pub rhs: Rational,
    pub rhs_approx: f64,
    pub holds: bool,
}

pub fn claim1_check(spec: &MeasureSpec, m: usize, n: usize) -> Result<Claim1Report> {
    let masses = level_masses(spec, m)?;
    let threshold = dyadic(n);
    let mut lhs = Rational::zero();
    let mut pm = Rational::zero();
    for (&q, w) in &masses {
        let h = hit_mass(&masses, q);
        pm += w * &h;
        if h >= threshold {
            lhs += w;
        }
    }
    let rhs = pow(&int(2), n) * pm;
    Ok(Claim1Report {
        m,
        n,
        lhs_approx: rational::approx(&lhs),
        rhs_approx: rational::approx(&rhs),
        holds: lhs <= rhs,
        lhs,
        rhs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random_lab::pn_exact;
    use crate::rational::ratio;

    /// Direct double loop over tree pairs, no aggregation.
    fn naive_pair_sum(spec: &MeasureSpec, m: usize) -> Rational {
        let trees: Vec<_> = enumerate_trees(m, 4)
            .unwrap()
            .map(|t| {
                let w = spec.mu_star_tree(&t).unwrap();
                (t.truncate(m).unwrap(), w)
            })
            .collect();
        let mut total = Rational::zero();
        for (q, wq) in &trees {
            for (k, wk) in &trees {
                if !q.is_disjoint(k) {
                    total += wq * wk;
                }
            }
        }
        total
    }

    #[test]
    fn pair_sum_matches_naive_and_recursion() {
        let spec = MeasureSpec::uniform(ratio(2, 5), ratio(1, 5));
        for m in 0..=2 {
            let fast = pair_intersection_probability(&spec, m).unwrap();
            assert_eq!(fast, naive_pair_sum(&spec, m));
            assert_eq!(
                fast,
                pn_exact(&ratio(2, 5), &ratio(1, 5), m).unwrap().values[m]
            );
        }
    }

    #[test]
    fn claim1_examples() {
        let spec = MeasureSpec::symmetric(ratio(1, 3));
        let r = claim1_check(&spec, 2, 1).unwrap();
        assert!(r.holds);
        assert_eq!(r.rhs, int(2) * ratio(455, 729));
        // Every pattern is hit with probability at least 2^-10.
        let r = claim1_check(&spec, 2, 10).unwrap();
        assert_eq!(r.lhs, int(1));
        assert!(r.holds);
        assert!(claim1_check(&spec, 3, 3).unwrap().holds);
        assert!(matches!(
            claim1_check(&spec, 4, 1),
            Err(Error::BoundExceeded { .. })
        ));
    }
}
