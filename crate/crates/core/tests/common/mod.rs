//! Reference computations written without the library's tree coding, for
//! cross-checking exact values.
#![allow(dead_code)]

use caplab::cantor::{BitString, ClopenSet};
use caplab::rational::ratio;
use caplab::Rational;
use num_traits::{One, Zero};
use proptest::prelude::*;

pub fn r(n: i64, d: i64) -> Rational {
    ratio(n, d)
}

/// Law of the top level of a random tree of height `h` under uniform
/// weights, indexed by bitmask: bit `i` stands for the string whose binary
/// value is `i`.
pub fn level_distribution(b0: &Rational, b1: &Rational, h: usize) -> Vec<Rational> {
    let b2 = Rational::one() - b0 - b1;
    let mut dist = vec![Rational::zero(); 2];
    dist[1] = Rational::one();
    for k in 0..h {
        let mut next = vec![Rational::zero(); 1 << (1 << (k + 1))];
        for (mask, p) in dist.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let nodes: Vec<usize> = (0..1 << k).filter(|i| mask >> i & 1 == 1).collect();
            // Each node independently keeps its left child, right child or both.
            let mut partial = vec![(0usize, p.clone())];
            for &i in &nodes {
                let mut grown = Vec::with_capacity(partial.len() * 3);
                for (m, q) in &partial {
                    grown.push((m | 1 << (2 * i), q * b0));
                    grown.push((m | 1 << (2 * i + 1), q * b1));
                    grown.push((m | 1 << (2 * i) | 1 << (2 * i + 1), q * &b2));
                }
                partial = grown;
            }
            for (m, q) in partial {
                next[m] += q;
            }
        }
        dist = next;
    }
    dist
}

/// Bitmask of the length-`h` strings inside `q`, read from leaf text.
pub fn mask_of(q: &ClopenSet, h: usize) -> usize {
    let leaves: Vec<String> = q.leaves().iter().map(|l| l.to_string()).collect();
    (0..1usize << h)
        .filter(|i| {
            let s: String = (0..h)
                .rev()
                .map(|b| if i >> b & 1 == 1 { '1' } else { '0' })
                .collect();
            leaves.iter().any(|l| s.starts_with(l.as_str()))
        })
        .fold(0, |m, i| m | 1 << i)
}

pub fn capacity(b0: &Rational, b1: &Rational, q: &ClopenSet, h: usize) -> Rational {
    let target = mask_of(q, h);
    level_distribution(b0, b1, h)
        .iter()
        .enumerate()
        .filter(|(m, _)| m & target != 0)
        .map(|(_, p)| p)
        .sum()
}

/// `P(A ∩ B ≠ ∅)` for independent top levels, as `1 − Σ_a P(a)·P(B ⊆ ¬a)`.
pub fn pair_sum(b0: &Rational, b1: &Rational, h: usize) -> Rational {
    let dist = level_distribution(b0, b1, h);
    let bits = 1usize << h;
    let full = (1usize << bits) - 1;
    // Subset sums: below[s] = Σ_{b ⊆ s} P(b).
    let mut below = dist.clone();
    for i in 0..bits {
        for s in 0..below.len() {
            if s >> i & 1 == 1 {
                let lower = below[s ^ 1 << i].clone();
                below[s] += lower;
            }
        }
    }
    let miss: Rational = dist
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.is_zero())
        .map(|(a, p)| p * &below[full ^ a])
        .sum();
    Rational::one() - miss
}

/// `(b0, b1)` with `b1 ≤ b0` over a small denominator grid.
pub fn weights() -> impl Strategy<Value = (Rational, Rational)> {
    (2i64..=12)
        .prop_flat_map(|d| (Just(d), 1..d, 1..d))
        .prop_filter("need b0 + b1 < 1", |(d, a, b)| a + b < *d)
        .prop_map(|(d, a, b)| {
            let (x, y) = (r(a.max(b), d), r(a.min(b), d));
            (x, y)
        })
}

/// A subset of `{0,1}^d`, `d ≤ max_depth`, as a canonical clopen set.
pub fn clopen(max_depth: usize) -> impl Strategy<Value = ClopenSet> {
    (0..=max_depth).prop_flat_map(|d| {
        proptest::collection::vec(any::<bool>(), 1 << d).prop_map(move |bits| {
            let strings = BitString::empty().extensions(d);
            ClopenSet::from_strings(
                d,
                strings
                    .into_iter()
                    .zip(bits)
                    .filter(|(_, b)| *b)
                    .map(|(s, _)| s),
            )
        })
    })
}
