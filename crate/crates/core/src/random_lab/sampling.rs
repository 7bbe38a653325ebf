//! Seeded sampling of random closed sets and Monte Carlo estimates checked
//! against exact values.
//!
//! Trial `i` of a run with master seed `s` draws from the ChaCha8 stream
//! `(s, i)`, so a run split into trial ranges gives the same hit counts as
//! one sequential pass.

use std::ops::Range;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::recursion::pn_exact;
use crate::cantor::{BitString, ClopenSet, CodeWalker, PrunedTree, TernaryCode};
use crate::capacity::oracle_for;
use crate::error::{Error, Result};
use crate::measure::MeasureSpec;
use crate::rational::{self, serde_text, Rational};

/// Deepest tree the samplers will grow; level bitsets have `2^depth` bits.
pub const MAX_SAMPLE_DEPTH: usize = 20;

/// Cut points `floor(b0·2^64)` and `floor((b0+b1)·2^64)` for one digit.
#[derive(Clone, Copy, Debug)]
struct Cuts(u128, u128);

impl Cuts {
    fn new(w: &[Rational; 3]) -> Cuts {
        let scale = |x: &Rational| -> u128 {
            let scaled: BigInt = (x.numer() << 64u32) / x.denom();
            scaled.to_u128().unwrap_or(0)
        };
        Cuts(scale(&w[0]), scale(&(&w[0] + &w[1])))
    }

    fn draw(self, rng: &mut ChaCha8Rng) -> u8 {
        let x = rng.next_u64() as u128;
        if x < self.0 {
            0
        } else if x < self.1 {
            1
        } else {
            2
        }
    }
}

fn check_depth(depth: usize) -> Result<()> {
    if depth > MAX_SAMPLE_DEPTH {
        return Err(Error::BoundExceeded {
            requested: depth,
            bound: MAX_SAMPLE_DEPTH,
        });
    }
    Ok(())
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Grows a tree breadth first, one digit per internal node.
fn grow_tree(spec: &MeasureSpec, depth: usize, rng: &mut ChaCha8Rng) -> Result<PrunedTree> {
    let uniform = spec.weights().map(|w| Cuts::new(&w));
    let mut walker = CodeWalker::new(depth);
    let mut code = TernaryCode::empty();
    while !walker.is_complete() {
        let cuts = match uniform {
            Some(c) => c,
            None => Cuts::new(&spec.next_digit_weights(&code)?),
        };
        let digit = cuts.draw(rng);
        walker.push(digit)?;
        if uniform.is_none() {
            code = code.child(digit);
        }
    }
    walker.finish()
}

/// Top level of a tree as a bitset over `{0,1}^depth` in lex order. Draws
/// digits in the same order as [`grow_tree`].
fn grow_level(
    spec: &MeasureSpec,
    cuts: Option<Cuts>,
    depth: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<u64>> {
    let Some(cuts) = cuts else {
        let tree = grow_tree(spec, depth, rng)?;
        let mut level = vec![0u64; words(depth)];
        for s in tree.level(depth) {
            set_bit(&mut level, index_of(&s));
        }
        return Ok(level);
    };
    let mut level = vec![1u64];
    for k in 0..depth {
        let mut next = vec![0u64; words(k + 1)];
        for (w, &word) in level.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let i = w * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                match cuts.draw(rng) {
                    0 => set_bit(&mut next, 2 * i),
                    1 => set_bit(&mut next, 2 * i + 1),
                    _ => {
                        set_bit(&mut next, 2 * i);
                        set_bit(&mut next, 2 * i + 1);
                    }
                }
            }
        }
        level = next;
    }
    Ok(level)
}

fn words(depth: usize) -> usize {
    (1usize << depth).div_ceil(64)
}

fn set_bit(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

fn index_of(s: &BitString) -> usize {
    s.bits().iter().fold(0, |acc, &b| 2 * acc + b as usize)
}

fn meets(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).any(|(x, y)| x & y != 0)
}

/// A random tree of the given height, deterministic in `(spec, depth, seed)`.
pub fn sample_tree(spec: &MeasureSpec, depth: usize, seed: u64) -> Result<PrunedTree> {
    spec.ensure_valid()?;
    check_depth(depth)?;
    grow_tree(spec, depth, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub trials: u64,
    pub hits: u64,
    #[serde(with = "serde_text")]
    pub frequency: Rational,
    pub frequency_approx: f64,
    #[serde(with = "serde_text")]
    pub exact: Rational,
    pub exact_approx: f64,
    /// `sqrt(p(1−p)/N)` for the exact `p`.
    pub sigma: f64,
    /// Absent when the exact value is 0 or 1.
    pub z_score: Option<f64>,
    pub within_three_sigma: bool,
}

impl EstimateRecord {
    pub fn new(trials: u64, hits: u64, exact: Rational) -> Self {
        let frequency = Rational::new(BigInt::from(hits), BigInt::from(trials));
        let p = rational::approx(&exact);
        let f = rational::approx(&frequency);
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        let z_score = (sigma > 0.0).then(|| (f - p) / sigma);
        let within_three_sigma = if sigma > 0.0 {
            (f - p).abs() <= 3.0 * sigma
        } else {
            frequency == exact
        };
        EstimateRecord {
            trials,
            hits,
            frequency_approx: f,
            frequency,
            exact_approx: p,
            exact,
            sigma,
            z_score,
            within_three_sigma,
        }
    }
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    Ok(())
}

/// Number of trials in `range` whose two sampled trees meet at `depth`.
pub fn count_intersections(
    spec: &MeasureSpec,
    depth: usize,
    seed: u64,
    range: Range<u64>,
) -> Result<u64> {
    spec.ensure_valid()?;
    check_depth(depth)?;
    let cuts = spec.weights().map(|w| Cuts::new(&w));
    let mut hits = 0;
    for trial in range {
        let mut rng = trial_rng(seed, trial);
        let q = grow_level(spec, cuts, depth, &mut rng)?;
        let k = grow_level(spec, cuts, depth, &mut rng)?;
        hits += meets(&q, &k) as u64;
    }
    Ok(hits)
}

/// Frequency of intersecting independent pairs at `depth`, against `p_depth`.
pub fn mc_intersection(
    spec: &MeasureSpec,
    depth: usize,
    trials: u64,
    seed: u64,
) -> Result<EstimateRecord> {
    check_trials(trials)?;
    let [b0, b1, _] = spec.weights().ok_or(Error::NonUniformSpec)?;
    let exact = pn_exact(&b0, &b1, depth)?.last().clone();
    let hits = count_intersections(spec, depth, seed, 0..trials)?;
    Ok(EstimateRecord::new(trials, hits, exact))
}

/// Number of trials in `range` whose sampled tree meets `q`.
pub fn count_hits(spec: &MeasureSpec, q: &ClopenSet, seed: u64, range: Range<u64>) -> Result<u64> {
    spec.ensure_valid()?;
    let depth = q.max_leaf_len();
    check_depth(depth)?;
    let mut target = vec![0u64; words(depth)];
    for s in q.refine(depth) {
        set_bit(&mut target, index_of(&s));
    }
    let cuts = spec.weights().map(|w| Cuts::new(&w));
    let mut hits = 0;
    for trial in range {
        let k = grow_level(spec, cuts, depth, &mut trial_rng(seed, trial))?;
        hits += meets(&k, &target) as u64;
    }
    Ok(hits)
}

/// Hit frequency of `q` against its exact capacity. Table specs use the
/// brute-force oracle up to `max_depth`.
pub fn mc_capacity(
    spec: &MeasureSpec,
    q: &ClopenSet,
    trials: u64,
    seed: u64,
    max_depth: usize,
) -> Result<EstimateRecord> {
    check_trials(trials)?;
    let exact = oracle_for(spec, max_depth)?.capacity(q)?;
    let hits = if q.is_empty() {
        0
    } else {
        count_hits(spec, q, seed, 0..trials)?
    };
    Ok(EstimateRecord::new(trials, hits, exact))
}
