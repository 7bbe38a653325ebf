use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::cantor::ClopenSet;
use crate::error::{Error, Result};
use crate::measure::MeasureSpec;
use crate::rational::{self, dyadic, int, pow, serde_text, serde_text_vec, Rational};

/// `X_σ = {x : x(n_i) = 0 for every i}` for strictly increasing indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct SparseConstraint {
    indices: Vec<usize>,
}

impl SparseConstraint {
    pub fn new(indices: Vec<usize>) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "indices {indices:?} are not strictly increasing"
            )));
        }
        Ok(SparseConstraint { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn with(&self, index: usize) -> Result<Self> {
        let mut indices = self.indices.clone();
        indices.push(index);
        SparseConstraint::new(indices)
    }

    /// `2^(−k)` for `k` constraints.
    pub fn lebesgue(&self) -> Rational {
        dyadic(self.indices.len())
    }

    pub fn to_clopen(&self) -> ClopenSet {
        fn go(pos: usize, rest: &[usize]) -> ClopenSet {
            match rest.split_first() {
                None => ClopenSet::full(),
                Some((&first, tail)) if first == pos => {
                    ClopenSet::join(&go(pos + 1, tail), &ClopenSet::empty())
                }
                Some(_) => {
                    let q = go(pos + 1, rest);
                    ClopenSet::join(&q, &q)
                }
            }
        }
        let depth = self.indices.last().map_or(0, |&n| n + 1);
        go(0, &self.indices).with_depth(depth)
    }
}

impl TryFrom<Vec<usize>> for SparseConstraint {
    type Error = Error;

    fn try_from(indices: Vec<usize>) -> Result<Self> {
        SparseConstraint::new(indices)
    }
}

impl From<SparseConstraint> for Vec<usize> {
    fn from(c: SparseConstraint) -> Self {
        c.indices
    }
}

fn check_b(b: &Rational) -> Result<()> {
    MeasureSpec::symmetric(b.clone())
        .ensure_valid()
        .map_err(|e| Error::DegenerateWeights(e.to_string()))
}

/// `f(p) = (2−2b)p − (1−2b)p²`: capacity of `0⌢X ∪ 1⌢X` from that of `X`.
pub fn sparse_step(b: &Rational, p: &Rational) -> Rational {
    let two = int(2);
    (&two - &two * b) * p - (Rational::one() - &two * b) * p * p
}

/// Exact `T(X_σ)` under `b0 = b1 = b`.
pub fn capacity_sparse(b: &Rational, sigma: &SparseConstraint) -> Result<Rational> {
    check_b(b)?;
    // Walk the constraints from the last one back to position 0.
    let mut value = Rational::one();
    let mut pos = sigma.indices.last().map_or(0, |&n| n + 1);
    for &n in sigma.indices.iter().rev() {
        for _ in n + 1..pos {
            value = sparse_step(b, &value);
        }
        value *= Rational::one() - b;
        pos = n;
    }
    for _ in 0..pos {
        value = sparse_step(b, &value);
    }
    Ok(value)
}

/// `c_k = (2^(k+1) + 1) / 2^(k+2)`.
pub fn stage_threshold(k: usize) -> Rational {
    (pow(&int(2), k + 1) + Rational::one()) / pow(&int(2), k + 2)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseResult {
    #[serde(with = "serde_text")]
    pub b: Rational,
    pub indices: Vec<usize>,
    #[serde(with = "serde_text_vec")]
    pub capacities: Vec<Rational>,
    pub capacities_approx: Vec<f64>,
    #[serde(with = "serde_text_vec")]
    pub thresholds: Vec<Rational>,
    #[serde(with = "serde_text")]
    pub lebesgue: Rational,
}

/// Greedy `n_0 < … < n_K`: each `n_k` is the least index keeping
/// `T(X_(n_0,…,n_k)) ≥ c_k`, searched up to `cutoff`.
pub fn build_measure_zero_positive_capacity(
    b: &Rational,
    k_max: usize,
    cutoff: usize,
) -> Result<SparseResult> {
    check_b(b)?;
    let mut sigma = SparseConstraint::new(Vec::new())?;
    let mut capacities = Vec::new();
    let mut thresholds = Vec::new();
    for k in 0..=k_max {
        let c = stage_threshold(k);
        let start = sigma.indices.last().map_or(0, |&n| n + 1);
        let mut found = None;
        for n in start..=cutoff {
            let candidate = sigma.with(n)?;
            let t = capacity_sparse(b, &candidate)?;
            if t >= c {
                found = Some((candidate, t));
                break;
            }
        }
        let (next, t) = found.ok_or(Error::CutoffExceeded(cutoff))?;
        sigma = next;
        capacities.push(t);
        thresholds.push(c);
    }
    Ok(SparseResult {
        b: b.clone(),
        lebesgue: sigma.lebesgue(),
        indices: sigma.indices,
        capacities_approx: capacities.iter().map(rational::approx).collect(),
        capacities,
        thresholds,
    })
}
