use std::collections::HashMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cantor::{BitString, ClopenSet};
use crate::capacity::UniformCapacity;
use crate::error::{Error, Result};
use crate::measure::MeasureSpec;
use crate::rational::{self, pow, serde_text, serde_text_vec, Rational};

pub const DEFAULT_LEAF_BUDGET: usize = 1 << 16;

/// Dropping one interval from a set during a stage.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Removal {
    pub leaf: BitString,
    /// `T(before) − T(after)`.
    #[serde(with = "serde_text")]
    pub drop: Rational,
    /// `(1 − min(b0,b1))^|leaf|`.
    #[serde(with = "serde_text")]
    pub bound: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UscStage {
    pub s: usize,
    pub clopen: ClopenSet,
    #[serde(with = "serde_text")]
    pub capacity: Rational,
    pub approx: f64,
    /// The target difference was zero and the previous set was kept.
    #[serde(default)]
    pub passed_through: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub removals: Vec<Removal>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UscTrace {
    #[serde(with = "serde_text")]
    pub b0: Rational,
    #[serde(with = "serde_text")]
    pub b1: Rational,
    #[serde(with = "serde_text_vec")]
    pub targets: Vec<Rational>,
    pub stages: Vec<UscStage>,
}

impl UscTrace {
    /// Every violated trace property, empty when the trace is sound.
    ///
    /// Stage `n ≥ 1` must satisfy `q_n ≤ T(Q_n) ≤ q_(n−1)`, `Q_n ⊆ Q_(n−1)`
    /// and `(1−b)^s < q_(n−1) − q_n`, and every removal must respect its
    /// bound. A pass-through stage only has to keep the previous set.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let r = Rational::one() - (&self.b0).min(&self.b1);
        let cap =
            match UniformCapacity::new(&MeasureSpec::uniform(self.b0.clone(), self.b1.clone())) {
                Ok(c) => c,
                Err(e) => return vec![e.to_string()],
            };
        for (n, st) in self.stages.iter().enumerate() {
            if cap.eval(&st.clopen) != st.capacity {
                out.push(format!(
                    "stage {n}: recorded capacity differs from recomputed value"
                ));
            }
            if n == 0 {
                if !st.clopen.is_full() {
                    out.push("stage 0 is not the full space".into());
                }
                continue;
            }
            let prev = &self.stages[n - 1];
            let (hi, lo) = (&self.targets[n - 1], &self.targets[n]);
            if !st.clopen.is_subset(&prev.clopen) {
                out.push(format!("stage {n}: not nested in stage {}", n - 1));
            }
            if st.passed_through {
                if st.clopen != prev.clopen || hi != lo {
                    out.push(format!("stage {n}: bad pass-through"));
                }
                continue;
            }
            if !(lo <= &st.capacity && &st.capacity <= hi) {
                out.push(format!(
                    "stage {n}: capacity {} outside [{lo}, {hi}]",
                    st.capacity
                ));
            }
            if pow(&r, st.s) >= hi - lo {
                out.push(format!("stage {n}: refinement depth {} too shallow", st.s));
            }
            for rm in &st.removals {
                if rm.drop > rm.bound || rm.drop.is_negative() {
                    out.push(format!(
                        "stage {n}: removing {} drops {} > {}",
                        rm.leaf, rm.drop, rm.bound
                    ));
                }
            }
        }
        out
    }
}

/// Capacities of a growing union of depth-`s` intervals, updated one
/// interval at a time along its path to the root.
struct Incremental<'a> {
    cap: &'a UniformCapacity,
    values: HashMap<BitString, Rational>,
}

impl<'a> Incremental<'a> {
    fn new(cap: &'a UniformCapacity) -> Self {
        Incremental {
            cap,
            values: HashMap::new(),
        }
    }

    fn value(&self, node: &BitString) -> Rational {
        self.values
            .get(node)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Adds `I(leaf)` and returns the capacity of the union so far.
    fn add(&mut self, leaf: &BitString) -> Rational {
        self.values.insert(leaf.clone(), Rational::one());
        let mut node = leaf.clone();
        while let Some(parent) = node.parent() {
            let v = self.cap.combine(
                &self.value(&parent.child(false)),
                &self.value(&parent.child(true)),
            );
            self.values.insert(parent.clone(), v);
            node = parent;
        }
        self.value(&BitString::empty())
    }
}

fn check_targets(targets: &[Rational]) -> Result<()> {
    let bad = |msg: String| Err(Error::NonMonotoneTargets(msg));
    match targets.first() {
        None => return bad("target list is empty".into()),
        Some(q) if !q.is_one() => return bad(format!("first target is {q}, expected 1")),
        _ => {}
    }
    for (n, w) in targets.windows(2).enumerate() {
        if w[1] > w[0] {
            return bad(format!("q_{} = {} exceeds q_{} = {}", n + 1, w[1], n, w[0]));
        }
        if w[1].is_negative() {
            return bad(format!("q_{} = {} is negative", n + 1, w[1]));
        }
    }
    Ok(())
}

/// Nested clopen sets whose capacities track a nonincreasing target list.
///
/// Stage `n` refines `Q_(n−1)` into depth-`s` intervals, with `s` the least
/// depth at or below the current leaves such that `(1−b)^s < q_(n−1) − q_n`
/// and `b = min(b0, b1)`. It keeps the shortest lexicographic prefix of
/// those intervals whose capacity exceeds `q_n`.
pub fn build_usc_capacity(
    b0: &Rational,
    b1: &Rational,
    targets: &[Rational],
    leaf_budget: usize,
) -> Result<UscTrace> {
    let spec = MeasureSpec::uniform(b0.clone(), b1.clone());
    spec.ensure_valid()
        .map_err(|e| Error::DegenerateWeights(e.to_string()))?;
    check_targets(targets)?;
    let cap = UniformCapacity::new(&spec)?;
    let r = Rational::one() - b0.min(b1);

    let full = ClopenSet::full();
    let mut stages = vec![UscStage {
        s: 0,
        approx: 1.0,
        capacity: Rational::one(),
        clopen: full,
        passed_through: false,
        removals: Vec::new(),
    }];
    for n in 1..targets.len() {
        let prev = stages.last().expect("stage 0").clone();
        let delta = &targets[n - 1] - &targets[n];
        if delta.is_zero() {
            stages.push(UscStage {
                passed_through: true,
                removals: Vec::new(),
                ..prev
            });
            continue;
        }

        let mut s = prev.clopen.max_leaf_len();
        let mut bound = pow(&r, s);
        while bound >= delta {
            s += 1;
            bound *= &r;
        }
        let needed: u128 = prev
            .clopen
            .leaves()
            .iter()
            .map(|l| 1u128.checked_shl((s - l.len()) as u32).unwrap_or(u128::MAX))
            .fold(0u128, |a, b| a.saturating_add(b));
        if needed > leaf_budget as u128 {
            return Err(Error::LeafBudgetExceeded {
                needed: usize::try_from(needed).unwrap_or(usize::MAX),
                budget: leaf_budget,
            });
        }

        let leaves = prev.clopen.refine(s);
        let mut inc = Incremental::new(&cap);
        // prefix[k] = T(first k leaves).
        let mut prefix = vec![Rational::zero()];
        for leaf in &leaves {
            let v = inc.add(leaf);
            prefix.push(v);
        }
        let k = prefix
            .iter()
            .rposition(|v| *v <= targets[n])
            .expect("T(empty) = 0");
        let keep = (k + 1).min(leaves.len());

        let removals = (keep..leaves.len())
            .rev()
            .map(|j| Removal {
                leaf: leaves[j].clone(),
                drop: &prefix[j + 1] - &prefix[j],
                bound: bound.clone(),
            })
            .collect();
        let clopen = ClopenSet::from_strings(s, leaves[..keep].iter().cloned());
        let capacity = prefix[keep].clone();
        stages.push(UscStage {
            s,
            approx: rational::approx(&capacity),
            capacity,
            clopen,
            passed_through: false,
            removals,
        });
    }
    Ok(UscTrace {
        b0: b0.clone(),
        b1: b1.clone(),
        targets: targets.to_vec(),
        stages,
    })
}
