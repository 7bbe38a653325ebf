use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{all_clopen_sets, CapacityOracle};
use crate::cantor::ClopenSet;
use crate::error::{Error, Result};
use crate::rational::{self, serde_text, Rational};

/// Capacity values for a finite family of clopen sets.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CapacityTable {
    values: BTreeMap<ClopenSet, Rational>,
}

/// One row of the JSON form.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CapacityEntry {
    pub clopen: ClopenSet,
    #[serde(with = "serde_text")]
    pub value: Rational,
    #[serde(default)]
    pub approx: f64,
}

impl CapacityTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, q: ClopenSet, value: Rational) {
        self.values.insert(q, value);
    }

    pub fn get(&self, q: &ClopenSet) -> Option<&Rational> {
        self.values.get(q)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.values
            .keys()
            .map(ClopenSet::max_leaf_len)
            .max()
            .unwrap_or(0)
    }

    /// Tabulates `cap` on every clopen set of depth at most `depth`.
    pub fn from_oracle(cap: &dyn CapacityOracle, depth: usize) -> Result<Self> {
        let mut table = CapacityTable::new();
        for q in all_clopen_sets(depth)? {
            let v = cap.capacity(&q)?;
            table.insert(q, v);
        }
        Ok(table)
    }

    /// Range, normalization and pairwise monotonicity. Quadratic in the
    /// table size.
    pub fn check_invariants(&self) -> Vec<String> {
        let mut failures = Vec::new();
        if let Some(v) = self.get(&ClopenSet::empty()) {
            if !v.is_zero() {
                failures.push(format!("T(empty) = {v}"));
            }
        }
        if let Some(v) = self.get(&ClopenSet::full()) {
            if !v.is_one() {
                failures.push(format!("T(full) = {v}"));
            }
        }
        for (q, v) in &self.values {
            if *v < Rational::zero() || *v > Rational::one() {
                failures.push(format!("value {v} outside [0,1]"));
            }
            for (r, w) in &self.values {
                if w > v && r != q && r.is_subset(q) {
                    failures.push(format!("not monotone: T({r:?}) = {w} > T({q:?}) = {v}"));
                }
            }
        }
        failures
    }
}

impl CapacityOracle for CapacityTable {
    fn capacity(&self, q: &ClopenSet) -> Result<Rational> {
        self.get(q).cloned().ok_or_else(|| {
            Error::InvalidArgument(format!(
                "capacity table has no entry for {}",
                serde_json::to_string(q).unwrap_or_default()
            ))
        })
    }
}

impl Serialize for CapacityTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<CapacityEntry> = self
            .values
            .iter()
            .map(|(q, v)| CapacityEntry {
                clopen: q.clone(),
                value: v.clone(),
                approx: rational::approx(v),
            })
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CapacityTable {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<CapacityEntry>::deserialize(d)?;
        let mut table = CapacityTable::new();
        for row in rows {
            table.insert(row.clopen, row.value);
        }
        Ok(table)
    }
}
