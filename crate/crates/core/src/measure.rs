//! Measures on `{0,1,2}^ℕ` given by branching weights, the induced measure on
//! closed sets, and fair-coin measure of clopen sets.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cantor::{BitString, ClopenSet, CodeWalker, PrunedTree, TernaryCode};
use crate::error::{Error, Result};
use crate::rational::{self, serde_text, serde_text_map, Rational};

/// Strict bounds `b·d(σ) < d(σ⌢i) < c·d(σ)` asserted for every listed node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    #[serde(with = "serde_text")]
    pub b: Rational,
    #[serde(with = "serde_text")]
    pub c: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MeasureSpec {
    /// `d(σ⌢i) = b_i · d(σ)` everywhere, with `b2 = 1 − b0 − b1`.
    Uniform {
        #[serde(with = "serde_text")]
        b0: Rational,
        #[serde(with = "serde_text")]
        b1: Rational,
    },
    /// Explicit values of `d` on finitely many codes.
    Table {
        #[serde(with = "serde_text_map")]
        entries: BTreeMap<TernaryCode, Rational>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        certificate: Option<Certificate>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    /// Valid and additionally `b1 ≤ b0`, the convention the
    /// effectively-closed constructions assume. Tables never qualify.
    pub ordered: bool,
    pub failures: Vec<String>,
}

impl MeasureSpec {
    pub fn uniform(b0: Rational, b1: Rational) -> Self {
        MeasureSpec::Uniform { b0, b1 }
    }

    /// Symmetric uniform spec `b0 = b1 = b`.
    pub fn symmetric(b: Rational) -> Self {
        MeasureSpec::Uniform {
            b0: b.clone(),
            b1: b,
        }
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self, MeasureSpec::Uniform { .. })
    }

    /// `[b0, b1, b2]` for uniform specs.
    pub fn weights(&self) -> Option<[Rational; 3]> {
        match self {
            MeasureSpec::Uniform { b0, b1 } => {
                Some([b0.clone(), b1.clone(), Rational::one() - b0 - b1])
            }
            MeasureSpec::Table { .. } => None,
        }
    }

    /// `μ_d(I(σ)) = d(σ)`.
    pub fn mu_code(&self, code: &TernaryCode) -> Result<Rational> {
        match self {
            MeasureSpec::Uniform { .. } => {
                let w = self.weights().expect("uniform");
                Ok(code
                    .digits()
                    .iter()
                    .fold(Rational::one(), |acc, &d| acc * &w[d as usize]))
            }
            MeasureSpec::Table { entries, .. } => entries
                .get(code)
                .cloned()
                .ok_or_else(|| Error::UncoveredPrefix(code.to_string())),
        }
    }

    /// Probability that a random closed set agrees with `tree` up to its height.
    pub fn mu_star_tree(&self, tree: &PrunedTree) -> Result<Rational> {
        self.mu_code(&tree.encode())
    }

    /// Conditional distribution of the digit following `code`.
    pub fn next_digit_weights(&self, code: &TernaryCode) -> Result<[Rational; 3]> {
        if let Some(w) = self.weights() {
            return Ok(w);
        }
        let parent = self.mu_code(code)?;
        if parent.is_zero() {
            return Err(Error::InvalidSpec(format!("code {code:?} has zero mass")));
        }
        let mut out = [Rational::zero(), Rational::zero(), Rational::zero()];
        for (i, slot) in out.iter_mut().enumerate() {
            *slot = self.mu_code(&code.child(i as u8))? / &parent;
        }
        Ok(out)
    }

    pub fn validate(&self) -> ValidationReport {
        let mut failures = Vec::new();
        let mut ordered = false;
        match self {
            MeasureSpec::Uniform { b0, b1 } => {
                if *b0 <= Rational::zero() {
                    failures.push(format!("b0 = {b0} must be positive"));
                }
                if *b1 <= Rational::zero() {
                    failures.push(format!("b1 = {b1} must be positive"));
                }
                let b2 = Rational::one() - b0 - b1;
                if b2 <= Rational::zero() {
                    failures.push(format!("b2 = 1 - b0 - b1 = {b2} must be positive"));
                }
                ordered = b1 <= b0;
            }
            MeasureSpec::Table {
                entries,
                certificate,
            } => validate_table(entries, certificate.as_ref(), &mut failures),
        }
        let valid = failures.is_empty();
        ValidationReport {
            valid,
            ordered: valid && ordered,
            failures,
        }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.valid {
            Ok(())
        } else {
            Err(Error::InvalidSpec(report.failures.join("; ")))
        }
    }

    /// Table of `d` on every prefix of every tree code of the given height.
    pub fn tabulate(&self, height: usize) -> Result<MeasureSpec> {
        let mut entries = BTreeMap::new();
        let mut stack = vec![(TernaryCode::empty(), CodeWalker::new(height))];
        while let Some((code, walker)) = stack.pop() {
            entries.insert(code.clone(), self.mu_code(&code)?);
            if walker.is_complete() {
                continue;
            }
            for d in 0..3u8 {
                let mut w = walker.clone();
                w.push(d)?;
                stack.push((code.child(d), w));
            }
        }
        Ok(MeasureSpec::Table {
            entries,
            certificate: None,
        })
    }
}

fn validate_table(
    entries: &BTreeMap<TernaryCode, Rational>,
    certificate: Option<&Certificate>,
    failures: &mut Vec<String>,
) {
    match entries.get(&TernaryCode::empty()) {
        Some(v) if v.is_one() => {}
        Some(v) => failures.push(format!("d(empty) = {v}, expected 1")),
        None => failures.push("d(empty) is missing".to_string()),
    }
    if let Some(cert) = certificate {
        let (zero, one) = (Rational::zero(), Rational::one());
        if !(zero < cert.b && cert.b < cert.c && cert.c < one) {
            failures.push(format!(
                "certificate needs 0 < b < c < 1, got b = {}, c = {}",
                cert.b, cert.c
            ));
        }
    }
    for (code, value) in entries {
        if *value < Rational::zero() || *value > Rational::one() {
            failures.push(format!("d({code}) = {value} outside [0,1]"));
        }
        if let Some(parent) = code.parent() {
            if !entries.contains_key(&parent) {
                failures.push(format!("d({code}) listed without its parent"));
            }
        }
        let children: Vec<Option<&Rational>> =
            (0..3u8).map(|i| entries.get(&code.child(i))).collect();
        let listed = children.iter().filter(|c| c.is_some()).count();
        if listed == 0 {
            continue;
        }
        if listed < 3 {
            failures.push(format!("only {listed} of 3 children of {code:?} listed"));
            continue;
        }
        let sum: Rational = children.iter().map(|c| c.expect("listed")).sum();
        if sum != *value {
            failures.push(format!("d({code:?}) = {value} but children sum to {sum}"));
        }
        if let Some(cert) = certificate {
            for (i, child) in children.iter().enumerate() {
                let child = child.expect("listed");
                let lower = &cert.b * value;
                let upper = &cert.c * value;
                if !(lower < *child && *child < upper) {
                    failures.push(format!(
                        "certificate fails at {code:?}{i}: need {lower} < {child} < {upper}"
                    ));
                }
            }
        }
    }
}

/// Fair-coin measure of a clopen set.
pub fn lebesgue(q: &ClopenSet) -> Rational {
    q.leaves()
        .iter()
        .map(|l: &BitString| rational::dyadic(l.len()))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cantor::{bs, enumerate_trees, DEFAULT_MAX_ENUM_DEPTH};
    use crate::rational::{int, ratio};

    fn code(s: &str) -> TernaryCode {
        s.parse().unwrap()
    }

    fn third() -> MeasureSpec {
        MeasureSpec::symmetric(ratio(1, 3))
    }

    #[test]
    fn mu_code_examples() {
        assert_eq!(third().mu_code(&code("2")).unwrap(), ratio(1, 3));
        assert_eq!(third().mu_code(&code("20")).unwrap(), ratio(1, 9));
        let s = MeasureSpec::uniform(ratio(2, 5), ratio(1, 5));
        assert_eq!(s.mu_code(&code("1")).unwrap(), ratio(1, 5));
        assert_eq!(s.mu_code(&code("")).unwrap(), int(1));
    }

    #[test]
    fn mu_star_examples() {
        let t = PrunedTree::new(1, [bs(""), bs("0"), bs("1")]).unwrap();
        assert_eq!(third().mu_star_tree(&t).unwrap(), ratio(1, 3));
        for h in 0..=3 {
            let total: Rational = enumerate_trees(h, DEFAULT_MAX_ENUM_DEPTH)
                .unwrap()
                .map(|t| third().mu_star_tree(&t).unwrap())
                .sum();
            assert_eq!(total, int(1), "height {h}");
        }
    }

    #[test]
    fn table_lookup_and_coverage() {
        let t = third().tabulate(1).unwrap();
        assert_eq!(t.mu_code(&code("1")).unwrap(), ratio(1, 3));
        assert!(matches!(
            t.mu_code(&code("12")),
            Err(Error::UncoveredPrefix(_))
        ));
        assert!(t.validate().valid);
    }

    #[test]
    fn validate_examples() {
        assert!(third().validate().valid);
        assert!(third().validate().ordered);
        let bad = MeasureSpec::uniform(ratio(1, 2), ratio(1, 2)).validate();
        assert!(!bad.valid);
        assert_eq!(bad.failures.len(), 1);
        let unordered = MeasureSpec::uniform(ratio(1, 5), ratio(2, 5)).validate();
        assert!(unordered.valid && !unordered.ordered);

        let table: MeasureSpec = serde_json::from_str(
            r#"{"kind":"table","entries":{"":"1","0":"1/3","1":"1/3","2":"1/3"}}"#,
        )
        .unwrap();
        assert!(table.validate().valid);
    }

    #[test]
    fn table_failures_reported() {
        let table: MeasureSpec = serde_json::from_str(
            r#"{"kind":"table","entries":{"":"1","0":"1/2","1":"1/3","2":"1/3"}}"#,
        )
        .unwrap();
        assert!(!table.validate().valid);
        let partial: MeasureSpec =
            serde_json::from_str(r#"{"kind":"table","entries":{"":"1","0":"1"}}"#).unwrap();
        assert!(!partial.validate().valid);
        let orphan: MeasureSpec =
            serde_json::from_str(r#"{"kind":"table","entries":{"":"1","00":"1"}}"#).unwrap();
        assert!(!orphan.validate().valid);
    }

    #[test]
    fn certificate_checked() {
        let ok: MeasureSpec = serde_json::from_str(
            r#"{"kind":"table","entries":{"":"1","0":"1/3","1":"1/3","2":"1/3"},
                "certificate":{"b":"1/4","c":"1/2"}}"#,
        )
        .unwrap();
        assert!(ok.validate().valid);
        let tight: MeasureSpec = serde_json::from_str(
            r#"{"kind":"table","entries":{"":"1","0":"1/3","1":"1/3","2":"1/3"},
                "certificate":{"b":"1/3","c":"1/2"}}"#,
        )
        .unwrap();
        assert!(!tight.validate().valid);
    }

    #[test]
    fn json_shape() {
        let j = serde_json::to_string(&third()).unwrap();
        assert_eq!(j, r#"{"kind":"uniform","b0":"1/3","b1":"1/3"}"#);
    }

    #[test]
    fn lebesgue_examples() {
        assert_eq!(lebesgue(&ClopenSet::full()), int(1));
        assert_eq!(lebesgue(&ClopenSet::empty()), int(0));
        assert_eq!(lebesgue(&ClopenSet::interval(bs("0"))), ratio(1, 2));
        assert_eq!(
            lebesgue(&ClopenSet::from_strings(2, [bs("00"), bs("11")])),
            ratio(1, 2)
        );
    }

    #[test]
    fn next_digit_weights_from_table() {
        let t = MeasureSpec::uniform(ratio(2, 5), ratio(1, 5))
            .tabulate(2)
            .unwrap();
        let w = t.next_digit_weights(&code("2")).unwrap();
        assert_eq!(w, [ratio(2, 5), ratio(1, 5), ratio(2, 5)]);
    }
}
