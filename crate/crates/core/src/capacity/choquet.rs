//! From a capacity back to a measure on tree codes.
//!
//! Two routes: [`choquet_invert`] walks codes and reads branching weights off
//! ratios of interval capacities, which is exact for self-similar capacities;
//! [`recover_mu_star`] inverts the hitting functional by inclusion–exclusion
//! over the top level of each tree and works for any capacity.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use super::CapacityOracle;
use crate::cantor::{enumerate_trees, ClopenSet, CodeWalker, PrunedTree, TernaryCode};
use crate::error::{Error, Result};
use crate::measure::MeasureSpec;
use crate::rational::Rational;

/// Depth up to which [`choquet_invert`] also runs [`recover_mu_star`] and
/// compares the two.
pub const CROSS_CHECK_MAX_DEPTH: usize = 3;

struct Memo<'a> {
    cap: &'a dyn CapacityOracle,
    seen: RefCell<HashMap<ClopenSet, Rational>>,
}

impl<'a> Memo<'a> {
    fn new(cap: &'a dyn CapacityOracle) -> Self {
        Memo {
            cap,
            seen: RefCell::new(HashMap::new()),
        }
    }

    fn get(&self, q: &ClopenSet) -> Result<Rational> {
        if let Some(v) = self.seen.borrow().get(q) {
            return Ok(v.clone());
        }
        let v = self.cap.capacity(q)?;
        self.seen.borrow_mut().insert(q.clone(), v.clone());
        Ok(v)
    }
}

fn in_unit(x: &Rational) -> bool {
    *x >= Rational::zero() && *x <= Rational::one()
}

/// Table measure on all code prefixes of trees of height `depth` whose
/// capacity is `cap`.
///
/// At a code prefix whose next node is `σ`, with `a_i = T(I(σ⌢i)) / T(I(σ))`,
/// digit 2 gets `a0 + a1 − 1`, digit 0 gets `1 − a1` and digit 1 gets
/// `1 − a0` (each scaled by the prefix weight). Intervals of capacity zero
/// give their children weight zero.
pub fn choquet_invert(
    cap: &dyn CapacityOracle,
    depth: usize,
    max_depth: usize,
) -> Result<MeasureSpec> {
    let memo = Memo::new(cap);
    let full = memo.get(&ClopenSet::full())?;
    if !full.is_one() {
        return Err(Error::InconsistentCapacity(format!(
            "T(full) = {full}, expected 1"
        )));
    }

    let mut entries = BTreeMap::new();
    let mut stack = vec![(
        TernaryCode::empty(),
        CodeWalker::new(depth),
        Rational::one(),
    )];
    while let Some((code, walker, weight)) = stack.pop() {
        entries.insert(code.clone(), weight.clone());
        let Some(node) = walker.next_node().cloned() else {
            continue;
        };
        let parent_cap = memo.get(&ClopenSet::interval(node.clone()))?;
        let children = if parent_cap.is_zero() {
            [Rational::zero(), Rational::zero(), Rational::zero()]
        } else {
            let a0 = memo.get(&ClopenSet::interval(node.child(false)))? / &parent_cap;
            let a1 = memo.get(&ClopenSet::interval(node.child(true)))? / &parent_cap;
            let one = Rational::one();
            [
                &weight * (&one - &a1),
                &weight * (&one - &a0),
                &weight * (&a0 + &a1 - &one),
            ]
        };
        let sum: Rational = children.iter().sum();
        if sum != weight {
            return Err(Error::InconsistentCapacity(format!(
                "weights below {code:?} sum to {sum}, expected {weight}"
            )));
        }
        for (digit, w) in children.into_iter().enumerate() {
            if !in_unit(&w) {
                return Err(Error::InconsistentCapacity(format!(
                    "weight {w} for code {code}{digit} outside [0,1]"
                )));
            }
            let mut next = walker.clone();
            next.push(digit as u8)?;
            stack.push((code.child(digit as u8), next, w));
        }
    }

    if depth <= CROSS_CHECK_MAX_DEPTH.min(max_depth) {
        for (tree, mass) in recover_mu_star(cap, depth, max_depth)? {
            let code = tree.encode();
            if entries[&code] != mass {
                return Err(Error::InconsistentCapacity(format!(
                    "ratio inversion gives {} to code {code} but inclusion-exclusion gives {mass}; \
                     the capacity is not self-similar",
                    entries[&code]
                )));
            }
        }
    }

    Ok(MeasureSpec::Table {
        entries,
        certificate: None,
    })
}

/// `μ*(U_A)` for every tree `A` of the given height, by inclusion–exclusion:
/// the top level of a random tree lies inside `[M]` with probability
/// `1 − T(complement of [M])`.
pub fn recover_mu_star(
    cap: &dyn CapacityOracle,
    height: usize,
    max_depth: usize,
) -> Result<Vec<(PrunedTree, Rational)>> {
    let trees = enumerate_trees(height, max_depth)?;
    let memo = Memo::new(cap);
    let full = memo.get(&ClopenSet::full())?;
    if !full.is_one() {
        return Err(Error::InconsistentCapacity(format!(
            "T(full) = {full}, expected 1"
        )));
    }

    let mut out = Vec::new();
    let mut total = Rational::zero();
    for tree in trees {
        let top = tree.level(height);
        let mut mass = Rational::zero();
        for removed in 0u64..(1 << top.len()) {
            let kept = top
                .iter()
                .enumerate()
                .filter(|(i, _)| removed & (1 << i) == 0)
                .map(|(_, s)| s.clone());
            let outside = ClopenSet::from_strings(height, kept).complement();
            let inside = Rational::one() - memo.get(&outside)?;
            if removed.count_ones() % 2 == 0 {
                mass += inside;
            } else {
                mass -= inside;
            }
        }
        if mass < Rational::zero() {
            return Err(Error::InconsistentCapacity(format!(
                "negative mass {mass} recovered for {:?}",
                tree
            )));
        }
        total += &mass;
        out.push((tree, mass));
    }
    if !total.is_one() {
        return Err(Error::InconsistentCapacity(format!(
            "recovered masses sum to {total}"
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::{BruteForceCapacity, CapacityTable, UniformCapacity};
    use crate::rational::{int, ratio};

    fn uniform_cap(b0: Rational, b1: Rational) -> UniformCapacity {
        UniformCapacity::new(&MeasureSpec::uniform(b0, b1)).unwrap()
    }

    fn code(s: &str) -> TernaryCode {
        s.parse().unwrap()
    }

    #[test]
    fn invert_uniform_third_depth_one() {
        let spec = choquet_invert(&uniform_cap(ratio(1, 3), ratio(1, 3)), 1, 4).unwrap();
        for d in ["0", "1", "2"] {
            assert_eq!(spec.mu_code(&code(d)).unwrap(), ratio(1, 3));
        }
    }

    #[test]
    fn invert_full_branching_capacity() {
        // T(I(0)) = T(I(1)) = 1 at the root: both children always present.
        let mut table = CapacityTable::new();
        table.insert(ClopenSet::full(), int(1));
        table.insert(ClopenSet::interval("0".parse().unwrap()), int(1));
        table.insert(ClopenSet::interval("1".parse().unwrap()), int(1));
        let spec = choquet_invert(&table, 1, 4).unwrap_err();
        // Depth-1 cross check needs the empty set too.
        assert!(matches!(spec, Error::InvalidArgument(_)));
        table.insert(ClopenSet::empty(), int(0));
        let spec = choquet_invert(&table, 1, 4).unwrap();
        assert_eq!(spec.mu_code(&code("2")).unwrap(), int(1));
        assert_eq!(spec.mu_code(&code("0")).unwrap(), int(0));
        assert_eq!(spec.mu_code(&code("1")).unwrap(), int(0));
    }

    #[test]
    fn invert_asymmetric_depth_three() {
        let (b0, b1) = (ratio(2, 5), ratio(1, 5));
        let uniform = MeasureSpec::uniform(b0.clone(), b1.clone());
        let spec = choquet_invert(&uniform_cap(b0, b1), 3, 4).unwrap();
        let MeasureSpec::Table { entries, .. } = &spec else {
            panic!("expected table");
        };
        assert!(entries.len() > 255);
        for (c, v) in entries {
            assert_eq!(*v, uniform.mu_code(c).unwrap(), "code {c}");
        }
    }

    #[test]
    fn recover_matches_mu_star() {
        let s = MeasureSpec::symmetric(ratio(1, 3));
        let cap = UniformCapacity::new(&s).unwrap();
        for h in 1..=2 {
            let rec = recover_mu_star(&cap, h, 4).unwrap();
            for (t, m) in &rec {
                assert_eq!(*m, s.mu_star_tree(t).unwrap());
            }
        }
        let rec = recover_mu_star(&cap, 1, 4).unwrap();
        assert_eq!(rec.len(), 3);
        assert!(rec.iter().all(|(_, m)| *m == ratio(1, 3)));
    }

    #[test]
    fn recover_rejects_bad_normalization() {
        let mut table = CapacityTable::new();
        table.insert(ClopenSet::full(), ratio(1, 2));
        assert!(matches!(
            recover_mu_star(&table, 1, 4),
            Err(Error::InconsistentCapacity(_))
        ));
        assert!(matches!(
            choquet_invert(&table, 1, 4),
            Err(Error::InconsistentCapacity(_))
        ));
    }

    #[test]
    fn non_self_similar_capacity_is_flagged() {
        // A table measure whose branching at node "0" differs from the root.
        let spec: MeasureSpec = serde_json::from_str(
            r#"{"kind":"table","entries":{
                "":"1","0":"1/3","1":"1/3","2":"1/3",
                "00":"1/6","01":"1/6","02":"0",
                "10":"1/6","11":"1/6","12":"0",
                "20":"1/9","21":"1/9","22":"1/9",
                "200":"1/27","201":"1/27","202":"1/27",
                "210":"1/27","211":"1/27","212":"1/27",
                "220":"1/27","221":"1/27","222":"1/27",
                "2000":"1/81","2001":"1/81","2002":"1/81",
                "2010":"1/81","2011":"1/81","2012":"1/81",
                "2020":"1/81","2021":"1/81","2022":"1/81",
                "2100":"1/81","2101":"1/81","2102":"1/81",
                "2110":"1/81","2111":"1/81","2112":"1/81",
                "2120":"1/81","2121":"1/81","2122":"1/81",
                "2200":"1/81","2201":"1/81","2202":"1/81",
                "2210":"1/81","2211":"1/81","2212":"1/81",
                "2220":"1/81","2221":"1/81","2222":"1/81"}}"#,
        )
        .unwrap();
        assert!(spec.validate().valid, "{:?}", spec.validate());
        let cap = BruteForceCapacity::new(spec.clone(), 4);
        // The inclusion-exclusion route still recovers the measure exactly.
        for (t, m) in recover_mu_star(&cap, 2, 4).unwrap() {
            assert_eq!(m, spec.mu_star_tree(&t).unwrap());
        }
        assert!(matches!(
            choquet_invert(&cap, 2, 4),
            Err(Error::InconsistentCapacity(_))
        ));
    }
}
