use std::collections::BTreeSet;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::bits::BitString;

/// A finite union of intervals, kept as a canonical antichain.
///
/// No leaf is a prefix of another and no two siblings are both present, so
/// equal point sets have identical leaves. `depth` is the resolution the set
/// was built at; it never affects equality.
#[derive(Clone, Debug)]
pub struct ClopenSet {
    depth: usize,
    leaves: BTreeSet<BitString>,
}

impl PartialEq for ClopenSet {
    fn eq(&self, other: &Self) -> bool {
        self.leaves == other.leaves
    }
}

impl Eq for ClopenSet {}

impl Hash for ClopenSet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.leaves.hash(state);
    }
}

impl PartialOrd for ClopenSet {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ClopenSet {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.leaves.cmp(&other.leaves)
    }
}

fn absorb_and_merge(strings: impl IntoIterator<Item = BitString>) -> BTreeSet<BitString> {
    let mut sorted: Vec<BitString> = strings.into_iter().collect();
    sorted.sort_by(|a, b| a.lex_cmp(b));
    sorted.dedup();
    // In lexicographic order every extension of a kept string follows it directly.
    let mut set = BTreeSet::new();
    let mut last: Option<BitString> = None;
    for s in sorted {
        if last.as_ref().is_some_and(|p| p.is_prefix_of(&s)) {
            continue;
        }
        set.insert(s.clone());
        last = Some(s);
    }

    let max_len = set.iter().map(BitString::len).max().unwrap_or(0);
    for len in (1..=max_len).rev() {
        let left: Vec<BitString> = set
            .iter()
            .filter(|s| s.len() == len && !s.bits()[len - 1])
            .cloned()
            .collect();
        for s in left {
            let sib = s.sibling().expect("nonempty");
            if set.contains(&sib) {
                set.remove(&s);
                set.remove(&sib);
                set.insert(s.parent().expect("nonempty"));
            }
        }
    }
    set
}

impl ClopenSet {
    /// Canonical form of `⋃ I(s)` over the given strings.
    pub fn from_strings(depth: usize, strings: impl IntoIterator<Item = BitString>) -> Self {
        let leaves = absorb_and_merge(strings);
        let depth = leaves
            .iter()
            .map(BitString::len)
            .max()
            .unwrap_or(0)
            .max(depth);
        ClopenSet { depth, leaves }
    }

    pub fn empty() -> Self {
        ClopenSet {
            depth: 0,
            leaves: BTreeSet::new(),
        }
    }

    pub fn full() -> Self {
        ClopenSet {
            depth: 0,
            leaves: BTreeSet::from([BitString::empty()]),
        }
    }

    pub fn interval(s: BitString) -> Self {
        ClopenSet {
            depth: s.len(),
            leaves: BTreeSet::from([s]),
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Length of the longest leaf; the true resolution of the point set.
    pub fn max_leaf_len(&self) -> usize {
        self.leaves.iter().map(BitString::len).max().unwrap_or(0)
    }

    pub fn leaves(&self) -> &BTreeSet<BitString> {
        &self.leaves
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.leaves.len() == 1 && self.leaves.contains(&BitString::empty())
    }

    pub fn with_depth(mut self, depth: usize) -> Self {
        self.depth = depth.max(self.max_leaf_len());
        self
    }

    /// `I(s) ⊆ self`.
    pub fn covers(&self, s: &BitString) -> bool {
        (0..=s.len()).any(|l| self.leaves.contains(&s.prefix(l)))
    }

    /// `I(s) ∩ self ≠ ∅`.
    pub fn meets(&self, s: &BitString) -> bool {
        self.covers(s) || self.leaves.iter().any(|l| s.is_prefix_of(l))
    }

    /// `(Q0, Q1)` with `self = 0⌢Q0 ∪ 1⌢Q1`.
    pub fn split(&self) -> (ClopenSet, ClopenSet) {
        let depth = self.depth.saturating_sub(1);
        if self.is_full() {
            return (
                ClopenSet::full().with_depth(depth),
                ClopenSet::full().with_depth(depth),
            );
        }
        let mut halves = [BTreeSet::new(), BTreeSet::new()];
        for leaf in &self.leaves {
            let (bit, rest) = leaf.split_first().expect("non-root leaf");
            halves[bit as usize].insert(rest);
        }
        let [h0, h1] = halves;
        (
            ClopenSet { depth, leaves: h0 },
            ClopenSet { depth, leaves: h1 },
        )
    }

    /// Inverse of [`split`](Self::split): `0⌢q0 ∪ 1⌢q1`.
    pub fn join(q0: &ClopenSet, q1: &ClopenSet) -> ClopenSet {
        let depth = q0.depth.max(q1.depth) + 1;
        if q0.is_full() && q1.is_full() {
            return ClopenSet::full().with_depth(depth);
        }
        let leaves = q0
            .leaves
            .iter()
            .map(|s| s.prepend(false))
            .chain(q1.leaves.iter().map(|s| s.prepend(true)))
            .collect();
        ClopenSet { depth, leaves }
    }

    /// `prefix⌢self`.
    pub fn prefixed(&self, prefix: &BitString) -> ClopenSet {
        let leaves = self
            .leaves
            .iter()
            .map(|l| {
                let mut bits = prefix.bits().to_vec();
                bits.extend_from_slice(l.bits());
                BitString::from_bits(bits)
            })
            .collect();
        ClopenSet {
            depth: self.depth + prefix.len(),
            leaves,
        }
    }

    pub fn union(&self, other: &ClopenSet) -> ClopenSet {
        fn go(a: &ClopenSet, b: &ClopenSet) -> ClopenSet {
            if a.is_full() || b.is_full() {
                return ClopenSet::full();
            }
            if a.is_empty() {
                return b.clone();
            }
            if b.is_empty() {
                return a.clone();
            }
            let (a0, a1) = a.split();
            let (b0, b1) = b.split();
            ClopenSet::join(&go(&a0, &b0), &go(&a1, &b1))
        }
        go(self, other).with_depth(self.depth.max(other.depth))
    }

    pub fn intersection(&self, other: &ClopenSet) -> ClopenSet {
        fn go(a: &ClopenSet, b: &ClopenSet) -> ClopenSet {
            if a.is_empty() || b.is_empty() {
                return ClopenSet::empty();
            }
            if a.is_full() {
                return b.clone();
            }
            if b.is_full() {
                return a.clone();
            }
            let (a0, a1) = a.split();
            let (b0, b1) = b.split();
            let (c0, c1) = (go(&a0, &b0), go(&a1, &b1));
            if c0.is_empty() && c1.is_empty() {
                ClopenSet::empty()
            } else {
                ClopenSet::join(&c0, &c1)
            }
        }
        go(self, other).with_depth(self.depth.max(other.depth))
    }

    pub fn complement(&self) -> ClopenSet {
        fn go(a: &ClopenSet) -> ClopenSet {
            if a.is_empty() {
                return ClopenSet::full();
            }
            if a.is_full() {
                return ClopenSet::empty();
            }
            let (a0, a1) = a.split();
            ClopenSet::join(&go(&a0), &go(&a1))
        }
        go(self).with_depth(self.depth)
    }

    pub fn difference(&self, other: &ClopenSet) -> ClopenSet {
        self.intersection(&other.complement())
    }

    pub fn is_subset(&self, other: &ClopenSet) -> bool {
        self.union(other) == *other
    }

    pub fn is_disjoint(&self, other: &ClopenSet) -> bool {
        self.intersection(other).is_empty()
    }

    /// The set rewritten as intervals of length exactly `len`, lexicographic.
    pub fn refine(&self, len: usize) -> Vec<BitString> {
        assert!(
            len >= self.max_leaf_len(),
            "cannot refine below leaf length"
        );
        let mut out: Vec<BitString> = self.leaves.iter().flat_map(|l| l.extensions(len)).collect();
        out.sort_by(|a, b| a.lex_cmp(b));
        out
    }
}

#[derive(Serialize, Deserialize)]
struct ClopenRepr {
    depth: usize,
    leaves: Vec<BitString>,
}

impl Serialize for ClopenSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut leaves: Vec<BitString> = self.leaves.iter().cloned().collect();
        leaves.sort_by(|a, b| a.lex_cmp(b));
        ClopenRepr {
            depth: self.depth,
            leaves,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ClopenSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = ClopenRepr::deserialize(d)?;
        if let Some(l) = repr.leaves.iter().find(|l| l.len() > repr.depth) {
            return Err(serde::de::Error::custom(format!(
                "leaf {l} longer than depth {}",
                repr.depth
            )));
        }
        Ok(ClopenSet::from_strings(repr.depth, repr.leaves))
    }
}
