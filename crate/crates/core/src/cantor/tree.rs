use std::collections::{BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::bits::BitString;
use super::clopen::ClopenSet;
use crate::error::{Error, Result};

/// Brute-force enumeration depth bound. Height 5 already has about 4.3e9 trees.
pub const DEFAULT_MAX_ENUM_DEPTH: usize = 4;

/// A word over `{0,1,2}` coding a pruned tree breadth first: `0` left child
/// only, `1` right child only, `2` both children.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TernaryCode {
    digits: Vec<u8>,
}

impl TernaryCode {
    pub fn empty() -> Self {
        TernaryCode { digits: Vec::new() }
    }

    pub fn from_digits(digits: Vec<u8>) -> Result<Self> {
        if let Some(d) = digits.iter().find(|&&d| d > 2) {
            return Err(Error::MalformedCode(format!("digit {d} outside {{0,1,2}}")));
        }
        Ok(TernaryCode { digits })
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn child(&self, digit: u8) -> Self {
        debug_assert!(digit <= 2);
        let mut digits = self.digits.clone();
        digits.push(digit);
        TernaryCode { digits }
    }

    pub fn parent(&self) -> Option<Self> {
        let (_, rest) = self.digits.split_last()?;
        Some(TernaryCode {
            digits: rest.to_vec(),
        })
    }
}

impl fmt::Display for TernaryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.digits {
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for TernaryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for TernaryCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let digits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                '2' => Ok(2),
                _ => Err(Error::MalformedCode(format!("{s:?}: bad digit {c:?}"))),
            })
            .collect::<Result<_>>()?;
        Ok(TernaryCode { digits })
    }
}

impl Serialize for TernaryCode {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TernaryCode {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Replays the breadth-first coding scheme: tracks which node the next
/// code digit describes.
#[derive(Clone, Debug)]
pub struct CodeWalker {
    height: usize,
    pending: VecDeque<BitString>,
    nodes: BTreeSet<BitString>,
}

impl CodeWalker {
    pub fn new(height: usize) -> Self {
        let mut pending = VecDeque::new();
        let root = BitString::empty();
        if height > 0 {
            pending.push_back(root.clone());
        }
        CodeWalker {
            height,
            pending,
            nodes: BTreeSet::from([root]),
        }
    }

    /// Node the next digit will describe, or `None` once the code is complete.
    pub fn next_node(&self) -> Option<&BitString> {
        self.pending.front()
    }

    pub fn is_complete(&self) -> bool {
        self.pending.is_empty()
    }

    pub fn push(&mut self, digit: u8) -> Result<()> {
        let node = self.pending.pop_front().ok_or_else(|| {
            Error::MalformedCode("extra digits after the tree is complete".into())
        })?;
        let children: &[bool] = match digit {
            0 => &[false],
            1 => &[true],
            2 => &[false, true],
            d => return Err(Error::MalformedCode(format!("digit {d} outside {{0,1,2}}"))),
        };
        for &bit in children {
            let c = node.child(bit);
            if c.len() < self.height {
                self.pending.push_back(c.clone());
            }
            self.nodes.insert(c);
        }
        Ok(())
    }

    pub fn finish(self) -> Result<PrunedTree> {
        if !self.pending.is_empty() {
            return Err(Error::MalformedCode(format!(
                "code ended early: {} more digits needed",
                self.pending.len()
            )));
        }
        Ok(PrunedTree {
            height: self.height,
            nodes: self.nodes,
        })
    }
}

/// A finite tree without dead ends: a closed set known to depth `height`.
///
/// The height is part of the value; the same node set at a different height
/// is a different tree.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrunedTree {
    height: usize,
    nodes: BTreeSet<BitString>,
}

impl PrunedTree {
    pub fn new(height: usize, nodes: impl IntoIterator<Item = BitString>) -> Result<Self> {
        let nodes: BTreeSet<BitString> = nodes.into_iter().collect();
        if !nodes.contains(&BitString::empty()) {
            return Err(Error::InvalidTree("missing the root".into()));
        }
        for n in &nodes {
            if n.len() > height {
                return Err(Error::InvalidTree(format!(
                    "node {n} deeper than height {height}"
                )));
            }
            if let Some(p) = n.parent() {
                if !nodes.contains(&p) {
                    return Err(Error::InvalidTree(format!("node {n} has no parent")));
                }
            }
            if n.len() < height
                && !nodes.contains(&n.child(false))
                && !nodes.contains(&n.child(true))
            {
                return Err(Error::InvalidTree(format!("dead end at {n:?}")));
            }
        }
        Ok(PrunedTree { height, nodes })
    }

    /// The full binary tree of the given height.
    pub fn full(height: usize) -> Self {
        let nodes = (0..=height)
            .flat_map(|l| BitString::empty().extensions(l))
            .collect();
        PrunedTree { height, nodes }
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn nodes(&self) -> &BTreeSet<BitString> {
        &self.nodes
    }

    pub fn contains(&self, node: &BitString) -> bool {
        self.nodes.contains(node)
    }

    /// All nodes, by length and then lexicographically.
    pub fn bfs_nodes(&self) -> Vec<BitString> {
        self.nodes.iter().cloned().collect()
    }

    /// Nodes of exactly the given length, in lexicographic order.
    pub fn level(&self, len: usize) -> Vec<BitString> {
        self.nodes
            .iter()
            .filter(|n| n.len() == len)
            .cloned()
            .collect()
    }

    pub fn encode(&self) -> TernaryCode {
        let digits = self
            .nodes
            .iter()
            .filter(|n| n.len() < self.height)
            .map(|n| {
                match (
                    self.nodes.contains(&n.child(false)),
                    self.nodes.contains(&n.child(true)),
                ) {
                    (true, true) => 2,
                    (false, true) => 1,
                    _ => 0,
                }
            })
            .collect();
        TernaryCode { digits }
    }

    pub fn decode(code: &TernaryCode, height: usize) -> Result<Self> {
        let mut walker = CodeWalker::new(height);
        for &d in code.digits() {
            walker.push(d)?;
        }
        walker.finish()
    }

    /// The level-`n` approximation `⋃ { I(σ) : σ ∈ T, |σ| = n }`.
    pub fn truncate(&self, n: usize) -> Result<ClopenSet> {
        if n > self.height {
            return Err(Error::DepthExceeded {
                requested: n,
                height: self.height,
            });
        }
        Ok(ClopenSet::from_strings(n, self.level(n)))
    }

    /// The subtree of nodes of length at most `n`.
    pub fn restrict(&self, n: usize) -> Result<Self> {
        if n > self.height {
            return Err(Error::DepthExceeded {
                requested: n,
                height: self.height,
            });
        }
        Ok(PrunedTree {
            height: n,
            nodes: self
                .nodes
                .iter()
                .filter(|s| s.len() <= n)
                .cloned()
                .collect(),
        })
    }
}

impl fmt::Debug for PrunedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PrunedTree(h={}, {:?})", self.height, self.nodes)
    }
}

#[derive(Serialize, Deserialize)]
struct TreeRepr {
    height: usize,
    nodes: Vec<BitString>,
}

impl Serialize for PrunedTree {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TreeRepr {
            height: self.height,
            nodes: self.bfs_nodes(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PrunedTree {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = TreeRepr::deserialize(d)?;
        PrunedTree::new(repr.height, repr.nodes).map_err(serde::de::Error::custom)
    }
}

/// Number of pruned trees of the given height: `N(0) = 1`, `N(h+1) = 2N(h) + N(h)^2`.
/// `None` once the count overflows `u128` (height 8 and up).
pub fn tree_count(height: usize) -> Option<u128> {
    (0..height).try_fold(1u128, |n, _| {
        n.checked_mul(n)?.checked_add(n.checked_mul(2)?)
    })
}

/// Lazily yields every pruned tree of one height, in lexicographic order of codes.
#[derive(Clone, Debug)]
pub struct TreeEnumerator {
    height: usize,
    next: Option<Vec<u8>>,
}

impl TreeEnumerator {
    fn minimal_completion(prefix: Vec<u8>, height: usize) -> Vec<u8> {
        let mut walker = CodeWalker::new(height);
        let mut code = prefix;
        for &d in &code {
            walker.push(d).expect("prefix of a valid code");
        }
        while !walker.is_complete() {
            walker.push(0).expect("walker has a pending node");
            code.push(0);
        }
        code
    }
}

impl Iterator for TreeEnumerator {
    type Item = PrunedTree;

    fn next(&mut self) -> Option<PrunedTree> {
        let code = self.next.take()?;
        let tree = PrunedTree::decode(
            &TernaryCode {
                digits: code.clone(),
            },
            self.height,
        )
        .expect("enumerator only produces valid codes");
        if let Some(i) = code.iter().rposition(|&d| d < 2) {
            let mut prefix = code[..i].to_vec();
            prefix.push(code[i] + 1);
            self.next = Some(Self::minimal_completion(prefix, self.height));
        }
        Some(tree)
    }
}

pub fn enumerate_trees(height: usize, max_height: usize) -> Result<TreeEnumerator> {
    if height > max_height {
        return Err(Error::BoundExceeded {
            requested: height,
            bound: max_height,
        });
    }
    Ok(TreeEnumerator {
        height,
        next: Some(TreeEnumerator::minimal_completion(Vec::new(), height)),
    })
}
