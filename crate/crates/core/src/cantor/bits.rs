use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A finite binary string naming the interval of all sequences extending it.
///
/// Ordered first by length and then lexicographically, so iterating a sorted
/// collection of nodes visits them in breadth-first order.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn empty() -> Self {
        BitString { bits: Vec::new() }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        BitString { bits }
    }

    /// The `len` low bits of `value`, most significant first.
    pub fn from_index(value: u64, len: usize) -> Self {
        let bits = (0..len).rev().map(|i| (value >> i) & 1 == 1).collect();
        BitString { bits }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn child(&self, bit: bool) -> Self {
        let mut bits = self.bits.clone();
        bits.push(bit);
        BitString { bits }
    }

    pub fn parent(&self) -> Option<Self> {
        if self.bits.is_empty() {
            return None;
        }
        Some(BitString {
            bits: self.bits[..self.bits.len() - 1].to_vec(),
        })
    }

    pub fn sibling(&self) -> Option<Self> {
        let mut bits = self.bits.clone();
        let last = bits.last_mut()?;
        *last = !*last;
        Some(BitString { bits })
    }

    pub fn prepend(&self, bit: bool) -> Self {
        let mut bits = Vec::with_capacity(self.bits.len() + 1);
        bits.push(bit);
        bits.extend_from_slice(&self.bits);
        BitString { bits }
    }

    /// Drops the first bit, returning it with the remainder.
    pub fn split_first(&self) -> Option<(bool, Self)> {
        let (&first, rest) = self.bits.split_first()?;
        Some((
            first,
            BitString {
                bits: rest.to_vec(),
            },
        ))
    }

    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        other.bits.starts_with(&self.bits)
    }

    pub fn prefix(&self, len: usize) -> Self {
        BitString {
            bits: self.bits[..len.min(self.bits.len())].to_vec(),
        }
    }

    /// Plain lexicographic comparison (a proper prefix sorts first).
    pub fn lex_cmp(&self, other: &BitString) -> Ordering {
        self.bits.cmp(&other.bits)
    }

    /// Every extension of `self` of total length `len`, in lexicographic order.
    pub fn extensions(&self, len: usize) -> Vec<BitString> {
        assert!(len >= self.len());
        let extra = len - self.len();
        (0..1u64 << extra)
            .map(|i| {
                let mut bits = self.bits.clone();
                bits.extend(BitString::from_index(i, extra).bits);
                BitString { bits }
            })
            .collect()
    }
}

impl Ord for BitString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.bits.cmp(&other.bits))
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.bits.is_empty() {
            f.write_str("λ")
        } else {
            write!(f, "{self}")
        }
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidBitString(s.to_string())),
            })
            .collect::<Result<_, _>>()?;
        Ok(BitString { bits })
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Shorthand for tests and examples: `bs("0110")`.
pub fn bs(text: &str) -> BitString {
    text.parse().expect("literal bit string")
}
