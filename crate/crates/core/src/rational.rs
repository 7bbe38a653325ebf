//! Exact rationals and their text form.
//!
//! Every measure, capacity and probability in this crate is a
//! [`BigRational`]. On the wire a rational is always a string, either
//! `"num/den"` or a bare integer such as `"1"`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn parse(text: &str) -> Result<Rational> {
    let bad = || Error::ParseRational(text.to_string());
    let text = text.trim();
    let (n, d) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let numer: BigInt = n.parse().map_err(|_| bad())?;
    let denom: BigInt = d.parse().map_err(|_| bad())?;
    if denom.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(numer, denom))
}

pub fn format(value: &Rational) -> String {
    value.to_string()
}

/// Nearest `f64`, for display alongside the exact value.
pub fn approx(value: &Rational) -> f64 {
    if let Some(x) = value.to_f64() {
        if x.is_finite() {
            return x;
        }
    }
    // Scale both sides down so huge numerators and denominators still convert.
    let bits = value.numer().bits().max(value.denom().bits());
    let shift = bits.saturating_sub(1000);
    let n = (value.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (value.denom() >> shift).to_f64().unwrap_or(1.0);
    if d == 0.0 {
        if value.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    } else {
        n / d
    }
}

pub fn pow(base: &Rational, exp: usize) -> Rational {
    let mut out = Rational::one();
    for _ in 0..exp {
        out *= base;
    }
    out
}

/// `2^(-exp)`.
pub fn dyadic(exp: usize) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << exp)
}

/// Largest multiple of `2^(-bits)` not above `value`.
pub fn floor_dyadic(value: &Rational, bits: usize) -> Rational {
    let scale = BigInt::one() << bits;
    let scaled = value.numer() * &scale;
    let (q, _) = scaled.div_mod_floor(value.denom());
    Rational::new(q, scale)
}

/// Smallest multiple of `2^(-bits)` not below `value`.
pub fn ceil_dyadic(value: &Rational, bits: usize) -> Rational {
    let scale = BigInt::one() << bits;
    let scaled = value.numer() * &scale;
    let (q, r) = scaled.div_mod_floor(value.denom());
    let q = if r.is_zero() { q } else { q + 1 };
    Rational::new(q, scale)
}

/// `serde(with = ...)` adapter serializing a rational as its string form.
pub mod serde_text {
    use serde::{Deserialize, Deserializer, Serializer};

    use super::Rational;

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::format(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        super::parse(&text).map_err(serde::de::Error::custom)
    }
}

/// Same as [`serde_text`] for a vector of rationals.
pub mod serde_text_vec {
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    use super::Rational;

    pub fn serialize<S: Serializer>(values: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(values.len()))?;
        for v in values {
            seq.serialize_element(&super::format(v))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let texts = Vec::<String>::deserialize(d)?;
        texts
            .iter()
            .map(|t| super::parse(t).map_err(serde::de::Error::custom))
            .collect()
    }
}

/// Same as [`serde_text`] for map values.
pub mod serde_text_map {
    use std::collections::BTreeMap;

    use serde::ser::SerializeMap;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::Rational;

    pub fn serialize<K, S>(map: &BTreeMap<K, Rational>, s: S) -> Result<S::Ok, S::Error>
    where
        K: Serialize,
        S: Serializer,
    {
        let mut m = s.serialize_map(Some(map.len()))?;
        for (k, v) in map {
            m.serialize_entry(k, &super::format(v))?;
        }
        m.end()
    }

    pub fn deserialize<'de, K, D>(d: D) -> Result<BTreeMap<K, Rational>, D::Error>
    where
        K: Deserialize<'de> + Ord,
        D: Deserializer<'de>,
    {
        let texts = BTreeMap::<K, String>::deserialize(d)?;
        texts
            .into_iter()
            .map(|(k, t)| Ok((k, super::parse(&t).map_err(serde::de::Error::custom)?)))
            .collect()
    }
}
