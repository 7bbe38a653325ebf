//! The intersection probabilities `p_n` of two independent random closed
//! sets under uniform weights, their limit, and the test indices built on
//! them.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::MeasureSpec;
use crate::rational::{
    self, ceil_dyadic, dyadic, floor_dyadic, int, serde_text, serde_text_vec, Rational,
};

/// Largest `n` accepted by [`pn_exact`]. Denominators of `p_n` grow like
/// `den(b)^(2^(n+1))`, so exact values stop being useful well before this.
pub const PN_EXACT_MAX: usize = 20;

/// The one-step map `p_n ↦ p_{n+1}` for weights `(b0, b1)`.
#[derive(Clone, Debug)]
pub struct PnMap {
    linear: Rational,
    quadratic: Rational,
}

impl PnMap {
    pub fn new(b0: &Rational, b1: &Rational) -> Result<Self> {
        MeasureSpec::uniform(b0.clone(), b1.clone()).ensure_valid()?;
        let b2 = Rational::one() - b0 - b1;
        // Single children on the same side, a single child against a split,
        // two splits. Single children on opposite sides never meet.
        let same = b0 * b0 + b1 * b1;
        let one_sided_vs_both = int(2) * (b0 + b1) * &b2;
        let both = &b2 * &b2;
        let linear = same + one_sided_vs_both + int(2) * &both;
        Ok(PnMap {
            linear,
            quadratic: both,
        })
    }

    /// `F(p) = (b0²+b1²)p + 2(b0+b1)b2·p + b2²(2p − p²)`.
    pub fn apply(&self, p: &Rational) -> Rational {
        &self.linear * p - &self.quadratic * p * p
    }

    pub fn linear(&self) -> &Rational {
        &self.linear
    }

    pub fn quadratic(&self) -> &Rational {
        &self.quadratic
    }
}

/// `F_b(p) = (2b²−4b+2)p − (1−2b)²p²`, the map for `b0 = b1 = b`.
pub fn symmetric_map(b: &Rational, p: &Rational) -> Rational {
    let two = int(2);
    let one = Rational::one();
    let lin = &two * b * b - int(4) * b + &two;
    let q = &one - &two * b;
    lin * p - &q * &q * p * p
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PnSequence {
    #[serde(with = "serde_text")]
    pub b0: Rational,
    #[serde(with = "serde_text")]
    pub b1: Rational,
    #[serde(with = "serde_text_vec")]
    pub values: Vec<Rational>,
    pub approx: Vec<f64>,
}

impl PnSequence {
    pub fn last(&self) -> &Rational {
        self.values.last().expect("p_0 is always present")
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,p_n,p_n_approx\n");
        for (n, (v, a)) in self.values.iter().zip(&self.approx).enumerate() {
            out.push_str(&format!("{n},{v},{a}\n"));
        }
        out
    }
}

/// `p_0, …, p_n` exactly.
pub fn pn_exact(b0: &Rational, b1: &Rational, n: usize) -> Result<PnSequence> {
    if n > PN_EXACT_MAX {
        return Err(Error::BoundExceeded {
            requested: n,
            bound: PN_EXACT_MAX,
        });
    }
    let map = PnMap::new(b0, b1)?;
    let mut values = vec![Rational::one()];
    for _ in 0..n {
        let next = map.apply(values.last().unwrap());
        values.push(next);
    }
    let approx = values.iter().map(rational::approx).collect();
    Ok(PnSequence {
        b0: b0.clone(),
        b1: b1.clone(),
        values,
        approx,
    })
}

/// Certified dyadic brackets `lower_n ≤ p_n ≤ upper_n`.
///
/// `F` is nondecreasing on `[0,1]`, so iterating a rounded-down lower bound
/// and a rounded-up upper bound keeps both valid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PnEnclosure {
    #[serde(with = "serde_text")]
    pub b0: Rational,
    #[serde(with = "serde_text")]
    pub b1: Rational,
    pub bits: usize,
    #[serde(with = "serde_text_vec")]
    pub lower: Vec<Rational>,
    #[serde(with = "serde_text_vec")]
    pub upper: Vec<Rational>,
    pub approx: Vec<f64>,
}

impl PnEnclosure {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,p_n_lower,p_n_upper,p_n_approx\n");
        for (n, ((lo, hi), a)) in self
            .lower
            .iter()
            .zip(&self.upper)
            .zip(&self.approx)
            .enumerate()
        {
            out.push_str(&format!("{n},{lo},{hi},{a}\n"));
        }
        out
    }

    pub fn width(&self, n: usize) -> Rational {
        &self.upper[n] - &self.lower[n]
    }
}

pub fn pn_enclosure(b0: &Rational, b1: &Rational, n: usize, bits: usize) -> Result<PnEnclosure> {
    let map = PnMap::new(b0, b1)?;
    let mut lower = vec![Rational::one()];
    let mut upper = vec![Rational::one()];
    for i in 0..n {
        let lo = floor_dyadic(&map.apply(&lower[i]), bits).max(Rational::zero());
        let hi = ceil_dyadic(&map.apply(&upper[i]), bits).min(Rational::one());
        lower.push(lo);
        upper.push(hi);
    }
    let approx = lower
        .iter()
        .zip(&upper)
        .map(|(lo, hi)| rational::approx(&((lo + hi) / int(2))))
        .collect();
    Ok(PnEnclosure {
        b0: b0.clone(),
        b1: b1.clone(),
        bits,
        lower,
        upper,
        approx,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    ZeroCapacity,
    PositiveCapacity,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regime::ZeroCapacity => f.write_str("ZeroCapacity"),
            Regime::PositiveCapacity => f.write_str("PositiveCapacity"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    #[serde(with = "serde_text")]
    pub b0: Rational,
    #[serde(with = "serde_text")]
    pub b1: Rational,
    #[serde(with = "serde_text")]
    pub mean: Rational,
    /// `(b0−b1)² + 4b² − 8b + 2`.
    #[serde(with = "serde_text")]
    pub discriminant: Rational,
    pub regime: Regime,
    #[serde(with = "serde_text")]
    pub fixed_point: Rational,
    pub fixed_point_approx: f64,
}

/// Decides whether `p_n → 0` by the sign of the discriminant. A zero
/// discriminant is the tangent case and counts as zero capacity.
pub fn classify_regime(b0: &Rational, b1: &Rational) -> Result<RegimeReport> {
    let map = PnMap::new(b0, b1)?;
    let two = int(2);
    let mean = (b0 + b1) / &two;
    let diff = b0 - b1;
    let discriminant = &diff * &diff + int(4) * &mean * &mean - int(8) * &mean + &two;
    let (regime, fixed_point) = if discriminant.is_positive() {
        let fp = (map.linear() - Rational::one()) / map.quadratic();
        (Regime::PositiveCapacity, fp)
    } else {
        (Regime::ZeroCapacity, Rational::zero())
    };
    Ok(RegimeReport {
        b0: b0.clone(),
        b1: b1.clone(),
        mean,
        discriminant,
        regime,
        fixed_point_approx: rational::approx(&fixed_point),
        fixed_point,
    })
}

/// `m_0 ≤ … ≤ m_R` with `m_r` the least index such that
/// `p_{m_r} < 2^(−2r−1)`, searched up to `cutoff`.
///
/// Comparisons use [`pn_enclosure`] and double the precision whenever a
/// bracket straddles a threshold, so every index is exact.
pub fn ml_test_indices(
    b0: &Rational,
    b1: &Rational,
    r_max: usize,
    cutoff: usize,
) -> Result<Vec<usize>> {
    let report = classify_regime(b0, b1)?;
    if report.regime == Regime::PositiveCapacity {
        return Err(Error::WrongRegime {
            b0: b0.to_string(),
            b1: b1.to_string(),
        });
    }
    let mut bits = 64 + 2 * r_max;
    loop {
        let enc = pn_enclosure(b0, b1, cutoff, bits)?;
        match indices_from(&enc, r_max)? {
            Some(found) => return Ok(found),
            None => bits *= 2,
        }
        if bits > 1 << 16 {
            return Err(Error::InvalidArgument(format!(
                "could not separate p_n from thresholds at {bits} bits"
            )));
        }
    }
}

/// `None` when some bracket is ambiguous at the current precision.
fn indices_from(enc: &PnEnclosure, r_max: usize) -> Result<Option<Vec<usize>>> {
    let mut out = Vec::with_capacity(r_max + 1);
    let mut n = 0;
    for r in 0..=r_max {
        let threshold = dyadic(2 * r + 1);
        loop {
            if n >= enc.lower.len() {
                return Err(Error::CutoffExceeded(enc.lower.len() - 1));
            }
            if enc.upper[n] < threshold {
                break;
            }
            if enc.lower[n] < threshold {
                return Ok(None);
            }
            n += 1;
        }
        out.push(n);
    }
    Ok(Some(out))
}
