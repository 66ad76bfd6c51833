//! Exact cost arithmetic used at the planning layer.
//!
//! Action and explanation costs are non-negative rationals. Plan costs may be
//! infinite (invalid plan), and explicability scores may be negative infinity.
//! Both sentinels are explicit enum variants rather than float infinities.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A finite rational cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Cost(Ratio<i64>);

impl Cost {
    pub const ZERO: Cost = Cost(Ratio::new_raw(0, 1));
    pub const ONE: Cost = Cost(Ratio::new_raw(1, 1));

    pub fn new(numer: i64, denom: i64) -> Cost {
        Cost(Ratio::new(numer, denom))
    }

    pub fn from_int(value: i64) -> Cost {
        Cost(Ratio::from_integer(value))
    }

    pub fn ratio(&self) -> Ratio<i64> {
        self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl Add for Cost {
    type Output = Cost;
    fn add(self, rhs: Cost) -> Cost {
        Cost(self.0 + rhs.0)
    }
}

impl Sub for Cost {
    type Output = Cost;
    fn sub(self, rhs: Cost) -> Cost {
        Cost(self.0 - rhs.0)
    }
}

impl Mul for Cost {
    type Output = Cost;
    fn mul(self, rhs: Cost) -> Cost {
        Cost(self.0 * rhs.0)
    }
}

impl Neg for Cost {
    type Output = Cost;
    fn neg(self) -> Cost {
        Cost(-self.0)
    }
}

impl Sum for Cost {
    fn sum<I: Iterator<Item = Cost>>(iter: I) -> Cost {
        iter.fold(Cost::ZERO, |acc, c| acc + c)
    }
}

impl<'a> Sum<&'a Cost> for Cost {
    fn sum<I: Iterator<Item = &'a Cost>>(iter: I) -> Cost {
        iter.fold(Cost::ZERO, |acc, c| acc + *c)
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid cost literal `{0}`")]
pub struct ParseCostError(pub String);

impl FromStr for Cost {
    type Err = ParseCostError;

    /// Accepts `7`, `3/2` and plain decimals such as `2.25`.
    fn from_str(s: &str) -> Result<Cost, ParseCostError> {
        let err = || ParseCostError(s.to_string());
        let s = s.trim();
        if s.is_empty() || s.starts_with('+') {
            return Err(err());
        }
        if let Some((n, d)) = s.split_once('/') {
            let n: i64 = n.parse().map_err(|_| err())?;
            let d: i64 = d.parse().map_err(|_| err())?;
            if d == 0 {
                return Err(err());
            }
            return Ok(Cost::new(n, d));
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 12 {
                return Err(err());
            }
            let negative = int.starts_with('-');
            let whole: i64 = if int.is_empty() || int == "-" {
                0
            } else {
                int.parse().map_err(|_| err())?
            };
            let scale = 10i64.pow(frac.len() as u32);
            let part: i64 = frac.parse().map_err(|_| err())?;
            let magnitude = whole.abs() * scale + part;
            let numer = if negative { -magnitude } else { magnitude };
            return Ok(Cost::new(numer, scale));
        }
        s.parse::<i64>().map(Cost::from_int).map_err(|_| err())
    }
}

impl Serialize for Cost {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Cost {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Cost, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Int(i64),
            Text(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Int(v) => Ok(Cost::from_int(v)),
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// A plan cost that may be infinite (the plan is invalid or misses the goal).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtCost {
    Finite(Cost),
    Infinite,
}

impl ExtCost {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExtCost::Finite(_))
    }

    pub fn finite(&self) -> Option<Cost> {
        match self {
            ExtCost::Finite(c) => Some(*c),
            ExtCost::Infinite => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtCost::Finite(c) => c.to_f64(),
            ExtCost::Infinite => f64::INFINITY,
        }
    }
}

impl From<Cost> for ExtCost {
    fn from(c: Cost) -> Self {
        ExtCost::Finite(c)
    }
}

impl Add<Cost> for ExtCost {
    type Output = ExtCost;
    fn add(self, rhs: Cost) -> ExtCost {
        match self {
            ExtCost::Finite(c) => ExtCost::Finite(c + rhs),
            ExtCost::Infinite => ExtCost::Infinite,
        }
    }
}

impl PartialOrd for ExtCost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtCost {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtCost::Finite(a), ExtCost::Finite(b)) => a.cmp(b),
            (ExtCost::Finite(_), ExtCost::Infinite) => Ordering::Less,
            (ExtCost::Infinite, ExtCost::Finite(_)) => Ordering::Greater,
            (ExtCost::Infinite, ExtCost::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for ExtCost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtCost::Finite(c) => c.fmt(f),
            ExtCost::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtCost {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// Explicability score: zero means the plan is exactly what the observer
/// expected, more negative means further from expectations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Score {
    NegInfinity,
    Finite(Cost),
}

impl Score {
    pub const PERFECT: Score = Score::Finite(Cost::ZERO);

    pub fn is_perfect(&self) -> bool {
        matches!(self, Score::Finite(c) if c.is_zero())
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Score::Finite(c) => c.to_f64(),
            Score::NegInfinity => f64::NEG_INFINITY,
        }
    }

    /// Distance `-score`, infinite for the `-inf` score.
    pub fn penalty(&self) -> ExtCost {
        match self {
            Score::Finite(c) => ExtCost::Finite(-*c),
            Score::NegInfinity => ExtCost::Infinite,
        }
    }
}

impl PartialOrd for Score {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Score {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Score::Finite(a), Score::Finite(b)) => a.cmp(b),
            (Score::NegInfinity, Score::Finite(_)) => Ordering::Less,
            (Score::Finite(_), Score::NegInfinity) => Ordering::Greater,
            (Score::NegInfinity, Score::NegInfinity) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Score::Finite(c) => c.fmt(f),
            Score::NegInfinity => f.write_str("-inf"),
        }
    }
}

impl Serialize for Score {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integer_fraction_and_decimal() {
        assert_eq!("7".parse::<Cost>().unwrap(), Cost::from_int(7));
        assert_eq!("3/2".parse::<Cost>().unwrap(), Cost::new(3, 2));
        assert_eq!("2.25".parse::<Cost>().unwrap(), Cost::new(9, 4));
        assert_eq!("0.5".parse::<Cost>().unwrap(), Cost::new(1, 2));
        assert!("1/0".parse::<Cost>().is_err());
        assert!("abc".parse::<Cost>().is_err());
        assert!("".parse::<Cost>().is_err());
    }

    #[test]
    fn display_is_canonical() {
        assert_eq!(Cost::new(6, 4).to_string(), "3/2");
        assert_eq!(Cost::new(8, 4).to_string(), "2");
        assert_eq!(ExtCost::Infinite.to_string(), "inf");
        assert_eq!(Score::NegInfinity.to_string(), "-inf");
    }

    #[test]
    fn infinite_sentinels_order_at_the_extremes() {
        assert!(ExtCost::Infinite > ExtCost::Finite(Cost::from_int(1_000_000)));
        assert!(Score::NegInfinity < Score::Finite(Cost::from_int(-1_000_000)));
        assert!(Score::PERFECT.is_perfect());
        assert_eq!(Score::NegInfinity.penalty(), ExtCost::Infinite);
    }
}
