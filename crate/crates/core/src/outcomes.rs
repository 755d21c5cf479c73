//! Measurement outcome tables and wildcard queries over them.
//!
//! Outcomes are keyed by basis strings printed most-significant qubit first:
//! the first qubit of a measured register is the rightmost character.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Formats register value `value` as a `width`-character basis string.
pub fn basis_string(value: usize, width: usize) -> String {
    (0..width).rev().map(|bit| if value >> bit & 1 == 1 { '1' } else { '0' }).collect()
}

/// Exact outcome probabilities over a measured register.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Distribution(BTreeMap<String, f64>);

/// Sampled outcome counts over a measured register.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Histogram(BTreeMap<String, u64>);

impl Distribution {
    pub fn from_map(map: BTreeMap<String, f64>) -> Self {
        Distribution(map)
    }

    /// Probability of one exact outcome; absent outcomes have probability zero.
    pub fn get(&self, outcome: &str) -> f64 {
        self.0.get(outcome).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.0.values().sum()
    }

    /// Total probability of outcomes matching `pattern`.
    pub fn probability(&self, pattern: &Pattern) -> f64 {
        self.iter().filter(|(k, _)| pattern.matches(k)).map(|(_, v)| v).sum()
    }

    pub fn into_inner(self) -> BTreeMap<String, f64> {
        self.0
    }
}

impl Histogram {
    pub fn from_map(map: BTreeMap<String, u64>) -> Self {
        Histogram(map)
    }

    pub fn get(&self, outcome: &str) -> u64 {
        self.0.get(outcome).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn shots(&self) -> u64 {
        self.0.values().sum()
    }

    pub fn count(&self, pattern: &Pattern) -> u64 {
        self.iter().filter(|(k, _)| pattern.matches(k)).map(|(_, v)| v).sum()
    }

    /// Fraction of shots matching `pattern`.
    pub fn frequency(&self, pattern: &Pattern) -> f64 {
        let shots = self.shots();
        if shots == 0 {
            0.0
        } else {
            self.count(pattern) as f64 / shots as f64
        }
    }

    pub fn into_inner(self) -> BTreeMap<String, u64> {
        self.0
    }
}

/// A basis string with `*` wildcards, e.g. `*1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pattern(String);

impl Pattern {
    pub fn new(pattern: &str, width: usize) -> Result<Self> {
        let ok = pattern.len() == width && pattern.chars().all(|c| matches!(c, '0' | '1' | '*'));
        if ok {
            Ok(Pattern(pattern.to_string()))
        } else {
            Err(Error::Pattern { pattern: pattern.to_string(), width })
        }
    }

    /// Pattern fixing the single register position `position` (0 = rightmost) to `value`.
    pub fn single(width: usize, position: usize, value: u8) -> Result<Self> {
        if position >= width || value > 1 {
            return Err(Error::Pattern { pattern: format!("q{position}={value}"), width });
        }
        let s = (0..width)
            .rev()
            .map(|bit| if bit == position { char::from(b'0' + value) } else { '*' })
            .collect::<String>();
        Ok(Pattern(s))
    }

    pub fn width(&self) -> usize {
        self.0.len()
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn matches(&self, outcome: &str) -> bool {
        outcome.len() == self.0.len() && self.0.bytes().zip(outcome.bytes()).all(|(p, o)| p == b'*' || p == o)
    }

    /// True when every outcome matching `self` also matches `other`.
    pub fn refines(&self, other: &Pattern) -> bool {
        self.width() == other.width() && self.0.bytes().zip(other.0.bytes()).all(|(s, o)| o == b'*' || s == o)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Ratio query `#numerator / #condition` used to read conditionals off a
/// register that was never measured mid-circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionalRatioQuery {
    numerator: Pattern,
    condition: Pattern,
}

impl ConditionalRatioQuery {
    pub fn new(numerator: &str, condition: &str) -> Result<Self> {
        let width = numerator.len();
        let numerator = Pattern::new(numerator, width)?;
        let condition = Pattern::new(condition, width)?;
        if !numerator.refines(&condition) {
            return Err(Error::PatternRefinement {
                numerator: numerator.to_string(),
                condition: condition.to_string(),
            });
        }
        Ok(ConditionalRatioQuery { numerator, condition })
    }

    pub fn numerator(&self) -> &Pattern {
        &self.numerator
    }

    pub fn condition(&self) -> &Pattern {
        &self.condition
    }

    pub fn width(&self) -> usize {
        self.numerator.width()
    }
}

/// `(counts matching numerator) / (counts matching condition)`.
pub fn conditional_ratio(histogram: &Histogram, query: &ConditionalRatioQuery) -> Result<f64> {
    let denominator = histogram.count(&query.condition);
    if denominator == 0 {
        return Err(Error::UndefinedConditional(query.condition.to_string()));
    }
    Ok(histogram.count(&query.numerator) as f64 / denominator as f64)
}

/// Exact-mode counterpart of [`conditional_ratio`].
pub fn exact_conditional_ratio(distribution: &Distribution, query: &ConditionalRatioQuery) -> Result<f64> {
    let denominator = distribution.probability(&query.condition);
    if denominator <= 0.0 {
        return Err(Error::UndefinedConditional(query.condition.to_string()));
    }
    Ok(distribution.probability(&query.numerator) / denominator)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hist(entries: &[(&str, u64)]) -> Histogram {
        Histogram::from_map(entries.iter().map(|(k, v)| (k.to_string(), *v)).collect())
    }

    #[test]
    fn basis_strings_are_msb_first() {
        assert_eq!(basis_string(0b10, 2), "10");
        assert_eq!(basis_string(1, 3), "001");
        assert_eq!(basis_string(0, 1), "0");
    }

    #[test]
    fn ratio_arithmetic() {
        let h = hist(&[("01", 300), ("11", 100)]);
        let q = ConditionalRatioQuery::new("01", "*1").unwrap();
        assert_eq!(conditional_ratio(&h, &q).unwrap(), 0.75);
    }

    #[test]
    fn zero_count_condition_is_an_error() {
        let h = hist(&[("00", 10)]);
        let q = ConditionalRatioQuery::new("01", "*1").unwrap();
        assert!(matches!(conditional_ratio(&h, &q), Err(Error::UndefinedConditional(_))));
    }

    #[test]
    fn numerator_must_refine_condition() {
        assert!(ConditionalRatioQuery::new("0*", "*1").is_err());
        assert!(ConditionalRatioQuery::new("01", "*10").is_err());
        assert!(ConditionalRatioQuery::new("0x", "**").is_err());
    }

    #[test]
    fn single_position_pattern() {
        let p = Pattern::single(3, 0, 1).unwrap();
        assert_eq!(p.as_str(), "**1");
        assert!(p.matches("101"));
        assert!(!p.matches("110"));
        assert_eq!(Pattern::single(3, 2, 0).unwrap().as_str(), "0**");
    }
}
