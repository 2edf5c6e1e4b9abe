//! Card configurations: integer partitions (piles sorted by size) and weak
//! compositions (piles ordered by creation time, newest first).

use crate::error::{Error, Result};
use crate::scalar::Real;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Common view over the two configuration representations.
///
/// Parts are indexed from zero here; part `i` is the usual one-based
/// `λ_{i+1}`. Every part past the stored ones is zero.
pub trait Configuration {
    fn parts(&self) -> &[u64];

    /// Total number of cards.
    fn total(&self) -> u64;

    fn part(&self, i: usize) -> u64 {
        self.parts().get(i).copied().unwrap_or(0)
    }

    /// Number of stored parts, disregarding trailing zeros.
    fn len(&self) -> usize {
        self.parts().len()
    }

    fn is_empty(&self) -> bool {
        self.parts().is_empty()
    }

    fn largest_part(&self) -> u64 {
        self.parts().iter().copied().max().unwrap_or(0)
    }

    /// Number of piles holding at least one card.
    fn nonempty_piles(&self) -> usize {
        self.parts().iter().filter(|&&h| h > 0).count()
    }
}

/// Diagram-boundary function `x ↦ part(⌊x⌋)`.
pub fn boundary<C: Configuration + ?Sized, T: Real>(config: &C, x: T) -> Result<u64> {
    if !(x >= T::zero()) {
        return Err(Error::domain(format!("boundary evaluated at x = {x}, need x >= 0")));
    }
    let idx = x.floor().to_usize().unwrap_or(usize::MAX);
    Ok(config.part(idx))
}

/// An integer partition: non-increasing positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct Partition {
    parts: Vec<u64>,
    total: u64,
}

impl Partition {
    /// Validates that `parts` is non-increasing and strictly positive.
    pub fn new(parts: Vec<u64>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::InvalidParams("partition parts must be positive".into()));
        }
        if parts.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::InvalidParams("partition parts must be non-increasing".into()));
        }
        let total = parts.iter().sum();
        Ok(Partition { parts, total })
    }

    /// Sorts arbitrary pile sizes, dropping empty piles.
    pub fn from_unsorted(mut parts: Vec<u64>) -> Self {
        parts.retain(|&h| h > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        let total = parts.iter().sum();
        Partition { parts, total }
    }

    pub fn into_parts(self) -> Vec<u64> {
        self.parts
    }
}

impl Configuration for Partition {
    fn parts(&self) -> &[u64] {
        &self.parts
    }

    fn total(&self) -> u64 {
        self.total
    }

    fn largest_part(&self) -> u64 {
        self.part(0)
    }
}

impl TryFrom<Vec<u64>> for Partition {
    type Error = Error;

    fn try_from(parts: Vec<u64>) -> Result<Self> {
        Partition::new(parts)
    }
}

impl From<Partition> for Vec<u64> {
    fn from(p: Partition) -> Self {
        p.parts
    }
}

/// A weak composition in creation-time order: index 0 holds the newest pile.
///
/// Interior zeros are empty bowls and are kept; trailing zeros are dropped.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "Vec<u64>", into = "Vec<u64>")]
pub struct WeakComposition {
    parts: Vec<u64>,
    total: u64,
}

impl WeakComposition {
    pub fn new(mut parts: Vec<u64>) -> Self {
        while parts.last() == Some(&0) {
            parts.pop();
        }
        let total = parts.iter().sum();
        WeakComposition { parts, total }
    }

    /// The partition obtained by sorting the nonzero parts.
    pub fn ord(&self) -> Partition {
        ord(self)
    }

    pub fn into_parts(self) -> Vec<u64> {
        self.parts
    }

    /// Mutable access for the dynamics; callers must restore the invariants
    /// through [`WeakComposition::renormalize`].
    pub(crate) fn parts_mut(&mut self) -> &mut Vec<u64> {
        &mut self.parts
    }

    pub(crate) fn renormalize(&mut self) {
        while self.parts.last() == Some(&0) {
            self.parts.pop();
        }
        self.total = self.parts.iter().sum();
    }
}

impl Configuration for WeakComposition {
    fn parts(&self) -> &[u64] {
        &self.parts
    }

    fn total(&self) -> u64 {
        self.total
    }
}

impl From<Vec<u64>> for WeakComposition {
    fn from(parts: Vec<u64>) -> Self {
        WeakComposition::new(parts)
    }
}

impl From<WeakComposition> for Vec<u64> {
    fn from(c: WeakComposition) -> Self {
        c.parts
    }
}

impl From<Partition> for WeakComposition {
    fn from(p: Partition) -> Self {
        WeakComposition { parts: p.parts, total: p.total }
    }
}

impl From<&Partition> for WeakComposition {
    fn from(p: &Partition) -> Self {
        p.clone().into()
    }
}

/// Arranges the nonzero parts of a composition in descending order.
pub fn ord<C: Configuration + ?Sized>(alpha: &C) -> Partition {
    Partition::from_unsorted(alpha.parts().to_vec())
}

fn write_parts(f: &mut fmt::Formatter<'_>, parts: &[u64]) -> fmt::Result {
    if parts.is_empty() {
        return write!(f, "0");
    }
    for (i, h) in parts.iter().enumerate() {
        if i > 0 {
            f.write_str("+")?;
        }
        write!(f, "{h}")?;
    }
    Ok(())
}

fn parse_parts(s: &str) -> Result<Vec<u64>> {
    let s = s.trim();
    if s == "0" || s.is_empty() {
        return Ok(Vec::new());
    }
    s.split('+')
        .map(|t| t.trim().parse::<u64>().map_err(|e| Error::InvalidParams(format!("bad part {t:?}: {e}"))))
        .collect()
}

/// Formats as `a+b+c`; the empty configuration prints as `0`.
impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_parts(f, &self.parts)
    }
}

impl fmt::Display for WeakComposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_parts(f, &self.parts)
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Partition::new(parse_parts(s)?)
    }
}

impl FromStr for WeakComposition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(WeakComposition::new(parse_parts(s)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample_alpha() -> WeakComposition {
        WeakComposition::new(vec![3, 0, 2, 4, 1, 0, 0])
    }

    #[test]
    fn boundary_of_small_composition() {
        let alpha = sample_alpha();
        assert_eq!(alpha.len(), 5);
        assert_eq!(boundary(&alpha, 0.5).unwrap(), 3);
        assert_eq!(boundary(&alpha, 1.0).unwrap(), 0);
        assert_eq!(boundary(&alpha, 3.0).unwrap(), 4);
        assert_eq!(boundary(&alpha, 99.0).unwrap(), 0);
    }

    #[test]
    fn boundary_past_last_part_is_zero() {
        let lambda = Partition::new(vec![5]).unwrap();
        assert_eq!(boundary(&lambda, 7.0).unwrap(), 0);
        assert_eq!(boundary(&lambda, 0.999).unwrap(), 5);
    }

    #[test]
    fn boundary_rejects_negative_x() {
        let lambda = Partition::new(vec![5]).unwrap();
        assert!(matches!(boundary(&lambda, -0.1), Err(Error::Domain(_))));
        assert!(matches!(boundary(&lambda, f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn ord_examples() {
        assert_eq!(ord(&sample_alpha()).parts(), &[4, 3, 2, 1]);
        assert_eq!(ord(&WeakComposition::new(vec![5])).parts(), &[5]);
        assert_eq!(ord(&WeakComposition::new(vec![1, 1, 1])).parts(), &[1, 1, 1]);
    }

    #[test]
    fn partition_validation() {
        assert!(Partition::new(vec![3, 1, 2]).is_err());
        assert!(Partition::new(vec![3, 0]).is_err());
        assert_eq!(Partition::new(vec![]).unwrap().total(), 0);
        assert_eq!("4+3+2+1".parse::<Partition>().unwrap().total(), 10);
        assert!("1+2".parse::<Partition>().is_err());
    }

    #[test]
    fn composition_drops_trailing_zeros_only() {
        let c = WeakComposition::new(vec![0, 2, 0, 1, 0, 0]);
        assert_eq!(c.parts(), &[0, 2, 0, 1]);
        assert_eq!(c.total(), 3);
        assert_eq!(c.nonempty_piles(), 2);
        assert_eq!(c.to_string(), "0+2+0+1");
        assert_eq!("0+2+0+1".parse::<WeakComposition>().unwrap(), c);
    }

    #[test]
    fn serde_forms() {
        let p = Partition::new(vec![3, 1]).unwrap();
        let js = serde_json::to_string(&p).unwrap();
        assert_eq!(js, "[3,1]");
        assert_eq!(serde_json::from_str::<Partition>(&js).unwrap(), p);
        assert!(serde_json::from_str::<Partition>("[1,3]").is_err());
    }

    proptest! {
        #[test]
        fn ord_conserves_cards_and_multiset(parts in prop::collection::vec(0u64..20, 0..30)) {
            let alpha = WeakComposition::new(parts.clone());
            let lambda = ord(&alpha);
            prop_assert_eq!(lambda.total(), alpha.total());
            prop_assert_eq!(lambda.len(), alpha.nonempty_piles());
            let mut a: Vec<u64> = parts.into_iter().filter(|&h| h > 0).collect();
            a.sort_unstable();
            let mut b = lambda.parts().to_vec();
            b.reverse();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn partition_boundary_is_weakly_decreasing(parts in prop::collection::vec(1u64..20, 0..30),
                                                   xs in prop::collection::vec(0.0f64..40.0, 2..20)) {
            let lambda = Partition::from_unsorted(parts);
            let mut xs = xs;
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let vals: Vec<u64> = xs.iter().map(|&x| boundary(&lambda, x).unwrap()).collect();
            prop_assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        }

        #[test]
        fn display_parse_roundtrip(parts in prop::collection::vec(0u64..1000, 0..20)) {
            let c = WeakComposition::new(parts);
            prop_assert_eq!(c.to_string().parse::<WeakComposition>().unwrap(), c);
        }
    }
}
