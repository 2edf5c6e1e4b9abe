//! Exact rational proportion `q ∈ (0, 1]`.

use crate::error::{Error, Result};
use crate::scalar::Real;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// A proportion in `(0, 1]`, kept as a reduced fraction so `⌈q h⌉` is exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Proportion(Ratio<u64>);

impl Proportion {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 || num == 0 || num > den {
            return Err(Error::InvalidParams("q must be in (0,1]".into()));
        }
        Ok(Proportion(Ratio::new(num, den)))
    }

    pub const ONE: Proportion = Proportion(Ratio::new_raw(1, 1));

    pub fn numer(&self) -> u64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> u64 {
        *self.0.denom()
    }

    /// `⌈q h⌉` in exact integer arithmetic.
    pub fn ceil_mul(&self, h: u64) -> u64 {
        let (num, den) = (self.numer() as u128, self.denom() as u128);
        (num * h as u128).div_ceil(den) as u64
    }

    /// Exact test of `(1 - q) a ≥ b`.
    pub fn complement_mul_ge(&self, a: u64, b: u64) -> bool {
        let (num, den) = (self.numer() as u128, self.denom() as u128);
        (den - num) * a as u128 >= den * b as u128
    }

    pub fn to_real<T: Real>(&self) -> T {
        T::of_u64(self.numer()) / T::of_u64(self.denom())
    }

    pub fn to_f64(&self) -> f64 {
        self.to_real()
    }
}

impl fmt::Display for Proportion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

/// Parses `num/den`.
impl FromStr for Proportion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (num, den) = s
            .trim()
            .split_once('/')
            .ok_or_else(|| Error::InvalidParams(format!("q must be written num/den, got {s:?}")))?;
        let parse = |t: &str| {
            t.trim().parse::<u64>().map_err(|_| Error::InvalidParams(format!("q must be written num/den, got {s:?}")))
        };
        Proportion::new(parse(num)?, parse(den)?)
    }
}

impl TryFrom<String> for Proportion {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Proportion> for String {
    fn from(q: Proportion) -> Self {
        q.to_string()
    }
}
