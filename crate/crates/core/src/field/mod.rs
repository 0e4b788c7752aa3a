//! Exact scalars and elementary number theory.

pub mod arith;
pub mod kronecker;
pub mod quadtower;

use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use arith::{divisors, factorize, gamma0_index, is_fundamental, is_prime, sigma, squarefree_part};
pub use kronecker::kronecker;
pub use quadtower::{Qt, QuadTowerNumber};

pub type Rational = BigRational;

/// A positive fundamental discriminant, or 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct Discriminant(i64);

impl Discriminant {
    pub fn new(d: i64) -> Result<Self> {
        if d >= 1 && is_fundamental(d) {
            Ok(Self(d))
        } else {
            Err(Error::NotFundamental(d))
        }
    }

    pub fn get(self) -> i64 {
        self.0
    }

    /// The positive square root `g * sqrt(s)`.
    pub fn sqrt_of(self) -> Qt {
        Qt::sqrt(self.0)
    }

    pub fn kronecker(self, n: i64) -> i32 {
        kronecker(self.0, n)
    }
}

impl TryFrom<i64> for Discriminant {
    type Error = Error;
    fn try_from(d: i64) -> Result<Self> {
        Self::new(d)
    }
}

impl From<Discriminant> for i64 {
    fn from(d: Discriminant) -> i64 {
        d.0
    }
}

impl fmt::Display for Discriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_roots_of_discriminants() {
        assert_eq!(Discriminant::new(8).unwrap().sqrt_of().to_string(), "2*sqrt(2)");
        assert_eq!(Discriminant::new(1).unwrap().sqrt_of(), Qt::one());
        assert_eq!(Discriminant::new(13).unwrap().sqrt_of().to_string(), "sqrt(13)");
        assert_eq!(Discriminant::new(9), Err(Error::NotFundamental(9)));
        assert_eq!(Discriminant::new(-4), Err(Error::NotFundamental(-4)));
    }
}
