//! Exact coefficient rings.
//!
//! Every coefficient is stored as a [`Scalar`] (an arbitrary precision
//! rational) and normalised by the owning [`CoefficientRing`] after each
//! operation: integers stay integral, residues stay in `0..n`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Scalar = BigRational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CoefficientRing {
    #[serde(rename = "Z")]
    Integers,
    #[serde(rename = "Q")]
    Rationals,
    Zmod(u64),
}

impl CoefficientRing {
    pub fn validate(&self) -> Result<()> {
        match self {
            CoefficientRing::Zmod(n) if *n < 2 => Err(Error::MalformedDescriptor(format!(
                "modulus must be at least 2, got {n}"
            ))),
            _ => Ok(()),
        }
    }

    /// Brings an integral or rational value into normal form for this ring.
    pub fn reduce(&self, x: Scalar) -> Scalar {
        match self {
            CoefficientRing::Zmod(n) => {
                debug_assert!(x.is_integer());
                let n = BigInt::from(*n);
                Scalar::from_integer(x.to_integer().mod_floor(&n))
            }
            _ => x,
        }
    }

    pub fn from_i64(&self, v: i64) -> Scalar {
        self.reduce(Scalar::from_integer(BigInt::from(v)))
    }

    pub fn zero(&self) -> Scalar {
        Scalar::zero()
    }

    pub fn one(&self) -> Scalar {
        self.reduce(Scalar::one())
    }

    pub fn add(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.reduce(a + b)
    }

    pub fn sub(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.reduce(a - b)
    }

    pub fn neg(&self, a: &Scalar) -> Scalar {
        self.reduce(-a)
    }

    pub fn mul(&self, a: &Scalar, b: &Scalar) -> Scalar {
        self.reduce(a * b)
    }

    /// Parses `"p"` or `"p/q"`; rationals are rejected outside of Q.
    pub fn parse(&self, s: &str) -> Result<Scalar> {
        let bad = || Error::InvalidCoefficient {
            value: s.to_string(),
            ring: self.to_string(),
        };
        let t = s.trim();
        let x = match t.split_once('/') {
            Some((p, q)) => {
                let p: BigInt = p.trim().parse().map_err(|_| bad())?;
                let q: BigInt = q.trim().parse().map_err(|_| bad())?;
                if q.is_zero() {
                    return Err(bad());
                }
                Scalar::new(p, q)
            }
            None => Scalar::from_integer(t.parse::<BigInt>().map_err(|_| bad())?),
        };
        if !matches!(self, CoefficientRing::Rationals) && !x.is_integer() {
            return Err(bad());
        }
        Ok(self.reduce(x))
    }

    pub fn format(&self, x: &Scalar) -> String {
        format_scalar(x)
    }
}

impl fmt::Display for CoefficientRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoefficientRing::Integers => write!(f, "Z"),
            CoefficientRing::Rationals => write!(f, "Q"),
            CoefficientRing::Zmod(n) => write!(f, "Z/{n}"),
        }
    }
}

pub fn format_scalar(x: &Scalar) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses a rational literal `"p"` or `"p/q"` without ring restrictions.
pub fn parse_rational(s: &str) -> Result<Scalar> {
    CoefficientRing::Rationals.parse(s)
}
