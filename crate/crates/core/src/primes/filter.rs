use std::fmt;

use serde::{Deserialize, Serialize};

use super::kronecker::{is_fundamental_discriminant, kronecker_symbol};
use crate::error::{Error, Result};

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Which primes a query sees.
///
/// `Residue` keeps primes `p = a (mod q)`. `Kronecker` keeps primes with
/// `(d/p) = sign` for a fundamental discriminant `d`, which for the field
/// `Q(sqrt d)` selects the split (`+1`) or inert (`-1`) unramified primes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PrimeFilter {
    All,
    Residue { a: u64, q: u64 },
    Kronecker { d: i64, sign: i8 },
}

impl PrimeFilter {
    pub fn residue(a: u64, q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::invalid("modulus must be at least 1"));
        }
        if a >= q {
            return Err(Error::invalid(format!(
                "residue {a} must be below the modulus {q}"
            )));
        }
        if gcd(a, q) != 1 {
            return Err(Error::invalid(format!("residue {a} is not coprime to {q}")));
        }
        Ok(PrimeFilter::Residue { a, q })
    }

    pub fn kronecker(d: i64, sign: i8) -> Result<Self> {
        if !is_fundamental_discriminant(d) {
            return Err(Error::invalid(format!(
                "{d} is not a fundamental discriminant"
            )));
        }
        if sign != 1 && sign != -1 {
            return Err(Error::invalid(format!(
                "splitting class must be +1 or -1, got {sign}"
            )));
        }
        Ok(PrimeFilter::Kronecker { d, sign })
    }

    /// Whether the prime `p` passes. Not meaningful for composite `p`.
    #[inline]
    pub fn accepts(&self, p: u64) -> bool {
        match *self {
            PrimeFilter::All => true,
            PrimeFilter::Residue { a, q } => p % q == a,
            PrimeFilter::Kronecker { d, sign } => kronecker_symbol(d, p) == sign,
        }
    }
}

impl fmt::Display for PrimeFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimeFilter::All => write!(f, "all"),
            PrimeFilter::Residue { a, q } => write!(f, "res{a}mod{q}"),
            PrimeFilter::Kronecker { d, sign } => {
                write!(f, "kron{d}{}", if *sign > 0 { "+" } else { "-" })
            }
        }
    }
}
