//! Admissible k-tuples: construction by greedy sieving, spaced selection,
//! counting and the singular series.

mod select;
mod series;
mod sieve;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primes::small_primes;

pub use select::{count_spaced_selections, select_spaced, SpacedCount, Strategy};
pub use series::singular_series;
pub use sieve::{greedy_sieve, progression_tuple, RemovedClass, SievedSet};

fn check_strictly_increasing(offsets: &[u64]) -> Result<()> {
    if offsets.is_empty() {
        return Err(Error::invalid("offsets must be non-empty"));
    }
    if let Some(w) = offsets.windows(2).find(|w| w[0] >= w[1]) {
        return Err(Error::invalid(format!(
            "offsets must be strictly increasing, found {} then {}",
            w[0], w[1]
        )));
    }
    Ok(())
}

/// Smallest prime `p` whose residue classes are all hit by `offsets`, if any.
///
/// Only primes `p <= k` can be covered by `k` offsets.
pub fn covered_prime(offsets: &[u64]) -> Result<Option<u64>> {
    check_strictly_increasing(offsets)?;
    let k = offsets.len() as u64;
    let mut seen = Vec::new();
    for p in small_primes(k) {
        seen.clear();
        seen.resize(p as usize, false);
        let mut distinct = 0;
        for &h in offsets {
            let r = (h % p) as usize;
            if !seen[r] {
                seen[r] = true;
                distinct += 1;
            }
        }
        if distinct == p {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

/// Whether no prime has all of its residue classes covered by `offsets`.
pub fn is_admissible(offsets: &[u64]) -> Result<bool> {
    Ok(covered_prime(offsets)?.is_none())
}

/// Parses the exchange format `h1,h2,...,hk`.
pub fn parse_offsets(line: &str) -> Result<Vec<u64>> {
    let offsets = line
        .trim()
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<u64>()
                .map_err(|e| Error::invalid(format!("bad offset {s:?}: {e}")))
        })
        .collect::<Result<Vec<_>>>()?;
    check_strictly_increasing(&offsets)?;
    Ok(offsets)
}

/// An admissible set of offsets drawn from the window `[0, span]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleTuple {
    offsets: Vec<u64>,
    span: f64,
    min_gap: Option<u64>,
}

impl AdmissibleTuple {
    pub fn new(offsets: Vec<u64>, span: f64) -> Result<Self> {
        if let Some(p) = covered_prime(&offsets)? {
            return Err(Error::Domain(format!("offsets cover every class mod {p}")));
        }
        let last = *offsets.last().unwrap();
        if last as f64 > span {
            return Err(Error::invalid(format!(
                "offset {last} lies beyond the span {span}"
            )));
        }
        let min_gap = offsets.windows(2).map(|w| w[1] - w[0]).min();
        Ok(AdmissibleTuple {
            offsets,
            span,
            min_gap,
        })
    }

    /// Tuple read from the exchange format, with span equal to its largest offset.
    pub fn parse(line: &str) -> Result<Self> {
        let offsets = parse_offsets(line)?;
        let span = *offsets.last().unwrap() as f64;
        Self::new(offsets, span)
    }

    pub fn offsets(&self) -> &[u64] {
        &self.offsets
    }

    pub fn k(&self) -> usize {
        self.offsets.len()
    }

    pub fn span(&self) -> f64 {
        self.span
    }

    /// Smallest gap between neighbours; `None` for a single offset.
    pub fn min_gap(&self) -> Option<u64> {
        self.min_gap
    }
}

impl fmt::Display for AdmissibleTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, h) in self.offsets.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{h}")?;
        }
        Ok(())
    }
}
