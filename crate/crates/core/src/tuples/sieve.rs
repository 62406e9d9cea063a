use serde::{Deserialize, Serialize};

use super::select::{select_spaced, Strategy};
use super::AdmissibleTuple;
use crate::error::{Error, Result};
use crate::primes::small_primes;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RemovedClass {
    pub prime: u64,
    pub residue: u64,
}

/// Survivors of the greedy sieve on `[0, window]`, with the classes it removed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SievedSet {
    elements: Vec<u64>,
    window: f64,
    removed: Vec<RemovedClass>,
}

impl SievedSet {
    /// Wraps an arbitrary sorted set, with no removal log.
    pub fn from_elements(elements: Vec<u64>, window: f64) -> Result<Self> {
        if elements.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("elements must be strictly increasing"));
        }
        Ok(SievedSet {
            elements,
            window,
            removed: Vec::new(),
        })
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn window(&self) -> f64 {
        self.window
    }

    pub fn removed(&self) -> &[RemovedClass] {
        &self.removed
    }
}

/// Sieves `{0, 1, ..., floor(window)}` by removing, for each prime `p <= k` in
/// increasing order, the residue class mod `p` with the fewest survivors.
/// Ties go to the smallest residue.
pub fn greedy_sieve(window: f64, k: u64) -> Result<SievedSet> {
    if !window.is_finite() || window < 1.0 {
        return Err(Error::invalid(format!(
            "window must be at least 1, got {window}"
        )));
    }
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let mut elements: Vec<u64> = (0..=window.floor() as u64).collect();
    let mut removed = Vec::new();
    let mut sizes = Vec::new();
    for p in small_primes(k) {
        sizes.clear();
        sizes.resize(p as usize, 0usize);
        for &e in &elements {
            sizes[(e % p) as usize] += 1;
        }
        let residue = (0..p as usize).min_by_key(|&r| (sizes[r], r)).unwrap() as u64;
        elements.retain(|&e| e % p != residue);
        removed.push(RemovedClass { prime: p, residue });
    }
    Ok(SievedSet {
        elements,
        window,
        removed,
    })
}

/// A well-spaced admissible tuple whose offsets all lie in `a (mod q)`.
///
/// Offsets are written `h = a + q b`; the greedy sieve and the spaced
/// selection run on the `b` coordinates (with `b`-spacing `spacing`) and the
/// result is mapped back.
pub fn progression_tuple(
    window: f64,
    k: u64,
    a: u64,
    q: u64,
    spacing: u64,
    strategy: Strategy,
) -> Result<Option<AdmissibleTuple>> {
    // Reuse the filter's validation of a and q.
    crate::primes::PrimeFilter::residue(a, q)?;
    let b_window = (window - a as f64) / q as f64;
    if b_window < 1.0 {
        return Err(Error::invalid(format!(
            "window {window} leaves fewer than two offsets of the form {a} + {q}b"
        )));
    }
    let b_set = greedy_sieve(b_window, k)?;
    let Some(b_tuple) = select_spaced(&b_set, k as usize, spacing, strategy)? else {
        return Ok(None);
    };
    let offsets = b_tuple.offsets().iter().map(|b| a + q * b).collect();
    AdmissibleTuple::new(offsets, window).map(Some)
}
