use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::sieve::SievedSet;
use super::AdmissibleTuple;
use crate::error::{Error, Result};

const RANDOM_ATTEMPTS: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Scan left to right, keeping every element far enough from the last pick.
    FirstFit,
    /// Pick uniformly from what is left after each exclusion, seeded.
    Random(u64),
}

fn first_fit(elements: &[u64], k: usize, spacing: u64) -> Option<Vec<u64>> {
    let mut chosen: Vec<u64> = Vec::with_capacity(k);
    for &e in elements {
        if chosen.len() == k {
            break;
        }
        if chosen.last().is_none_or(|&last| e - last > spacing) {
            chosen.push(e);
        }
    }
    (chosen.len() == k).then_some(chosen)
}

fn random_exclusion(
    elements: &[u64],
    k: usize,
    spacing: u64,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<u64>> {
    let mut pool = elements.to_vec();
    let mut chosen = Vec::with_capacity(k);
    for _ in 0..k {
        if pool.is_empty() {
            return None;
        }
        let h = pool[rng.random_range(0..pool.len())];
        chosen.push(h);
        let lo = pool.partition_point(|&e| e < h.saturating_sub(spacing));
        let hi = pool.partition_point(|&e| e <= h.saturating_add(spacing));
        pool.drain(lo..hi);
    }
    chosen.sort_unstable();
    Some(chosen)
}

/// Picks `k` elements of `set` whose pairwise distances all exceed `spacing`.
///
/// Each pick removes the closed ball of radius `spacing` around it from the
/// pool. First-fit is optimal on a line, so `None` means no such selection
/// exists. The random strategy falls back to first-fit after a bounded number
/// of unlucky draws, so it has the same `None` semantics.
///
/// Fails with a domain error if the selection is not admissible, which can
/// only happen when `set` was not sieved for every prime `<= k`.
pub fn select_spaced(
    set: &SievedSet,
    k: usize,
    spacing: u64,
    strategy: Strategy,
) -> Result<Option<AdmissibleTuple>> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if spacing == 0 {
        return Err(Error::invalid("spacing must be at least 1"));
    }
    let picked = match strategy {
        Strategy::FirstFit => first_fit(set.elements(), k, spacing),
        Strategy::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..RANDOM_ATTEMPTS)
                .find_map(|_| random_exclusion(set.elements(), k, spacing, &mut rng))
                .or_else(|| first_fit(set.elements(), k, spacing))
        }
    };
    picked
        .map(|offsets| AdmissibleTuple::new(offsets, set.window()))
        .transpose()
}

/// Exact number of spaced `k`-subsets next to the product lower bound.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacedCount {
    pub exact: BigUint,
    /// `(1/k!) * prod_{i=1..k} max(0, |A| - 2(i-1)*spacing)`.
    pub bound: f64,
}

impl SpacedCount {
    pub fn exact_f64(&self) -> f64 {
        self.exact.to_f64().unwrap_or(f64::INFINITY)
    }

    /// Whether the exact count meets the product bound.
    pub fn bound_holds(&self) -> bool {
        self.exact_f64() >= self.bound
    }
}

/// Counts `k`-subsets of `set` with every pairwise gap greater than `spacing`.
///
/// `ways[j][i]` is the number of valid `j`-subsets whose largest element is
/// `elements[i]`; it is a prefix sum of `ways[j-1]` over the elements that sit
/// more than `spacing` below `elements[i]`.
pub fn count_spaced_selections(set: &SievedSet, k: usize, spacing: u64) -> Result<SpacedCount> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let e = set.elements();
    let n = e.len();
    // reach[i] = number of elements strictly below e[i] - spacing
    let reach: Vec<usize> = e
        .iter()
        .map(|&x| match x.checked_sub(spacing) {
            Some(t) => e.partition_point(|&y| y < t),
            None => 0,
        })
        .collect();

    let mut ways: Vec<BigUint> = vec![BigUint::from(1u32); n];
    for _ in 1..k {
        let mut prefix = Vec::with_capacity(n + 1);
        prefix.push(BigUint::zero());
        for w in &ways {
            let next = prefix.last().unwrap() + w;
            prefix.push(next);
        }
        ways = reach.iter().map(|&r| prefix[r].clone()).collect();
    }
    let exact = ways.iter().fold(BigUint::zero(), |acc, w| acc + w);

    let mut bound = 1.0f64;
    for i in 1..=k as u64 {
        let term = n as f64 - 2.0 * (i - 1) as f64 * spacing as f64;
        bound *= term.max(0.0);
        bound /= i as f64;
    }
    Ok(SpacedCount { exact, bound })
}
