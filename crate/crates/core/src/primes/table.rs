//! Segmented sieve of Eratosthenes over the odd integers.
//!
//! Bit `i` of the table stands for the odd number `2i + 3`; the prime 2 is
//! handled out of band. A small rank directory (one cumulative count per
//! block of eight words) makes `pi(n)` and interval counts O(1).

use rayon::prelude::*;

use super::filter::PrimeFilter;
use crate::error::{Error, Result};

/// Default number of odd entries per sieve segment (32 KiB of bits).
pub const DEFAULT_SEGMENT_SIZE: usize = 1 << 18;

/// Default ceiling on the memory a single table may use.
pub const DEFAULT_MEMORY_BUDGET: u64 = 4 << 30;

const WORDS_PER_BLOCK: usize = 8;

#[derive(Debug, Clone, Copy)]
pub struct SieveConfig {
    /// Odd entries per segment. Rounded up to a whole number of 64-bit words.
    pub segment_size: usize,
    pub memory_budget: u64,
}

impl Default for SieveConfig {
    fn default() -> Self {
        SieveConfig {
            segment_size: DEFAULT_SEGMENT_SIZE,
            memory_budget: DEFAULT_MEMORY_BUDGET,
        }
    }
}

/// Immutable set of all primes up to `limit`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    words: Vec<u64>,
    block_ranks: Vec<u64>,
    count: u64,
}

fn odd_bits(limit: u64) -> u64 {
    if limit < 3 {
        0
    } else {
        (limit - 3) / 2 + 1
    }
}

/// Bytes a table up to `limit` occupies (bitmap plus rank directory).
pub fn required_bytes(limit: u64) -> u64 {
    let words = odd_bits(limit).div_ceil(64);
    let blocks = words.div_ceil(WORDS_PER_BLOCK as u64) + 1;
    (words + blocks) * 8
}

fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

/// All primes `<= n` by a plain sieve. Used for base primes and small products.
pub fn small_primes(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i.saturating_mul(i);
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

impl PrimeTable {
    /// Sieves all primes up to `limit` with the default memory budget.
    pub fn build(limit: u64, segment_size: usize) -> Result<Self> {
        Self::build_with(
            limit,
            SieveConfig {
                segment_size,
                ..SieveConfig::default()
            },
        )
    }

    pub fn build_with(limit: u64, config: SieveConfig) -> Result<Self> {
        if limit < 2 {
            return Err(Error::invalid(format!(
                "sieve limit must be at least 2, got {limit}"
            )));
        }
        if config.segment_size < 64 {
            return Err(Error::invalid(format!(
                "segment size must be at least 64, got {}",
                config.segment_size
            )));
        }
        let required = required_bytes(limit);
        if required > config.memory_budget {
            return Err(Error::Resource {
                limit,
                required_bytes: required,
                budget_bytes: config.memory_budget,
            });
        }

        let bits = odd_bits(limit);
        let n_words = bits.div_ceil(64) as usize;
        let mut words = vec![!0u64; n_words];
        let base: Vec<u64> = small_primes(isqrt(limit))
            .into_iter()
            .filter(|&p| p > 2)
            .collect();
        let words_per_segment = config.segment_size.div_ceil(64);

        words
            .par_chunks_mut(words_per_segment)
            .enumerate()
            .for_each(|(seg, chunk)| {
                let first_bit = (seg * words_per_segment * 64) as u64;
                sieve_segment(chunk, first_bit, &base);
            });

        if !bits.is_multiple_of(64) {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << (bits % 64)) - 1;
            }
        }
        Ok(Self::from_words(limit, words))
    }

    pub(crate) fn from_words(limit: u64, words: Vec<u64>) -> Self {
        let mut block_ranks = Vec::with_capacity(words.len() / WORDS_PER_BLOCK + 2);
        let mut acc = 0u64;
        for block in words.chunks(WORDS_PER_BLOCK) {
            block_ranks.push(acc);
            acc += block.iter().map(|w| w.count_ones() as u64).sum::<u64>();
        }
        block_ranks.push(acc);
        let count = acc + u64::from(limit >= 2);
        PrimeTable {
            limit,
            words,
            block_ranks,
            count,
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Number of primes `<= limit`.
    pub fn count(&self) -> u64 {
        self.count
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    /// Primality of `n`.
    ///
    /// # Panics
    ///
    /// If `n > limit`.
    pub fn is_prime(&self, n: u64) -> bool {
        assert!(
            n <= self.limit,
            "{n} is beyond the table limit {}",
            self.limit
        );
        match n {
            0 | 1 => false,
            2 => true,
            _ if n.is_multiple_of(2) => false,
            _ => {
                let i = (n - 3) / 2;
                self.words[(i / 64) as usize] >> (i % 64) & 1 == 1
            }
        }
    }

    /// `pi(n)`: the number of primes `<= n`, with `n` clamped to the limit.
    pub fn pi(&self, n: u64) -> u64 {
        let n = n.min(self.limit);
        if n < 2 {
            return 0;
        }
        if n < 3 {
            return 1;
        }
        let i = (n - 3) / 2;
        let w = (i / 64) as usize;
        let block = w / WORDS_PER_BLOCK;
        let mut r = self.block_ranks[block];
        for word in &self.words[block * WORDS_PER_BLOCK..w] {
            r += word.count_ones() as u64;
        }
        let bit = i % 64;
        let mask = if bit == 63 {
            !0
        } else {
            (1u64 << (bit + 1)) - 1
        };
        r += (self.words[w] & mask).count_ones() as u64;
        r + 1
    }

    /// Primes `p` with `lo <= p <= hi`, ascending. `hi` is clamped to the limit.
    pub fn primes_between(&self, lo: u64, hi: u64) -> Primes<'_> {
        Primes::new(self, lo, hi.min(self.limit))
    }

    /// Number of primes in the closed real interval `[lo, hi]` that pass `filter`.
    pub fn count_in(&self, lo: f64, hi: f64, filter: &PrimeFilter) -> Result<u64> {
        if !(lo.is_finite() && hi.is_finite()) || lo < 0.0 || lo > hi {
            return Err(Error::invalid(format!(
                "need 0 <= lo <= hi, got [{lo}, {hi}]"
            )));
        }
        if hi > self.limit as f64 {
            return Err(Error::OutOfRange {
                what: "count_in",
                required: hi.floor() as u64,
                limit: self.limit,
            });
        }
        let lo_i = lo.ceil() as u64;
        let hi_i = hi.floor() as u64;
        if lo_i > hi_i {
            return Ok(0);
        }
        Ok(match filter {
            PrimeFilter::All => self.pi(hi_i) - self.pi(lo_i.saturating_sub(1)),
            _ => self
                .primes_between(lo_i, hi_i)
                .filter(|&p| filter.accepts(p))
                .count() as u64,
        })
    }

    /// Sorted primes `<= hi` passing `filter`.
    pub fn filtered_primes(&self, lo: u64, hi: u64, filter: &PrimeFilter) -> Vec<u64> {
        match filter {
            PrimeFilter::All => self.primes_between(lo, hi).collect(),
            _ => self
                .primes_between(lo, hi)
                .filter(|&p| filter.accepts(p))
                .collect(),
        }
    }
}

fn sieve_segment(chunk: &mut [u64], first_bit: u64, base: &[u64]) {
    let end_bit = first_bit + chunk.len() as u64 * 64;
    // odd numbers covered: 2*first_bit + 3 ..= 2*(end_bit - 1) + 3
    let lo = 2 * first_bit + 3;
    let hi = 2 * (end_bit - 1) + 3;
    for &p in base {
        let sq = p * p;
        if sq > hi {
            break;
        }
        let mut start = if sq >= lo {
            sq
        } else {
            let m = lo.div_ceil(p) * p;
            if m % 2 == 0 {
                m + p
            } else {
                m
            }
        };
        if start > hi {
            continue;
        }
        start = (start - 3) / 2 - first_bit;
        let mut i = start as usize;
        let limit = chunk.len() * 64;
        let step = p as usize;
        while i < limit {
            chunk[i >> 6] &= !(1u64 << (i & 63));
            i += step;
        }
    }
}

/// Ascending iterator over the set bits of a [`PrimeTable`] in a range.
pub struct Primes<'a> {
    table: &'a PrimeTable,
    emit_two: bool,
    word_idx: usize,
    current: u64,
    end_bit: u64,
}

impl<'a> Primes<'a> {
    fn new(table: &'a PrimeTable, lo: u64, hi: u64) -> Self {
        let emit_two = lo <= 2 && hi >= 2;
        let lo_odd = lo.max(3);
        if hi < 3 || lo_odd > hi || table.words.is_empty() {
            return Primes {
                table,
                emit_two,
                word_idx: 0,
                current: 0,
                end_bit: 0,
            };
        }
        let start_bit = (lo_odd - 2) / 2; // first odd >= lo_odd
        let end_bit = (hi - 3) / 2 + 1;
        let word_idx = (start_bit / 64) as usize;
        let current = table.words[word_idx] & (!0u64 << (start_bit % 64));
        Primes {
            table,
            emit_two,
            word_idx,
            current,
            end_bit,
        }
    }
}

impl Iterator for Primes<'_> {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        if self.emit_two {
            self.emit_two = false;
            return Some(2);
        }
        loop {
            if self.current != 0 {
                let bit = self.word_idx as u64 * 64 + self.current.trailing_zeros() as u64;
                if bit >= self.end_bit {
                    self.current = 0;
                    self.end_bit = 0;
                    return None;
                }
                self.current &= self.current - 1;
                return Some(2 * bit + 3);
            }
            self.word_idx += 1;
            if self.word_idx as u64 * 64 >= self.end_bit {
                return None;
            }
            self.current = self.table.words[self.word_idx];
        }
    }
}
