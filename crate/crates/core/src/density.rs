//! Density of starting points `n <= x` whose interval `[n, n + lambda ln n]`
//! holds exactly `m` (filtered) primes.

use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::sig12;
use crate::primes::{PrimeFilter, PrimeTable};

const CHUNK: u64 = 1 << 20;

/// Largest integer in `[n, n + lambda ln n]`.
#[inline]
pub fn right_end(n: u64, lambda: f64) -> u64 {
    let nf = n as f64;
    (nf + lambda * nf.ln()).floor() as u64
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::invalid(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    Ok(())
}

/// Table limit needed to measure up to `x`: `x + lambda ln x + 1`.
pub fn required_limit(lambda: f64, x: u64) -> u64 {
    right_end(x.max(1), lambda) + 1
}

fn check_table(table: &PrimeTable, lambda: f64, x: u64) -> Result<u64> {
    let required = required_limit(lambda, x);
    if required > table.limit() {
        return Err(Error::OutOfRange {
            what: "density measurement",
            required,
            limit: table.limit(),
        });
    }
    Ok(required)
}

/// Walks `n` over `range` with two pointers into the sorted `primes`, handing
/// each `n` and its window count to `visit`. Both window edges are
/// non-decreasing in `n`, so each pointer only moves forward.
pub(crate) fn sweep(
    primes: &[u64],
    lambda: f64,
    lo: u64,
    hi: u64,
    mut visit: impl FnMut(u64, u32),
) {
    if lo > hi {
        return;
    }
    let mut left = primes.partition_point(|&p| p < lo);
    let mut right = primes.partition_point(|&p| p <= right_end(lo, lambda));
    for n in lo..=hi {
        while left < primes.len() && primes[left] < n {
            left += 1;
        }
        let end = right_end(n, lambda);
        while right < primes.len() && primes[right] <= end {
            right += 1;
        }
        visit(n, (right.max(left) - left) as u32);
    }
}

/// Per-`n` window counts for `n` in `[lo, hi]`.
pub fn window_counts(
    table: &PrimeTable,
    lambda: f64,
    lo: u64,
    hi: u64,
    filter: &PrimeFilter,
) -> Result<Vec<u32>> {
    check_lambda(lambda)?;
    let lo = lo.max(1);
    let upper = check_table(table, lambda, hi)?;
    let primes = table.filtered_primes(lo, upper, filter);
    let mut out = Vec::with_capacity(hi.saturating_sub(lo) as usize + 1);
    sweep(&primes, lambda, lo, hi, |_, c| out.push(c));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub lambda: f64,
    pub x: u64,
    pub filter: PrimeFilter,
    /// `counts[m]` for `0 <= m <= m_max`.
    pub counts: Vec<u64>,
    /// Starting points with more than `m_max` primes.
    pub overflow: u64,
    /// `counts[m] / x`.
    pub densities: Vec<f64>,
    /// Poisson reference `lambda^m e^-lambda / m!`.
    pub poisson: Vec<f64>,
}

impl DensityReport {
    pub fn m_max(&self) -> usize {
        self.counts.len() - 1
    }

    /// `counts[m] / x` as an exact fraction.
    pub fn density_ratio(&self, m: usize) -> (u64, u64) {
        (self.counts[m], self.x)
    }

    /// Whether every starting point landed in exactly one bucket.
    pub fn partition_holds(&self) -> bool {
        self.counts.iter().sum::<u64>() + self.overflow == self.x
    }

    /// Measured density over the Poisson reference.
    pub fn ratio(&self, m: usize) -> f64 {
        self.densities[m] / self.poisson[m]
    }

    /// Poisson mass beyond `m_max`.
    pub fn poisson_tail(&self) -> f64 {
        (1.0 - self.poisson.iter().sum::<f64>()).max(0.0)
    }

    /// Writes the `m,count,density,poisson,ratio` table. The last row, `m`
    /// labelled `>m_max`, is the overflow bucket. Without `with_poisson` the
    /// last two columns are left empty.
    pub fn write_csv<W: Write>(&self, mut w: W, with_poisson: bool) -> io::Result<()> {
        writeln!(w, "m,count,density,poisson,ratio")?;
        for m in 0..=self.m_max() {
            if with_poisson {
                writeln!(
                    w,
                    "{m},{},{},{},{}",
                    self.counts[m],
                    sig12(self.densities[m]),
                    sig12(self.poisson[m]),
                    sig12(self.ratio(m))
                )?;
            } else {
                writeln!(w, "{m},{},{},,", self.counts[m], sig12(self.densities[m]))?;
            }
        }
        let over = self.overflow as f64 / self.x as f64;
        if with_poisson {
            let tail = self.poisson_tail();
            writeln!(
                w,
                ">{},{},{},{},{}",
                self.m_max(),
                self.overflow,
                sig12(over),
                sig12(tail),
                sig12(over / tail)
            )?;
        } else {
            writeln!(w, ">{},{},{},,", self.m_max(), self.overflow, sig12(over))?;
        }
        Ok(())
    }
}

/// Histogram of window counts over `1 <= n <= x`.
pub fn measure_density(
    table: &PrimeTable,
    lambda: f64,
    x: u64,
    m_max: usize,
    filter: &PrimeFilter,
) -> Result<DensityReport> {
    check_lambda(lambda)?;
    if x == 0 {
        return Err(Error::invalid("x must be at least 1"));
    }
    let upper = check_table(table, lambda, x)?;
    let primes = table.filtered_primes(0, upper, filter);

    let chunks: Vec<(u64, u64)> = (0..x.div_ceil(CHUNK))
        .map(|i| (1 + i * CHUNK, ((i + 1) * CHUNK).min(x)))
        .collect();
    let buckets = m_max + 2;
    let hist = chunks
        .par_iter()
        .map(|&(lo, hi)| {
            let mut h = vec![0u64; buckets];
            sweep(&primes, lambda, lo, hi, |_, c| {
                h[(c as usize).min(m_max + 1)] += 1;
            });
            h
        })
        .reduce(
            || vec![0u64; buckets],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(s, v)| *s += v);
                a
            },
        );

    let counts = hist[..=m_max].to_vec();
    let overflow = hist[m_max + 1];
    let report = DensityReport {
        lambda,
        x,
        filter: *filter,
        densities: counts.iter().map(|&c| c as f64 / x as f64).collect(),
        poisson: (0..=m_max as u64)
            .map(|m| poisson_reference(lambda, m))
            .collect(),
        counts,
        overflow,
    };
    debug_assert!(report.partition_holds());
    Ok(report)
}

/// `lambda^m e^-lambda / m!`.
pub fn poisson_reference(lambda: f64, m: u64) -> f64 {
    if m <= 20 {
        let mut v = (-lambda).exp();
        for i in 1..=m {
            v *= lambda / i as f64;
        }
        v
    } else {
        let ln_fact: f64 = (2..=m).map(|i| (i as f64).ln()).sum();
        (m as f64 * lambda.ln() - lambda - ln_fact).exp()
    }
}

/// `lambda^m / m!`, the reference when `lambda` shrinks with `x`.
pub fn uniform_poisson_reference(lambda: f64, m: u64) -> Result<f64> {
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::invalid(format!(
            "need 0 < lambda <= 1, got {lambda}"
        )));
    }
    Ok((1..=m).fold(1.0, |v, i| v * lambda / i as f64))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Growth {
    Ratio {
        count_x: u64,
        count_2x: u64,
        ratio: f64,
    },
    /// No qualifying `n <= x`, so no ratio exists.
    Empty { count_x: u64, count_2x: u64 },
}

impl Growth {
    pub fn from_counts(count_x: u64, count_2x: u64) -> Self {
        if count_x == 0 {
            Growth::Empty { count_x, count_2x }
        } else {
            Growth::Ratio {
                count_x,
                count_2x,
                ratio: count_2x as f64 / count_x as f64,
            }
        }
    }
}

/// Count of `n <= 2x` with exactly `m` primes over the count for `n <= x`.
pub fn growth_check(
    table: &PrimeTable,
    lambda: f64,
    m: usize,
    x: u64,
    filter: &PrimeFilter,
) -> Result<Growth> {
    let doubled = x
        .checked_mul(2)
        .ok_or_else(|| Error::invalid("2x overflows"))?;
    let count_x = measure_density(table, lambda, x, m, filter)?.counts[m];
    let count_2x = measure_density(table, lambda, doubled, m, filter)?.counts[m];
    Ok(Growth::from_counts(count_x, count_2x))
}
