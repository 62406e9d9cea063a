//! Sliding intervals across a prime cluster.
//!
//! A cluster is a window `I = [N0, N0 + 5 lambda ln x]` holding at least
//! `m + 1` primes. Sliding `I_j = [N0 + j, N0 + j + lambda ln(N0 + j)]` for
//! `j = 0..=floor(lambda ln N0)` and taking the last `j` whose interval still
//! has `m + 1` primes yields a run of intervals with exactly `m` primes, as
//! long as the cluster's primes are well spaced.
//!
//! Every claim about the traces is checked as it is computed. Violations are
//! returned as [`Falsification`] records rather than asserted.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::bounds::{c0_of_k, k_of_m, BoundParams};
use crate::density::{right_end, sweep};
use crate::error::{Error, Result};
use crate::primes::{PrimeFilter, PrimeTable};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    pub lambda: f64,
    pub x_lo: u64,
    pub x_hi: u64,
    pub m: u32,
    pub require_spacing: bool,
    /// Spacing divisor; primes must sit more than `lambda ln x_hi / c0` apart.
    pub c0: f64,
    /// Distance between consecutive base points.
    pub stride: u64,
}

impl ScanConfig {
    /// Scan of every base point in `[x_lo, x_hi]`, with `c0 = C0(k(m))`.
    ///
    /// When `k(m)` overflows a double, `c0` is infinite and the spacing
    /// threshold is zero.
    pub fn new(lambda: f64, x_lo: u64, x_hi: u64, m: u32, params: &BoundParams) -> Result<Self> {
        let c0 = match k_of_m(m as u64, params) {
            Ok(k) => c0_of_k(k.max(2.0))?,
            Err(_) => f64::INFINITY,
        };
        Ok(ScanConfig {
            lambda,
            x_lo,
            x_hi,
            m,
            require_spacing: false,
            c0,
            stride: 1,
        })
    }

    pub fn with_c0(mut self, c0: f64) -> Self {
        self.c0 = c0;
        self
    }

    pub fn with_stride(mut self, stride: u64) -> Self {
        self.stride = stride;
        self
    }

    pub fn with_required_spacing(mut self, require: bool) -> Self {
        self.require_spacing = require;
        self
    }

    /// `5 lambda ln x_hi`.
    pub fn window(&self) -> f64 {
        5.0 * self.lambda * (self.x_hi as f64).ln()
    }

    /// `lambda ln x_hi / c0`.
    pub fn spacing_threshold(&self) -> f64 {
        self.lambda * (self.x_hi as f64).ln() / self.c0
    }

    /// Stride that makes consecutive windows disjoint.
    pub fn disjoint_stride(&self) -> u64 {
        self.window().floor() as u64 + 1
    }

    /// Table limit a scan needs: `x_hi + 6 lambda ln x_hi`, rounded up.
    pub fn required_limit(&self) -> u64 {
        (self.x_hi as f64 + 6.0 * self.lambda * (self.x_hi as f64).ln()).ceil() as u64
    }

    fn validate(&self, table: &PrimeTable) -> Result<()> {
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::invalid(format!(
                "lambda must be positive, got {}",
                self.lambda
            )));
        }
        if self.x_lo < 2 || self.x_lo > self.x_hi {
            return Err(Error::invalid(format!(
                "need 2 <= x_lo <= x_hi, got [{}, {}]",
                self.x_lo, self.x_hi
            )));
        }
        if self.stride == 0 {
            return Err(Error::invalid("stride must be at least 1"));
        }
        if self.c0.is_nan() || self.c0 <= 0.0 {
            return Err(Error::invalid(format!(
                "c0 must be positive, got {}",
                self.c0
            )));
        }
        let required = self.required_limit();
        if required > table.limit() {
            return Err(Error::OutOfRange {
                what: "cluster scan",
                required,
                limit: table.limit(),
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub base: u64,
    pub window: f64,
    pub lambda: f64,
    /// Offsets from `base` of the filtered primes in the window.
    pub prime_positions: Vec<u64>,
    /// All primes lie before `floor(lambda ln base)` and neighbours are more
    /// than `spacing_threshold` apart.
    pub spacing_ok: bool,
    pub spacing_threshold: f64,
}

impl Cluster {
    /// Index of the last sliding interval, `floor(lambda ln base)`.
    pub fn last_j(&self) -> usize {
        (self.lambda * (self.base as f64).ln()).floor() as usize
    }

    /// Length of the run of exactly-`m` intervals that spacing guarantees.
    pub fn guaranteed_run(&self) -> usize {
        self.spacing_threshold.floor() as usize
    }
}

fn spacing_ok(positions: &[u64], last_j: u64, threshold: f64) -> bool {
    positions.iter().all(|&h| h < last_j)
        && positions
            .windows(2)
            .all(|w| (w[1] - w[0]) as f64 > threshold)
}

/// Iterator over the clusters of a scan; see [`find_clusters`].
pub struct ClusterScan {
    config: ScanConfig,
    primes: Vec<u64>,
    next_base: Option<u64>,
    left: usize,
    right: usize,
}

impl Iterator for ClusterScan {
    type Item = Cluster;

    fn next(&mut self) -> Option<Cluster> {
        let window = self.config.window();
        let threshold = self.config.spacing_threshold();
        let need = self.config.m as usize + 1;
        while let Some(base) = self.next_base {
            self.next_base = base
                .checked_add(self.config.stride)
                .filter(|&b| b <= self.config.x_hi);
            let end = (base as f64 + window).floor() as u64;
            while self.left < self.primes.len() && self.primes[self.left] < base {
                self.left += 1;
            }
            self.right = self.right.max(self.left);
            while self.right < self.primes.len() && self.primes[self.right] <= end {
                self.right += 1;
            }
            if self.right - self.left < need {
                continue;
            }
            let positions: Vec<u64> = self.primes[self.left..self.right]
                .iter()
                .map(|p| p - base)
                .collect();
            let last_j = (self.config.lambda * (base as f64).ln()).floor() as u64;
            let ok = spacing_ok(&positions, last_j, threshold);
            if self.config.require_spacing && !ok {
                continue;
            }
            return Some(Cluster {
                base,
                window,
                lambda: self.config.lambda,
                prime_positions: positions,
                spacing_ok: ok,
                spacing_threshold: threshold,
            });
        }
        None
    }
}

/// Windows `[N0, N0 + 5 lambda ln x_hi]`, `N0 = x_lo, x_lo + stride, ...`,
/// holding at least `m + 1` filtered primes.
pub fn find_clusters(
    table: &PrimeTable,
    config: &ScanConfig,
    filter: &PrimeFilter,
) -> Result<ClusterScan> {
    config.validate(table)?;
    let hi = (config.x_hi as f64 + config.window()).floor() as u64;
    Ok(ClusterScan {
        config: *config,
        primes: table.filtered_primes(config.x_lo, hi, filter),
        next_base: Some(config.x_lo),
        left: 0,
        right: 0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// `I_j` lies inside the cluster window.
    IntervalInclusion,
    /// At `j` = first prime offset, `I_j` holds every cluster prime.
    FullCluster,
    /// The last interval holds no cluster prime.
    EmptyTail,
    /// Counts never rise by more than one between consecutive `j`.
    UnitIncrease,
    /// `N0 + j~` is a prime passing the filter.
    JTildePrime,
    /// The run after `j~` is at least the guaranteed length.
    RunLength,
}

/// A trace that contradicts one of the sliding-interval claims.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Falsification {
    pub base: u64,
    pub j: usize,
    pub check: Check,
    pub expected: i64,
    pub observed: i64,
}

impl Falsification {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("falsification serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlideTrace {
    pub base: u64,
    pub lambda: f64,
    pub m: u32,
    /// `|I_j ∩ P|` for `j = 0..=floor(lambda ln base)`.
    pub counts: Vec<u32>,
    /// Last `j` with at least `m + 1` primes.
    pub j_tilde: Option<usize>,
    /// Whether `j_tilde` is followed by at least one more interval.
    pub j_tilde_interior: bool,
    /// Every `j` with exactly `m` primes.
    pub run: Vec<usize>,
    pub falsifications: Vec<Falsification>,
}

impl SlideTrace {
    /// Length of the exactly-`m` run starting right after an interior `j_tilde`.
    pub fn run_after_j_tilde(&self) -> Option<usize> {
        let jt = self.j_tilde.filter(|_| self.j_tilde_interior)?;
        Some(
            self.counts[jt + 1..]
                .iter()
                .take_while(|&&c| c == self.m)
                .count(),
        )
    }

    pub fn write_csv<W: Write>(&self, mut w: W, header: bool) -> io::Result<()> {
        if header {
            writeln!(w, "j,N_j,count")?;
        }
        for (j, c) in self.counts.iter().enumerate() {
            writeln!(w, "{j},{},{c}", self.base + j as u64)?;
        }
        Ok(())
    }
}

/// Slides `I_j` across `cluster` and checks the sliding-interval claims.
///
/// Unconditional checks: inclusion in the window, unit increases, and
/// primality of `N0 + j~` when `j~` is interior (a drop in the count can only
/// come from the left end passing a prime). Under `spacing_ok`, also the full
/// cluster at the first prime, the empty last interval, primality of
/// `N0 + j~` in all cases, and the guaranteed run length whenever the whole
/// run fits before the last interval.
pub fn slide(
    table: &PrimeTable,
    cluster: &Cluster,
    m: u32,
    filter: &PrimeFilter,
) -> Result<SlideTrace> {
    let base = cluster.base;
    let last_j = cluster.last_j();
    let top = right_end(base + last_j as u64, cluster.lambda);
    if top > table.limit() {
        return Err(Error::OutOfRange {
            what: "slide",
            required: top,
            limit: table.limit(),
        });
    }
    let primes = table.filtered_primes(base, top, filter);
    let mut counts = Vec::with_capacity(last_j + 1);
    sweep(
        &primes,
        cluster.lambda,
        base,
        base + last_j as u64,
        |_, c| counts.push(c),
    );

    let mut falsifications = Vec::new();
    let mut record = |j: usize, check: Check, expected: i64, observed: i64| {
        falsifications.push(Falsification {
            base,
            j,
            check,
            expected,
            observed,
        })
    };

    let window_end = (base as f64 + cluster.window).floor() as u64;
    for j in 0..=last_j {
        let end = right_end(base + j as u64, cluster.lambda);
        if end > window_end {
            record(j, Check::IntervalInclusion, window_end as i64, end as i64);
        }
    }
    for j in 0..last_j {
        if counts[j + 1] > counts[j] + 1 {
            record(
                j + 1,
                Check::UnitIncrease,
                counts[j] as i64 + 1,
                counts[j + 1] as i64,
            );
        }
    }

    let j_tilde = counts.iter().rposition(|&c| c > m);
    let j_tilde_interior = j_tilde.is_some_and(|j| j < last_j);
    if let Some(jt) = j_tilde {
        if j_tilde_interior || cluster.spacing_ok {
            let n = base + jt as u64;
            if !(table.is_prime(n) && filter.accepts(n)) {
                record(jt, Check::JTildePrime, 1, 0);
            }
        }
    }

    if cluster.spacing_ok {
        let positions = &cluster.prime_positions;
        let inside = |j: usize| {
            let lo = base + j as u64;
            let hi = right_end(lo, cluster.lambda);
            positions
                .iter()
                .filter(|&&h| (lo..=hi).contains(&(base + h)))
                .count() as i64
        };
        if let Some(&h1) = positions.first() {
            let h1 = h1 as usize;
            if h1 <= last_j && inside(h1) != positions.len() as i64 {
                record(h1, Check::FullCluster, positions.len() as i64, inside(h1));
            }
        }
        if inside(last_j) != 0 {
            record(last_j, Check::EmptyTail, 0, inside(last_j));
        }
        if let Some(jt) = j_tilde.filter(|_| j_tilde_interior) {
            let need = cluster.guaranteed_run();
            if jt + need <= last_j {
                let got = counts[jt + 1..].iter().take_while(|&&c| c == m).count();
                if got < need {
                    record(jt + 1, Check::RunLength, need as i64, got as i64);
                }
            }
        }
    }

    let run = counts
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c == m)
        .map(|(j, _)| j)
        .collect();
    Ok(SlideTrace {
        base,
        lambda: cluster.lambda,
        m,
        counts,
        j_tilde,
        j_tilde_interior,
        run,
        falsifications,
    })
}

/// Maximal runs of consecutive `j` with exactly `m` primes, as `(start, length)`.
pub fn extract_m_runs(trace: &SlideTrace, m: u32) -> Vec<(usize, usize)> {
    let mut runs = Vec::new();
    let mut start = None;
    for (j, &c) in trace.counts.iter().enumerate() {
        match (c == m, start) {
            (true, None) => start = Some(j),
            (false, Some(s)) => {
                runs.push((s, j - s));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push((s, trace.counts.len() - s));
    }
    runs
}

/// Aggregate over many traces.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SlideStats {
    pub clusters: u64,
    pub spacing_ok: u64,
    pub with_j_tilde: u64,
    pub interior_j_tilde: u64,
    pub runs_checked: u64,
    pub shortest_checked_run: Option<u64>,
    pub longest_run_after_j_tilde: u64,
    pub falsifications: u64,
}

impl SlideStats {
    pub fn add(&mut self, cluster: &Cluster, trace: &SlideTrace) {
        self.clusters += 1;
        self.spacing_ok += u64::from(cluster.spacing_ok);
        self.with_j_tilde += u64::from(trace.j_tilde.is_some());
        self.interior_j_tilde += u64::from(trace.j_tilde_interior);
        if let Some(len) = trace.run_after_j_tilde() {
            self.longest_run_after_j_tilde = self.longest_run_after_j_tilde.max(len as u64);
            let jt = trace.j_tilde.unwrap();
            if cluster.spacing_ok && jt + cluster.guaranteed_run() < trace.counts.len() {
                self.runs_checked += 1;
                self.shortest_checked_run = Some(
                    self.shortest_checked_run
                        .map_or(len as u64, |s| s.min(len as u64)),
                );
            }
        }
        self.falsifications += trace.falsifications.len() as u64;
    }
}
