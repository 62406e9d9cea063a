//! Short intervals `[n, n + lambda ln n]` holding a prescribed number of primes.
//!
//! - [`primes`]: segmented sieve, filtered counting, Kronecker symbol, cache file.
//! - [`tuples`]: greedy-sieved admissible tuples, spaced selection and counting,
//!   singular series.
//! - [`density`]: the proportion of `n <= x` with exactly `m` primes in the window.
//! - [`slide`]: sliding intervals across prime clusters.
//! - [`bounds`]: the theorem-level constants and lower bounds.

pub mod bounds;
pub mod density;
pub mod error;
pub mod fmt;
pub mod primes;
pub mod slide;
pub mod tuples;

pub use bounds::{BoundParams, Theorem};
pub use density::DensityReport;
pub use error::{Error, Result};
pub use primes::{PrimeFilter, PrimeTable};
pub use slide::{Cluster, SlideTrace};
pub use tuples::{AdmissibleTuple, SievedSet};
