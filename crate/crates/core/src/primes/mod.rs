//! Prime generation and filtered counting.

mod cache;
mod filter;
mod kronecker;
mod table;

pub use cache::{load, read_table, save, write_table, MAGIC};
pub use filter::PrimeFilter;
pub use kronecker::{is_fundamental_discriminant, kronecker_symbol};
pub use table::{
    required_bytes, small_primes, PrimeTable, Primes, SieveConfig, DEFAULT_MEMORY_BUDGET,
    DEFAULT_SEGMENT_SIZE,
};
