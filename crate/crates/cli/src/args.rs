use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "shortint",
    version,
    about = "Primes in short intervals: sieving, tuples, densities and bounds"
)]
pub struct Cli {
    /// Emit JSON instead of CSV.
    #[arg(long, global = true)]
    pub json: bool,

    /// Write the main output here instead of stdout.
    #[arg(long, short = 'o', global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Cap on worker threads.
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the prime table and print the prime count.
    Sieve(SieveArgs),
    /// Density of n <= x whose window [n, n + lambda ln n] holds exactly m primes.
    Density(DensityArgs),
    /// Admissible tuples.
    #[command(subcommand)]
    Tuples(TuplesCommand),
    /// Slide intervals across prime clusters and check the sliding claims.
    Slide(SlideArgs),
    /// Constants and theorem-level lower bounds.
    Bounds(BoundsArgs),
}

#[derive(Debug, Args)]
pub struct SieveArgs {
    #[arg(long)]
    pub limit: u64,

    /// Cache file to write; defaults to $SHORTINT_CACHE_DIR when set.
    #[arg(long, value_name = "PATH")]
    pub cache: Option<PathBuf>,

    #[arg(long, default_value_t = shortint_core::primes::DEFAULT_SEGMENT_SIZE)]
    pub segment_size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Class {
    #[value(name = "+1")]
    Split,
    #[value(name = "-1")]
    Inert,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    /// Modulus q: keep primes p = res (mod q).
    #[arg(
        long = "mod",
        value_name = "Q",
        requires = "res",
        conflicts_with = "disc"
    )]
    pub modulus: Option<u64>,

    #[arg(long, value_name = "A", requires = "modulus")]
    pub res: Option<u64>,

    /// Fundamental discriminant d: keep primes with (d/p) = class.
    #[arg(long, value_name = "D", allow_hyphen_values = true, requires = "class")]
    pub disc: Option<i64>,

    #[arg(
        long,
        value_name = "+1|-1",
        allow_hyphen_values = true,
        requires = "disc"
    )]
    pub class: Option<Class>,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[arg(long)]
    pub lambda: f64,

    #[arg(long)]
    pub x: u64,

    #[arg(long)]
    pub m_max: usize,

    #[command(flatten)]
    pub filter: FilterArgs,

    /// Add Poisson reference densities and the ratio column.
    #[arg(long)]
    pub compare_poisson: bool,

    /// Report counts at x and 2x and their ratio for every m.
    #[arg(long)]
    pub growth: bool,
}

#[derive(Debug, Subcommand)]
pub enum TuplesCommand {
    /// Greedy sieve of [0, window] followed by a spaced selection of k offsets.
    Greedy(GreedyArgs),
    /// Admissibility of a tuple.
    Check(OffsetsArgs),
    /// Truncated singular series of a tuple.
    Series(SeriesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    FirstFit,
    Random,
}

#[derive(Debug, Args)]
pub struct GreedyArgs {
    #[arg(long)]
    pub window: f64,

    #[arg(long)]
    pub k: u64,

    /// Minimum gap between offsets; defaults to floor(window / C0(k)), at least 1.
    #[arg(long)]
    pub spacing: Option<u64>,

    /// Also count every spaced k-subset and compare with the lower bound.
    #[arg(long)]
    pub count: bool,

    #[arg(long, value_enum, default_value_t = StrategyArg::FirstFit)]
    pub strategy: StrategyArg,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Keep offsets in res (mod q).
    #[arg(long = "mod", value_name = "Q", requires = "res")]
    pub modulus: Option<u64>,

    #[arg(long, value_name = "A", requires = "modulus")]
    pub res: Option<u64>,
}

#[derive(Debug, Args)]
pub struct OffsetsArgs {
    /// Comma-separated offsets, e.g. 0,2,6.
    #[arg(long)]
    pub offsets: String,
}

#[derive(Debug, Args)]
pub struct SeriesArgs {
    #[arg(long)]
    pub offsets: String,

    /// Largest prime in the truncated product.
    #[arg(long)]
    pub cutoff: u64,
}

#[derive(Debug, Args)]
pub struct SlideArgs {
    #[arg(long)]
    pub lambda: f64,

    #[arg(long)]
    pub x_lo: u64,

    #[arg(long)]
    pub x_hi: u64,

    #[arg(long)]
    pub m: u32,

    /// Only slide across clusters whose primes are well spaced.
    #[arg(long)]
    pub require_spacing: bool,

    /// Distance between base points; 0 picks disjoint windows.
    #[arg(long, default_value_t = 1)]
    pub stride: u64,

    /// Spacing divisor; defaults to C0(k(m)).
    #[arg(long)]
    pub c0: Option<f64>,

    #[arg(long, value_name = "FILE")]
    pub constants: Option<PathBuf>,

    #[command(flatten)]
    pub filter: FilterArgs,

    /// CSV of every trace (j, N_j, count).
    #[arg(long, value_name = "PATH")]
    pub trace_out: Option<PathBuf>,

    /// JSON lines of falsification records; stderr when absent.
    #[arg(long, value_name = "PATH")]
    pub falsifications: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub m: u64,

    #[arg(long)]
    pub lambda: Option<f64>,

    #[arg(long, conflicts_with = "ln_x")]
    pub x: Option<f64>,

    /// Natural log of x, for x beyond double range.
    #[arg(long)]
    pub ln_x: Option<f64>,

    /// Modulus for the progression bound.
    #[arg(long)]
    pub q: Option<u64>,

    /// JSON file overriding C, C_prime, D, c1, c2, eps1, eps2.
    #[arg(long, value_name = "FILE")]
    pub constants: Option<PathBuf>,
}
