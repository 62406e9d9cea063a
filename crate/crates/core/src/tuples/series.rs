use super::covered_prime;
use crate::error::{Error, Result};
use crate::primes::small_primes;

/// Truncated singular series `prod_{p <= cutoff} (1 - nu_p/p) (1 - 1/p)^-k`,
/// where `nu_p` is the number of residues the offsets occupy mod `p`.
///
/// Accumulated as a sum of logarithms; no tail correction beyond `cutoff`.
pub fn singular_series(offsets: &[u64], cutoff: u64) -> Result<f64> {
    if let Some(p) = covered_prime(offsets)? {
        return Err(Error::Domain(format!(
            "offsets cover every class mod {p}; the series vanishes"
        )));
    }
    let max = *offsets.last().unwrap();
    if cutoff < max {
        return Err(Error::invalid(format!(
            "cutoff {cutoff} is below the largest offset {max}"
        )));
    }
    let k = offsets.len();
    let span = max - offsets[0];
    let mut seen = Vec::new();
    let mut log_sum = 0.0f64;
    for p in small_primes(cutoff) {
        // Offsets are distinct mod p once p exceeds their spread.
        let nu = if p > span {
            k
        } else {
            seen.clear();
            seen.resize(p as usize, false);
            offsets
                .iter()
                .filter(|&&h| !std::mem::replace(&mut seen[(h % p) as usize], true))
                .count()
        };
        let inv = 1.0 / p as f64;
        log_sum += (-(nu as f64) * inv).ln_1p() - k as f64 * (-inv).ln_1p();
    }
    Ok(log_sum.exp())
}
