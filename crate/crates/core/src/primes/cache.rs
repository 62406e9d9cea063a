//! On-disk form of a [`PrimeTable`].
//!
//! Layout: the magic `PBM1`, the limit as a little-endian `u64`, then the
//! odd-number bitmap as little-endian `u64` words. Bit 0 of the first word is
//! the integer 3.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::table::PrimeTable;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"PBM1";

pub fn write_table<W: Write>(table: &PrimeTable, mut out: W) -> Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&table.limit().to_le_bytes())?;
    for w in table.words() {
        out.write_all(&w.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a table, checking the magic, the word count and, when given, the limit.
pub fn read_table<R: Read>(mut input: R, expected_limit: Option<u64>) -> Result<PrimeTable> {
    let mut magic = [0u8; 4];
    input
        .read_exact(&mut magic)
        .map_err(|_| Error::Cache("file too short for magic".into()))?;
    if &magic != MAGIC {
        return Err(Error::Cache(format!("bad magic {magic:?}")));
    }
    let mut buf = [0u8; 8];
    input
        .read_exact(&mut buf)
        .map_err(|_| Error::Cache("file too short for limit".into()))?;
    let limit = u64::from_le_bytes(buf);
    if let Some(expected) = expected_limit {
        if expected != limit {
            return Err(Error::Cache(format!(
                "cache holds limit {limit}, expected {expected}"
            )));
        }
    }
    if limit < 2 {
        return Err(Error::Cache(format!("limit {limit} is below 2")));
    }
    let bits = if limit < 3 { 0 } else { (limit - 3) / 2 + 1 };
    let n_words = bits.div_ceil(64) as usize;
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    if bytes.len() != n_words * 8 {
        return Err(Error::Cache(format!(
            "bitmap has {} bytes, limit {limit} needs {}",
            bytes.len(),
            n_words * 8
        )));
    }
    let words: Vec<u64> = bytes
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    if bits % 64 != 0 && words.last().is_some_and(|w| w >> (bits % 64) != 0) {
        return Err(Error::Cache("bits set beyond the limit".into()));
    }
    Ok(PrimeTable::from_words(limit, words))
}

pub fn save(table: &PrimeTable, path: &Path) -> Result<()> {
    write_table(table, BufWriter::new(File::create(path)?))
}

pub fn load(path: &Path, expected_limit: Option<u64>) -> Result<PrimeTable> {
    read_table(BufReader::new(File::open(path)?), expected_limit)
}
