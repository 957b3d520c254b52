//! Sieved Möbius function with an on-disk cache.
//!
//! Cache layout: the 8 bytes `MOBIUS01`, then `n_max` as a little-endian
//! `u64`, then `n_max` bytes encoding μ(1), μ(2), ... as 0x00 → 0,
//! 0x01 → +1, 0xFF → -1.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub const CACHE_MAGIC: &[u8; 8] = b"MOBIUS01";

/// Default ceiling on table size (about 100 MB of one-byte entries).
pub const DEFAULT_MAX_ENTRIES: u64 = 100_000_000;

/// Above this bound the sieve works segment by segment.
const SEGMENTED_THRESHOLD: u64 = 10_000_000;
const SEGMENT_LEN: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MobiusTable {
    values: Vec<i8>,
}

impl MobiusTable {
    pub fn n_max(&self) -> u64 {
        self.values.len() as u64
    }

    /// μ(n) for 1 ≤ n ≤ n_max.
    pub fn mu(&self, n: u64) -> i8 {
        assert!(
            n >= 1 && n <= self.n_max(),
            "mu({n}) outside table of size {}",
            self.n_max()
        );
        self.values[(n - 1) as usize]
    }

    /// The raw values, `values()[n - 1] = μ(n)`.
    pub fn values(&self) -> &[i8] {
        &self.values
    }

    /// Iterator over `(n, μ(n))` with μ(n) ≠ 0 and n ≤ `limit`.
    pub fn squarefree_up_to(&self, limit: u64) -> impl Iterator<Item = (u64, i8)> + '_ {
        let end = limit.min(self.n_max()) as usize;
        self.values[..end]
            .iter()
            .enumerate()
            .filter(|(_, &m)| m != 0)
            .map(|(i, &m)| (i as u64 + 1, m))
    }

    /// Mertens function M(x) = Σ_{n ≤ x} μ(n).
    pub fn mertens(&self, x: u64) -> i64 {
        let end = x.min(self.n_max()) as usize;
        self.values[..end].iter().map(|&m| i64::from(m)).sum()
    }

    pub fn save_cache(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&self.n_max().to_le_bytes())?;
        let bytes: Vec<u8> = self.values.iter().map(|&m| m as u8).collect();
        w.write_all(&bytes)?;
        w.flush()?;
        Ok(())
    }

    pub fn load_cache(path: impl AsRef<Path>) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)
            .map_err(|_| Error::Format("file too short for header".into()))?;
        if &magic != CACHE_MAGIC {
            return Err(Error::Format("bad magic, not a Möbius cache".into()));
        }
        let mut len = [0u8; 8];
        r.read_exact(&mut len)
            .map_err(|_| Error::Format("file too short for header".into()))?;
        let n_max = u64::from_le_bytes(len);
        if n_max == 0 {
            return Err(Error::Format("empty table".into()));
        }
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        if bytes.len() as u64 != n_max {
            return Err(Error::Format(format!(
                "header declares {n_max} entries, file holds {}",
                bytes.len()
            )));
        }
        let values = bytes
            .into_iter()
            .enumerate()
            .map(|(i, b)| match b {
                0x00 => Ok(0),
                0x01 => Ok(1),
                0xFF => Ok(-1),
                other => Err(Error::Format(format!(
                    "invalid byte {other:#04x} at entry {}",
                    i + 1
                ))),
            })
            .collect::<Result<Vec<i8>>>()?;
        if values[0] != 1 {
            return Err(Error::Format("mu(1) must be 1".into()));
        }
        Ok(MobiusTable { values })
    }
}

/// μ(1..=n_max) under the default memory ceiling.
pub fn sieve(n_max: u64) -> Result<MobiusTable> {
    sieve_with_limit(n_max, DEFAULT_MAX_ENTRIES)
}

/// μ(1..=n_max), refusing tables larger than `max_entries`.
pub fn sieve_with_limit(n_max: u64, max_entries: u64) -> Result<MobiusTable> {
    if n_max == 0 {
        return Err(Error::Domain("sieve bound must be at least 1".into()));
    }
    if n_max > max_entries {
        return Err(Error::Limit(format!(
            "a Möbius table of {n_max} entries exceeds the ceiling of {max_entries}; \
             raise the limit explicitly if the memory is available"
        )));
    }
    let values = if n_max > SEGMENTED_THRESHOLD {
        segmented(n_max)
    } else {
        linear(n_max as usize)
    };
    Ok(MobiusTable { values })
}

fn linear(n: usize) -> Vec<i8> {
    let mut mu = vec![0i8; n + 1];
    let mut composite = vec![false; n + 1];
    let mut primes: Vec<usize> = Vec::new();
    mu[1] = 1;
    for i in 2..=n {
        if !composite[i] {
            primes.push(i);
            mu[i] = -1;
        }
        for &p in &primes {
            let m = i * p;
            if m > n {
                break;
            }
            composite[m] = true;
            if i % p == 0 {
                mu[m] = 0;
                break;
            }
            mu[m] = -mu[i];
        }
    }
    mu.remove(0);
    mu
}

fn small_primes(limit: u64) -> Vec<u64> {
    let limit = limit as usize;
    let mut is_composite = vec![false; limit + 1];
    let mut primes = Vec::new();
    for i in 2..=limit {
        if !is_composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= limit {
                is_composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

fn segmented(n_max: u64) -> Vec<i8> {
    let root = (n_max as f64).sqrt() as u64 + 1;
    let primes = small_primes(root);
    let mut out = Vec::with_capacity(n_max as usize);
    let mut lo = 1u64;
    let mut sign = vec![1i8; SEGMENT_LEN as usize];
    let mut rest = vec![0u64; SEGMENT_LEN as usize];
    while lo <= n_max {
        let hi = (lo + SEGMENT_LEN - 1).min(n_max);
        let len = (hi - lo + 1) as usize;
        for (i, r) in rest[..len].iter_mut().enumerate() {
            *r = lo + i as u64;
        }
        sign[..len].fill(1);
        for &p in &primes {
            if p * p > hi {
                break;
            }
            let first = lo.div_ceil(p) * p;
            let mut m = first;
            while m <= hi {
                let i = (m - lo) as usize;
                sign[i] = -sign[i];
                rest[i] /= p;
                m += p;
            }
            let sq = p * p;
            let mut m = lo.div_ceil(sq) * sq;
            while m <= hi {
                sign[(m - lo) as usize] = 0;
                m += sq;
            }
        }
        for i in 0..len {
            // one prime factor above sqrt(n_max) survives in `rest`
            if rest[i] > 1 {
                sign[i] = -sign[i];
            }
        }
        out.extend_from_slice(&sign[..len]);
        lo = hi + 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// μ(n) by trial division.
    fn mu_trial(mut n: u64) -> i8 {
        let mut result = 1i8;
        let mut p = 2;
        while p * p <= n {
            if n.is_multiple_of(p) {
                n /= p;
                if n.is_multiple_of(p) {
                    return 0;
                }
                result = -result;
            }
            p += 1;
        }
        if n > 1 {
            result = -result;
        }
        result
    }

    #[test]
    fn small_values() {
        let t = sieve(100).unwrap();
        assert_eq!(t.mu(1), 1);
        assert_eq!(t.mu(4), 0);
        assert_eq!(t.mu(6), 1);
        assert_eq!(t.mu(30), -1);
        assert_eq!(t.mertens(100), 1);
        for n in 1..=100 {
            assert_eq!(t.mu(n), mu_trial(n), "n = {n}");
        }
    }

    #[test]
    fn zero_bound_is_rejected() {
        assert!(matches!(sieve(0), Err(Error::Domain(_))));
    }

    #[test]
    fn ceiling_is_enforced() {
        assert!(matches!(sieve_with_limit(1001, 1000), Err(Error::Limit(_))));
    }

    #[test]
    fn segmented_matches_linear() {
        let n = 3 * SEGMENT_LEN + 12345;
        let seg = segmented(n);
        let lin = linear(n as usize);
        assert_eq!(seg, lin);
    }

    #[test]
    fn squares_of_primes_vanish() {
        let t = sieve(10_000).unwrap();
        for p in small_primes(100) {
            let sq = p * p;
            let mut m = sq;
            while m <= t.n_max() {
                assert_eq!(t.mu(m), 0);
                m += sq;
            }
        }
    }

    #[test]
    fn truncated_cache_is_a_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mu.bin");
        sieve(1000).unwrap().save_cache(&path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 10]).unwrap();
        assert!(matches!(
            MobiusTable::load_cache(&path),
            Err(Error::Format(_))
        ));
        std::fs::write(&path, &bytes[..5]).unwrap();
        assert!(matches!(
            MobiusTable::load_cache(&path),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn bad_bytes_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mu.bin");
        sieve(50).unwrap().save_cache(&path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[16 + 7] = 0x02;
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(
            MobiusTable::load_cache(&path),
            Err(Error::Format(_))
        ));
        bytes[0] = b'X';
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(
            MobiusTable::load_cache(&path),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn header_layout() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mu.bin");
        sieve(10).unwrap().save_cache(&path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[..8], b"MOBIUS01");
        assert_eq!(&bytes[8..16], &10u64.to_le_bytes());
        // μ(1..=10) = 1 -1 -1 0 -1 1 -1 0 0 1
        assert_eq!(&bytes[16..], &[1, 0xFF, 0xFF, 0, 0xFF, 1, 0xFF, 0, 0, 1]);
    }
}
