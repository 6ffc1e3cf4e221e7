//! Enumeration caps and base-|X| block indexing shared by the exhaustive
//! verifiers.
//!
//! A block `x_1 .. x_L` over an alphabet of size `q` has index
//! `x_1 q^(L-1) + ... + x_L`, so the first symbol is the most significant
//! digit and all blocks sharing a prefix occupy one contiguous index range.

use crate::error::{Error, Result};

/// Default enumeration cap: at most 2^20 items.
pub const DEFAULT_CAP: u64 = 1 << 20;

/// Upper limit on the number of items an exhaustive computation may touch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationCap(pub u64);

impl Default for EnumerationCap {
    fn default() -> Self {
        EnumerationCap(DEFAULT_CAP)
    }
}

impl EnumerationCap {
    /// Cap from the `SPECTRASCOPE_CAP` environment variable, falling back to
    /// the default when unset or unparsable.
    pub fn from_env() -> Self {
        std::env::var("SPECTRASCOPE_CAP")
            .ok()
            .and_then(|v| v.trim().parse::<u64>().ok())
            .filter(|&v| v > 0)
            .map(EnumerationCap)
            .unwrap_or_default()
    }

    /// Returns `base^exp` if it is within the cap.
    pub fn check_pow(&self, base: usize, exp: usize) -> Result<usize> {
        match checked_pow(base, exp) {
            Some(v) if (v as u64) <= self.0 => Ok(v),
            Some(v) => Err(Error::CapExceeded {
                requested: v.to_string(),
                cap: self.0,
            }),
            None => Err(Error::CapExceeded {
                requested: format!("{base}^{exp}"),
                cap: self.0,
            }),
        }
    }

    pub fn check(&self, count: usize) -> Result<()> {
        if (count as u64) <= self.0 {
            Ok(())
        } else {
            Err(Error::CapExceeded {
                requested: count.to_string(),
                cap: self.0,
            })
        }
    }
}

pub(crate) fn checked_pow(base: usize, exp: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// Writes the digits of `index` (base `q`, most significant first) into `out`.
pub(crate) fn decode_into(mut index: usize, q: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = index % q;
        index /= q;
    }
}

pub(crate) fn decode(index: usize, q: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    decode_into(index, q, &mut out);
    out
}

pub(crate) fn encode(symbols: &[usize], q: usize) -> usize {
    symbols.iter().fold(0, |acc, &s| acc * q + s)
}

/// Runs `f` on a dedicated rayon pool with `workers` threads; `0` means the
/// global pool.
pub(crate) fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> R {
    if workers == 0 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}
