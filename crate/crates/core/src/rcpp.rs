//! Quasi-uniform puncturing (QUP) of a length-`M` polar codeword down to `N`
//! transmitted bits.
//!
//! A pattern is an `M`-length 0/1 vector: `0` marks a punctured position and
//! `1` a reserved (transmitted) one. The QUP pattern is built by zeroing the
//! first `M − N` entries of an all-ones vector and bit-reversing the result,
//! so it depends only on `(M, N)`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::polar::{bit_reversal_permutation, log2_exact};
use crate::{Error, Result};

/// Smallest power of two that is at least `n` (the base-code length).
pub fn base_length(n: usize) -> usize {
    n.max(1).next_power_of_two()
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PuncturePattern {
    bits: Vec<u8>,
    n: usize,
}

impl PuncturePattern {
    /// Wraps an arbitrary 0/1 pattern whose length is a power of two.
    pub fn from_bits(bits: Vec<u8>) -> Result<Self> {
        log2_exact(bits.len())?;
        if let Some(index) = bits.iter().position(|&b| b > 1) {
            return Err(Error::InvalidBit { index });
        }
        let n = bits.iter().filter(|&&b| b == 1).count();
        Ok(Self { bits, n })
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Base-code length `M`.
    pub fn m(&self) -> usize {
        self.bits.len()
    }

    /// Number of transmitted positions `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_reserved(&self, index: usize) -> bool {
        self.bits[index] == 1
    }

    /// The pattern as a single line of `0`/`1` characters.
    pub fn to_line(&self) -> String {
        self.bits
            .iter()
            .map(|&b| if b == 1 { '1' } else { '0' })
            .collect()
    }
}

/// The QUP pattern for base length `m` and punctured length `n`.
pub fn qup_pattern(m: usize, n: usize) -> Result<PuncturePattern> {
    log2_exact(m)?;
    if n == 0 || n > m {
        return Err(Error::InvalidDimensions { k: 0, n, m });
    }
    let mut bits = vec![1u8; m];
    bits[..m - n].fill(0);
    let bits = bit_reversal_permutation(&bits)?;
    Ok(PuncturePattern { bits, n })
}

/// Keeps the reserved positions of `v`, in order.
pub fn puncture<T: Copy>(v: &[T], pattern: &PuncturePattern) -> Result<Vec<T>> {
    if v.len() != pattern.m() {
        return Err(Error::LengthMismatch {
            expected: pattern.m(),
            found: v.len(),
        });
    }
    Ok(v.iter()
        .zip(&pattern.bits)
        .filter(|(_, &keep)| keep == 1)
        .map(|(&x, _)| x)
        .collect())
}

/// Places the `N` received LLRs on the reserved positions; punctured
/// positions get LLR 0.
pub fn depuncture(r: &[f64], pattern: &PuncturePattern) -> Result<Vec<f64>> {
    if r.len() != pattern.n() {
        return Err(Error::LengthMismatch {
            expected: pattern.n(),
            found: r.len(),
        });
    }
    let mut received = r.iter();
    Ok(pattern
        .bits
        .iter()
        .map(|&keep| {
            if keep == 1 {
                *received.next().expect("popcount equals n")
            } else {
                0.0
            }
        })
        .collect())
}
