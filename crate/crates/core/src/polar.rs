//! Polar transform and successive cancellation decoding.
//!
//! The generator is the bit-reversed Arıkan form `G_M = B_M · F^{⊗n}` with
//! `F = [[1, 0], [1, 1]]`. Since `B_M` commutes with `F^{⊗n}`, a codeword is
//! the natural-order transform `u · F^{⊗n}` followed by a bit-reversal of the
//! positions; the decoder and the GA construction undo that permutation first
//! and then run the natural-order recursion. Source indices are never permuted.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::{Error, Result};

/// Magnitude limit applied to every LLR the decoder touches.
pub const LLR_CLAMP: f64 = 40.0;

/// Returns `n` such that `len == 2^n`.
pub fn log2_exact(len: usize) -> Result<u32> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::InvalidLength { len });
    }
    Ok(len.trailing_zeros())
}

/// Reverses the lowest `bits` bits of `index`.
#[inline]
pub fn reverse_bits(index: usize, bits: u32) -> usize {
    if bits == 0 {
        0
    } else {
        index.reverse_bits() >> (usize::BITS - bits)
    }
}

/// `output[i] = input[rev_n(i)]`, where `rev_n` reverses the n-bit index.
pub fn bit_reversal_permutation<T: Clone>(v: &[T]) -> Result<Vec<T>> {
    let bits = log2_exact(v.len())?;
    Ok((0..v.len())
        .map(|i| v[reverse_bits(i, bits)].clone())
        .collect())
}

/// In-place version of [`bit_reversal_permutation`]. Length must be a power of two.
pub(crate) fn bit_reverse_in_place<T>(v: &mut [T]) {
    debug_assert!(v.len().is_power_of_two());
    let bits = v.len().trailing_zeros();
    for i in 0..v.len() {
        let j = reverse_bits(i, bits);
        if i < j {
            v.swap(i, j);
        }
    }
}

fn check_bits(bits: &[u8]) -> Result<()> {
    match bits.iter().position(|&b| b > 1) {
        Some(index) => Err(Error::InvalidBit { index }),
        None => Ok(()),
    }
}

/// Natural-order transform `w = u · F^{⊗n}` in place.
fn natural_transform(w: &mut [u8]) {
    let len = w.len();
    let mut half = 1;
    while half < len {
        for block in (0..len).step_by(2 * half) {
            for a in block..block + half {
                w[a] ^= w[a + half];
            }
        }
        half *= 2;
    }
}

/// Computes `v = u · B_M · F^{⊗n}` over GF(2). The map is an involution.
pub fn polar_encode(u: &[u8]) -> Result<Vec<u8>> {
    log2_exact(u.len())?;
    check_bits(u)?;
    let mut v = u.to_vec();
    natural_transform(&mut v);
    bit_reverse_in_place(&mut v);
    Ok(v)
}

/// The sorted set of information-carrying source positions of a length-`M`
/// polar code. Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct InfoSet {
    indices: Vec<usize>,
    m: usize,
}

impl InfoSet {
    pub fn new(mut indices: Vec<usize>, m: usize) -> Result<Self> {
        log2_exact(m)?;
        indices.sort_unstable();
        for pair in indices.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::DuplicateIndex { index: pair[0] });
            }
        }
        if let Some(&last) = indices.last() {
            if last >= m {
                return Err(Error::IndexOutOfRange {
                    index: last,
                    len: m,
                });
            }
        }
        Ok(Self { indices, m })
    }

    /// Builds the set from 1-based indices, as written in the literature.
    pub fn from_one_based(indices: &[usize], m: usize) -> Result<Self> {
        let zero_based = indices
            .iter()
            .map(|&i| {
                i.checked_sub(1)
                    .ok_or(Error::IndexOutOfRange { index: 0, len: m })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(zero_based, m)
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn k(&self) -> usize {
        self.indices.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `mask[i]` is true when source position `i` carries information.
    pub fn info_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.m];
        for &i in &self.indices {
            mask[i] = true;
        }
        mask
    }

    /// Places `info_bits` on the information positions and zeros elsewhere.
    pub fn expand(&self, info_bits: &[u8]) -> Result<Vec<u8>> {
        if info_bits.len() != self.k() {
            return Err(Error::LengthMismatch {
                expected: self.k(),
                found: info_bits.len(),
            });
        }
        check_bits(info_bits)?;
        let mut u = vec![0u8; self.m];
        for (&pos, &bit) in self.indices.iter().zip(info_bits) {
            u[pos] = bit;
        }
        Ok(u)
    }
}

/// Receiver buffer of combined LLRs, one per base-code position.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrBuffer {
    values: Vec<f64>,
    rounds: u32,
}

impl LlrBuffer {
    /// An empty (all-zero) buffer of length `m` that has seen no transmission.
    pub fn new(m: usize) -> Self {
        Self {
            values: vec![0.0; m],
            rounds: 0,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn round_count(&self) -> u32 {
        self.rounds
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Termwise `r ← r + new`, counting one more transmission.
    pub fn combine(&mut self, new_llrs: &[f64]) -> Result<()> {
        if new_llrs.len() != self.values.len() {
            return Err(Error::LengthMismatch {
                expected: self.values.len(),
                found: new_llrs.len(),
            });
        }
        if let Some(index) = new_llrs.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteLlr { index });
        }
        for (r, &x) in self.values.iter_mut().zip(new_llrs) {
            *r += x;
        }
        self.rounds += 1;
        Ok(())
    }
}

/// Check-node LLR update used by the decoder.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CheckUpdate {
    /// `2·atanh(tanh(a/2)·tanh(b/2))`.
    #[default]
    Exact,
    /// `sign(a)·sign(b)·min(|a|, |b|)`.
    MinSum,
}

#[inline]
fn clamp_llr(x: f64) -> f64 {
    x.clamp(-LLR_CLAMP, LLR_CLAMP)
}

impl CheckUpdate {
    #[inline]
    pub fn apply(self, a: f64, b: f64) -> f64 {
        let sign = if (a < 0.0) != (b < 0.0) { -1.0 } else { 1.0 };
        let (abs_a, abs_b) = (a.abs(), b.abs());
        let magnitude = match self {
            CheckUpdate::MinSum => abs_a.min(abs_b),
            // Same function as the tanh form, evaluated without tanh/atanh
            // saturation.
            CheckUpdate::Exact => {
                abs_a.min(abs_b) + math::ln_1p(math::exp(-(abs_a + abs_b)))
                    - math::ln_1p(math::exp(-(abs_a - abs_b).abs()))
            }
        };
        clamp_llr(sign * magnitude)
    }
}

/// Variable-node update given the partial sum `bit` of the upper branch.
#[inline]
fn g_update(a: f64, b: f64, bit: u8) -> f64 {
    clamp_llr(if bit == 0 { b + a } else { b - a })
}

/// Output of [`sc_decode`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScOutput {
    /// Hard decisions on the information positions, in index order.
    pub info_bits: Vec<u8>,
    /// The full estimated source block (information and frozen bits).
    pub source: Vec<u8>,
    /// Re-encoded codeword estimate, `polar_encode(source)`.
    pub codeword: Vec<u8>,
}

/// SC decoding with all-zero frozen bits.
pub fn sc_decode(llr: &[f64], info: &InfoSet, update: CheckUpdate) -> Result<ScOutput> {
    let frozen = vec![0u8; info.m() - info.k()];
    sc_decode_with_frozen(llr, info, &frozen, update)
}

/// SC decoding over codeword-order LLRs `llr` (length `M`). Frozen positions
/// take `frozen_values` in increasing index order.
pub fn sc_decode_with_frozen(
    llr: &[f64],
    info: &InfoSet,
    frozen_values: &[u8],
    update: CheckUpdate,
) -> Result<ScOutput> {
    let m = info.m();
    if llr.len() != m {
        return Err(Error::LengthMismatch {
            expected: m,
            found: llr.len(),
        });
    }
    if frozen_values.len() != m - info.k() {
        return Err(Error::LengthMismatch {
            expected: m - info.k(),
            found: frozen_values.len(),
        });
    }
    check_bits(frozen_values)?;
    if let Some(index) = llr.iter().position(|x| x.is_nan()) {
        return Err(Error::NonFiniteLlr { index });
    }

    let mask = info.info_mask();
    // Frozen bit value per source index; ignored at information positions.
    let mut fixed = vec![0u8; m];
    let mut next_frozen = frozen_values.iter();
    for (slot, &is_info) in fixed.iter_mut().zip(&mask) {
        if !is_info {
            *slot = *next_frozen.next().expect("frozen count checked above");
        }
    }

    let mut natural: Vec<f64> = llr.iter().map(|&x| clamp_llr(x)).collect();
    bit_reverse_in_place(&mut natural);

    let mut source = vec![0u8; m];
    let mut partial = vec![0u8; m];
    let mut scratch = vec![0.0; m];
    let nodes = Nodes {
        mask: &mask,
        fixed: &fixed,
        update,
    };
    nodes.decode(&natural, 0, &mut source, &mut partial, &mut scratch);

    bit_reverse_in_place(&mut partial);
    let info_bits = info.indices().iter().map(|&i| source[i]).collect();
    Ok(ScOutput {
        info_bits,
        source,
        codeword: partial,
    })
}

struct Nodes<'a> {
    mask: &'a [bool],
    fixed: &'a [u8],
    update: CheckUpdate,
}

impl Nodes<'_> {
    /// Decodes the subtree whose leaves are source indices
    /// `offset..offset + llr.len()`, writing the source decisions and the
    /// subtree's natural-order codeword (`partial`).
    fn decode(
        &self,
        llr: &[f64],
        offset: usize,
        source: &mut [u8],
        partial: &mut [u8],
        scratch: &mut [f64],
    ) {
        let len = llr.len();
        if len == 1 {
            let bit = if self.mask[offset] {
                u8::from(llr[0] < 0.0)
            } else {
                self.fixed[offset]
            };
            source[0] = bit;
            partial[0] = bit;
            return;
        }
        let half = len / 2;
        let (child, rest) = scratch.split_at_mut(half);
        let (upper_llr, lower_llr) = llr.split_at(half);

        for ((c, &a), &b) in child.iter_mut().zip(upper_llr).zip(lower_llr) {
            *c = self.update.apply(a, b);
        }
        let (src_upper, src_lower) = source.split_at_mut(half);
        let (part_upper, part_lower) = partial.split_at_mut(half);
        self.decode(child, offset, src_upper, part_upper, rest);

        for (((c, &a), &b), &bit) in child
            .iter_mut()
            .zip(upper_llr)
            .zip(lower_llr)
            .zip(part_upper.iter())
        {
            *c = g_update(a, b, bit);
        }
        self.decode(child, offset + half, src_lower, part_lower, rest);

        for (p, &q) in part_upper.iter_mut().zip(part_lower.iter()) {
            *p ^= q;
        }
    }
}
