//! Gaussian-approximation (GA) density evolution over parallel channels.
//!
//! Every LLR density is modelled as `N(m, 2m)` and tracked by its mean `m`.
//! Transmitted positions start at the AWGN mean `2/σ²`; punctured positions
//! are zero-capacity channels with mean 0. One polarization step maps a pair
//! of means `(a, b)` to a check-node mean `φ⁻¹(1 − (1 − φ(a))(1 − φ(b)))` and a
//! variable-node mean `a + b`. The error probability of a channel with mean
//! `m` is `Q(√(m/2))`.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::f64::consts::PI;

use crate::harq::CodeSpec;
use crate::math;
use crate::polar::{bit_reverse_in_place, log2_exact, InfoSet};
use crate::rcpp::PuncturePattern;
use crate::{ChannelSpec, Error, Result};

// φ is piecewise: a quadratic exponent near zero, the exponential fit in the
// middle and the asymptotic series for large means. The joins are where
// adjacent pieces intersect, which keeps φ continuous and strictly decreasing.
const SMALL_JOIN: f64 = 0.867_861_239_085_134_5;
const LARGE_JOIN: f64 = 14.394_352_942_168_545;

fn ln_phi_small(x: f64) -> f64 {
    0.0564 * x * x - 0.4856 * x
}

fn ln_phi_mid(x: f64) -> f64 {
    -0.4527 * math::powf(x, 0.86) + 0.0218
}

fn ln_phi_large(x: f64) -> f64 {
    0.5 * math::ln(PI / x) - 0.25 * x + math::ln_1p(-10.0 / (7.0 * x))
}

fn ln_phi_large_derivative(x: f64) -> f64 {
    let c = 10.0 / 7.0;
    -0.5 / x - 0.25 + (c / (x * x)) / (1.0 - c / x)
}

/// `ln φ(x)` for `x ≥ 0`; `φ(0) = 1`.
pub fn ln_phi(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x < SMALL_JOIN {
        ln_phi_small(x)
    } else if x < LARGE_JOIN {
        ln_phi_mid(x)
    } else {
        ln_phi_large(x)
    }
}

pub fn phi(x: f64) -> f64 {
    math::exp(ln_phi(x))
}

/// Inverse of [`ln_phi`]: the mean `x ≥ 0` with `ln φ(x) = ln_y`.
pub fn phi_inv_ln(ln_y: f64) -> f64 {
    if ln_y >= 0.0 {
        return 0.0;
    }
    if ln_y == f64::NEG_INFINITY {
        return f64::INFINITY;
    }
    if ln_y > ln_phi_small(SMALL_JOIN) {
        let (a, b) = (0.0564, 0.4856);
        return (b - math::sqrt(b * b + 4.0 * a * ln_y)) / (2.0 * a);
    }
    if ln_y > ln_phi_large(LARGE_JOIN) {
        return math::powf((0.0218 - ln_y) / 0.4527, 1.0 / 0.86);
    }
    // Safeguarded Newton on the large branch.
    let mut lo = LARGE_JOIN;
    let mut hi = -4.0 * ln_y + 10.0;
    // One fixed-point step of x = 2·ln(π/x) − 4·ln y as the starting point.
    let guess = 2.0 * math::ln(PI / (-4.0 * ln_y)) - 4.0 * ln_y;
    let mut x = guess.clamp(lo, hi);
    for _ in 0..100 {
        let h = ln_phi_large(x) - ln_y;
        if h.abs() <= 1e-15 * ln_y.abs() {
            return x;
        }
        if h > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let mut next = x - h / ln_phi_large_derivative(x);
        if !(next >= lo && next <= hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-12 * next {
            return next;
        }
        x = next;
    }
    x
}

pub fn phi_inv(y: f64) -> f64 {
    phi_inv_ln(math::ln(y))
}

/// Check-node mean `φ⁻¹(1 − (1 − φ(a))(1 − φ(b)))`, evaluated in the log
/// domain so that large means keep full precision.
pub fn check_node_mean(a: f64, b: f64) -> f64 {
    check_node(a, ln_phi(a), b, ln_phi(b)).0
}

/// Check-node update on `(mean, ln φ(mean))` pairs; returns the output mean
/// and its `ln φ`.
fn check_node(a: f64, la: f64, b: f64, lb: f64) -> (f64, f64) {
    if a <= 0.0 || b <= 0.0 {
        return (0.0, 0.0);
    }
    let (hi, lo) = if la >= lb { (la, lb) } else { (lb, la) };
    if lo - hi < -40.0 {
        // The less reliable input dominates to full precision.
        return (a.min(b), hi);
    }
    // φa + φb − φa·φb = e^hi · (1 + e^(lo−hi) − e^lo)
    let ln_y = hi + math::ln_1p(math::exp(lo - hi) - math::exp(lo));
    (phi_inv_ln(ln_y), ln_y.min(0.0))
}

/// Error probability `Q(√(m/2))` of a channel whose LLR is `N(m, 2m)`.
pub fn error_prob_from_mean(mean: f64) -> Result<f64> {
    if !(mean >= 0.0) {
        return Err(Error::InvalidMean {
            index: 0,
            value: mean,
        });
    }
    // Q(√(m/2)) = ½·erfc(√m / 2)
    Ok(0.5 * math::erfc(0.5 * math::sqrt(mean)))
}

/// Polarizes per-position input means (codeword order) into the means of the
/// `M` synthesized channels, indexed like the decoder's source positions.
pub fn ga_polarize(input_means: &[f64]) -> Result<Vec<f64>> {
    log2_exact(input_means.len())?;
    if let Some(index) = input_means.iter().position(|m| !(*m >= 0.0)) {
        return Err(Error::InvalidMean {
            index,
            value: input_means[index],
        });
    }
    let mut means = input_means.to_vec();
    bit_reverse_in_place(&mut means);
    let mut ln_phis: Vec<f64> = means.iter().map(|&m| ln_phi(m)).collect();
    let len = means.len();
    let mut block = len;
    while block >= 2 {
        let half = block / 2;
        for start in (0..len).step_by(block) {
            for j in start..start + half {
                let (a, b) = (means[j], means[j + half]);
                let (check, ln_check) = check_node(a, ln_phis[j], b, ln_phis[j + half]);
                means[j] = check;
                ln_phis[j] = ln_check;
                means[j + half] = a + b;
                ln_phis[j + half] = ln_phi(a + b);
            }
        }
        block = half;
    }
    Ok(means)
}

/// GA input means: `2/σ²` on reserved positions, 0 on punctured ones.
pub fn input_means(pattern: &PuncturePattern, sigma2: f64) -> Result<Vec<f64>> {
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(Error::InvalidVariance(sigma2));
    }
    let mean = 2.0 / sigma2;
    Ok(pattern
        .bits()
        .iter()
        .map(|&keep| if keep == 1 { mean } else { 0.0 })
        .collect())
}

/// GA means and error probabilities of the `M` polarized channels.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReliabilityProfile {
    means: Vec<f64>,
    pe: Vec<f64>,
}

impl ReliabilityProfile {
    pub fn from_means(means: Vec<f64>) -> Result<Self> {
        let pe = means
            .iter()
            .enumerate()
            .map(|(index, &m)| {
                error_prob_from_mean(m).map_err(|_| Error::InvalidMean { index, value: m })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { means, pe })
    }

    /// Profile of the punctured code described by `pattern` over an AWGN
    /// channel with variance `sigma2`.
    pub fn evaluate(pattern: &PuncturePattern, sigma2: f64) -> Result<Self> {
        Self::from_means(ga_polarize(&input_means(pattern, sigma2)?)?)
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn error_probs(&self) -> &[f64] {
        &self.pe
    }

    pub fn len(&self) -> usize {
        self.means.len()
    }

    pub fn is_empty(&self) -> bool {
        self.means.is_empty()
    }

    /// `Σ_{i∈A} P_e(W_M^(i))`, saturated at 1.
    pub fn bler_bound(&self, info: &InfoSet) -> Result<f64> {
        if info.m() != self.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                found: info.m(),
            });
        }
        let sum: f64 = info.indices().iter().map(|&i| self.pe[i]).sum();
        Ok(sum.min(1.0))
    }
}

/// Indices of the `k` smallest `scores`, ties toward the smaller index.
pub fn select_smallest(scores: &[f64], k: usize) -> Result<InfoSet> {
    if k > scores.len() {
        return Err(Error::InfoSetSize {
            k,
            available: scores.len(),
        });
    }
    if let Some(index) = scores.iter().position(|s| s.is_nan()) {
        return Err(Error::InvalidMean {
            index,
            value: f64::NAN,
        });
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
    order.truncate(k);
    InfoSet::new(order, scores.len())
}

/// The `k` most reliable channels of `profile`: smallest error probability,
/// then largest GA mean (separates channels whose `pe` underflowed to 0),
/// then smallest index.
pub fn select_info_set(profile: &ReliabilityProfile, k: usize) -> Result<InfoSet> {
    let m = profile.len();
    if k > m {
        return Err(Error::InfoSetSize { k, available: m });
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| {
        profile.pe[a]
            .total_cmp(&profile.pe[b])
            .then_with(|| profile.means[b].total_cmp(&profile.means[a]))
            .then(a.cmp(&b))
    });
    order.truncate(k);
    InfoSet::new(order, m)
}

/// SC BLER bound of `code` at the channel's construction variance.
pub fn bler_bound(code: &CodeSpec, ch: &ChannelSpec) -> Result<f64> {
    bler_bound_at(code, ch.sigma2_eq())
}

/// SC BLER bound of `code` over an AWGN channel with variance `sigma2`.
pub fn bler_bound_at(code: &CodeSpec, sigma2: f64) -> Result<f64> {
    if code.k() == 0 {
        return Ok(0.0);
    }
    ReliabilityProfile::evaluate(code.pattern(), sigma2)?.bler_bound(code.info_set())
}

/// Orders channels from most to least reliable (used by debug exports).
pub fn reliability_order(profile: &ReliabilityProfile) -> Vec<usize> {
    let mut order: Vec<usize> = (0..profile.len()).collect();
    order.sort_by(|&a, &b| {
        profile.means[b]
            .partial_cmp(&profile.means[a])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}
