//! BPSK over AWGN and uncorrelated Rayleigh fast-fading channels.
//!
//! Received samples follow `y_i = a_i·s_i + z_i` with `s_i = 1 − 2x_i`,
//! `z_i ~ N(0, σ²)` and fading gains `a_i` that are 1 for AWGN or i.i.d. with
//! density `p(a) = 2a·exp(−a²)` (so `E[a²] = 1`) for Rayleigh fading. The
//! receiver knows the gains; the code constructor only knows their
//! distribution and therefore works on the equivalent AWGN channel whose
//! capacity equals the ergodic capacity.

use alloc::vec::Vec;
use core::f64::consts::{LN_2, PI};

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::math;
use crate::quad::integrate;
use crate::{Error, Result};

const CAPACITY_TOL: f64 = 1e-12;
/// Upper integration limit for the fading gain; the Rayleigh tail mass beyond
/// it is `exp(−36)`, and its capacity contribution is below 1e-15.
const MAX_FADING_GAIN: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum ChannelKind {
    Awgn,
    RayleighFast,
}

/// Mapping between an SNR in dB and the noise variance σ².
///
/// The default is `Es/N0 = 1/(2σ²)`; it is the convention under which the
/// design search reproduces the reference K=1024, Q=16384, T=6 configurations.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SnrConvention {
    /// `SNR = 1/σ²`.
    OneOverSigma2,
    /// `Es/N0 = 1/(2σ²)`.
    #[default]
    EsOverN0,
}

impl SnrConvention {
    pub fn sigma2_from_db(self, snr_db: f64) -> f64 {
        let linear = math::powf(10.0, snr_db / 10.0);
        match self {
            SnrConvention::OneOverSigma2 => 1.0 / linear,
            SnrConvention::EsOverN0 => 1.0 / (2.0 * linear),
        }
    }

    pub fn db_from_sigma2(self, sigma2: f64) -> f64 {
        let linear = match self {
            SnrConvention::OneOverSigma2 => 1.0 / sigma2,
            SnrConvention::EsOverN0 => 1.0 / (2.0 * sigma2),
        };
        10.0 * math::log10(linear)
    }
}

/// A channel family with its noise variance and the variance of the AWGN
/// channel used for code construction (`sigma2_eq == sigma2` for AWGN).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChannelSpec {
    kind: ChannelKind,
    sigma2: f64,
    sigma2_eq: f64,
}

fn check_variance(sigma2: f64) -> Result<()> {
    if sigma2 > 0.0 && sigma2.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidVariance(sigma2))
    }
}

impl ChannelSpec {
    pub fn awgn(sigma2: f64) -> Result<Self> {
        check_variance(sigma2)?;
        Ok(Self {
            kind: ChannelKind::Awgn,
            sigma2,
            sigma2_eq: sigma2,
        })
    }

    /// Rayleigh fast fading; solves for the equivalent AWGN variance.
    pub fn rayleigh(sigma2: f64) -> Result<Self> {
        let sigma2_eq = equivalent_awgn_sigma2(sigma2)?;
        Ok(Self {
            kind: ChannelKind::RayleighFast,
            sigma2,
            sigma2_eq,
        })
    }

    pub fn new(kind: ChannelKind, sigma2: f64) -> Result<Self> {
        match kind {
            ChannelKind::Awgn => Self::awgn(sigma2),
            ChannelKind::RayleighFast => Self::rayleigh(sigma2),
        }
    }

    pub fn from_snr_db(kind: ChannelKind, snr_db: f64, convention: SnrConvention) -> Result<Self> {
        Self::new(kind, convention.sigma2_from_db(snr_db))
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    /// Variance of the AWGN channel the code is constructed and evaluated on.
    pub fn sigma2_eq(&self) -> f64 {
        self.sigma2_eq
    }
}

/// Channel outputs and the fading gains seen by the receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedBlock {
    pub y: Vec<f64>,
    pub gains: Vec<f64>,
}

/// Sends `x` once over `ch`. For each symbol the fading gain is drawn before
/// the noise sample, so a seeded `rng` reproduces the block bit for bit.
pub fn transmit<R: Rng + ?Sized>(x: &[u8], ch: &ChannelSpec, rng: &mut R) -> ReceivedBlock {
    let sigma = math::sqrt(ch.sigma2);
    let mut y = Vec::with_capacity(x.len());
    let mut gains = Vec::with_capacity(x.len());
    for &bit in x {
        let s = if bit == 0 { 1.0 } else { -1.0 };
        let a = match ch.kind {
            ChannelKind::Awgn => 1.0,
            ChannelKind::RayleighFast => {
                let e: f64 = Exp1.sample(rng);
                math::sqrt(e)
            }
        };
        let z: f64 = StandardNormal.sample(rng);
        y.push(a * s + sigma * z);
        gains.push(a);
    }
    ReceivedBlock { y, gains }
}

/// Per-symbol LLRs `2·a_i·y_i/σ²`.
pub fn llr_of(rx: &ReceivedBlock, ch: &ChannelSpec) -> Result<Vec<f64>> {
    check_variance(ch.sigma2)?;
    if rx.y.len() != rx.gains.len() {
        return Err(Error::LengthMismatch {
            expected: rx.y.len(),
            found: rx.gains.len(),
        });
    }
    let scale = 2.0 / ch.sigma2;
    Ok(rx
        .y
        .iter()
        .zip(&rx.gains)
        .map(|(&y, &a)| scale * a * y)
        .collect())
}

/// `log2(1 + e^{-x})` without overflow.
fn log2_one_plus_exp_neg(x: f64) -> f64 {
    let nat = if x >= 0.0 {
        math::ln_1p(math::exp(-x))
    } else {
        -x + math::ln_1p(math::exp(x))
    };
    nat / LN_2
}

fn awgn_capacity_unchecked(sigma2: f64) -> f64 {
    // Differential entropy of the two-component mixture minus the noise
    // entropy, rewritten as 1 − E[log2(1 + e^{−2y/σ²}) | s = +1]; the two
    // forms are identical but this one has no cancellation at either end.
    let sigma = math::sqrt(sigma2);
    let norm = 1.0 / math::sqrt(2.0 * PI * sigma2);
    let integrand = |y: f64| {
        let d = y - 1.0;
        norm * math::exp(-d * d / (2.0 * sigma2)) * log2_one_plus_exp_neg(2.0 * y / sigma2)
    };
    let loss = integrate(
        integrand,
        1.0 - 10.0 * sigma,
        1.0 + 10.0 * sigma,
        16,
        CAPACITY_TOL,
    );
    (1.0 - loss).clamp(0.0, 1.0)
}

/// Symmetric capacity (bits) of the binary-input AWGN channel with noise
/// variance `sigma2`.
pub fn awgn_capacity(sigma2: f64) -> Result<f64> {
    check_variance(sigma2)?;
    Ok(awgn_capacity_unchecked(sigma2))
}

/// Ergodic capacity (bits) of the binary-input Rayleigh fast-fading channel:
/// `∫ I_G(σ²/a²)·2a·exp(−a²) da`.
pub fn rayleigh_capacity(sigma2: f64) -> Result<f64> {
    check_variance(sigma2)?;
    let integrand = |a: f64| {
        if a <= 0.0 {
            return 0.0;
        }
        2.0 * a * math::exp(-a * a) * awgn_capacity_unchecked(sigma2 / (a * a))
    };
    Ok(integrate(integrand, 0.0, MAX_FADING_GAIN, 12, 1e-10).clamp(0.0, 1.0))
}

/// Finds `σ²_eq` with `I_G(σ²_eq) = I_R(sigma2)` by bisection on `ln σ²`.
pub fn equivalent_awgn_sigma2(sigma2: f64) -> Result<f64> {
    check_variance(sigma2)?;
    let target = rayleigh_capacity(sigma2)?;
    solve_awgn_sigma2_for_capacity(target, sigma2)
}

/// Inverts the decreasing map `σ² ↦ I_G(σ²)` starting from a variance whose
/// capacity is known to be at or above `target`.
pub fn solve_awgn_sigma2_for_capacity(target: f64, lower_hint: f64) -> Result<f64> {
    if !(target > 0.0 && target < 1.0) {
        return Err(Error::BracketFailure(target));
    }
    let mut lo = math::ln(lower_hint);
    if awgn_capacity_unchecked(math::exp(lo)) < target {
        return Err(Error::BracketFailure(target));
    }
    let mut hi = lo + 1.0;
    let mut expansions = 0;
    while awgn_capacity_unchecked(math::exp(hi)) > target {
        hi += 1.0;
        expansions += 1;
        if expansions > 200 {
            return Err(Error::BracketFailure(target));
        }
    }
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let cap = awgn_capacity_unchecked(math::exp(mid));
        if (cap - target).abs() < 1e-10 || hi - lo < 1e-14 {
            break;
        }
        if cap > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(math::exp(mid))
}
