//! Chase-combining HARQ over RCPP codes.
//!
//! Every retransmission repeats the same punctured codeword `x`; the receiver
//! adds the new depunctured LLRs to its buffer and runs SC decoding again,
//! until the block decodes (ACK) or `T` transmissions have been spent.
//!
//! With `Pr(E_t)` the probability that decoding still fails after `t`
//! transmissions, the throughput is approximated by
//!
//! ```text
//! η ≈ K·(1 − Pr(E_T)) / (N·(1 + Σ_{t=1}^{T−1} Pr(E_t)))
//! ```
//!
//! which follows from bounding `Pr(E_t ∩ … ∩ E_0)` by `Pr(E_t)` and
//! `Pr(¬E_t ∩ E_{t−1} ∩ … ∩ E_0)` by `Pr(E_{t−1}) − Pr(E_t)`, with
//! `Pr(E_0) = 1`. Over AWGN, `t` combined copies behave like one copy at
//! variance `σ²/t`, so `Pr(E_t)` is the GA BLER bound at `σ²/t`
//! (`σ²_eq/t` for Rayleigh fading).

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::channel::{llr_of, transmit, ChannelSpec};
use crate::construction::{bler_bound_at, select_info_set, ReliabilityProfile};
use crate::polar::{polar_encode, sc_decode, CheckUpdate, InfoSet, LlrBuffer};
use crate::rcpp::{base_length, depuncture, puncture, qup_pattern, PuncturePattern};
use crate::{Error, Result};

/// A concrete RCPP code: `K` information bits on a length-`M` polar code
/// punctured to `N` transmitted bits.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CodeSpec {
    info: InfoSet,
    pattern: PuncturePattern,
}

impl CodeSpec {
    pub fn new(info: InfoSet, pattern: PuncturePattern) -> Result<Self> {
        let (k, n, m) = (info.k(), pattern.n(), pattern.m());
        if info.m() != m || k > n || m != base_length(n) {
            return Err(Error::InvalidDimensions { k, n, m });
        }
        Ok(Self { info, pattern })
    }

    /// QUP-punctured code of length `n` whose information set is chosen by GA
    /// over an AWGN channel with variance `sigma2`.
    pub fn construct(k: usize, n: usize, sigma2: f64) -> Result<Self> {
        Ok(Self::construct_with_profile(k, n, sigma2)?.0)
    }

    fn construct_with_profile(
        k: usize,
        n: usize,
        sigma2: f64,
    ) -> Result<(Self, ReliabilityProfile)> {
        let m = base_length(n);
        if k == 0 || k > n {
            return Err(Error::InvalidDimensions { k, n, m });
        }
        let pattern = qup_pattern(m, n)?;
        let profile = ReliabilityProfile::evaluate(&pattern, sigma2)?;
        let info = select_info_set(&profile, k)?;
        Ok((Self::new(info, pattern)?, profile))
    }

    pub fn k(&self) -> usize {
        self.info.k()
    }

    pub fn n(&self) -> usize {
        self.pattern.n()
    }

    pub fn m(&self) -> usize {
        self.pattern.m()
    }

    pub fn info_set(&self) -> &InfoSet {
        &self.info
    }

    pub fn pattern(&self) -> &PuncturePattern {
        &self.pattern
    }

    /// Encodes `info_bits` and punctures the result to the `N`-bit codeword.
    pub fn encode(&self, info_bits: &[u8]) -> Result<Vec<u8>> {
        let u = self.info.expand(info_bits)?;
        puncture(&polar_encode(&u)?, &self.pattern)
    }
}

/// Returns `buffer + new_llrs` with the round count advanced by one.
pub fn chase_combine(buffer: &LlrBuffer, new_llrs: &[f64]) -> Result<LlrBuffer> {
    let mut combined = buffer.clone();
    combined.combine(new_llrs)?;
    Ok(combined)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SessionOutcome {
    Pending,
    Acked,
    Failed,
}

/// Receiver-side state of one HARQ-CC session with genie-aided error
/// detection: the decoded block is compared with the transmitted one.
#[derive(Debug, Clone)]
pub struct HarqSession<'a> {
    code: &'a CodeSpec,
    max_transmissions: u32,
    sent_info: Vec<u8>,
    buffer: LlrBuffer,
    outcome: SessionOutcome,
    update: CheckUpdate,
}

impl<'a> HarqSession<'a> {
    pub fn new(code: &'a CodeSpec, max_transmissions: u32, sent_info: Vec<u8>) -> Result<Self> {
        if max_transmissions == 0 {
            return Err(Error::InvalidMaxTransmissions);
        }
        if sent_info.len() != code.k() {
            return Err(Error::LengthMismatch {
                expected: code.k(),
                found: sent_info.len(),
            });
        }
        Ok(Self {
            code,
            max_transmissions,
            sent_info,
            buffer: LlrBuffer::new(code.m()),
            outcome: SessionOutcome::Pending,
            update: CheckUpdate::Exact,
        })
    }

    pub fn with_check_update(mut self, update: CheckUpdate) -> Self {
        self.update = update;
        self
    }

    pub fn transmissions(&self) -> u32 {
        self.buffer.round_count()
    }

    pub fn outcome(&self) -> SessionOutcome {
        self.outcome
    }

    pub fn buffer(&self) -> &LlrBuffer {
        &self.buffer
    }

    /// Processes the `N` channel LLRs of one more transmission.
    pub fn receive(&mut self, llrs: &[f64]) -> Result<SessionOutcome> {
        if self.outcome != SessionOutcome::Pending {
            return Err(Error::SessionFinished);
        }
        let full = depuncture(llrs, self.code.pattern())?;
        self.buffer.combine(&full)?;
        let decoded = sc_decode(self.buffer.values(), self.code.info_set(), self.update)?;
        self.outcome = if decoded.info_bits == self.sent_info {
            SessionOutcome::Acked
        } else if self.buffer.round_count() >= self.max_transmissions {
            SessionOutcome::Failed
        } else {
            SessionOutcome::Pending
        };
        Ok(self.outcome)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SessionResult {
    pub success: bool,
    /// Transmissions used, in `1..=T`.
    pub rounds: u32,
}

/// Draws a random information block from `rng` and runs one complete
/// session over `ch`.
pub fn run_session<R: Rng + ?Sized>(
    code: &CodeSpec,
    ch: &ChannelSpec,
    max_transmissions: u32,
    rng: &mut R,
) -> Result<SessionResult> {
    run_session_with(code, ch, max_transmissions, CheckUpdate::Exact, rng)
}

pub fn run_session_with<R: Rng + ?Sized>(
    code: &CodeSpec,
    ch: &ChannelSpec,
    max_transmissions: u32,
    update: CheckUpdate,
    rng: &mut R,
) -> Result<SessionResult> {
    let info_bits = random_bits(code.k(), rng);
    let x = code.encode(&info_bits)?;
    let mut session =
        HarqSession::new(code, max_transmissions, info_bits)?.with_check_update(update);
    loop {
        let rx = transmit(&x, ch, rng);
        let outcome = session.receive(&llr_of(&rx, ch)?)?;
        if outcome != SessionOutcome::Pending {
            return Ok(SessionResult {
                success: outcome == SessionOutcome::Acked,
                rounds: session.transmissions(),
            });
        }
    }
}

/// `len` uniform bits drawn 64 at a time.
pub fn random_bits<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<u8> {
    let mut bits = vec![0u8; len];
    for chunk in bits.chunks_mut(64) {
        let word: u64 = rng.random();
        for (j, bit) in chunk.iter_mut().enumerate() {
            *bit = ((word >> j) & 1) as u8;
        }
    }
    bits
}

/// Throughput approximation from the per-round failure probabilities
/// `[Pr(E_1), …, Pr(E_T)]`.
pub fn throughput_bound(k: usize, n: usize, per_round_pe: &[f64]) -> Result<f64> {
    let last = *per_round_pe.last().ok_or(Error::EmptyErrorProfile)?;
    if let Some(&bad) = per_round_pe.iter().find(|p| !(**p >= 0.0 && **p <= 1.0)) {
        return Err(Error::InvalidProbability(bad));
    }
    if n == 0 {
        return Err(Error::InvalidDimensions { k, n, m: 0 });
    }
    let retransmissions: f64 = per_round_pe[..per_round_pe.len() - 1].iter().sum();
    Ok(k as f64 * (1.0 - last) / (n as f64 * (1.0 + retransmissions)))
}

/// `[Pr(E_1), …, Pr(E_T)]`, where `Pr(E_t)` is the GA BLER bound at variance
/// `σ²_eq/t`.
pub fn per_round_error_probs(
    code: &CodeSpec,
    ch: &ChannelSpec,
    max_transmissions: u32,
) -> Result<Vec<f64>> {
    if max_transmissions == 0 {
        return Err(Error::InvalidMaxTransmissions);
    }
    (1..=max_transmissions)
        .map(|t| bler_bound_at(code, ch.sigma2_eq() / f64::from(t)))
        .collect()
}

/// Output of the design search.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HarqDesign {
    pub code: CodeSpec,
    pub max_transmissions: u32,
    pub permitted_bits: usize,
    pub per_round_pe: Vec<f64>,
    pub eta_bound: f64,
}

/// One evaluated code length.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub code: CodeSpec,
    pub per_round_pe: Vec<f64>,
    pub eta: f64,
}

/// GA evaluations spent by [`evaluate_candidate`] for `T` transmissions.
pub fn ga_evaluations_per_candidate(max_transmissions: u32) -> usize {
    max_transmissions as usize
}

/// Builds the length-`n` QUP code with its information set chosen at the
/// first-transmission variance `sigma2`, then evaluates `Pr(E_t)` at `sigma2/t`
/// and the resulting throughput bound.
pub fn evaluate_candidate(
    k: usize,
    n: usize,
    max_transmissions: u32,
    sigma2: f64,
) -> Result<Candidate> {
    if max_transmissions == 0 {
        return Err(Error::InvalidMaxTransmissions);
    }
    let (code, first) = CodeSpec::construct_with_profile(k, n, sigma2)?;
    let mut per_round_pe = Vec::with_capacity(max_transmissions as usize);
    per_round_pe.push(first.bler_bound(code.info_set())?);
    for t in 2..=max_transmissions {
        per_round_pe.push(bler_bound_at(&code, sigma2 / f64::from(t))?);
    }
    let eta = throughput_bound(k, n, &per_round_pe)?;
    Ok(Candidate {
        code,
        per_round_pe,
        eta,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Stop scanning once `K/n` falls below the best throughput found so far.
    pub early_termination: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            early_termination: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub design: HarqDesign,
    pub candidates_evaluated: usize,
    pub ga_evaluations: usize,
}

/// Inclusive range of code lengths `K..=⌊Q/T⌋` scanned by the search.
pub fn search_range(
    k: usize,
    permitted_bits: usize,
    max_transmissions: u32,
) -> Result<(usize, usize)> {
    if max_transmissions == 0 {
        return Err(Error::InvalidMaxTransmissions);
    }
    let upper = permitted_bits / max_transmissions as usize;
    if k == 0 || upper < k {
        return Err(Error::InfeasibleSearch { k, upper });
    }
    Ok((k, upper))
}

/// Picks the code length with the largest throughput bound.
pub fn design_search(
    k: usize,
    permitted_bits: usize,
    max_transmissions: u32,
    ch: &ChannelSpec,
) -> Result<HarqDesign> {
    Ok(design_search_with(
        k,
        permitted_bits,
        max_transmissions,
        ch,
        SearchOptions::default(),
    )?
    .design)
}

pub fn design_search_with(
    k: usize,
    permitted_bits: usize,
    max_transmissions: u32,
    ch: &ChannelSpec,
    options: SearchOptions,
) -> Result<SearchOutcome> {
    let (lower, upper) = search_range(k, permitted_bits, max_transmissions)?;
    let sigma2 = ch.sigma2_eq();
    let mut best: Option<Candidate> = None;
    let mut evaluated = 0;
    for n in lower..=upper {
        if options.early_termination {
            if let Some(b) = &best {
                if (k as f64) / (n as f64) < b.eta {
                    break;
                }
            }
        }
        let candidate = evaluate_candidate(k, n, max_transmissions, sigma2)?;
        evaluated += 1;
        if best.as_ref().is_none_or(|b| candidate.eta > b.eta) {
            best = Some(candidate);
        }
    }
    let best = best.expect("search range is non-empty");
    Ok(SearchOutcome {
        design: HarqDesign {
            code: best.code,
            max_transmissions,
            permitted_bits,
            per_round_pe: best.per_round_pe,
            eta_bound: best.eta,
        },
        candidates_evaluated: evaluated,
        ga_evaluations: evaluated * ga_evaluations_per_candidate(max_transmissions),
    })
}
