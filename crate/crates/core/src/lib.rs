//! Rate-compatible punctured polar (RCPP) codes with Chase-combining HARQ.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only the numerical
//! and coding kernels:
//!
//! - [`polar`]: polar transform, bit-reversal permutation and successive
//!   cancellation decoding over arbitrary per-position LLRs.
//! - [`channel`]: BPSK over AWGN and uncorrelated Rayleigh fast fading,
//!   LLR computation, capacity integrals and the equivalent-AWGN solver.
//! - [`rcpp`]: quasi-uniform puncturing patterns, puncturing and depuncturing.
//! - [`construction`]: Gaussian-approximation density evolution over parallel
//!   (partly punctured) channels, information-set selection and the SC BLER
//!   bound.
//! - [`harq`]: Chase-combining session state machine, the throughput
//!   approximation and the code-length design search.
//!
//! Randomness is always supplied by the caller as an [`rand::Rng`], so every
//! function here is deterministic given its inputs.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod channel;
pub mod construction;
mod error;
pub mod harq;
mod math;
pub mod polar;
mod quad;
pub mod rcpp;

pub use error::{Error, Result};

pub use channel::{ChannelKind, ChannelSpec, ReceivedBlock, SnrConvention};
pub use construction::ReliabilityProfile;
pub use harq::{CodeSpec, HarqDesign, HarqSession, SessionOutcome};
pub use polar::{CheckUpdate, InfoSet, LlrBuffer};
pub use rcpp::PuncturePattern;
