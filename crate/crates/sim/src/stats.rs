//! Integer per-trial counters and the estimators built from them.
//!
//! Counters are merged by plain addition, so the aggregate is independent of
//! how trials were split between workers.

use serde::{Deserialize, Serialize};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub trials: u64,
    /// Sessions delivered within the transmission limit.
    pub successes: u64,
    /// Sessions whose first transmission failed to decode.
    pub first_round_errors: u64,
    /// Σ rounds used.
    pub rounds: u64,
    /// Σ rounds².
    pub rounds_sq: u64,
    /// Σ rounds over successful sessions.
    pub success_rounds: u64,
}

impl Tally {
    pub fn record(success: bool, rounds: u32) -> Self {
        let r = u64::from(rounds);
        Self {
            trials: 1,
            successes: u64::from(success),
            first_round_errors: u64::from(!(success && rounds == 1)),
            rounds: r,
            rounds_sq: r * r,
            success_rounds: if success { r } else { 0 },
        }
    }

    pub fn merge(self, other: Self) -> Self {
        Self {
            trials: self.trials + other.trials,
            successes: self.successes + other.successes,
            first_round_errors: self.first_round_errors + other.first_round_errors,
            rounds: self.rounds + other.rounds,
            rounds_sq: self.rounds_sq + other.rounds_sq,
            success_rounds: self.success_rounds + other.success_rounds,
        }
    }

    /// Empirical `Pr(E_1)`.
    pub fn bler_round1(&self) -> f64 {
        self.first_round_errors as f64 / self.trials as f64
    }

    pub fn bler_round1_se(&self) -> f64 {
        let p = self.bler_round1();
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }

    pub fn avg_transmissions(&self) -> f64 {
        self.rounds as f64 / self.trials as f64
    }

    pub fn avg_transmissions_se(&self) -> f64 {
        let n = self.trials as f64;
        let mean = self.avg_transmissions();
        let var = (self.rounds_sq as f64 / n - mean * mean).max(0.0);
        (var / n).sqrt()
    }

    /// Delivered information bits per transmitted channel bit:
    /// `K·successes / (N·Σ rounds)`.
    pub fn throughput(&self, k: usize, n: usize) -> f64 {
        (k as f64 * self.successes as f64) / (n as f64 * self.rounds as f64)
    }

    /// Standard error of [`Tally::throughput`] from the delta method for a
    /// ratio of means, `ρ = Σs/Σr`.
    pub fn throughput_se(&self, k: usize, n: usize) -> f64 {
        let trials = self.trials as f64;
        let rho = self.successes as f64 / self.rounds as f64;
        let mean_rounds = self.rounds as f64 / trials;
        // E[(s − ρ r)²] with s ∈ {0, 1}, so s² = s.
        let residual = (self.successes as f64 - 2.0 * rho * self.success_rounds as f64
            + rho * rho * self.rounds_sq as f64)
            / trials;
        (k as f64 / n as f64) * (residual.max(0.0) / trials).sqrt() / mean_rounds
    }
}
