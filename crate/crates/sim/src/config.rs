//! Experiment configuration, its JSON form and validation.

use std::path::{Path, PathBuf};

use polar_harq::{ChannelKind, ChannelSpec, SnrConvention};
use serde::{Deserialize, Serialize};

use crate::error::{SimError, SimResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    /// Single-transmission BLER of a fixed-length code, with its GA bound.
    BlerCurve,
    /// Chase-combining sessions over the designed (or given) code length.
    HarqThroughput,
    /// Throughput-optimal code lengths only; no Monte Carlo.
    DesignTable,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    #[default]
    Awgn,
    /// Uncorrelated (fast) Rayleigh fading with receiver CSI.
    Rayleigh,
}

impl Channel {
    pub fn kind(self) -> ChannelKind {
        match self {
            Channel::Awgn => ChannelKind::Awgn,
            Channel::Rayleigh => ChannelKind::RayleighFast,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

pub const DEFAULT_K: usize = 1024;
pub const DEFAULT_Q: usize = 16384;
pub const DEFAULT_T_MAX: u32 = 6;
pub const DEFAULT_TRIALS: u64 = 10_000;

fn default_k() -> usize {
    DEFAULT_K
}
fn default_q() -> usize {
    DEFAULT_Q
}
fn default_t_max() -> u32 {
    DEFAULT_T_MAX
}
fn default_trials() -> u64 {
    DEFAULT_TRIALS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub channel: Channel,
    #[serde(default)]
    pub snr_grid_db: Vec<f64>,
    /// Information block length.
    #[serde(default = "default_k")]
    pub k: usize,
    /// Permitted transmitted bits over all rounds.
    #[serde(default = "default_q")]
    pub q: usize,
    /// Maximum number of transmissions per session.
    #[serde(default = "default_t_max")]
    pub t_max: u32,
    /// Fixed code length; required for BLER curves, and replaces the design
    /// search for HARQ campaigns when given.
    #[serde(default)]
    pub n: Option<usize>,
    /// Trials per SNR point (an upper limit when `min_errors` is set).
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub snr_convention: SnrConvention,
    #[serde(default)]
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
    /// Stop an SNR point early once this many first-round block errors have
    /// been observed. Off by default.
    #[serde(default)]
    pub min_errors: Option<u64>,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            kind,
            channel: Channel::default(),
            snr_grid_db: Vec::new(),
            k: DEFAULT_K,
            q: DEFAULT_Q,
            t_max: DEFAULT_T_MAX,
            n: None,
            trials: DEFAULT_TRIALS,
            seed: 0,
            snr_convention: SnrConvention::default(),
            output_path: None,
            format: OutputFormat::default(),
            min_errors: None,
        }
    }

    pub fn from_json_file(path: &Path) -> SimResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| SimError::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| SimError::ConfigParse {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn validate(&self) -> SimResult<()> {
        let invalid = |msg: String| Err(SimError::InvalidConfig(msg));
        if self.trials == 0 {
            return invalid("trials must be at least 1".into());
        }
        if self.snr_grid_db.is_empty() {
            return invalid("the SNR grid is empty".into());
        }
        if let Some(bad) = self.snr_grid_db.iter().find(|s| !s.is_finite()) {
            return invalid(format!("SNR {bad} dB is not finite"));
        }
        if self.k == 0 {
            return invalid("K must be at least 1".into());
        }
        if self.t_max == 0 {
            return invalid("the maximum number of transmissions must be at least 1".into());
        }
        if self.min_errors == Some(0) {
            return invalid("min_errors must be at least 1 when given".into());
        }
        match (self.kind, self.n) {
            (ExperimentKind::BlerCurve, None) => {
                return invalid("a BLER curve needs a code length N".into())
            }
            (_, Some(n)) if n < self.k => {
                return invalid(format!("N = {n} is smaller than K = {}", self.k))
            }
            (ExperimentKind::HarqThroughput | ExperimentKind::DesignTable, None) => {
                polar_harq::harq::search_range(self.k, self.q, self.t_max)?;
            }
            _ => {}
        }
        Ok(())
    }

    pub fn channel_at(&self, snr_db: f64) -> SimResult<ChannelSpec> {
        Ok(ChannelSpec::from_snr_db(
            self.channel.kind(),
            snr_db,
            self.snr_convention,
        )?)
    }
}

/// Parses an SNR grid given either as a comma-separated list (`-2,0,4.5`) or
/// as an inclusive range `start:stop:step` (`-2:10:2`).
pub fn parse_snr_grid(text: &str) -> SimResult<Vec<f64>> {
    let number = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| SimError::InvalidConfig(format!("cannot parse SNR value {s:?}")))
    };
    let grid: Vec<f64> = if text.contains(':') {
        let parts: Vec<f64> = text.split(':').map(number).collect::<SimResult<_>>()?;
        let [start, stop, step] = parts[..] else {
            return Err(SimError::InvalidConfig(format!(
                "SNR range {text:?} is not start:stop:step"
            )));
        };
        if !(step > 0.0) || stop < start {
            return Err(SimError::InvalidConfig(format!(
                "SNR range {text:?} is empty or has a non-positive step"
            )));
        }
        // Index-based stepping so long ranges do not accumulate rounding.
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| start + i as f64 * step).collect()
    } else {
        text.split(',').map(number).collect::<SimResult<_>>()?
    };
    if let Some(bad) = grid.iter().find(|s| !s.is_finite()) {
        return Err(SimError::InvalidConfig(format!(
            "SNR {bad} dB is not finite"
        )));
    }
    Ok(grid)
}
