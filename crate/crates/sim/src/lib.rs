//! Seeded Monte Carlo harness for polar-coded Chase-combining HARQ.
//!
//! Experiments are described by an [`ExperimentConfig`]: a BLER curve for a
//! fixed code length, a HARQ throughput campaign over designed codes, or a
//! design table produced by the throughput-optimal length search. Every trial
//! draws from its own random stream, derived from the master seed, the SNR
//! point and the trial index, so results do not depend on how trials are
//! scheduled across worker threads.

pub mod config;
pub mod error;
pub mod experiment;
pub mod output;
pub mod search;
pub mod stats;
pub mod stream;

pub use config::{Channel, ExperimentConfig, ExperimentKind, OutputFormat};
pub use error::{SimError, SimResult};
pub use experiment::{
    run_bler_experiment, run_design_table, run_harq_experiment, simulate_point, DesignRecord,
    ReportRow, SimReport,
};
pub use stats::Tally;
