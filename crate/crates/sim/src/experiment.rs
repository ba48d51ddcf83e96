//! The three experiment kinds: BLER curves, HARQ throughput campaigns and
//! design tables.

use polar_harq::harq::{per_round_error_probs, run_session, throughput_bound, SearchOptions};
use polar_harq::{ChannelSpec, CodeSpec, SnrConvention};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{Channel, ExperimentConfig, ExperimentKind};
use crate::error::{SimError, SimResult};
use crate::search::parallel_design_search;
use crate::stats::{Tally, Z95};
use crate::stream::trial_rng;

/// Trials per scheduling batch when early stopping is enabled; the stopping
/// check happens only at batch boundaries, so it is deterministic.
pub const BATCH: u64 = 1000;

/// Half-widths of the normal-approximation 95% confidence intervals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ci95 {
    pub bler_round1: f64,
    pub avg_transmissions: f64,
    pub throughput_sim: f64,
}

/// One SNR point of a Monte Carlo report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub snr_db: f64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "K")]
    pub k: usize,
    pub bler_round1: f64,
    pub avg_transmissions: f64,
    pub throughput_sim: f64,
    /// Throughput approximation from the GA per-round error probabilities.
    pub throughput_bound: f64,
    pub trials: u64,
    pub seed: u64,
    /// GA union bound on the first-transmission BLER.
    pub bler_bound: f64,
    pub per_round_pe: Vec<f64>,
    pub throughput_se: f64,
    pub ci95: Ci95,
    pub tally: Tally,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub kind: ExperimentKind,
    pub channel: Channel,
    pub snr_convention: SnrConvention,
    #[serde(rename = "T")]
    pub t_max: u32,
    pub rows: Vec<ReportRow>,
}

/// A designed configuration for one SNR point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignRecord {
    pub snr_db: f64,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "Q")]
    pub q: usize,
    #[serde(rename = "T")]
    pub t: u32,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub eta_bound: f64,
    pub per_round_pe: Vec<f64>,
}

/// Runs `trials` independent sessions of `code` over `ch` (at most `T`
/// transmissions each) on the streams of SNR point `snr_index`.
///
/// With `min_errors`, trials run in batches of [`BATCH`] and stop after the
/// first batch that brings the first-round error count to `min_errors`;
/// `trials` remains the upper limit.
pub fn simulate_point(
    code: &CodeSpec,
    ch: &ChannelSpec,
    max_transmissions: u32,
    trials: u64,
    seed: u64,
    snr_index: usize,
    min_errors: Option<u64>,
) -> SimResult<Tally> {
    let run = |range: std::ops::Range<u64>| -> SimResult<Tally> {
        range
            .into_par_iter()
            .map(|trial| {
                let mut rng = trial_rng(seed, snr_index, trial);
                let r = run_session(code, ch, max_transmissions, &mut rng)?;
                Ok(Tally::record(r.success, r.rounds))
            })
            .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))
    };
    let Some(target) = min_errors else {
        return run(0..trials);
    };
    let mut total = Tally::default();
    let mut start = 0;
    while start < trials && total.first_round_errors < target {
        let end = (start + BATCH).min(trials);
        total = total.merge(run(start..end)?);
        start = end;
    }
    Ok(total)
}

fn row(
    snr_db: f64,
    code: &CodeSpec,
    per_round_pe: Vec<f64>,
    throughput_bound: f64,
    tally: Tally,
    seed: u64,
) -> ReportRow {
    let (k, n) = (code.k(), code.n());
    let throughput_se = tally.throughput_se(k, n);
    ReportRow {
        snr_db,
        n,
        m: code.m(),
        k,
        bler_round1: tally.bler_round1(),
        avg_transmissions: tally.avg_transmissions(),
        throughput_sim: tally.throughput(k, n),
        throughput_bound,
        trials: tally.trials,
        seed,
        bler_bound: per_round_pe[0],
        per_round_pe,
        throughput_se,
        ci95: Ci95 {
            bler_round1: Z95 * tally.bler_round1_se(),
            avg_transmissions: Z95 * tally.avg_transmissions_se(),
            throughput_sim: Z95 * throughput_se,
        },
        tally,
    }
}

fn expect_kind(cfg: &ExperimentConfig, kind: ExperimentKind) -> SimResult<()> {
    cfg.validate()?;
    if cfg.kind != kind {
        return Err(SimError::InvalidConfig(format!(
            "expected a {kind:?} configuration, got {:?}",
            cfg.kind
        )));
    }
    Ok(())
}

/// Single-transmission BLER of the length-`N` code built for each SNR point.
pub fn run_bler_experiment(cfg: &ExperimentConfig) -> SimResult<SimReport> {
    expect_kind(cfg, ExperimentKind::BlerCurve)?;
    let n = cfg.n.expect("validated");
    let rows = cfg
        .snr_grid_db
        .iter()
        .enumerate()
        .map(|(i, &snr_db)| {
            let ch = cfg.channel_at(snr_db)?;
            let code = CodeSpec::construct(cfg.k, n, ch.sigma2_eq())?;
            let pe = per_round_error_probs(&code, &ch, 1)?;
            let bound = throughput_bound(cfg.k, n, &pe)?;
            let tally = simulate_point(&code, &ch, 1, cfg.trials, cfg.seed, i, cfg.min_errors)?;
            Ok(row(snr_db, &code, pe, bound, tally, cfg.seed))
        })
        .collect::<SimResult<_>>()?;
    Ok(SimReport {
        kind: cfg.kind,
        channel: cfg.channel,
        snr_convention: cfg.snr_convention,
        t_max: 1,
        rows,
    })
}

/// The code used at one SNR point of a HARQ campaign: the designed one, or
/// the length-`N` code when `N` is fixed by the configuration.
fn harq_code(cfg: &ExperimentConfig, ch: &ChannelSpec) -> SimResult<(CodeSpec, Vec<f64>, f64)> {
    match cfg.n {
        Some(n) => {
            let code = CodeSpec::construct(cfg.k, n, ch.sigma2_eq())?;
            let pe = per_round_error_probs(&code, ch, cfg.t_max)?;
            let eta = throughput_bound(cfg.k, n, &pe)?;
            Ok((code, pe, eta))
        }
        None => {
            let d = parallel_design_search(cfg.k, cfg.q, cfg.t_max, ch, SearchOptions::default())?
                .design;
            Ok((d.code, d.per_round_pe, d.eta_bound))
        }
    }
}

/// Chase-combining sessions at each SNR point, with the realized throughput
/// `K·successes / (N·Σ rounds)` next to the GA throughput approximation.
pub fn run_harq_experiment(cfg: &ExperimentConfig) -> SimResult<SimReport> {
    expect_kind(cfg, ExperimentKind::HarqThroughput)?;
    let rows = cfg
        .snr_grid_db
        .iter()
        .enumerate()
        .map(|(i, &snr_db)| {
            let ch = cfg.channel_at(snr_db)?;
            let (code, pe, eta) = harq_code(cfg, &ch)?;
            let tally = simulate_point(
                &code,
                &ch,
                cfg.t_max,
                cfg.trials,
                cfg.seed,
                i,
                cfg.min_errors,
            )?;
            Ok(row(snr_db, &code, pe, eta, tally, cfg.seed))
        })
        .collect::<SimResult<_>>()?;
    Ok(SimReport {
        kind: cfg.kind,
        channel: cfg.channel,
        snr_convention: cfg.snr_convention,
        t_max: cfg.t_max,
        rows,
    })
}

/// Throughput-optimal configuration at each SNR point; no Monte Carlo.
pub fn run_design_table(cfg: &ExperimentConfig) -> SimResult<Vec<DesignRecord>> {
    expect_kind(cfg, ExperimentKind::DesignTable)?;
    cfg.snr_grid_db
        .iter()
        .map(|&snr_db| {
            let ch = cfg.channel_at(snr_db)?;
            let (code, per_round_pe, eta_bound) = harq_code(cfg, &ch)?;
            Ok(DesignRecord {
                snr_db,
                k: cfg.k,
                q: cfg.q,
                t: cfg.t_max,
                n: code.n(),
                m: code.m(),
                eta_bound,
                per_round_pe,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(kind: ExperimentKind) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(kind);
        cfg.k = 32;
        cfg.q = 400;
        cfg.t_max = 4;
        cfg.trials = 300;
        cfg.seed = 5;
        cfg.snr_grid_db = vec![-1.0, 2.0];
        cfg
    }

    #[test]
    fn noiseless_throughput_is_the_code_rate() {
        let code = CodeSpec::construct(40, 70, 1e-4).unwrap();
        let ch = ChannelSpec::awgn(1e-4).unwrap();
        let tally = simulate_point(&code, &ch, 4, 500, 1, 0, None).unwrap();
        assert_eq!(tally.successes, 500);
        assert_eq!(tally.rounds, 500);
        assert_eq!(tally.throughput(40, 70), 40.0 / 70.0);
        assert_eq!(tally.bler_round1(), 0.0);
    }

    #[test]
    fn useless_channel_uses_every_round() {
        let code = CodeSpec::construct(40, 70, 1e6).unwrap();
        let ch = ChannelSpec::awgn(1e6).unwrap();
        let tally = simulate_point(&code, &ch, 3, 50, 2, 0, None).unwrap();
        assert_eq!(tally.rounds, 150);
        assert_eq!(tally.successes, 0);
    }

    #[test]
    fn early_stop_respects_error_target_and_cap() {
        let ch = ChannelSpec::awgn(1.0).unwrap();
        let code = CodeSpec::construct(32, 64, 1.0).unwrap();
        let t = simulate_point(&code, &ch, 1, 50_000, 3, 0, Some(10)).unwrap();
        assert!(t.first_round_errors >= 10);
        assert!(t.trials.is_multiple_of(BATCH) && t.trials < 50_000);
        let capped = simulate_point(&code, &ch, 1, 20, 3, 0, Some(1_000_000)).unwrap();
        assert_eq!(capped.trials, 20);
        // The first batch is the same trials regardless of the stopping rule.
        let plain = simulate_point(&code, &ch, 1, 20, 3, 0, None).unwrap();
        assert_eq!(capped, plain);
    }

    #[test]
    fn reports_are_reproducible_and_consistent() {
        let cfg = small(ExperimentKind::HarqThroughput);
        let a = run_harq_experiment(&cfg).unwrap();
        assert_eq!(a, run_harq_experiment(&cfg).unwrap());
        for r in &a.rows {
            assert!((0.0..=1.0).contains(&r.bler_round1));
            assert!(r.avg_transmissions >= 1.0 && r.avg_transmissions <= 4.0);
            assert!(r.throughput_sim <= r.k as f64 / r.n as f64);
            assert_eq!(r.trials, 300);
            assert_eq!(r.per_round_pe.len(), 4);
        }
        let mut other = cfg.clone();
        other.seed = 6;
        assert_ne!(run_harq_experiment(&other).unwrap(), a);
    }

    #[test]
    fn kind_mismatch_and_invalid_configs_are_rejected() {
        let cfg = small(ExperimentKind::HarqThroughput);
        assert!(run_design_table(&cfg).is_err());
        let mut zero = cfg.clone();
        zero.trials = 0;
        assert!(matches!(
            run_harq_experiment(&zero),
            Err(SimError::InvalidConfig(_))
        ));
    }

    #[test]
    fn bler_curve_falls_with_snr() {
        let mut cfg = small(ExperimentKind::BlerCurve);
        cfg.n = Some(64);
        cfg.snr_grid_db = vec![-2.0, 1.0, 12.0];
        cfg.trials = 2000;
        let rep = run_bler_experiment(&cfg).unwrap();
        assert_eq!(rep.t_max, 1);
        assert!(rep.rows[0].bler_round1 > rep.rows[1].bler_round1);
        let last = &rep.rows[2];
        assert_eq!(last.bler_round1, 0.0);
        assert!(last.bler_bound < 1e-6);
        assert_eq!(last.avg_transmissions, 1.0);
    }

    #[test]
    fn design_table_matches_fixed_length_evaluation() {
        let cfg = small(ExperimentKind::DesignTable);
        let table = run_design_table(&cfg).unwrap();
        assert_eq!(table.len(), 2);
        for rec in &table {
            let mut fixed = cfg.clone();
            fixed.n = Some(rec.n);
            let again = run_design_table(&fixed).unwrap();
            let same = again.iter().find(|r| r.snr_db == rec.snr_db).unwrap();
            assert_eq!(same, rec);
            assert!(rec.n >= cfg.k && rec.n <= cfg.q / cfg.t_max as usize);
        }
    }
}
