//! CSV and JSON writers for reports, designs, puncture patterns and
//! reliability profiles.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use polar_harq::construction::ReliabilityProfile;
use polar_harq::PuncturePattern;
use serde::Serialize;

use crate::error::{SimError, SimResult};
use crate::experiment::{DesignRecord, SimReport};

pub const CSV_HEADER: &str =
    "snr_db,N,M,K,bler_round1,avg_transmissions,throughput_sim,throughput_bound,trials,seed";

/// The fixed CSV schema. Design tables leave the Monte Carlo columns empty.
#[derive(Serialize)]
struct CsvRow {
    snr_db: f64,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "K")]
    k: usize,
    bler_round1: Option<f64>,
    avg_transmissions: Option<f64>,
    throughput_sim: Option<f64>,
    throughput_bound: f64,
    trials: u64,
    seed: Option<u64>,
}

fn write_csv_rows<W: Write>(out: W, rows: impl IntoIterator<Item = CsvRow>) -> SimResult<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut empty = true;
    for r in rows {
        w.serialize(r)?;
        empty = false;
    }
    if empty {
        w.write_record(CSV_HEADER.split(','))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_report_csv<W: Write>(out: W, report: &SimReport) -> SimResult<()> {
    write_csv_rows(
        out,
        report.rows.iter().map(|r| CsvRow {
            snr_db: r.snr_db,
            n: r.n,
            m: r.m,
            k: r.k,
            bler_round1: Some(r.bler_round1),
            avg_transmissions: Some(r.avg_transmissions),
            throughput_sim: Some(r.throughput_sim),
            throughput_bound: r.throughput_bound,
            trials: r.trials,
            seed: Some(r.seed),
        }),
    )
}

pub fn write_designs_csv<W: Write>(out: W, designs: &[DesignRecord]) -> SimResult<()> {
    write_csv_rows(
        out,
        designs.iter().map(|d| CsvRow {
            snr_db: d.snr_db,
            n: d.n,
            m: d.m,
            k: d.k,
            bler_round1: None,
            avg_transmissions: None,
            throughput_sim: None,
            throughput_bound: d.eta_bound,
            trials: 0,
            seed: None,
        }),
    )
}

/// Pretty-printed JSON followed by a newline.
pub fn write_json<W: Write, T: Serialize + ?Sized>(mut out: W, value: &T) -> SimResult<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out).map_err(serde_json::Error::io)?;
    Ok(())
}

/// The pattern as one line of `0`/`1` characters.
pub fn write_pattern<W: Write>(mut out: W, pattern: &PuncturePattern) -> io::Result<()> {
    writeln!(out, "{}", pattern.to_line())
}

#[derive(Serialize)]
struct ReliabilityRow {
    index: usize,
    mean: f64,
    pe: f64,
}

/// Per-channel GA mean and error probability, one row per synthesized channel.
pub fn write_reliability_csv<W: Write>(out: W, profile: &ReliabilityProfile) -> SimResult<()> {
    let mut w = csv::Writer::from_writer(out);
    for (index, (&mean, &pe)) in profile
        .means()
        .iter()
        .zip(profile.error_probs())
        .enumerate()
    {
        w.serialize(ReliabilityRow { index, mean, pe })?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Opens `path` for writing, or standard output when `path` is `None`, and
/// hands the writer to `f`.
pub fn with_output<F>(path: Option<&Path>, f: F) -> SimResult<()>
where
    F: FnOnce(&mut dyn Write) -> SimResult<()>,
{
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| SimError::io(p, e))?;
            let mut w = BufWriter::new(file);
            f(&mut w)?;
            w.flush().map_err(|e| SimError::io(p, e))
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            f(&mut lock)?;
            lock.flush().map_err(|e| SimError::io("<stdout>", e))
        }
    }
}
