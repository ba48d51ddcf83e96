//! Command-line front end: design tables, BLER curves, HARQ throughput
//! campaigns, puncture patterns and reliability profiles.
//!
//! On failure the process exits with status 1 (2 for usage errors) and
//! writes a single JSON object `{"error": {"kind": …, "message": …}}` to
//! standard error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use polar_harq::construction::ReliabilityProfile;
use polar_harq::rcpp::{base_length, qup_pattern};
use polar_harq::SnrConvention;
use polar_harq_sim::config::parse_snr_grid;
use polar_harq_sim::output::{
    with_output, write_designs_csv, write_json, write_pattern, write_reliability_csv,
    write_report_csv,
};
use polar_harq_sim::{
    run_bler_experiment, run_design_table, run_harq_experiment, Channel, ExperimentConfig,
    ExperimentKind, OutputFormat, SimError, SimResult,
};

#[derive(Parser)]
#[command(
    name = "polar-harq",
    version,
    about = "Polar-coded Chase-combining HARQ: design and simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Throughput-optimal code length per SNR point (no simulation).
    Design(CommonArgs),
    /// Single-transmission BLER of a fixed-length code, with its GA bound.
    Bler(CommonArgs),
    /// Chase-combining HARQ sessions: realized throughput next to the bound.
    Harq(CommonArgs),
    /// The quasi-uniform puncturing pattern for length N as a 0/1 line.
    Pattern(CommonArgs),
    /// GA reliability profile (index, mean, pe) of the length-N code at one SNR.
    Reliability(CommonArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// JSON experiment configuration; command-line flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    channel: Option<Channel>,
    /// SNR grid in dB: a list `-2,0,4` or an inclusive range `start:stop:step`.
    #[arg(long, allow_hyphen_values = true)]
    snr_db: Option<String>,
    /// Information block length K.
    #[arg(long)]
    k: Option<usize>,
    /// Permitted transmitted bits Q over all rounds.
    #[arg(long)]
    q: Option<usize>,
    /// Maximum number of transmissions T.
    #[arg(long)]
    t_max: Option<u32>,
    /// Fixed code length N (overrides the design search).
    #[arg(long)]
    n: Option<usize>,
    /// Trials per SNR point.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    snr_convention: Option<SnrConventionArg>,
    /// Stop an SNR point once this many first-round errors were seen.
    #[arg(long)]
    min_errors: Option<u64>,
    /// Output file (standard output when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum SnrConventionArg {
    /// SNR = 1/σ².
    OneOverSigma2,
    /// Es/N0 = 1/(2σ²).
    EsOverN0,
}

impl From<SnrConventionArg> for SnrConvention {
    fn from(c: SnrConventionArg) -> Self {
        match c {
            SnrConventionArg::OneOverSigma2 => SnrConvention::OneOverSigma2,
            SnrConventionArg::EsOverN0 => SnrConvention::EsOverN0,
        }
    }
}

fn build_config(kind: ExperimentKind, args: &CommonArgs) -> SimResult<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_json_file(path)?,
        None => ExperimentConfig::new(kind),
    };
    cfg.kind = kind;
    if let Some(c) = args.channel {
        cfg.channel = c;
    }
    if let Some(s) = &args.snr_db {
        cfg.snr_grid_db = parse_snr_grid(s)?;
    }
    if let Some(k) = args.k {
        cfg.k = k;
    }
    if let Some(q) = args.q {
        cfg.q = q;
    }
    if let Some(t) = args.t_max {
        cfg.t_max = t;
    }
    if args.n.is_some() {
        cfg.n = args.n;
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(c) = args.snr_convention {
        cfg.snr_convention = c.into();
    }
    if args.min_errors.is_some() {
        cfg.min_errors = args.min_errors;
    }
    if args.out.is_some() {
        cfg.output_path = args.out.clone();
    }
    if let Some(f) = args.format {
        cfg.format = f;
    }
    Ok(cfg)
}

fn required_n(cfg: &ExperimentConfig) -> SimResult<usize> {
    match cfg.n {
        Some(n) if n > 0 => Ok(n),
        _ => Err(SimError::InvalidConfig(
            "--n is required and must be positive".into(),
        )),
    }
}

fn run(command: Command) -> SimResult<()> {
    match command {
        Command::Design(args) => {
            let cfg = build_config(ExperimentKind::DesignTable, &args)?;
            let designs = run_design_table(&cfg)?;
            with_output(cfg.output_path.as_deref(), |w| match cfg.format {
                OutputFormat::Csv => write_designs_csv(w, &designs),
                OutputFormat::Json => write_json(w, &designs),
            })
        }
        Command::Bler(args) => {
            let cfg = build_config(ExperimentKind::BlerCurve, &args)?;
            let report = run_bler_experiment(&cfg)?;
            with_output(cfg.output_path.as_deref(), |w| match cfg.format {
                OutputFormat::Csv => write_report_csv(w, &report),
                OutputFormat::Json => write_json(w, &report),
            })
        }
        Command::Harq(args) => {
            let cfg = build_config(ExperimentKind::HarqThroughput, &args)?;
            let report = run_harq_experiment(&cfg)?;
            with_output(cfg.output_path.as_deref(), |w| match cfg.format {
                OutputFormat::Csv => write_report_csv(w, &report),
                OutputFormat::Json => write_json(w, &report),
            })
        }
        Command::Pattern(args) => {
            let cfg = build_config(ExperimentKind::DesignTable, &args)?;
            let n = required_n(&cfg)?;
            let pattern = qup_pattern(base_length(n), n)?;
            let path = cfg.output_path.as_deref();
            with_output(path, |w| {
                write_pattern(w, &pattern)
                    .map_err(|e| SimError::io(path.unwrap_or("<stdout>".as_ref()), e))
            })
        }
        Command::Reliability(args) => {
            let cfg = build_config(ExperimentKind::DesignTable, &args)?;
            let n = required_n(&cfg)?;
            let [snr_db] = cfg.snr_grid_db[..] else {
                return Err(SimError::InvalidConfig(
                    "--snr-db must name exactly one SNR".into(),
                ));
            };
            let ch = cfg.channel_at(snr_db)?;
            let pattern = qup_pattern(base_length(n), n)?;
            let profile = ReliabilityProfile::evaluate(&pattern, ch.sigma2_eq())?;
            with_output(cfg.output_path.as_deref(), |w| match cfg.format {
                OutputFormat::Csv => write_reliability_csv(w, &profile),
                OutputFormat::Json => write_json(w, &profile),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version.
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.to_string();
            let message = message
                .lines()
                .next()
                .unwrap_or_default()
                .trim_start_matches("error: ");
            eprintln!(
                "{}",
                serde_json::json!({ "error": { "kind": "usage", "message": message } })
            );
            return ExitCode::from(2);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::FAILURE
        }
    }
}
