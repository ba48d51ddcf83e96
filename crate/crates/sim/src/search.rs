//! Parallel form of the throughput-optimal code-length search.
//!
//! Candidate lengths are evaluated in fixed-size chunks, in increasing order.
//! Within a chunk the candidates run in parallel; the chunk is then reduced
//! deterministically (largest bound, ties toward the smaller length), and the
//! scan stops once `K/n` drops below the best bound found, exactly as in the
//! sequential search. The chunk size is a constant, so the evaluation count is
//! reproducible regardless of the number of workers.

use polar_harq::harq::{
    evaluate_candidate, ga_evaluations_per_candidate, search_range, Candidate, HarqDesign,
    SearchOptions, SearchOutcome,
};
use polar_harq::ChannelSpec;
use rayon::prelude::*;

use crate::error::SimResult;

pub const CHUNK: usize = 32;

fn better(a: (usize, Candidate), b: (usize, Candidate)) -> (usize, Candidate) {
    if b.1.eta > a.1.eta || (b.1.eta == a.1.eta && b.0 < a.0) {
        b
    } else {
        a
    }
}

pub fn parallel_design_search(
    k: usize,
    permitted_bits: usize,
    max_transmissions: u32,
    ch: &ChannelSpec,
    options: SearchOptions,
) -> SimResult<SearchOutcome> {
    let (lower, upper) = search_range(k, permitted_bits, max_transmissions)?;
    let sigma2 = ch.sigma2_eq();
    let mut best: Option<(usize, Candidate)> = None;
    let mut evaluated = 0;
    let mut start = lower;
    while start <= upper {
        let end = (start + CHUNK - 1).min(upper);
        let bar = best.as_ref().map(|b| b.1.eta);
        let lengths: Vec<usize> = (start..=end)
            .take_while(|&n| {
                !(options.early_termination && bar.is_some_and(|eta| (k as f64) / (n as f64) < eta))
            })
            .collect();
        if lengths.is_empty() {
            break;
        }
        evaluated += lengths.len();
        let results = lengths
            .par_iter()
            .map(|&n| evaluate_candidate(k, n, max_transmissions, sigma2).map(|c| (n, c)))
            .collect::<Result<Vec<_>, _>>()?;
        let chunk_best = results
            .into_iter()
            .reduce(better)
            .expect("chunk is non-empty");
        best = Some(match best {
            Some(b) => better(b, chunk_best),
            None => chunk_best,
        });
        if lengths.len() < end - start + 1 {
            break;
        }
        start = end + 1;
    }
    let (_, best) = best.expect("search range is non-empty");
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
