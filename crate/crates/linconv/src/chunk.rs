//! Deterministic chunked trial runner.
//!
//! Sampled checks split their trial budget into fixed-size chunks; chunk k
//! draws from a fresh rng seeded `seed + k`. Chunks run in parallel but the
//! merge folds them in index order, so the worst margin and its witness are
//! identical for serial and parallel execution (ties resolve to the lowest
//! chunk/trial index).

use crate::tolerances::CHUNK_TRIALS;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Outcome of a single trial.
pub(crate) enum Trial<W> {
    /// A margin plus whatever is needed to reproduce it.
    Margin(f64, W),
    /// Trial vacuous for this draw (nothing sampled).
    Skip,
    /// Numerical degeneracy; counted, and too many flip the verdict to
    /// inconclusive.
    Degenerate,
}

pub(crate) struct ChunkedOutcome<W> {
    pub worst: Option<(f64, W)>,
    /// Margins in serial trial order; empty unless collection was requested.
    pub margins: Vec<f64>,
    pub evaluated: u64,
    pub degenerate: u64,
}

pub(crate) fn run_chunked<W, F>(
    trials: u64,
    seed: u64,
    collect_margins: bool,
    trial: F,
) -> ChunkedOutcome<W>
where
    W: Send,
    F: Fn(&mut ChaCha8Rng) -> Trial<W> + Sync,
{
    let n_chunks = trials.div_ceil(CHUNK_TRIALS);
    let chunk_results: Vec<ChunkedOutcome<W>> = (0..n_chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k));
            let count = CHUNK_TRIALS.min(trials - k * CHUNK_TRIALS);
            let mut out = ChunkedOutcome {
                worst: None,
                margins: Vec::with_capacity(if collect_margins { count as usize } else { 0 }),
                evaluated: 0,
                degenerate: 0,
            };
            for _ in 0..count {
                match trial(&mut rng) {
                    Trial::Margin(m, w) => {
                        out.evaluated += 1;
                        if collect_margins {
                            out.margins.push(m);
                        }
                        if out.worst.as_ref().is_none_or(|(wm, _)| m < *wm) {
                            out.worst = Some((m, w));
                        }
                    }
                    Trial::Skip => {}
                    Trial::Degenerate => out.degenerate += 1,
                }
            }
            out
        })
        .collect();

    let mut merged = ChunkedOutcome {
        worst: None,
        margins: Vec::new(),
        evaluated: 0,
        degenerate: 0,
    };
    for ch in chunk_results {
        merged.evaluated += ch.evaluated;
        merged.degenerate += ch.degenerate;
        merged.margins.extend(ch.margins);
        if let Some((m, w)) = ch.worst {
            if merged.worst.as_ref().is_none_or(|(wm, _)| m < *wm) {
                merged.worst = Some((m, w));
            }
        }
    }
    merged
}
