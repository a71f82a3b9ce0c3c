//! Monte Carlo run of the idealized process on a star with `Δ` leaves.
//!
//! Leaf `j` is vertex `j` of [`Graph::star`](crate::Graph::star) and draws from
//! the same activation stream the nibble would give it, so a nibble run on the
//! star with lists frozen reproduces a trial exactly.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::trace::{idealized_trace, IdealizedTrace, TraceError};
use crate::rng::{split_seed, vertex_stream, Purpose};
use crate::scalar::LogBase;

/// Leaf statistics at the start of an iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarSnapshot {
    /// Colours not yet used on any leaf.
    pub list: usize,
    /// Colours used on exactly one leaf.
    pub good: usize,
    pub uncoloured: usize,
    /// Leaves coloured during this iteration (0 for the final snapshot).
    pub newly_coloured: usize,
}

/// One trial: snapshots for `i = 1..=i*+1`.
pub fn star_trial(trace: &IdealizedTrace<f64>, trial_seed: u64) -> Vec<StarSnapshot> {
    let mut counts = vec![0u32; trace.l1];
    let mut list = trace.l1;
    let mut good = 0;
    let mut uncoloured: Vec<usize> = (1..=trace.delta).collect();
    let mut out = Vec::with_capacity(trace.len());
    for i in 1..=trace.i_star {
        let mut snapshot = StarSnapshot {
            list,
            good,
            uncoloured: uncoloured.len(),
            newly_coloured: 0,
        };
        uncoloured.retain(|&v| {
            let mut rng = vertex_stream(trial_seed, v, i, Purpose::Activation);
            if rng.gen::<f64>() >= trace.alpha {
                return true;
            }
            let c = rng.gen_range(0..trace.l1);
            counts[c] += 1;
            match counts[c] {
                1 => {
                    list -= 1;
                    good += 1;
                }
                2 => good -= 1,
                _ => {}
            }
            false
        });
        snapshot.newly_coloured = snapshot.uncoloured - uncoloured.len();
        out.push(snapshot);
    }
    out.push(StarSnapshot {
        list,
        good,
        uncoloured: uncoloured.len(),
        newly_coloured: 0,
    });
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanSd {
    pub mean: f64,
    pub sd: f64,
}

impl MeanSd {
    fn of(values: impl Iterator<Item = f64> + Clone) -> Self {
        let (count, sum) = values.clone().fold((0usize, 0.0), |(c, s), x| (c + 1, s + x));
        if count == 0 {
            return MeanSd { mean: 0.0, sd: 0.0 };
        }
        let mean = sum / count as f64;
        let var = if count > 1 {
            values.map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64
        } else {
            0.0
        };
        MeanSd { mean, sd: var.sqrt() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StarIteration {
    pub iteration: usize,
    pub list: MeanSd,
    pub good: MeanSd,
    pub uncoloured: MeanSd,
    pub newly_coloured: MeanSd,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StarStats {
    pub trace: IdealizedTrace<f64>,
    pub trials: usize,
    pub iterations: Vec<StarIteration>,
}

/// Runs `trials` independent trials (trial `t` seeded by `split_seed(seed, t)`)
/// and summarizes each iteration. Trials run in parallel; the result does not
/// depend on the thread count.
pub fn simulate_star(
    delta: usize,
    b_const: f64,
    seed: u64,
    trials: usize,
    log_base: LogBase,
) -> Result<StarStats, TraceError> {
    assert!(trials >= 1, "trials must be at least 1");
    let trace = idealized_trace(delta, b_const, log_base)?;
    let runs: Vec<Vec<StarSnapshot>> = (0..trials)
        .into_par_iter()
        .map(|t| star_trial(&trace, split_seed(seed, t as u64)))
        .collect();
    let iterations = (0..trace.len())
        .map(|k| {
            let column = |f: fn(&StarSnapshot) -> usize| MeanSd::of(runs.iter().map(move |r| f(&r[k]) as f64));
            StarIteration {
                iteration: k + 1,
                list: column(|s| s.list),
                good: column(|s| s.good),
                uncoloured: column(|s| s.uncoloured),
                newly_coloured: column(|s| s.newly_coloured),
            }
        })
        .collect();
    Ok(StarStats {
        trace,
        trials,
        iterations,
    })
}
