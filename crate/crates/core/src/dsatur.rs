//! DSATUR greedy colouring confined to a colour band.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::ops::Range;

use rand::Rng;
use thiserror::Error;

use crate::colouring::PartialColouring;
use crate::graph::Graph;
use crate::rng::{rng_from_seed, split_seed};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DsaturError {
    #[error("vertex {vertex} sees every colour of the band {lo}..{hi}")]
    Exhausted { vertex: usize, lo: usize, hi: usize },
    #[error("colour band {lo}..{hi} does not fit in a palette of {palette}")]
    BandOutsidePalette { lo: usize, hi: usize, palette: usize },
}

/// Colours every uncoloured vertex of `base` with colours from `band`.
///
/// Pre-coloured neighbours constrain the choice only through colours inside the
/// band. The next vertex is the one with the most distinct band colours around
/// it, then the most uncoloured neighbours, then the lowest index; it takes the
/// smallest free band colour.
pub fn dsatur(g: &Graph, base: &PartialColouring, band: Range<usize>) -> Result<PartialColouring, DsaturError> {
    run(g, base, band, None, |v| Reverse(v as u64))
}

/// [`dsatur`] restricted to the uncoloured vertices marked in `active`.
///
/// Other uncoloured vertices stay uncoloured and impose no constraint.
pub fn dsatur_subset(
    g: &Graph,
    base: &PartialColouring,
    band: Range<usize>,
    active: &[bool],
) -> Result<PartialColouring, DsaturError> {
    run(g, base, band, Some(active), |v| Reverse(v as u64))
}

/// [`dsatur_subset`] (or [`dsatur`] when `active` is `None`) followed by up to
/// `restarts` retries with random tie-breaking.
pub fn dsatur_with_restarts(
    g: &Graph,
    base: &PartialColouring,
    band: Range<usize>,
    active: Option<&[bool]>,
    restarts: usize,
    seed: u64,
) -> Result<PartialColouring, DsaturError> {
    let mut last = match run(g, base, band.clone(), active, |v| Reverse(v as u64)) {
        Ok(f) => return Ok(f),
        Err(e) => e,
    };
    for r in 0..restarts {
        let mut rng = rng_from_seed(split_seed(seed, r as u64));
        let keys: Vec<u64> = (0..g.n()).map(|_| rng.gen()).collect();
        match run(g, base, band.clone(), active, |v| Reverse(keys[v])) {
            Ok(f) => return Ok(f),
            Err(e) => last = e,
        }
    }
    Err(last)
}

fn run<K: Ord + Copy>(
    g: &Graph,
    base: &PartialColouring,
    band: Range<usize>,
    active: Option<&[bool]>,
    key: impl Fn(usize) -> K,
) -> Result<PartialColouring, DsaturError> {
    let wanted = |v: usize| active.is_none_or(|a| a[v]);
    let (lo, hi) = (band.start, band.end);
    if hi > base.palette || lo > hi {
        return Err(DsaturError::BandOutsidePalette {
            lo,
            hi,
            palette: base.palette,
        });
    }
    let width = hi - lo;
    let words = width.div_ceil(64).max(1);
    let n = g.n();
    let mut out = base.clone();
    let mut seen = vec![0u64; n * words];
    let mut saturation = vec![0usize; n];
    let mut free_degree = vec![0usize; n];

    let mark = |seen: &mut [u64], saturation: &mut [usize], v: usize, c: usize| {
        if c < lo || c >= hi {
            return false;
        }
        let bit = c - lo;
        let word = &mut seen[v * words + bit / 64];
        if *word >> (bit % 64) & 1 == 0 {
            *word |= 1 << (bit % 64);
            saturation[v] += 1;
            true
        } else {
            false
        }
    };

    for v in 0..n {
        if out.get(v).is_some() || !wanted(v) {
            continue;
        }
        for w in g.neighbours(v) {
            match out.get(w) {
                Some(c) => {
                    mark(&mut seen, &mut saturation, v, c);
                }
                None if wanted(w) => free_degree[v] += 1,
                None => {}
            }
        }
    }
    let mut heap: BinaryHeap<(usize, usize, K, usize)> = (0..n)
        .filter(|&v| out.get(v).is_none() && wanted(v))
        .map(|v| (saturation[v], free_degree[v], key(v), v))
        .collect();

    while let Some((sat, free, _, v)) = heap.pop() {
        if out.get(v).is_some() || sat != saturation[v] || free != free_degree[v] {
            continue;
        }
        let row = &seen[v * words..(v + 1) * words];
        let colour = (0..width)
            .find(|&b| row[b / 64] >> (b % 64) & 1 == 0)
            .map(|b| b + lo)
            .ok_or(DsaturError::Exhausted { vertex: v, lo, hi })?;
        out.set(v, colour);
        for w in g.neighbours(v) {
            if out.get(w).is_none() && wanted(w) {
                free_degree[w] -= 1;
                mark(&mut seen, &mut saturation, w, colour);
                heap.push((saturation[w], free_degree[w], key(w), w));
            }
        }
    }
    Ok(out)
}
