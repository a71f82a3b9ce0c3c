//! Counting audits for the bipartite lower-bound construction.
//!
//! For a colouring of `G` with sides `(A, B)`, `c_b` is the number of colour
//! classes meeting `N(b)` in exactly one vertex, and `M = Σ_b c_b`. Averaging
//! gives some `b` with `c_b <= M / |B|`, which is the vertex that ends up with
//! many disturbed neighbours.

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::colouring::{ColouringError, PartialColouring};
use crate::graph::{Bipartition, Graph};
use crate::peace::Histogram;
use crate::rng::{rng_from_seed, split_seed};
use crate::scalar::LogBase;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniquenessAudit {
    /// `c_b` for each `b` in ascending vertex order.
    pub c_b: Vec<(usize, usize)>,
    pub m: usize,
    pub min_cb: usize,
    pub witness_b: usize,
}

/// Exact `c_b`, `M` and the lowest-index `b` attaining `min c_b`.
pub fn audit_uniqueness(g: &Graph, bip: &Bipartition, f: &PartialColouring) -> Result<UniquenessAudit, ColouringError> {
    f.validate_total(g)?;
    let mut hist = Histogram::new(f.palette);
    let mut c_b = Vec::with_capacity(bip.side_b.len());
    for &b in &bip.side_b {
        hist.load(g, f, b);
        c_b.push((b, hist.singletons()));
    }
    let m = c_b.iter().map(|&(_, c)| c).sum();
    let (witness_b, min_cb) = c_b
        .iter()
        .copied()
        .min_by_key(|&(b, c)| (c, b))
        .unwrap_or((usize::MAX, 0));
    Ok(UniquenessAudit {
        c_b,
        m,
        min_cb,
        witness_b,
    })
}

/// `M` recomputed by sorting each neighbourhood's colours and counting runs of
/// length one. Shares no code with [`audit_uniqueness`].
pub fn uniqueness_sum_by_sorting(g: &Graph, bip: &Bipartition, f: &PartialColouring) -> usize {
    let mut total = 0;
    for &b in &bip.side_b {
        let mut colours: Vec<usize> = g.neighbours(b).filter_map(|w| f.get(w)).collect();
        colours.sort_unstable();
        let mut i = 0;
        while i < colours.len() {
            let mut j = i;
            while j < colours.len() && colours[j] == colours[i] {
                j += 1;
            }
            if j - i == 1 {
                total += 1;
            }
            i = j;
        }
    }
    total
}

/// Number of `b ∈ B` with exactly one neighbour in `subset`.
pub fn exactly_one_count(g: &Graph, bip: &Bipartition, subset: &[usize]) -> usize {
    let mut hits = vec![0u32; g.n()];
    for &a in subset {
        for b in g.neighbours(a) {
            hits[b] += 1;
        }
    }
    bip.side_b.iter().filter(|&&b| hits[b] == 1).count()
}

/// `(e⁻¹ + 1/(3 log^{1/9} Δ)) |B|`.
pub fn subset_bound(delta: usize, b_size: usize, log_base: LogBase) -> f64 {
    let d = delta as f64;
    ((-1f64).exp() + 1.0 / (3.0 * log_base.log_pow(d, 1.0 / 9.0))) * b_size as f64
}

/// `⌊Δ / log^{5/4} Δ⌋`, the largest subset size the bound covers.
pub fn subset_size_cap(delta: usize, log_base: LogBase) -> usize {
    let d = delta as f64;
    (d / log_base.log_pow(d, 1.25)).floor() as usize
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizeClassStats {
    pub size: usize,
    pub samples: usize,
    pub max_exactly_one: usize,
    pub mean_exactly_one: f64,
    pub fraction_exceeding: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsetAudit {
    pub delta: usize,
    pub bound: f64,
    pub classes: Vec<SizeClassStats>,
}

/// Samples `samples` uniform subsets of `A` for every size in `1..=max_size`
/// and compares the exactly-one counts against [`subset_bound`].
///
/// `Δ` is taken as the largest degree on side `B`.
pub fn audit_subsets(
    g: &Graph,
    bip: &Bipartition,
    max_size: usize,
    samples: usize,
    seed: u64,
    log_base: LogBase,
) -> SubsetAudit {
    assert!(max_size >= 1, "max_size must be at least 1");
    let a: Vec<usize> = bip.side_a.iter().copied().collect();
    let delta = bip.side_b.iter().map(|&b| g.degree(b)).max().unwrap_or(0);
    let bound = subset_bound(delta, bip.side_b.len(), log_base);
    let classes = (1..=max_size.min(a.len()))
        .map(|size| {
            let mut rng = rng_from_seed(split_seed(seed, size as u64));
            let (mut max, mut sum, mut over) = (0, 0, 0);
            for _ in 0..samples {
                let subset: Vec<usize> = sample(&mut rng, a.len(), size).into_iter().map(|i| a[i]).collect();
                let count = exactly_one_count(g, bip, &subset);
                max = max.max(count);
                sum += count;
                if count as f64 > bound {
                    over += 1;
                }
            }
            SizeClassStats {
                size,
                samples,
                max_exactly_one: max,
                mean_exactly_one: sum as f64 / samples.max(1) as f64,
                fraction_exceeding: over as f64 / samples.max(1) as f64,
            }
        })
        .collect();
    SubsetAudit { delta, bound, classes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::adversarial_bipartite;
    use crate::peace::{greedy_extend, peace_report};

    #[test]
    fn rainbow_and_monochrome_sides() {
        let (g, bip) = adversarial_bipartite(16, 2, LogBase::Natural).unwrap();
        let n = g.n();
        let a_len = bip.side_a.len();
        // Rainbow on A, one extra colour for all of B.
        let colours: Vec<usize> = (0..n).map(|v| if v < a_len { v } else { a_len }).collect();
        let rainbow = PartialColouring::from_total(a_len + 1, colours);
        let audit = audit_uniqueness(&g, &bip, &rainbow).unwrap();
        assert!(audit.c_b.iter().all(|&(b, c)| c == g.degree(b)));
        assert_eq!(audit.m, 16 * 16);

        let mono = PartialColouring::from_total(2, (0..n).map(|v| usize::from(v >= a_len)).collect());
        let audit = audit_uniqueness(&g, &bip, &mono).unwrap();
        assert!(audit.c_b.iter().all(|&(_, c)| c <= 1));
        assert_eq!(audit.m, uniqueness_sum_by_sorting(&g, &bip, &mono));
    }

    #[test]
    fn witness_matches_peace_report() {
        let (g, bip) = adversarial_bipartite(16, 9, LogBase::Natural).unwrap();
        let f = greedy_extend(&g, &PartialColouring::uncoloured(g.n(), g.max_degree() + 1)).unwrap();
        let audit = audit_uniqueness(&g, &bip, &f).unwrap();
        let report = peace_report(&g, &f).unwrap();
        assert_eq!(report.disturbed[audit.witness_b], g.degree(audit.witness_b) - audit.min_cb);
        assert!(audit.min_cb * bip.side_b.len() <= audit.m);
    }

    #[test]
    fn subset_edge_cases() {
        let (g, bip) = adversarial_bipartite(16, 4, LogBase::Natural).unwrap();
        assert_eq!(exactly_one_count(&g, &bip, &[]), 0);
        let all: Vec<usize> = bip.side_a.iter().copied().collect();
        assert_eq!(exactly_one_count(&g, &bip, &all), 0);
        let a = all[0];
        assert_eq!(exactly_one_count(&g, &bip, &[a]), g.degree(a));
        let audit = audit_subsets(&g, &bip, 3, 10, 1, LogBase::Natural);
        assert_eq!(audit.classes.len(), 3);
        assert_eq!(audit, audit_subsets(&g, &bip, 3, 10, 1, LogBase::Natural));
    }
}
