//! Seeded graph generators.

use std::collections::{BTreeSet, HashSet};

use rand::seq::index::sample;
use rand::seq::SliceRandom;
use rand::Rng;

use super::{Bipartition, Graph, GraphError};
use crate::rng::{rng_from_seed, StreamRng};
use crate::scalar::LogBase;

const MAX_ATTEMPTS: usize = 1000;

/// Membership structure for the edges placed so far.
enum EdgeSet {
    Dense { n: usize, bits: Vec<u64> },
    Sparse(HashSet<u64>),
}

impl EdgeSet {
    fn new(n: usize) -> Self {
        if n <= 16_384 {
            EdgeSet::Dense {
                n,
                bits: vec![0; (n * n).div_ceil(64)],
            }
        } else {
            EdgeSet::Sparse(HashSet::new())
        }
    }

    fn key(n: usize, u: usize, v: usize) -> usize {
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        a * n + b
    }

    fn contains(&self, u: usize, v: usize) -> bool {
        match self {
            EdgeSet::Dense { n, bits } => {
                let k = Self::key(*n, u, v);
                bits[k / 64] >> (k % 64) & 1 == 1
            }
            EdgeSet::Sparse(set) => set.contains(&(Self::key(usize::MAX >> 32, u, v) as u64)),
        }
    }

    fn insert(&mut self, u: usize, v: usize) {
        match self {
            EdgeSet::Dense { n, bits } => {
                let k = Self::key(*n, u, v);
                bits[k / 64] |= 1 << (k % 64);
            }
            EdgeSet::Sparse(set) => {
                set.insert(Self::key(usize::MAX >> 32, u, v) as u64);
            }
        }
    }

    fn remove(&mut self, u: usize, v: usize) {
        match self {
            EdgeSet::Dense { n, bits } => {
                let k = Self::key(*n, u, v);
                bits[k / 64] &= !(1 << (k % 64));
            }
            EdgeSet::Sparse(set) => {
                set.remove(&(Self::key(usize::MAX >> 32, u, v) as u64));
            }
        }
    }
}

/// Uniform-ish random `delta`-regular simple graph on `n` vertices.
///
/// Stubs are paired uniformly (configuration model). Loops and repeated pairs
/// are then removed by random double-edge switchings against simple edges,
/// which preserve every degree. An attempt whose repair stalls is discarded;
/// after 1000 discarded attempts the generator gives up.
pub fn random_regular(n: usize, delta: usize, seed: u64) -> Result<Graph, GraphError> {
    if (n * delta) % 2 == 1 {
        return Err(GraphError::OddDegreeSum { n, delta });
    }
    if delta > 0 && delta >= n {
        return Err(GraphError::DegreeTooLarge { n, delta });
    }
    let mut rng = rng_from_seed(seed);
    for _ in 0..MAX_ATTEMPTS {
        if let Some(edges) = pair_and_repair(n, delta, &mut rng) {
            let mut lists: Vec<Vec<u32>> = vec![Vec::with_capacity(delta); n];
            for (u, v) in edges {
                lists[u as usize].push(v);
                lists[v as usize].push(u);
            }
            for list in &mut lists {
                list.sort_unstable();
            }
            return Ok(Graph::from_sorted_lists(lists));
        }
    }
    Err(GraphError::GenerationFailed {
        n,
        delta,
        attempts: MAX_ATTEMPTS,
    })
}

fn pair_and_repair(n: usize, delta: usize, rng: &mut StreamRng) -> Option<Vec<(u32, u32)>> {
    let mut stubs: Vec<u32> = (0..n as u32).flat_map(|v| std::iter::repeat_n(v, delta)).collect();
    stubs.shuffle(rng);
    let mut present = EdgeSet::new(n);
    let mut good = Vec::with_capacity(stubs.len() / 2);
    let mut bad = Vec::new();
    for pair in stubs.chunks_exact(2) {
        let (u, v) = (pair[0], pair[1]);
        if u == v || present.contains(u as usize, v as usize) {
            bad.push((u, v));
        } else {
            present.insert(u as usize, v as usize);
            good.push((u, v));
        }
    }
    let budget = 200 * (bad.len() + 1) + 10_000;
    let mut tries = 0;
    while let Some((u, v)) = bad.pop() {
        loop {
            tries += 1;
            if tries > budget || good.is_empty() {
                return None;
            }
            let e = rng.gen_range(0..good.len());
            let (mut x, mut y) = good[e];
            if rng.gen::<bool>() {
                std::mem::swap(&mut x, &mut y);
            }
            // Replace {u,v} (bad) and {x,y} (good) by {u,x} and {v,y}.
            let valid = u != x
                && v != y
                && !(u == y && v == x)
                && !present.contains(u as usize, x as usize)
                && !present.contains(v as usize, y as usize);
            if valid {
                present.remove(x as usize, y as usize);
                good.swap_remove(e);
                present.insert(u as usize, x as usize);
                present.insert(v as usize, y as usize);
                good.push((u, x));
                good.push((v, y));
                break;
            }
        }
    }
    Some(good)
}

/// Embeds `g` in a `delta`-regular graph by repeated doubling.
///
/// Each round takes two copies of the current graph and joins the two copies
/// of every vertex whose degree is still below `delta`. The input is the
/// induced subgraph on the first `g.n()` vertices of the result.
pub fn regularize_by_doubling(g: &Graph, delta: usize) -> Result<Graph, GraphError> {
    if delta < g.max_degree() {
        return Err(GraphError::TargetBelowMaxDegree {
            target: delta,
            max_degree: g.max_degree(),
        });
    }
    let mut host = g.clone();
    while host.n() > 0 && (0..host.n()).any(|v| host.degree(v) < delta) {
        let n = host.n();
        let mut lists: Vec<Vec<u32>> = Vec::with_capacity(2 * n);
        for v in 0..n {
            let mut list = host.neighbour_slice(v).to_vec();
            if host.degree(v) < delta {
                list.push((v + n) as u32);
            }
            lists.push(list);
        }
        for v in 0..n {
            let mut list = Vec::with_capacity(host.degree(v) + 1);
            if host.degree(v) < delta {
                list.push(v as u32);
            }
            list.extend(host.neighbour_slice(v).iter().map(|&w| w + n as u32));
            lists.push(list);
        }
        host = Graph::from_sorted_lists(lists);
    }
    Ok(host)
}

/// Side sizes `(|A|, |B|) = (⌊Δ² / log^{3/2} Δ⌋, Δ)` of the bipartite construction.
pub fn adversarial_side_sizes(delta: usize, log_base: LogBase) -> (usize, usize) {
    let d = delta as f64;
    let a = (d * d / log_base.log_pow(d, 1.5)).floor() as usize;
    (a, delta)
}

/// Random bipartite graph in which each of the `Δ` vertices of `B` picks a
/// uniform `Δ`-subset of `A` as its neighbourhood.
///
/// `A` occupies vertices `0..|A|` and `B` the following `Δ` indices.
pub fn adversarial_bipartite(
    delta: usize,
    seed: u64,
    log_base: LogBase,
) -> Result<(Graph, Bipartition), GraphError> {
    if delta < 16 {
        return Err(GraphError::DeltaTooSmall(delta));
    }
    let (a, b) = adversarial_side_sizes(delta, log_base);
    if a <= delta {
        return Err(GraphError::DeltaTooSmall(delta));
    }
    let mut rng = rng_from_seed(seed);
    let mut lists: Vec<Vec<u32>> = vec![Vec::new(); a + b];
    for j in 0..b {
        let bv = a + j;
        let mut picks: Vec<u32> = sample(&mut rng, a, delta).into_iter().map(|x| x as u32).collect();
        picks.sort_unstable();
        for &x in &picks {
            lists[x as usize].push(bv as u32);
        }
        lists[bv] = picks;
    }
    // A-side lists were filled in increasing order of b, so they are sorted.
    let g = Graph::from_sorted_lists(lists);
    let bip = Bipartition {
        side_a: (0..a).collect::<BTreeSet<_>>(),
        side_b: (a..a + b).collect::<BTreeSet<_>>(),
    };
    Ok((g, bip))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k4_is_the_only_cubic_graph_on_four_vertices() {
        for seed in 0..5 {
            assert_eq!(random_regular(4, 3, seed).unwrap(), Graph::complete(4));
        }
    }

    #[test]
    fn two_regular_graphs_are_cycle_unions() {
        let g = random_regular(6, 2, 11).unwrap();
        g.check_invariants().unwrap();
        assert!(g.is_regular());
        assert_eq!(g.max_degree(), 2);
        // Walk each component: it must close into a cycle covering its vertices.
        let mut seen = [false; 6];
        let mut covered = 0;
        for start in 0..6 {
            if seen[start] {
                continue;
            }
            let (mut prev, mut cur, mut len) = (usize::MAX, start, 0);
            loop {
                seen[cur] = true;
                len += 1;
                let next = g.neighbours(cur).find(|&w| w != prev).unwrap();
                prev = cur;
                cur = next;
                if cur == start {
                    break;
                }
            }
            assert!(len >= 3);
            covered += len;
        }
        assert_eq!(covered, 6);
    }

    #[test]
    fn regular_generator_errors() {
        assert!(matches!(random_regular(5, 3, 0), Err(GraphError::OddDegreeSum { .. })));
        assert!(matches!(random_regular(4, 4, 0), Err(GraphError::DegreeTooLarge { .. })));
        assert_eq!(random_regular(5, 0, 0).unwrap().edge_count(), 0);
    }

    #[test]
    fn dense_regular_graphs_repair() {
        let g = random_regular(40, 20, 3).unwrap();
        g.check_invariants().unwrap();
        assert!(g.is_regular());
        assert_eq!(g.max_degree(), 20);
    }

    #[test]
    fn doubling_leaves_regular_graphs_alone() {
        let k = Graph::complete(6);
        assert_eq!(regularize_by_doubling(&k, 5).unwrap(), k);
        let edge = Graph::path(2);
        assert_eq!(regularize_by_doubling(&edge, 1).unwrap(), edge);
    }

    #[test]
    fn doubling_a_path() {
        let p3 = Graph::path(3);
        let r = regularize_by_doubling(&p3, 2).unwrap();
        assert!(r.is_regular());
        assert_eq!(r.max_degree(), 2);
        assert_eq!(r.induced_prefix(3), p3);
        assert!(matches!(
            regularize_by_doubling(&Graph::complete(4), 2),
            Err(GraphError::TargetBelowMaxDegree { .. })
        ));
    }

    #[test]
    fn adversarial_sizes() {
        let (g, bip) = adversarial_bipartite(16, 5, LogBase::Natural).unwrap();
        bip.validate(&g).unwrap();
        assert_eq!(bip.side_b.len(), 16);
        assert!(bip.side_b.iter().all(|&b| g.degree(b) == 16));
        let expected_a = (65536.0 / 256f64.ln().powf(1.5)).floor() as usize;
        assert_eq!(adversarial_side_sizes(256, LogBase::Natural), (expected_a, 256));
        assert!(matches!(adversarial_bipartite(15, 0, LogBase::Natural), Err(GraphError::DeltaTooSmall(15))));
        let again = adversarial_bipartite(16, 5, LogBase::Natural).unwrap();
        assert_eq!(again.0, g);
    }
}
