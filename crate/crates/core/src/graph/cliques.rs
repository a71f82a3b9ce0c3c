//! Heuristic search for large cliques.
//!
//! Exact maximum clique is out of reach, and callers only need cliques that are
//! certainly cliques, not all of them. Every set returned here has been checked
//! pairwise.

use super::Graph;

/// Disjoint cliques of size at least `threshold`, found by greedy expansion
/// from seeds in decreasing degree order.
///
/// A seed `v` is skipped unless `G[N(v)]` has at least `C(threshold-1, 2)`
/// edges, which any clique of that size through `v` would need.
pub fn find_large_cliques(g: &Graph, threshold: usize) -> Vec<Vec<usize>> {
    assert!(threshold >= 1, "clique threshold must be at least 1");
    let mut order: Vec<usize> = (0..g.n()).filter(|&v| g.degree(v) + 1 >= threshold).collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    let need = (threshold - 1) * threshold.saturating_sub(2) / 2;
    let mut used = vec![false; g.n()];
    let mut found = Vec::new();
    for v in order {
        if used[v] || g.neighbourhood_edge_count(v) < need {
            continue;
        }
        let clique = extend(g, vec![v], &used);
        if clique.len() >= threshold && g.is_clique(&clique) {
            for &w in &clique {
                used[w] = true;
            }
            found.push(clique);
        }
    }
    found
}

/// Greedily extends `start` to a maximal clique.
///
/// Vertices of `start` that are not adjacent to all earlier ones are dropped
/// first. The result is sorted.
pub fn grow_clique(g: &Graph, start: &[usize]) -> Vec<usize> {
    let mut base: Vec<usize> = Vec::with_capacity(start.len());
    for &v in start {
        if !base.contains(&v) && base.iter().all(|&u| g.has_edge(u, v)) {
            base.push(v);
        }
    }
    extend(g, base, &vec![false; g.n()])
}

fn extend(g: &Graph, mut clique: Vec<usize>, blocked: &[bool]) -> Vec<usize> {
    let mut pool: Vec<u32> = match clique.first() {
        None => (0..g.n() as u32).filter(|&w| !blocked[w as usize]).collect(),
        Some(&first) => g
            .neighbour_slice(first)
            .iter()
            .copied()
            .filter(|&w| !blocked[w as usize] && clique.iter().all(|&u| g.has_edge(u, w as usize)))
            .collect(),
    };
    // Pick the pool vertex with the most neighbours inside the pool, lowest index first.
    while !pool.is_empty() {
        let mut best = (0usize, u32::MAX);
        for &w in &pool {
            let inside = super::sorted_intersection_len(g.neighbour_slice(w as usize), &pool);
            if inside > best.0 || best.1 == u32::MAX {
                best = (inside, w);
            }
        }
        let w = best.1;
        clique.push(w as usize);
        let nw = g.neighbour_slice(w as usize);
        pool.retain(|&x| x != w && nw.binary_search(&x).is_ok());
    }
    clique.sort_unstable();
    clique
}
