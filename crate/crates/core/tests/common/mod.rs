#![allow(dead_code)]

use std::collections::HashSet;

use peacekit::nibble::IterationHistory;
use peacekit::{Graph, PartialColouring};
use rand::seq::SliceRandom;
use rand::Rng;

/// Index of the pair `a < b` among the `C(n,2)` pairs in lexicographic order.
fn pair_index(n: usize, a: usize, b: usize) -> usize {
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

fn is_connected(n: usize, adj: &[u32]) -> bool {
    let mut seen = 1u32;
    let mut stack = vec![0usize];
    while let Some(v) = stack.pop() {
        let fresh = adj[v] & !seen;
        seen |= fresh;
        for w in 0..n {
            if fresh >> w & 1 == 1 {
                stack.push(w);
            }
        }
    }
    seen.count_ones() as usize == n
}

/// Smallest edge code over all relabellings that respect a degree-based
/// refinement of the vertices.
fn canonical_code(n: usize, adj: &[u32]) -> u64 {
    let deg: Vec<u32> = adj.iter().map(|a| a.count_ones()).collect();
    let key: Vec<(u32, Vec<u32>)> = (0..n)
        .map(|v| {
            let mut nd: Vec<u32> = (0..n).filter(|&w| adj[v] >> w & 1 == 1).map(|w| deg[w]).collect();
            nd.sort_unstable();
            (deg[v], nd)
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| key[a].cmp(&key[b]));
    let mut cells: Vec<Vec<usize>> = Vec::new();
    for &v in &order {
        match cells.last_mut() {
            Some(cell) if key[cell[0]] == key[v] => cell.push(v),
            _ => cells.push(vec![v]),
        }
    }
    let mut best = u64::MAX;
    let mut current = Vec::with_capacity(n);
    permute_cells(n, adj, &cells, 0, &mut current, &mut best);
    best
}

fn permute_cells(n: usize, adj: &[u32], cells: &[Vec<usize>], depth: usize, current: &mut Vec<usize>, best: &mut u64) {
    if depth == cells.len() {
        let mut code = 0u64;
        for a in 0..n {
            for b in a + 1..n {
                if adj[current[a]] >> current[b] & 1 == 1 {
                    code |= 1 << pair_index(n, a, b);
                }
            }
        }
        *best = (*best).min(code);
        return;
    }
    let mut cell = cells[depth].clone();
    let k = cell.len();
    heap_permutations(&mut cell, k, &mut |perm| {
        let mark = current.len();
        current.extend_from_slice(perm);
        permute_cells(n, adj, cells, depth + 1, current, best);
        current.truncate(mark);
    });
}

fn heap_permutations(items: &mut [usize], k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k <= 1 {
        visit(items);
        return;
    }
    for i in 0..k - 1 {
        heap_permutations(items, k - 1, visit);
        if k.is_multiple_of(2) {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
    heap_permutations(items, k - 1, visit);
}

/// All connected graphs on exactly `n` vertices, one per isomorphism class,
/// found by scanning every labelled graph.
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << pairs.len()) {
        let mut adj = vec![0u32; n];
        for (i, &(a, b)) in pairs.iter().enumerate() {
            if mask >> i & 1 == 1 {
                adj[a] |= 1 << b;
                adj[b] |= 1 << a;
            }
        }
        if !is_connected(n, &adj) {
            continue;
        }
        if seen.insert(canonical_code(n, &adj)) {
            let edges = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e);
            out.push(Graph::from_edges(n, edges).unwrap());
        }
    }
    out
}

/// Random simple graph on `n` vertices with maximum degree at most `max_degree`.
pub fn random_bounded_graph(rng: &mut impl Rng, n: usize, max_degree: usize) -> Graph {
    let mut deg = vec![0usize; n];
    let mut edges = HashSet::new();
    if n >= 2 {
        let attempts = rng.gen_range(0..=n * max_degree);
        for _ in 0..attempts {
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if a == b || deg[a] >= max_degree || deg[b] >= max_degree {
                continue;
            }
            if edges.insert((a.min(b), a.max(b))) {
                deg[a] += 1;
                deg[b] += 1;
            }
        }
    }
    Graph::from_edges(n, edges).unwrap()
}

/// Random proper partial colouring: vertices in random order take a random
/// free colour, and each is skipped with probability `skip`.
pub fn random_proper_colouring(rng: &mut impl Rng, g: &Graph, palette: usize, skip: f64) -> PartialColouring {
    let mut f = PartialColouring::uncoloured(g.n(), palette);
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.shuffle(rng);
    for v in order {
        if rng.gen_bool(skip) {
            continue;
        }
        let used: HashSet<usize> = g.neighbours(v).filter_map(|w| f.get(w)).collect();
        let free: Vec<usize> = (0..palette).filter(|c| !used.contains(c)).collect();
        if let Some(&c) = free.choose(rng) {
            f.set(v, c);
        }
    }
    f
}

/// Nibble state rebuilt from nothing but the recorded assignments and removals.
pub struct Replay {
    pub palette: usize,
    pub assigned: Vec<Option<usize>>,
    removed: Vec<Vec<bool>>,
}

impl Replay {
    pub fn from_history(g: &Graph, palette: usize, history: &[IterationHistory]) -> Self {
        let n = g.n();
        let mut assigned = vec![None; n];
        let mut removed = vec![vec![false; palette]; n];
        for it in history {
            for &(v, c) in &it.assignments {
                assigned[v] = Some(c);
            }
            for &(v, c) in it.flip_removals.iter().chain(&it.truncations) {
                removed[v][c] = true;
            }
        }
        for v in 0..n {
            for w in g.neighbours(v) {
                if let Some(c) = assigned[w] {
                    removed[v][c] = true;
                }
            }
        }
        Replay {
            palette,
            assigned,
            removed,
        }
    }

    pub fn list_len(&self, v: usize) -> usize {
        self.removed[v].iter().filter(|&&r| !r).count()
    }

    pub fn in_list(&self, v: usize, c: usize) -> bool {
        !self.removed[v][c]
    }

    pub fn good(&self, g: &Graph, v: usize) -> usize {
        let mut counts = vec![0usize; self.palette];
        for w in g.neighbours(v) {
            if let Some(c) = self.assigned[w] {
                counts[c] += 1;
            }
        }
        counts.iter().filter(|&&k| k == 1).count()
    }

    pub fn in_conflict(&self, g: &Graph, v: usize) -> bool {
        self.assigned[v].is_some_and(|c| g.neighbours(v).any(|w| self.assigned[w] == Some(c)))
    }

    pub fn bad_neighbours(&self, g: &Graph, v: usize) -> usize {
        g.neighbours(v).filter(|&w| self.in_conflict(g, w)).count()
    }

    pub fn uncoloured_neighbours(&self, g: &Graph, v: usize) -> usize {
        g.neighbours(v).filter(|&w| self.assigned[w].is_none()).count()
    }

    pub fn u_count(&self, g: &Graph, v: usize, c: usize) -> usize {
        g.neighbours(v)
            .filter(|&w| self.assigned[w].is_none() && self.in_list(w, c))
            .count()
    }
}

/// Mean over vertices of the fraction of neighbours whose colour is unique in the neighbourhood.
pub fn unique_fraction(g: &Graph, f: &PartialColouring) -> f64 {
    peacekit::peace_report(g, f).unwrap().unique_fraction_mean()
}

/// Minimum peacefulness over all proper `c`-colourings by enumerating all `c^n` assignments.
pub fn brute_force_p_star(g: &Graph, c: usize) -> usize {
    let n = g.n();
    let mut best = usize::MAX;
    for code in 0..c.pow(n as u32) {
        let mut x = code;
        let colours: Vec<usize> = (0..n)
            .map(|_| {
                let k = x % c;
                x /= c;
                k
            })
            .collect();
        if g.edges().any(|(u, v)| colours[u] == colours[v]) {
            continue;
        }
        let f = PartialColouring::from_total(c, colours);
        best = best.min(peacekit::peace::disturbed_by_definition(g, &f).into_iter().max().unwrap_or(0));
    }
    best
}
