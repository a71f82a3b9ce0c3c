//! Undirected simple graphs in compressed adjacency form.

mod cliques;
mod generate;
mod io;

use std::collections::BTreeSet;

use thiserror::Error;

pub use cliques::{find_large_cliques, grow_clique};
pub use generate::{adversarial_bipartite, adversarial_side_sizes, random_regular, regularize_by_doubling};
pub use io::{format_graph, load_graph, parse_graph, save_graph, ParseError};

/// Errors raised while building or generating graphs.
#[derive(Debug, Error)]
pub enum GraphError {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("n * delta must be even (n = {n}, delta = {delta})")]
    OddDegreeSum { n: usize, delta: usize },
    #[error("a {delta}-regular graph needs more than {delta} vertices (n = {n})")]
    DegreeTooLarge { n: usize, delta: usize },
    #[error("no simple {delta}-regular graph on {n} vertices after {attempts} attempts")]
    GenerationFailed { n: usize, delta: usize, attempts: usize },
    #[error("target degree {target} is below the maximum degree {max_degree}")]
    TargetBelowMaxDegree { target: usize, max_degree: usize },
    #[error("delta = {0} is too small for the bipartite construction (need delta >= 16)")]
    DeltaTooSmall(usize),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// An undirected simple graph on vertices `0..n`.
///
/// Neighbour lists are sorted ascending and stored back to back; the maximum
/// degree is cached. Values are immutable once built.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    max_degree: usize,
}

impl Graph {
    /// Graph with `n` isolated vertices.
    pub fn empty(n: usize) -> Self {
        Graph {
            offsets: vec![0; n + 1],
            targets: Vec::new(),
            max_degree: 0,
        }
    }

    /// Builds a graph from an edge list; rejects loops, duplicates and bad indices.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut lists: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (u, v) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            lists[u].push(v as u32);
            lists[v].push(u as u32);
        }
        for (u, list) in lists.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                let v = w[0] as usize;
                return Err(GraphError::DuplicateEdge(u.min(v), u.max(v)));
            }
        }
        Ok(Self::from_sorted_lists(lists))
    }

    /// Assumes `lists` is symmetric, loop-free and sorted without duplicates.
    pub(crate) fn from_sorted_lists(lists: Vec<Vec<u32>>) -> Self {
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        let total = lists.iter().map(Vec::len).sum();
        let mut targets = Vec::with_capacity(total);
        let mut max_degree = 0;
        offsets.push(0);
        for list in lists {
            max_degree = max_degree.max(list.len());
            targets.extend_from_slice(&list);
            offsets.push(targets.len());
        }
        Graph {
            offsets,
            targets,
            max_degree,
        }
    }

    pub fn complete(n: usize) -> Self {
        let lists = (0..n)
            .map(|v| (0..n as u32).filter(|&w| w as usize != v).collect())
            .collect();
        Self::from_sorted_lists(lists)
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a cycle needs at least three vertices");
        Self::from_edges(n, (0..n).map(|v| (v, (v + 1) % n))).expect("cycle edges are simple")
    }

    pub fn path(n: usize) -> Self {
        Self::from_edges(n, (1..n).map(|v| (v - 1, v))).expect("path edges are simple")
    }

    /// `K_{1,leaves}` with centre 0 and leaves `1..=leaves`.
    pub fn star(leaves: usize) -> Self {
        Self::from_edges(leaves + 1, (1..=leaves).map(|v| (0, v))).expect("star edges are simple")
    }

    /// `K_{a,b}` with sides `0..a` and `a..a+b`.
    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let edges = (0..a).flat_map(|u| (a..a + b).map(move |v| (u, v)));
        Self::from_edges(a + b, edges).expect("bipartite edges are simple")
    }

    pub fn petersen() -> Self {
        let mut edges = Vec::with_capacity(15);
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        Self::from_edges(10, edges).expect("Petersen edges are simple")
    }

    /// Vertex-disjoint union; the vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let shift = self.n() as u32;
        let mut lists: Vec<Vec<u32>> = (0..self.n()).map(|v| self.neighbour_slice(v).to_vec()).collect();
        lists.extend((0..other.n()).map(|v| other.neighbour_slice(v).iter().map(|&w| w + shift).collect()));
        Self::from_sorted_lists(lists)
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    /// Maximum degree Δ.
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn is_regular(&self) -> bool {
        (0..self.n()).all(|v| self.degree(v) == self.max_degree)
    }

    /// Sorted neighbour indices of `v` in their compact storage form.
    pub fn neighbour_slice(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn neighbours(&self, v: usize) -> impl ExactSizeIterator<Item = usize> + Clone + '_ {
        self.neighbour_slice(v).iter().map(|&w| w as usize)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let (small, other) = if self.degree(u) <= self.degree(v) { (u, v) } else { (v, u) };
        self.neighbour_slice(small).binary_search(&(other as u32)).is_ok()
    }

    /// Edges `(u, v)` with `u < v` in ascending lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| self.neighbours(u).filter(move |&v| v > u).map(move |v| (u, v)))
    }

    /// Number of common neighbours of `u` and `v`.
    pub fn codegree(&self, u: usize, v: usize) -> usize {
        sorted_intersection_len(self.neighbour_slice(u), self.neighbour_slice(v))
    }

    /// Maximum codegree over unordered pairs of distinct vertices.
    ///
    /// Counts two-step walks from each vertex, so the cost is `Σ deg(w)^2`.
    pub fn max_codegree(&self) -> usize {
        let n = self.n();
        let mut counts = vec![0u32; n];
        let mut touched = Vec::new();
        let mut best = 0u32;
        for u in 0..n {
            for w in self.neighbours(u) {
                for &x in self.neighbour_slice(w) {
                    let x = x as usize;
                    if x > u {
                        if counts[x] == 0 {
                            touched.push(x);
                        }
                        counts[x] += 1;
                    }
                }
            }
            for &x in &touched {
                best = best.max(counts[x]);
                counts[x] = 0;
            }
            touched.clear();
        }
        best as usize
    }

    /// Number of edges of the subgraph induced by `N(v)`.
    pub fn neighbourhood_edge_count(&self, v: usize) -> usize {
        let nv = self.neighbour_slice(v);
        let twice: usize = nv
            .iter()
            .map(|&w| sorted_intersection_len(self.neighbour_slice(w as usize), nv))
            .sum();
        twice / 2
    }

    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices
            .iter()
            .enumerate()
            .all(|(i, &u)| vertices[i + 1..].iter().all(|&v| u != v && self.has_edge(u, v)))
    }

    /// Checks symmetry, simplicity, ordering and the cached maximum degree.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut max_degree = 0;
        for v in 0..self.n() {
            let list = self.neighbour_slice(v);
            max_degree = max_degree.max(list.len());
            if list.windows(2).any(|w| w[0] >= w[1]) {
                return Err(format!("neighbour list of {v} is not strictly ascending"));
            }
            for &w in list {
                let w = w as usize;
                if w == v {
                    return Err(format!("self-loop at {v}"));
                }
                if w >= self.n() {
                    return Err(format!("neighbour {w} of {v} out of range"));
                }
                if self.neighbour_slice(w).binary_search(&(v as u32)).is_err() {
                    return Err(format!("edge {v}-{w} is not symmetric"));
                }
            }
        }
        if max_degree != self.max_degree {
            return Err(format!("cached delta {} but observed {max_degree}", self.max_degree));
        }
        Ok(())
    }

    /// Subgraph induced by the first `k` vertices.
    pub fn induced_prefix(&self, k: usize) -> Graph {
        let lists = (0..k)
            .map(|v| self.neighbour_slice(v).iter().copied().filter(|&w| (w as usize) < k).collect())
            .collect();
        Self::from_sorted_lists(lists)
    }
}

pub(crate) fn sorted_intersection_len(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

/// The two sides `(A, B)` of a bipartite graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bipartition {
    pub side_a: BTreeSet<usize>,
    pub side_b: BTreeSet<usize>,
}

impl Bipartition {
    /// Checks that the sides partition `V(g)` and every edge crosses.
    pub fn validate(&self, g: &Graph) -> Result<(), String> {
        if self.side_a.len() + self.side_b.len() != g.n() {
            return Err("sides do not cover the vertex set exactly".into());
        }
        if let Some(v) = self.side_a.intersection(&self.side_b).next() {
            return Err(format!("vertex {v} is on both sides"));
        }
        if let Some(v) = self.side_a.iter().chain(&self.side_b).find(|&&v| v >= g.n()) {
            return Err(format!("vertex {v} out of range"));
        }
        for (u, v) in g.edges() {
            if self.side_a.contains(&u) == self.side_a.contains(&v) {
                return Err(format!("edge {u}-{v} does not cross the bipartition"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codegree_examples() {
        assert_eq!(Graph::complete(3).max_codegree(), 1);
        assert_eq!(Graph::complete_bipartite(2, 2).max_codegree(), 2);
        assert_eq!(Graph::empty(1).max_codegree(), 0);
        assert_eq!(Graph::empty(0).max_codegree(), 0);
    }

    #[test]
    fn petersen_codegree_matches_pairwise_scan() {
        let g = Graph::petersen();
        let mut brute = 0;
        let mut pairs = 0;
        for u in 0..10 {
            for v in u + 1..10 {
                pairs += 1;
                let common = (0..10).filter(|&w| g.has_edge(u, w) && g.has_edge(v, w)).count();
                brute = brute.max(common);
            }
        }
        assert_eq!(pairs, 45);
        assert_eq!(brute, 1);
        assert_eq!(g.max_codegree(), brute);
        assert!(g.is_regular());
        assert_eq!(g.max_degree(), 3);
    }

    #[test]
    fn from_edges_rejects_bad_input() {
        assert!(matches!(Graph::from_edges(3, [(0, 0)]), Err(GraphError::SelfLoop(0))));
        assert!(matches!(Graph::from_edges(3, [(0, 1), (1, 0)]), Err(GraphError::DuplicateEdge(0, 1))));
        assert!(matches!(
            Graph::from_edges(3, [(0, 3)]),
            Err(GraphError::VertexOutOfRange { vertex: 3, n: 3 })
        ));
    }

    #[test]
    fn neighbourhood_edges_and_cliques() {
        let k5 = Graph::complete(5);
        assert_eq!(k5.neighbourhood_edge_count(0), 6);
        assert!(k5.is_clique(&[0, 1, 2, 3, 4]));
        let c5 = Graph::cycle(5);
        assert_eq!(c5.neighbourhood_edge_count(0), 0);
        assert!(!c5.is_clique(&[0, 1, 2]));
        assert!(c5.is_clique(&[0, 1]));
    }

    #[test]
    fn bipartition_validation() {
        let g = Graph::complete_bipartite(2, 3);
        let ok = Bipartition {
            side_a: [0, 1].into(),
            side_b: [2, 3, 4].into(),
        };
        assert!(ok.validate(&g).is_ok());
        let bad = Bipartition {
            side_a: [0, 2].into(),
            side_b: [1, 3, 4].into(),
        };
        assert!(bad.validate(&g).is_err());
    }
}
