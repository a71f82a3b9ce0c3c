//! Dense decompositions, suitable colourings of dense sets, and the two ways
//! of extending a colouring over a dense set.
//!
//! A vertex is `d`-sparse when `G[N(v)]` has fewer than `C(Δ,2) - dΔ` edges. A
//! `d`-dense decomposition splits `V` into dense sets `D_1..D_ℓ` and a sparse
//! remainder `S` such that
//!
//! - (a) `Δ + 1 - 8d <= |D_i| <= Δ + 4d`,
//! - (b) `v` has at least `3Δ/4` neighbours in `D_i` exactly when `v ∈ D_i`,
//! - (c) every vertex of `S` is `d`-sparse.
//!
//! The validators below are the contract; the construction is one reasonable
//! way of meeting it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::colouring::PartialColouring;
use crate::dsatur::dsatur;
use crate::graph::Graph;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DenseDecomposition {
    pub dense_sets: Vec<Vec<usize>>,
    pub sparse_set: Vec<usize>,
    pub d: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecompositionViolation {
    #[error("dense sets and sparse set do not partition the vertices (vertex {0})")]
    NotAPartition(usize),
    #[error("dense set {set} has {size} vertices, outside [{lo}, {hi}]")]
    SizeOutOfRange { set: usize, size: usize, lo: i64, hi: usize },
    #[error("vertex {vertex} has {inside} neighbours in dense set {set} but membership is {member}")]
    Membership { vertex: usize, set: usize, inside: usize, member: bool },
    #[error("sparse vertex {0} is dense")]
    DenseInSparseSet(usize),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DenseError {
    #[error("d = {d} is outside 1..=delta/100 (delta = {delta})")]
    ParameterOutOfRange { d: usize, delta: usize },
    #[error("constructed decomposition is invalid: {0}")]
    Construction(DecompositionViolation),
}

/// `|E(G[N(v)])| >= C(Δ,2) - dΔ`.
pub fn is_d_dense(g: &Graph, v: usize, d: usize) -> bool {
    let delta = g.max_degree() as i64;
    g.neighbourhood_edge_count(v) as i64 >= delta * (delta - 1) / 2 - d as i64 * delta
}

/// `4 * count >= 3Δ`, i.e. `count >= 3Δ/4` without rounding.
fn sees_three_quarters(count: usize, delta: usize) -> bool {
    4 * count >= 3 * delta
}

/// Number of neighbours each vertex has inside `set`.
fn inside_counts(g: &Graph, set: &[usize]) -> Vec<usize> {
    let mut counts = vec![0; g.n()];
    for &w in set {
        for u in g.neighbours(w) {
            counts[u] += 1;
        }
    }
    counts
}

/// Builds a `d`-dense decomposition and validates it exactly.
///
/// Each still-unassigned dense vertex (in index order) seeds a candidate set
/// from its closed neighbourhood; the candidate is replaced by the set of
/// unassigned vertices seeing at least `3Δ/4` of it until nothing changes. A
/// candidate is kept when its size satisfies (a).
pub fn dense_decompose(g: &Graph, d: usize) -> Result<DenseDecomposition, DenseError> {
    let delta = g.max_degree();
    if d == 0 || 100 * d > delta {
        return Err(DenseError::ParameterOutOfRange { d, delta });
    }
    let (lo, hi) = size_window(delta, d);
    let mut assigned = vec![false; g.n()];
    let mut dense_sets = Vec::new();
    for v in 0..g.n() {
        if assigned[v] || !is_d_dense(g, v, d) {
            continue;
        }
        let mut candidate: Vec<usize> = std::iter::once(v)
            .chain(g.neighbours(v))
            .filter(|&u| !assigned[u])
            .collect();
        candidate.sort_unstable();
        for _ in 0..64 {
            let counts = inside_counts(g, &candidate);
            let next: Vec<usize> = (0..g.n())
                .filter(|&u| !assigned[u] && sees_three_quarters(counts[u], delta))
                .collect();
            if next == candidate {
                break;
            }
            candidate = next;
        }
        if (candidate.len() as i64) >= lo && candidate.len() <= hi {
            for &u in &candidate {
                assigned[u] = true;
            }
            dense_sets.push(candidate);
        }
    }
    let decomposition = DenseDecomposition {
        sparse_set: (0..g.n()).filter(|&u| !assigned[u]).collect(),
        dense_sets,
        d,
    };
    validate_decomposition(g, &decomposition).map_err(DenseError::Construction)?;
    Ok(decomposition)
}

fn size_window(delta: usize, d: usize) -> (i64, usize) {
    (delta as i64 + 1 - 8 * d as i64, delta + 4 * d)
}

/// Checks (a), (b) for every vertex against every dense set, and (c).
pub fn validate_decomposition(g: &Graph, dec: &DenseDecomposition) -> Result<(), DecompositionViolation> {
    let delta = g.max_degree();
    let mut owner = vec![usize::MAX; g.n()];
    let mut covered = vec![false; g.n()];
    for (i, set) in dec.dense_sets.iter().enumerate() {
        for &v in set {
            if v >= g.n() || covered[v] {
                return Err(DecompositionViolation::NotAPartition(v));
            }
            covered[v] = true;
            owner[v] = i;
        }
    }
    for &v in &dec.sparse_set {
        if v >= g.n() || covered[v] {
            return Err(DecompositionViolation::NotAPartition(v));
        }
        covered[v] = true;
    }
    if let Some(v) = covered.iter().position(|&c| !c) {
        return Err(DecompositionViolation::NotAPartition(v));
    }
    let (lo, hi) = size_window(delta, dec.d);
    for (set, members) in dec.dense_sets.iter().enumerate() {
        let size = members.len();
        if (size as i64) < lo || size > hi {
            return Err(DecompositionViolation::SizeOutOfRange { set, size, lo, hi });
        }
        let counts = inside_counts(g, members);
        for (vertex, &inside) in counts.iter().enumerate() {
            let member = owner[vertex] == set;
            if sees_three_quarters(inside, delta) != member {
                return Err(DecompositionViolation::Membership {
                    vertex,
                    set,
                    inside,
                    member,
                });
            }
        }
    }
    if let Some(&v) = dec.sparse_set.iter().find(|&&v| is_d_dense(g, v, dec.d)) {
        return Err(DecompositionViolation::DenseInSparseSet(v));
    }
    Ok(())
}

/// A colouring of one dense set, as a list of colour classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuitableColouring {
    /// Sorted classes, sorted by smallest member.
    pub classes: Vec<Vec<usize>>,
    /// Union of the size-1 classes, sorted.
    pub singleton_clique: Vec<usize>,
}

impl SuitableColouring {
    fn from_classes(mut classes: Vec<Vec<usize>>) -> Self {
        classes.retain(|c| !c.is_empty());
        for class in &mut classes {
            class.sort_unstable();
        }
        classes.sort();
        let mut singleton_clique: Vec<usize> = classes.iter().filter(|c| c.len() == 1).map(|c| c[0]).collect();
        singleton_clique.sort_unstable();
        SuitableColouring {
            classes,
            singleton_clique,
        }
    }

    /// At least `Δ - 40k` singleton classes.
    pub fn is_very_suitable(&self, delta: usize, k: usize) -> bool {
        self.singleton_clique.len() as i64 >= delta as i64 - 40 * k as i64
    }
}

/// Which suitability condition a colouring breaks.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SuitableViolation {
    #[error("classes do not partition the dense set")]
    NotAPartition,
    #[error("class {0} contains an edge")]
    Improper(usize),
    #[error("{classes} classes exceed delta + 1 = {limit}")]
    TooManyClasses { classes: usize, limit: usize },
    #[error("singleton classes {0} and {1} are adjacent-free")]
    SingletonsNotClique(usize, usize),
    #[error("class {0} has more than three vertices")]
    ClassTooLarge(usize),
    #[error("a size-3 class exists but only {0} classes are used")]
    SizeThreeWithFewClasses(usize),
    #[error("vertex {vertex} of a size-3 class misses singleton {singleton}")]
    SizeThreeMissesSingleton { vertex: usize, singleton: usize },
}

/// Checks the four suitability conditions independently of how the colouring was found.
pub fn validate_suitable(
    g: &Graph,
    dense_set: &[usize],
    colouring: &SuitableColouring,
) -> Result<(), SuitableViolation> {
    let delta = g.max_degree();
    let mut all: Vec<usize> = colouring.classes.iter().flatten().copied().collect();
    all.sort_unstable();
    let mut expected = dense_set.to_vec();
    expected.sort_unstable();
    if all != expected {
        return Err(SuitableViolation::NotAPartition);
    }
    for (i, class) in colouring.classes.iter().enumerate() {
        if !is_independent(g, class) {
            return Err(SuitableViolation::Improper(i));
        }
    }
    if colouring.classes.len() > delta + 1 {
        return Err(SuitableViolation::TooManyClasses {
            classes: colouring.classes.len(),
            limit: delta + 1,
        });
    }
    let singles: Vec<usize> = colouring.classes.iter().filter(|c| c.len() == 1).map(|c| c[0]).collect();
    for (i, &a) in singles.iter().enumerate() {
        for &b in &singles[i + 1..] {
            if !g.has_edge(a, b) {
                return Err(SuitableViolation::SingletonsNotClique(a, b));
            }
        }
    }
    if let Some(i) = colouring.classes.iter().position(|c| c.len() > 3) {
        return Err(SuitableViolation::ClassTooLarge(i));
    }
    let triples: Vec<&Vec<usize>> = colouring.classes.iter().filter(|c| c.len() == 3).collect();
    if !triples.is_empty() && colouring.classes.len() != delta + 1 {
        return Err(SuitableViolation::SizeThreeWithFewClasses(colouring.classes.len()));
    }
    for class in triples {
        for &vertex in class {
            if let Some(&singleton) = singles.iter().find(|&&s| !g.has_edge(vertex, s)) {
                return Err(SuitableViolation::SizeThreeMissesSingleton { vertex, singleton });
            }
        }
    }
    Ok(())
}

fn is_independent(g: &Graph, set: &[usize]) -> bool {
    set.iter()
        .enumerate()
        .all(|(i, &u)| set[i + 1..].iter().all(|&v| !g.has_edge(u, v)))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SuitableError {
    #[error("local search stopped after {iterations} moves without a suitable colouring: {violation}")]
    Stagnated {
        iterations: usize,
        violation: SuitableViolation,
    },
}

/// Local search for a suitable colouring of `G[dense_set]`.
///
/// Starts from a DSATUR colouring (at most `Δ + 1` classes) and applies
/// improving moves for the sum of squared class sizes until none applies:
///
/// 1. with fewer than `Δ + 1` classes, split a vertex off the largest class of size `>= 2`;
/// 2. move `x` from class `A` to a class `B` it has no neighbours in, when `|B| <= |A| - 2`;
/// 3. move a singleton `x` into a class `B` it has no neighbours in, and split
///    a vertex off a class `C` with `|C| > |B| + 1`.
///
/// If no class then has three or more vertices, nonadjacent singletons are
/// paired up. Each move lowers the potential, so at most `|D|²` moves happen.
pub fn suitable_colouring(g: &Graph, dense_set: &[usize]) -> Result<SuitableColouring, SuitableError> {
    let delta = g.max_degree();
    let mut members = dense_set.to_vec();
    members.sort_unstable();
    let m = members.len();
    let local = |v: usize| members.binary_search(&v).expect("member of the dense set");
    // Induced subgraph on local indices.
    let edges = members.iter().enumerate().flat_map(|(i, &v)| {
        g.neighbours(v)
            .filter(|w| members.binary_search(w).is_ok())
            .map(move |w| (i, w))
            .collect::<Vec<_>>()
    });
    let h = Graph::from_edges(m, edges.filter_map(|(i, w)| (i < local(w)).then_some((i, local(w)))))
        .expect("induced subgraph is simple");

    let start = dsatur(&h, &PartialColouring::uncoloured(m, delta + 1), 0..delta + 1)
        .expect("an induced subgraph of max degree <= delta is (delta + 1)-colourable");
    let mut class_of: Vec<usize> = start.colours.iter().map(|c| c.unwrap()).collect();
    let mut search = LocalSearch::new(&h, &mut class_of, delta + 1);
    let cap = m * m;
    let mut iterations = 0;
    while iterations < cap && search.improve() {
        iterations += 1;
    }
    if search.sizes.iter().all(|&s| s < 3) {
        search.pair_singletons();
    }
    let classes = search.classes().into_iter().map(|c| c.into_iter().map(|i| members[i]).collect()).collect();
    let colouring = SuitableColouring::from_classes(classes);
    validate_suitable(g, dense_set, &colouring)
        .map_err(|violation| SuitableError::Stagnated { iterations, violation })?;
    Ok(colouring)
}

struct LocalSearch<'a> {
    h: &'a Graph,
    class_of: &'a mut [usize],
    sizes: Vec<usize>,
    limit: usize,
}

impl<'a> LocalSearch<'a> {
    fn new(h: &'a Graph, class_of: &'a mut [usize], limit: usize) -> Self {
        let mut sizes = vec![0; limit];
        for &c in class_of.iter() {
            sizes[c] += 1;
        }
        LocalSearch {
            h,
            class_of,
            sizes,
            limit,
        }
    }

    fn live_classes(&self) -> usize {
        self.sizes.iter().filter(|&&s| s > 0).count()
    }

    fn members(&self, class: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.class_of.len()).filter(move |&v| self.class_of[v] == class)
    }

    /// Whether `x` has no neighbour in `class`.
    fn fits(&self, x: usize, class: usize) -> bool {
        self.h.neighbours(x).all(|w| self.class_of[w] != class)
    }

    fn move_to(&mut self, x: usize, class: usize) {
        self.sizes[self.class_of[x]] -= 1;
        self.class_of[x] = class;
        self.sizes[class] += 1;
    }

    fn empty_class(&self) -> Option<usize> {
        self.sizes.iter().position(|&s| s == 0)
    }

    /// Applies the first improving move found; false at a local minimum.
    fn improve(&mut self) -> bool {
        let n = self.class_of.len();
        // Move 1.
        if self.live_classes() < self.limit {
            let largest = (0..self.limit).max_by_key(|&c| (self.sizes[c], std::cmp::Reverse(c))).unwrap();
            if self.sizes[largest] >= 2 {
                let x = self.members(largest).next().unwrap();
                let fresh = self.empty_class().unwrap();
                self.move_to(x, fresh);
                return true;
            }
        }
        // Move 2.
        for x in 0..n {
            let a = self.class_of[x];
            for b in 0..self.limit {
                if b != a && self.sizes[b] > 0 && self.sizes[b] + 2 <= self.sizes[a] && self.fits(x, b) {
                    self.move_to(x, b);
                    return true;
                }
            }
        }
        // Move 3.
        for x in 0..n {
            let a = self.class_of[x];
            if self.sizes[a] != 1 {
                continue;
            }
            for b in 0..self.limit {
                if b == a || self.sizes[b] == 0 || !self.fits(x, b) {
                    continue;
                }
                let Some(c) = (0..self.limit).find(|&c| c != b && c != a && self.sizes[c] > self.sizes[b] + 1) else {
                    continue;
                };
                self.move_to(x, b);
                // `a` is now empty and becomes the new singleton class.
                let y = self.members(c).next().unwrap();
                self.move_to(y, a);
                return true;
            }
        }
        false
    }

    fn pair_singletons(&mut self) {
        let n = self.class_of.len();
        for x in 0..n {
            if self.sizes[self.class_of[x]] != 1 {
                continue;
            }
            let partner = (x + 1..n).find(|&y| self.sizes[self.class_of[y]] == 1 && !self.h.has_edge(x, y));
            if let Some(y) = partner {
                let target = self.class_of[x];
                self.move_to(y, target);
            }
        }
    }

    fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.limit];
        for (v, &c) in self.class_of.iter().enumerate() {
            out[c].push(v);
        }
        out
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExtensionError {
    #[error("vertex {0} of the dense set is already coloured")]
    AlreadyColoured(usize),
    #[error("J must hold {expected} singleton-class vertices, got {found}")]
    BadJ { expected: usize, found: usize },
    #[error("no colour below {limit} is free for vertex {vertex}")]
    Stuck { vertex: usize, limit: usize },
    #[error("selection of {stage} found {found} of the {needed} required")]
    Selection { stage: &'static str, needed: usize, found: usize },
}

/// Smallest colour below `limit` unused on the neighbours of every vertex in `block`.
fn free_colour(g: &Graph, f: &PartialColouring, block: &[usize], limit: usize) -> Option<usize> {
    let mut used = vec![false; limit];
    for &v in block {
        for w in g.neighbours(v) {
            if let Some(c) = f.get(w) {
                if c < limit {
                    used[c] = true;
                }
            }
        }
    }
    used.iter().position(|&u| !u)
}

fn colour_block(g: &Graph, f: &mut PartialColouring, block: &[usize], limit: usize) -> Result<(), ExtensionError> {
    let c = free_colour(g, f, block, limit).ok_or(ExtensionError::Stuck {
        vertex: block[0],
        limit,
    })?;
    for &v in block {
        f.set(v, c);
    }
    Ok(())
}

fn check_uncoloured(f: &PartialColouring, dense_set: &[usize]) -> Result<(), ExtensionError> {
    match dense_set.iter().find(|&&v| f.get(v).is_some()) {
        Some(&v) => Err(ExtensionError::AlreadyColoured(v)),
        None => Ok(()),
    }
}

/// Extends `partial` over `D_i - J` using colours below `limit = Δ + 1 - k`.
///
/// Non-singleton classes are coloured first, each as one monochromatic block;
/// then the singleton vertices outside `J`, in index order.
pub fn extend_over_very_suitable(
    g: &Graph,
    partial: &PartialColouring,
    dense_set: &[usize],
    colouring: &SuitableColouring,
    j_set: &[usize],
    limit: usize,
) -> Result<PartialColouring, ExtensionError> {
    check_uncoloured(partial, dense_set)?;
    let k = (g.max_degree() + 1).saturating_sub(limit);
    if j_set.len() != k || j_set.iter().any(|v| colouring.singleton_clique.binary_search(v).is_err()) {
        return Err(ExtensionError::BadJ {
            expected: k,
            found: j_set.len(),
        });
    }
    let mut f = partial.clone();
    for class in colouring.classes.iter().filter(|c| c.len() > 1) {
        colour_block(g, &mut f, class, limit)?;
    }
    for &v in &colouring.singleton_clique {
        if !j_set.contains(&v) {
            colour_block(g, &mut f, &[v], limit)?;
        }
    }
    Ok(f)
}

/// Extends `partial` over all of `D_i` using colours below `limit = Δ + 1 - k`.
///
/// Picks `⌈8k/3⌉` nonadjacent pairs (one from each class of size two or
/// three), a set `Z'` of `⌈Δ/30⌉` other vertices each adjacent to both ends of
/// at least `k` pairs, and a set `Y'` of `⌈Δ/3⌉` further vertices each adjacent
/// to at least `k` vertices of `Z'`. Pairs are coloured monochromatically, then
/// `D_i - Y' - Z'`, then `Y'`, then `Z'`. A selection that falls short is
/// reported rather than forced.
pub fn extend_over_not_very_suitable(
    g: &Graph,
    partial: &PartialColouring,
    dense_set: &[usize],
    colouring: &SuitableColouring,
    limit: usize,
) -> Result<PartialColouring, ExtensionError> {
    check_uncoloured(partial, dense_set)?;
    let delta = g.max_degree();
    let k = (delta + 1).saturating_sub(limit);
    let plan = NotVerySuitablePlan::select(g, dense_set, colouring, k)?;
    let mut f = partial.clone();
    for &(a, b) in &plan.pairs {
        colour_block(g, &mut f, &[a, b], limit)?;
    }
    let in_pair = |v: &usize| plan.pairs.iter().any(|&(a, b)| a == *v || b == *v);
    let mut rest: Vec<usize> = dense_set
        .iter()
        .copied()
        .filter(|v| !in_pair(v) && !plan.y.contains(v) && !plan.z.contains(v))
        .collect();
    rest.sort_unstable();
    for v in rest.into_iter().chain(plan.y.iter().copied()).chain(plan.z.iter().copied()) {
        colour_block(g, &mut f, &[v], limit)?;
    }
    Ok(f)
}

/// The pairs, `Z'` and `Y'` chosen for a dense set without a very suitable colouring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NotVerySuitablePlan {
    pub pairs: Vec<(usize, usize)>,
    pub z: Vec<usize>,
    pub y: Vec<usize>,
}

impl NotVerySuitablePlan {
    pub fn select(
        g: &Graph,
        dense_set: &[usize],
        colouring: &SuitableColouring,
        k: usize,
    ) -> Result<Self, ExtensionError> {
        let delta = g.max_degree();
        let need_pairs = (8 * k).div_ceil(3);
        let pairs: Vec<(usize, usize)> = colouring
            .classes
            .iter()
            .filter(|c| c.len() >= 2)
            .map(|c| (c[0], c[1]))
            .take(need_pairs)
            .collect();
        if pairs.len() < need_pairs {
            return Err(ExtensionError::Selection {
                stage: "nonadjacent pairs",
                needed: need_pairs,
                found: pairs.len(),
            });
        }
        let in_pair = |v: usize| pairs.iter().any(|&(a, b)| a == v || b == v);
        let mut free: Vec<usize> = dense_set.iter().copied().filter(|&v| !in_pair(v)).collect();
        free.sort_unstable();

        let need_z = delta.div_ceil(30);
        let z = top_by_count(&free, need_z, k, |v| {
            pairs.iter().filter(|&&(a, b)| g.has_edge(v, a) && g.has_edge(v, b)).count()
        })
        .map_err(|found| ExtensionError::Selection {
            stage: "Z' (vertices seeing k pairs)",
            needed: need_z,
            found,
        })?;

        let need_y = delta.div_ceil(3);
        let rest: Vec<usize> = free.iter().copied().filter(|v| !z.contains(v)).collect();
        let y = top_by_count(&rest, need_y, k, |v| z.iter().filter(|&&w| g.has_edge(v, w)).count()).map_err(
            |found| ExtensionError::Selection {
                stage: "Y' (vertices seeing k of Z')",
                needed: need_y,
                found,
            },
        )?;
        Ok(NotVerySuitablePlan { pairs, z, y })
    }
}

/// The `want` candidates with the largest score (ties to lower index), provided
/// each scores at least `min`; otherwise the number that did qualify.
fn top_by_count(
    candidates: &[usize],
    want: usize,
    min: usize,
    score: impl Fn(usize) -> usize,
) -> Result<Vec<usize>, usize> {
    let mut scored: Vec<(usize, usize)> = candidates.iter().map(|&v| (score(v), v)).collect();
    scored.sort_by_key(|&(s, v)| (std::cmp::Reverse(s), v));
    let qualifying = scored.iter().take_while(|&&(s, _)| s >= min).count();
    if qualifying < want {
        return Err(qualifying);
    }
    let mut chosen: Vec<usize> = scored[..want].iter().map(|&(_, v)| v).collect();
    chosen.sort_unstable();
    Ok(chosen)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::random_regular;

    #[test]
    fn complete_graph_is_one_dense_set() {
        let g = Graph::complete(201);
        let dec = dense_decompose(&g, 2).unwrap();
        assert_eq!(dec.dense_sets, vec![(0..201).collect::<Vec<_>>()]);
        assert!(dec.sparse_set.is_empty());
    }

    #[test]
    fn parameter_range() {
        assert_eq!(
            dense_decompose(&Graph::cycle(8), 1),
            Err(DenseError::ParameterOutOfRange { d: 1, delta: 2 })
        );
        assert!(dense_decompose(&Graph::complete(201), 0).is_err());
    }

    #[test]
    fn sparse_random_graph() {
        let g = random_regular(300, 120, 5).unwrap();
        let dec = dense_decompose(&g, 1).unwrap();
        assert!(dec.dense_sets.is_empty());
        assert_eq!(dec.sparse_set.len(), 300);
        validate_decomposition(&g, &dec).unwrap();
    }

    #[test]
    fn validator_catches_bad_membership() {
        let g = Graph::complete(201);
        let dec = DenseDecomposition {
            dense_sets: vec![(0..200).collect()],
            sparse_set: vec![200],
            d: 2,
        };
        assert!(matches!(
            validate_decomposition(&g, &dec),
            Err(DecompositionViolation::Membership { vertex: 200, .. })
        ));
    }

    /// `K_{n}` minus a perfect matching on its first `2k` vertices.
    fn clique_minus_matching(n: usize, k: usize) -> Graph {
        let edges = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|&(u, v)| !(v < 2 * k && u % 2 == 0 && v == u + 1));
        Graph::from_edges(n, edges).unwrap()
    }

    #[test]
    fn clique_is_all_singletons() {
        let g = Graph::complete(12);
        let s = suitable_colouring(&g, &(0..12).collect::<Vec<_>>()).unwrap();
        assert_eq!(s.classes.len(), 12);
        assert_eq!(s.singleton_clique.len(), 12);
        assert!(s.is_very_suitable(11, 0));
    }

    #[test]
    fn matching_removed_gives_pairs() {
        let g = clique_minus_matching(21, 3);
        let all: Vec<usize> = (0..21).collect();
        let s = suitable_colouring(&g, &all).unwrap();
        validate_suitable(&g, &all, &s).unwrap();
        assert_eq!(s.classes.iter().filter(|c| c.len() == 2).count(), 3);
    }

    #[test]
    fn validator_bullets() {
        let g = Graph::path(3);
        let all = [0, 1, 2];
        let ok = SuitableColouring::from_classes(vec![vec![0, 2], vec![1]]);
        validate_suitable(&g, &all, &ok).unwrap();
        let improper = SuitableColouring::from_classes(vec![vec![0, 1], vec![2]]);
        assert_eq!(validate_suitable(&g, &all, &improper), Err(SuitableViolation::Improper(0)));
        let loose = SuitableColouring::from_classes(vec![vec![0], vec![1], vec![2]]);
        assert_eq!(
            validate_suitable(&g, &all, &loose),
            Err(SuitableViolation::SingletonsNotClique(0, 2))
        );
    }

    #[test]
    fn very_suitable_extension() {
        let g = clique_minus_matching(21, 2);
        let all: Vec<usize> = (0..21).collect();
        let s = suitable_colouring(&g, &all).unwrap();
        let k = 2;
        let limit = g.max_degree() + 1 - k;
        let j: Vec<usize> = s.singleton_clique[..k].to_vec();
        let f = extend_over_very_suitable(&g, &PartialColouring::uncoloured(21, limit), &all, &s, &j, limit).unwrap();
        f.validate(&g).unwrap();
        for class in s.classes.iter().filter(|c| c.len() == 2) {
            assert_eq!(f.get(class[0]), f.get(class[1]));
        }
        for v in 0..21 {
            assert_eq!(f.get(v).is_none(), j.contains(&v));
        }
    }
}
