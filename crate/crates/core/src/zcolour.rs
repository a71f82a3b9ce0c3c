//! Two-phase colouring through a usable set `Z`.
//!
//! With `k = ⌈20εΔ⌉`, a usable set `Z` is split into sets `K_i` (each `k`
//! vertices of a large clique `C_i`) and a set `Y`, such that `G - Z` can be
//! coloured with `Δ + 1 - k` colours and every vertex sees a controlled number
//! of `Z` vertices. `G - Z` is coloured first; `Z` then gets `k` fresh colours
//! (a random permutation on each `K_i`, uniform draws on `Y`), conflicts are
//! removed, and vertices `v` with `X_v < εΔ` are resampled before a greedy
//! completion at `p = (1 - ε)Δ`.
//!
//! The validator reports these conditions under the labels:
//!
//! - (ii) `|K_i| = k`, `K_i ⊆ C_i`, `C_i` a clique of size `>= 2Δ/3 + 1`, the `C_i` disjoint;
//! - (iii) `v ∈ K_j`: `|N(v) ∩ (Z - K_j)| <= 20εΔ/9`;
//! - (iv) `v ∈ Y` or `v` outside every known clique of size `> 2Δ/3 + 1`:
//!   `|N(v) ∩ Z| <= 200εΔ/9` and `|N(v) ∩ Y| <= 2εΔ`;
//! - (v) `v` outside every known clique of size `> 2Δ/3 + 1`: `|N(v) ∩ Z| >= 3εΔ/2`.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::colouring::PartialColouring;
use crate::dense::{
    dense_decompose, extend_over_not_very_suitable, extend_over_very_suitable, suitable_colouring,
    DenseDecomposition, DenseError, SuitableColouring,
};
use crate::dsatur::{dsatur_with_restarts, DsaturError};
use crate::graph::{find_large_cliques, Graph};
use crate::peace::{greedy_complete, greedy_extend, peace_report};
use crate::rng::{rng_from_seed, split_seed, StreamRng};
use crate::scalar::{LogBase, Threshold};

#[derive(Clone, Copy, Debug)]
pub struct ZParams<T> {
    pub epsilon: T,
    pub seed: u64,
    /// Resampling budget for each of the two random stages; defaults to `50 n`.
    pub max_rounds: Option<usize>,
    /// Decomposition parameter; defaults to `4k`, clamped to `⌊Δ/100⌋`.
    pub d: Option<usize>,
    pub log_base: LogBase,
    pub dsatur_restarts: usize,
}

impl<T: Threshold> ZParams<T> {
    pub fn new(epsilon: T, seed: u64) -> Self {
        ZParams {
            epsilon,
            seed,
            max_rounds: None,
            d: None,
            log_base: LogBase::Natural,
            dsatur_restarts: 20,
        }
    }
}

/// `ε = 1/8001`.
pub fn default_epsilon<T: Threshold>() -> T {
    T::one() / T::of_count(8001)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ZError {
    #[error("epsilon must give 1 <= k = ceil(20 eps delta) <= delta, got k = {k} at delta = {delta}")]
    EpsilonOutOfRange { k: usize, delta: usize },
    #[error(transparent)]
    Decomposition(#[from] DenseError),
    #[error("could not colour G - Z with {limit} colours: {source}")]
    ComplementFailed { limit: usize, source: DsaturError },
}

/// Numeric bounds derived from `ε` and `Δ`.
#[derive(Clone, Copy, Debug)]
struct Bounds<T> {
    eps_delta: T,
    iii: T,
    iv_z: T,
    iv_y: T,
    v: T,
}

impl<T: Threshold> Bounds<T> {
    fn new(epsilon: T, delta: usize) -> Self {
        let eps_delta = epsilon * T::of_count(delta);
        let c = T::of_count;
        Bounds {
            eps_delta,
            iii: c(20) * eps_delta / c(9),
            iv_z: c(200) * eps_delta / c(9),
            iv_y: c(2) * eps_delta,
            v: c(3) * eps_delta / c(2),
        }
    }
}

/// A clique `C_i` hosting one `K_i`: the singleton classes of a very suitable
/// colouring of dense set `dense_set`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HostClique {
    pub dense_set: usize,
    pub clique: Vec<usize>,
}

/// Everything computed about `G` before any randomness is used.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ZSetup {
    pub delta: usize,
    pub k: usize,
    /// Decomposition parameter actually used; 0 means no decomposition was taken.
    pub d_used: usize,
    pub decomposition: Option<DenseDecomposition>,
    pub suitable: Vec<Option<SuitableColouring>>,
    pub hosts: Vec<HostClique>,
    /// Verified cliques of size at least `2Δ/3 + 1` (hosts and heuristic finds).
    pub big_cliques: Vec<Vec<usize>>,
}

impl ZSetup {
    pub fn prepare<T: Threshold>(g: &Graph, params: &ZParams<T>) -> Result<Self, ZError> {
        let delta = g.max_degree();
        let k = (T::of_count(20) * params.epsilon * T::of_count(delta))
            .ceil_count()
            .unwrap_or(0);
        if k == 0 || k > delta {
            return Err(ZError::EpsilonOutOfRange { k, delta });
        }
        let d_used = params.d.unwrap_or(4 * k).min(delta / 100);
        let decomposition = if d_used == 0 { None } else { Some(dense_decompose(g, d_used)?) };
        let min_host = k.max(min_big_clique(delta));
        let mut suitable = Vec::new();
        let mut hosts = Vec::new();
        if let Some(dec) = &decomposition {
            for (i, set) in dec.dense_sets.iter().enumerate() {
                let colouring = suitable_colouring(g, set).ok();
                if let Some(c) = &colouring {
                    if c.is_very_suitable(delta, k) && c.singleton_clique.len() >= min_host && g.is_clique(&c.singleton_clique)
                    {
                        hosts.push(HostClique {
                            dense_set: i,
                            clique: c.singleton_clique.clone(),
                        });
                    }
                }
                suitable.push(colouring);
            }
        }
        let mut big_cliques: Vec<Vec<usize>> = hosts.iter().map(|h| h.clique.clone()).collect();
        big_cliques.extend(find_large_cliques(g, min_big_clique(delta)));
        Ok(ZSetup {
            delta,
            k,
            d_used,
            decomposition,
            suitable,
            hosts,
            big_cliques,
        })
    }

    /// Vertices in a known clique of size at least `2Δ/3 + 1`.
    pub fn in_clique_at_least(&self, n: usize) -> Vec<bool> {
        self.clique_mask(n, |size| 3 * size >= 2 * self.delta + 3)
    }

    /// Vertices in a known clique of size greater than `2Δ/3 + 1`.
    pub fn in_clique_exceeding(&self, n: usize) -> Vec<bool> {
        self.clique_mask(n, |size| 3 * size > 2 * self.delta + 3)
    }

    fn clique_mask(&self, n: usize, keep: impl Fn(usize) -> bool) -> Vec<bool> {
        let mut mask = vec![false; n];
        for clique in self.big_cliques.iter().filter(|c| keep(c.len())) {
            for &v in clique {
                mask[v] = true;
            }
        }
        mask
    }

    fn host_of(&self, n: usize) -> Vec<Option<usize>> {
        let mut host = vec![None; n];
        for (i, h) in self.hosts.iter().enumerate() {
            for &v in &h.clique {
                host[v] = Some(i);
            }
        }
        host
    }
}

/// Smallest integer at least `2Δ/3 + 1`.
fn min_big_clique(delta: usize) -> usize {
    (2 * delta + 3).div_ceil(3)
}

/// One `K_i`: `members[j]` is the `j`-th entry of the permutation of `C_host`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KSet {
    pub host: usize,
    pub members: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UsableZ {
    pub k_sets: Vec<KSet>,
    pub y_set: Vec<usize>,
    pub epsilon: f64,
}

impl UsableZ {
    pub fn in_z(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for v in self.k_sets.iter().flat_map(|k| &k.members).chain(&self.y_set) {
            mask[*v] = true;
        }
        mask
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZCondition {
    /// (ii)
    KSets,
    /// (iii)
    KNeighbours,
    /// (iv), bound on `|N(v) ∩ Z|`
    ZUpper,
    /// (iv), bound on `|N(v) ∩ Y|`
    YUpper,
    /// (v)
    ZLower,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZViolation {
    /// Offending vertex, or the index of the offending `K_i` for (ii).
    pub at: usize,
    pub condition: ZCondition,
    pub count: usize,
}

/// Checks conditions (ii)–(v) from scratch.
pub fn validate_usable<T: Threshold>(g: &Graph, setup: &ZSetup, z: &UsableZ, epsilon: T) -> Vec<ZViolation> {
    let n = g.n();
    let bounds = Bounds::new(epsilon, setup.delta);
    let mut out = Vec::new();
    let mut seen_hosts = BTreeSet::new();
    let mut claimed = vec![false; n];
    for (i, ks) in z.k_sets.iter().enumerate() {
        let host = setup.hosts.get(ks.host);
        let ok = host.is_some_and(|h| {
            let mut sorted = ks.members.clone();
            sorted.sort_unstable();
            sorted.dedup();
            sorted.len() == setup.k
                && ks.members.len() == setup.k
                && sorted.iter().all(|v| h.clique.binary_search(v).is_ok())
                && 3 * h.clique.len() >= 2 * setup.delta + 3
                && g.is_clique(&h.clique)
                && h.clique.iter().all(|&v| !claimed[v])
        }) && seen_hosts.insert(ks.host);
        if let Some(h) = host {
            for &v in &h.clique {
                claimed[v] = true;
            }
        }
        if !ok {
            out.push(ZViolation {
                at: i,
                condition: ZCondition::KSets,
                count: ks.members.len(),
            });
        }
    }
    let in_z = z.in_z(n);
    let mut in_y = vec![false; n];
    for &v in &z.y_set {
        in_y[v] = true;
    }
    let mut k_of = vec![None; n];
    for (i, ks) in z.k_sets.iter().enumerate() {
        for &v in &ks.members {
            k_of[v] = Some(i);
        }
    }
    let exceeding = setup.in_clique_exceeding(n);
    for v in 0..n {
        let z_count = g.neighbours(v).filter(|&w| in_z[w]).count();
        let y_count = g.neighbours(v).filter(|&w| in_y[w]).count();
        if let Some(j) = k_of[v] {
            let outside = g.neighbours(v).filter(|&w| in_z[w] && k_of[w] != Some(j)).count();
            if T::of_count(outside) > bounds.iii {
                out.push(ZViolation {
                    at: v,
                    condition: ZCondition::KNeighbours,
                    count: outside,
                });
            }
        }
        if in_y[v] || !exceeding[v] {
            if T::of_count(z_count) > bounds.iv_z {
                out.push(ZViolation {
                    at: v,
                    condition: ZCondition::ZUpper,
                    count: z_count,
                });
            }
            if T::of_count(y_count) > bounds.iv_y {
                out.push(ZViolation {
                    at: v,
                    condition: ZCondition::YUpper,
                    count: y_count,
                });
            }
        }
        if !exceeding[v] && T::of_count(z_count) < bounds.v {
            out.push(ZViolation {
                at: v,
                condition: ZCondition::ZLower,
                count: z_count,
            });
        }
    }
    out
}

/// Result of [`sample_usable_z`]: the last sample and whatever still fails.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZSample {
    pub z: UsableZ,
    pub rounds: usize,
    pub initial_violations: usize,
    pub residual: Vec<ZViolation>,
}

/// A set of vertices with O(1) reset.
struct Marker {
    stamp: Vec<u32>,
    epoch: u32,
    items: Vec<usize>,
}

impl Marker {
    fn new(n: usize) -> Self {
        Marker {
            stamp: vec![0; n],
            epoch: 0,
            items: Vec::new(),
        }
    }

    fn reset(&mut self) {
        self.epoch += 1;
        self.items.clear();
    }

    fn insert(&mut self, v: usize) -> bool {
        if self.stamp[v] == self.epoch {
            return false;
        }
        self.stamp[v] = self.epoch;
        self.items.push(v);
        true
    }

    fn take(&mut self) -> Vec<usize> {
        std::mem::take(&mut self.items)
    }
}

/// Incrementally maintained membership counts for the `Z` sampler.
struct ZSampler<'a, T> {
    g: &'a Graph,
    setup: &'a ZSetup,
    bounds: Bounds<T>,
    y_probability: f64,
    host_of: Vec<Option<usize>>,
    exceeding: Vec<bool>,
    perms: Vec<Vec<usize>>,
    k_of: Vec<Option<usize>>,
    in_y: Vec<bool>,
    z_count: Vec<usize>,
    y_count: Vec<usize>,
    /// For `v ∈ K_j`: `|N(v) ∩ K_j|`.
    own_k_count: Vec<usize>,
    bad: BTreeSet<usize>,
    changed: Vec<usize>,
    marker: Marker,
    rng: StreamRng,
}

impl<'a, T: Threshold> ZSampler<'a, T> {
    fn new(g: &'a Graph, setup: &'a ZSetup, epsilon: T, rng: StreamRng) -> Self {
        let n = g.n();
        let mut sampler = ZSampler {
            g,
            setup,
            bounds: Bounds::new(epsilon, setup.delta),
            y_probability: 7.0 * epsilon.to_f64_lossy() / 4.0,
            host_of: setup.host_of(n),
            exceeding: setup.in_clique_exceeding(n),
            perms: setup.hosts.iter().map(|h| h.clique.clone()).collect(),
            k_of: vec![None; n],
            in_y: vec![false; n],
            z_count: vec![0; n],
            y_count: vec![0; n],
            own_k_count: vec![0; n],
            bad: BTreeSet::new(),
            changed: Vec::new(),
            marker: Marker::new(n),
            rng,
        };
        for i in 0..setup.hosts.len() {
            sampler.reshuffle(i);
        }
        for v in 0..n {
            if sampler.host_of[v].is_none() {
                sampler.redraw_y(v);
            }
        }
        for v in 0..n {
            sampler.refresh(v);
        }
        sampler
    }

    /// Moves `v` between roles, keeping the neighbour counts in step.
    fn set_role(&mut self, v: usize, k: Option<usize>, y: bool) {
        let (old_k, old_y) = (self.k_of[v], self.in_y[v]);
        let was_z = old_k.is_some() || old_y;
        let now_z = k.is_some() || y;
        for w in self.g.neighbours(v) {
            if was_z {
                self.z_count[w] -= 1;
            }
            if now_z {
                self.z_count[w] += 1;
            }
            if old_y {
                self.y_count[w] -= 1;
            }
            if y {
                self.y_count[w] += 1;
            }
            if old_k.is_some() && self.k_of[w] == old_k {
                self.own_k_count[w] -= 1;
            }
        }
        self.k_of[v] = k;
        self.in_y[v] = y;
        self.changed.push(v);
        let mut own = 0;
        for w in self.g.neighbours(v) {
            if k.is_some() && self.k_of[w] == k {
                self.own_k_count[w] += 1;
                own += 1;
            }
        }
        self.own_k_count[v] = own;
    }

    /// New uniform permutation of `C_i`; its first `k` entries form `K_i`.
    fn reshuffle(&mut self, i: usize) {
        let mut perm = std::mem::take(&mut self.perms[i]);
        perm.shuffle(&mut self.rng);
        for (pos, &v) in perm.iter().enumerate() {
            let role = (pos < self.setup.k).then_some(i);
            if self.k_of[v] != role {
                self.set_role(v, role, false);
            }
        }
        self.perms[i] = perm;
    }

    fn redraw_y(&mut self, v: usize) {
        let y = self.rng.gen_bool(self.y_probability.clamp(0.0, 1.0));
        if y != self.in_y[v] {
            self.set_role(v, None, y);
        }
    }

    fn violates(&self, v: usize) -> bool {
        let b = &self.bounds;
        let z = T::of_count(self.z_count[v]);
        if self.k_of[v].is_some() && T::of_count(self.z_count[v] - self.own_k_count[v]) > b.iii {
            return true;
        }
        if (self.in_y[v] || !self.exceeding[v]) && (z > b.iv_z || T::of_count(self.y_count[v]) > b.iv_y) {
            return true;
        }
        !self.exceeding[v] && z < b.v
    }

    fn refresh(&mut self, v: usize) {
        if self.violates(v) {
            self.bad.insert(v);
        } else {
            self.bad.remove(&v);
        }
    }

    /// Redraws every choice the conditions at `v` depend on: the permutations
    /// of host cliques meeting `N[v]` and the `Y` draws on `N[v]`.
    fn resample(&mut self, v: usize) {
        self.changed.clear();
        let mut hosts: Vec<usize> = std::iter::once(v)
            .chain(self.g.neighbours(v))
            .filter_map(|u| self.host_of[u])
            .collect();
        hosts.sort_unstable();
        hosts.dedup();
        for i in hosts {
            self.reshuffle(i);
        }
        for u in std::iter::once(v).chain(self.g.neighbours(v)) {
            if self.host_of[u].is_none() {
                self.redraw_y(u);
            }
        }
        let changed = std::mem::take(&mut self.changed);
        self.marker.reset();
        for &u in &changed {
            self.marker.insert(u);
            for w in self.g.neighbours(u) {
                self.marker.insert(w);
            }
        }
        for u in self.marker.take() {
            self.refresh(u);
        }
        self.changed = changed;
    }

    fn snapshot(&self) -> UsableZ {
        UsableZ {
            k_sets: self
                .perms
                .iter()
                .enumerate()
                .map(|(i, perm)| KSet {
                    host: i,
                    members: perm[..self.setup.k].to_vec(),
                })
                .collect(),
            y_set: (0..self.g.n()).filter(|&v| self.in_y[v]).collect(),
            epsilon: self.bounds.eps_delta.to_f64_lossy() / self.setup.delta as f64,
        }
    }
}

/// Samples `Z` and resamples around violations (lowest vertex first) until
/// (ii)–(v) hold or `max_rounds` resamplings have been spent.
pub fn sample_usable_z<T: Threshold>(
    g: &Graph,
    setup: &ZSetup,
    epsilon: T,
    seed: u64,
    max_rounds: usize,
) -> ZSample {
    let mut sampler = ZSampler::new(g, setup, epsilon, rng_from_seed(seed));
    let initial_violations = sampler.bad.len();
    let mut rounds = 0;
    while rounds < max_rounds {
        let Some(&v) = sampler.bad.iter().next() else { break };
        sampler.resample(v);
        rounds += 1;
    }
    let z = sampler.snapshot();
    let residual = validate_usable(g, setup, &z, epsilon);
    ZSample {
        z,
        rounds,
        initial_violations,
        residual,
    }
}

/// How the colouring of `G - Z` was obtained for each dense set.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplementStats {
    pub very_suitable_extensions: usize,
    pub not_very_suitable_extensions: usize,
    /// Dense sets whose extension failed and were coloured by DSATUR instead.
    pub fallbacks: Vec<(usize, String)>,
}

/// Proper colouring of `G - Z` using only colours `0..Δ+1-k`.
///
/// The sparse part is coloured by DSATUR with restarts, each dense set is
/// extended over (very suitable ones skipping their `K_i`), and the colours on
/// `Y` are dropped at the end.
pub fn colour_complement(
    g: &Graph,
    setup: &ZSetup,
    z: &UsableZ,
    restarts: usize,
    seed: u64,
) -> Result<(PartialColouring, ComplementStats), ZError> {
    let n = g.n();
    let limit = setup.delta + 1 - setup.k;
    let mut f = PartialColouring::uncoloured(n, setup.delta + 1);
    let mut stats = ComplementStats::default();
    let sparse: Vec<bool> = match &setup.decomposition {
        Some(dec) => {
            let mut mask = vec![false; n];
            for &v in &dec.sparse_set {
                mask[v] = true;
            }
            mask
        }
        None => vec![true; n],
    };
    f = dsatur_with_restarts(g, &f, 0..limit, Some(&sparse), restarts, split_seed(seed, 0))
        .map_err(|source| ZError::ComplementFailed { limit, source })?;

    if let Some(dec) = &setup.decomposition {
        for (i, set) in dec.dense_sets.iter().enumerate() {
            let k_set = z
                .k_sets
                .iter()
                .find(|ks| setup.hosts.get(ks.host).is_some_and(|h| h.dense_set == i));
            let attempt = match (&setup.suitable[i], k_set) {
                (Some(c), Some(ks)) => {
                    extend_over_very_suitable(g, &f, set, c, &ks.members, limit).map(|f| (f, true))
                }
                (Some(c), None) => extend_over_not_very_suitable(g, &f, set, c, limit).map(|f| (f, false)),
                (None, _) => Err(crate::dense::ExtensionError::Selection {
                    stage: "suitable colouring",
                    needed: 1,
                    found: 0,
                }),
            };
            match attempt {
                Ok((next, very)) => {
                    f = next;
                    if very {
                        stats.very_suitable_extensions += 1;
                    } else {
                        stats.not_very_suitable_extensions += 1;
                    }
                }
                Err(e) => {
                    stats.fallbacks.push((i, e.to_string()));
                    let mut active = vec![false; n];
                    for &v in set {
                        active[v] = true;
                    }
                    if let Some(ks) = k_set {
                        for &v in &ks.members {
                            active[v] = false;
                        }
                    }
                    f = dsatur_with_restarts(g, &f, 0..limit, Some(&active), restarts, split_seed(seed, 1 + i as u64))
                        .map_err(|source| ZError::ComplementFailed { limit, source })?;
                }
            }
        }
    }
    for &v in &z.y_set {
        f.unset(v);
    }
    for ks in &z.k_sets {
        for &v in &ks.members {
            f.unset(v);
        }
    }
    Ok((f, stats))
}

/// Colours of `K_i` under a uniform permutation: `members[j]` receives
/// `first_colour + π(j)`.
pub fn permutation_colours(members: &[usize], first_colour: usize, rng: &mut StreamRng) -> Vec<usize> {
    let mut slots: Vec<usize> = (0..members.len()).collect();
    slots.shuffle(rng);
    slots.into_iter().map(|s| first_colour + s).collect()
}

/// Per-vertex quantities behind the event `X_v < εΔ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZEventEntry {
    pub vertex: usize,
    /// Neighbours in `Z` whose assigned colour is unique in `N(v)` and was kept.
    pub s: usize,
    /// Uncoloured neighbours in `Z`.
    pub s_prime: usize,
    /// Neighbours in `Z` whose assigned colour occurs at least `⌈log²Δ⌉` times in `N(v) ∩ Z`.
    pub s_double_prime: usize,
    /// `|S' ∪ S''|`.
    pub union: usize,
    /// `s - |S' ∪ S''|`.
    pub x: i64,
    pub z_neighbours: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZBadEventReport {
    pub entries: Vec<ZEventEntry>,
    pub log_sq_threshold: usize,
    pub eps_delta: f64,
    /// Every vertex with `X_v < εΔ`.
    pub bad: Vec<usize>,
    /// Bad vertices with fewer than `εΔ` neighbours in `Z`, which no resampling can fix.
    pub unfixable: Vec<usize>,
}

/// The random colouring of `Z` with its conflict removal.
pub struct ZColouring<'a, T> {
    g: &'a Graph,
    z: &'a UsableZ,
    first: usize,
    k: usize,
    eps_delta: T,
    log_sq: usize,
    in_z: Vec<bool>,
    k_of: Vec<Option<usize>>,
    z_nbrs: Vec<Vec<usize>>,
    /// Vertices whose events are checked.
    checked: Vec<bool>,
    unfixable: Vec<usize>,
    pub assigned: Vec<Option<usize>>,
    pub retained: Vec<bool>,
    /// Bad events that resampling can still fix.
    bad: BTreeSet<usize>,
    marker: Marker,
    rng: StreamRng,
}

impl<'a, T: Threshold> ZColouring<'a, T> {
    pub fn new(
        g: &'a Graph,
        setup: &ZSetup,
        z: &'a UsableZ,
        epsilon: T,
        log_base: LogBase,
        rng: StreamRng,
    ) -> Self {
        let n = g.n();
        let delta = setup.delta;
        let exempt = setup.in_clique_at_least(n);
        let mut k_of = vec![None; n];
        for (i, ks) in z.k_sets.iter().enumerate() {
            for &v in &ks.members {
                k_of[v] = Some(i);
            }
        }
        let log_sq = log_base.log_pow(delta.max(2) as f64, 2.0).ceil() as usize;
        let eps_delta = epsilon * T::of_count(delta);
        let in_z = z.in_z(n);
        let z_nbrs: Vec<Vec<usize>> = (0..n).map(|v| g.neighbours(v).filter(|&w| in_z[w]).collect()).collect();
        let checked: Vec<bool> = exempt.iter().map(|&e| !e).collect();
        let unfixable = (0..n)
            .filter(|&v| checked[v] && T::of_count(z_nbrs[v].len()) < eps_delta)
            .collect();
        let mut zc = ZColouring {
            g,
            z,
            first: delta + 1 - setup.k,
            k: setup.k,
            eps_delta,
            log_sq,
            in_z,
            k_of,
            z_nbrs,
            checked,
            unfixable,
            assigned: vec![None; n],
            retained: vec![false; n],
            bad: BTreeSet::new(),
            marker: Marker::new(n),
            rng,
        };
        for i in 0..z.k_sets.len() {
            zc.assign_k(i);
        }
        for &v in &z.y_set {
            zc.assign_y(v);
        }
        for v in 0..n {
            zc.refresh_retained(v);
        }
        for v in 0..n {
            zc.refresh_event(v);
        }
        zc
    }

    fn assign_k(&mut self, i: usize) {
        let members = &self.z.k_sets[i].members;
        let colours = permutation_colours(members, self.first, &mut self.rng);
        for (&v, c) in members.iter().zip(colours) {
            self.assigned[v] = Some(c);
        }
    }

    fn assign_y(&mut self, v: usize) {
        self.assigned[v] = Some(self.first + self.rng.gen_range(0..self.k));
    }

    /// `Y` vertices lose their colour only to an equal `Y` neighbour; `K`
    /// vertices lose it to any equal `Z` neighbour. Returns whether it changed.
    fn refresh_retained(&mut self, v: usize) -> bool {
        if !self.in_z[v] {
            return false;
        }
        let c = self.assigned[v];
        let in_k = self.k_of[v].is_some();
        let clash = self.z_nbrs[v]
            .iter()
            .any(|&w| self.assigned[w] == c && (in_k || self.k_of[w].is_none()));
        let before = self.retained[v];
        self.retained[v] = !clash;
        before != self.retained[v]
    }

    pub fn entry(&self, v: usize) -> ZEventEntry {
        let zn = &self.z_nbrs[v];
        let count = |c: Option<usize>| zn.iter().filter(|&&w| self.assigned[w] == c).count();
        let (mut s, mut s_prime, mut s_double_prime, mut union) = (0, 0, 0, 0);
        for &w in zn {
            let occurrences = count(self.assigned[w]);
            let uncoloured = !self.retained[w];
            let crowded = occurrences >= self.log_sq;
            s += usize::from(occurrences == 1 && !uncoloured);
            s_prime += usize::from(uncoloured);
            s_double_prime += usize::from(crowded);
            union += usize::from(uncoloured || crowded);
        }
        ZEventEntry {
            vertex: v,
            s,
            s_prime,
            s_double_prime,
            union,
            x: s as i64 - union as i64,
            z_neighbours: zn.len(),
        }
    }

    fn is_bad(&self, v: usize) -> bool {
        if !self.checked[v] {
            return false;
        }
        let x = self.entry(v).x;
        x < 0 || T::of_count(x as usize) < self.eps_delta
    }

    fn refresh_event(&mut self, v: usize) {
        if self.is_bad(v) && T::of_count(self.z_nbrs[v].len()) >= self.eps_delta {
            self.bad.insert(v);
        } else {
            self.bad.remove(&v);
        }
    }

    /// Redraws the colours on `N(v) ∩ Z`, whole permutations for touched `K_i`.
    pub fn resample(&mut self, v: usize) {
        let mut changed = Vec::new();
        let mut ks: Vec<usize> = self.z_nbrs[v].iter().filter_map(|&w| self.k_of[w]).collect();
        ks.sort_unstable();
        ks.dedup();
        for i in ks {
            self.assign_k(i);
            changed.extend(self.z.k_sets[i].members.iter().copied());
        }
        for j in 0..self.z_nbrs[v].len() {
            let w = self.z_nbrs[v][j];
            if self.k_of[w].is_none() {
                self.assign_y(w);
                changed.push(w);
            }
        }
        // Events read assignments and retention on N(u) ∩ Z.
        let mut moved = changed.clone();
        self.marker.reset();
        for &u in &changed {
            self.marker.insert(u);
            for j in 0..self.z_nbrs[u].len() {
                self.marker.insert(self.z_nbrs[u][j]);
            }
        }
        for u in self.marker.take() {
            if self.refresh_retained(u) {
                moved.push(u);
            }
        }
        self.marker.reset();
        for &u in &moved {
            for w in self.g.neighbours(u) {
                self.marker.insert(w);
            }
        }
        for u in self.marker.take() {
            self.refresh_event(u);
        }
    }

    /// Bad events that resampling can still fix.
    pub fn bad(&self) -> &BTreeSet<usize> {
        &self.bad
    }

    pub fn report(&self) -> ZBadEventReport {
        let entries: Vec<ZEventEntry> = (0..self.g.n()).filter(|&v| self.checked[v]).map(|v| self.entry(v)).collect();
        let mut bad: Vec<usize> = self.bad.iter().chain(&self.unfixable).copied().collect();
        bad.sort_unstable();
        ZBadEventReport {
            entries,
            log_sq_threshold: self.log_sq,
            eps_delta: self.eps_delta.to_f64_lossy(),
            bad,
            unfixable: self.unfixable.clone(),
        }
    }

    /// `base` plus every retained colour on `Z`.
    pub fn apply(&self, base: &PartialColouring) -> PartialColouring {
        let mut f = base.clone();
        for v in 0..self.g.n() {
            if self.in_z[v] {
                match (self.retained[v], self.assigned[v]) {
                    (true, Some(c)) => f.set(v, c),
                    _ => f.unset(v),
                }
            }
        }
        f
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZStats {
    pub k: usize,
    pub d_used: usize,
    pub dense_sets: usize,
    pub hosts: usize,
    pub y_size: usize,
    pub z_rounds: usize,
    pub z_initial_violations: usize,
    pub z_residual_violations: usize,
    pub complement: ComplementStats,
    pub colour_rounds: usize,
    pub initial_bad_events: usize,
    pub residual_bad_events: usize,
    /// Vertices excluded from event checks because they lie in a known large clique.
    pub exempt_vertices: usize,
    pub best_effort: bool,
    pub colours_used: usize,
    pub peacefulness: usize,
}

#[derive(Clone, Debug)]
pub struct ZOutcome {
    pub colouring: PartialColouring,
    pub z: UsableZ,
    pub report: ZBadEventReport,
    pub stats: ZStats,
}

/// Colours `Z` on top of `base` and resamples around bad events (lowest vertex
/// first); returns the partial colouring before completion.
#[allow(clippy::too_many_arguments)]
pub fn colour_z<T: Threshold>(
    g: &Graph,
    setup: &ZSetup,
    z: &UsableZ,
    base: &PartialColouring,
    epsilon: T,
    log_base: LogBase,
    seed: u64,
    max_rounds: usize,
) -> (PartialColouring, ZBadEventReport, usize, usize) {
    let mut zc = ZColouring::new(g, setup, z, epsilon, log_base, rng_from_seed(seed));
    let initial = zc.bad().len() + zc.unfixable.len();
    let mut rounds = 0;
    while rounds < max_rounds {
        let Some(&v) = zc.bad().iter().next() else { break };
        zc.resample(v);
        rounds += 1;
    }
    (zc.apply(base), zc.report(), rounds, initial)
}

/// The full pipeline: setup, `Z`, `G - Z`, colouring of `Z`, greedy completion.
pub fn zcolour<T: Threshold>(g: &Graph, params: &ZParams<T>) -> Result<ZOutcome, ZError> {
    let n = g.n();
    let setup = ZSetup::prepare(g, params)?;
    let max_rounds = params.max_rounds.unwrap_or(50 * n);
    let sample = sample_usable_z(g, &setup, params.epsilon, split_seed(params.seed, 0), max_rounds);
    let (base, complement) = colour_complement(g, &setup, &sample.z, params.dsatur_restarts, split_seed(params.seed, 1))?;
    let (partial, report, colour_rounds, initial_bad) = colour_z(
        g,
        &setup,
        &sample.z,
        &base,
        params.epsilon,
        params.log_base,
        split_seed(params.seed, 2),
        max_rounds,
    );
    let delta = T::of_count(setup.delta);
    let p = delta - params.epsilon * delta;
    let exempt: Vec<Vec<usize>> = setup
        .big_cliques
        .iter()
        .filter(|c| T::of_count(2 * c.len()) + p >= T::of_count(2 * (setup.delta + 1)))
        .cloned()
        .collect();
    let (colouring, greedy_ok) = match greedy_complete(g, &partial, p, &exempt) {
        Ok(f) => (f, true),
        Err(_) => (greedy_extend(g, &partial).expect("palette has delta + 1 colours"), false),
    };
    let peace = peace_report(g, &colouring).expect("completion is proper");
    let stats = ZStats {
        k: setup.k,
        d_used: setup.d_used,
        dense_sets: setup.decomposition.as_ref().map_or(0, |d| d.dense_sets.len()),
        hosts: setup.hosts.len(),
        y_size: sample.z.y_set.len(),
        z_rounds: sample.rounds,
        z_initial_violations: sample.initial_violations,
        z_residual_violations: sample.residual.len(),
        complement,
        colour_rounds,
        initial_bad_events: initial_bad,
        residual_bad_events: report.bad.len(),
        exempt_vertices: setup.in_clique_at_least(n).iter().filter(|&&e| e).count(),
        best_effort: !greedy_ok || !sample.residual.is_empty() || !report.bad.is_empty(),
        colours_used: colouring.colours_used(),
        peacefulness: peace.peacefulness,
    };
    Ok(ZOutcome {
        colouring,
        z: sample.z,
        report,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::random_regular;
    use crate::Rational;

    #[test]
    fn clique_free_graph_has_y_only_z() {
        let g = random_regular(120, 20, 3).unwrap();
        let params = ZParams::new(Rational::new(1, 20), 5);
        let setup = ZSetup::prepare(&g, &params).unwrap();
        assert!(setup.hosts.is_empty());
        let sample = sample_usable_z(&g, &setup, params.epsilon, 5, 0);
        assert!(sample.z.k_sets.is_empty());
        let again = sample_usable_z(&g, &setup, params.epsilon, 5, 0);
        assert_eq!(sample, again);
    }

    #[test]
    fn complete_graph_hosts_one_k_set() {
        let g = Graph::complete(201);
        let params = ZParams::new(Rational::new(1, 400), 1);
        let setup = ZSetup::prepare(&g, &params).unwrap();
        assert_eq!(setup.k, 10);
        assert_eq!(setup.hosts.len(), 1);
        let sample = sample_usable_z(&g, &setup, params.epsilon, 1, 100);
        assert_eq!(sample.z.k_sets.len(), 1);
        assert_eq!(sample.z.k_sets[0].members.len(), 10);
        assert!(sample.z.y_set.is_empty());
        assert!(sample.residual.is_empty(), "{:?}", sample.residual);
    }

    #[test]
    fn k_vertex_yields_to_y_neighbour() {
        // Triangle 0-1-2 with 0,1 in K (one host) and 2 in Y; force colour clashes.
        let g = Graph::complete(3);
        let setup = ZSetup {
            delta: 2,
            k: 2,
            d_used: 0,
            decomposition: None,
            suitable: vec![],
            hosts: vec![HostClique {
                dense_set: 0,
                clique: vec![0, 1],
            }],
            big_cliques: vec![],
        };
        let z = UsableZ {
            k_sets: vec![KSet {
                host: 0,
                members: vec![0, 1],
            }],
            y_set: vec![2],
            epsilon: 0.5,
        };
        let mut zc = ZColouring::new(&g, &setup, &z, 0.5, LogBase::Natural, rng_from_seed(0));
        assert_ne!(zc.assigned[0], zc.assigned[1]);
        // Whichever K vertex shares the Y colour is dropped; the Y vertex keeps its colour.
        zc.assigned[2] = zc.assigned[0];
        for v in 0..3 {
            zc.refresh_retained(v);
        }
        assert!(!zc.retained[0]);
        assert!(zc.retained[1]);
        assert!(zc.retained[2]);
    }

    #[test]
    fn pipeline_output_is_proper() {
        let g = random_regular(120, 20, 8).unwrap();
        let out = zcolour(&g, &ZParams::new(Rational::new(1, 100), 2)).unwrap();
        assert_eq!(out.stats.k, 4);
        out.colouring.validate_total(&g).unwrap();
        assert!(out.colouring.palette <= g.max_degree() + 1);
    }
}
