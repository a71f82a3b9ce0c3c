//! Iterative random partial colouring with equalizing coin flips and list
//! truncation, plus the idealized star process it is compared against.
//!
//! Every vertex starts with the full list of `l_1` colours. Iteration `i`:
//!
//! 1. each uncoloured vertex activates with probability `α` and picks a
//!    uniform colour from its list;
//! 2. for every `v` and `c ∈ L_v`, with `q = (1 - α/l'_i)^{|U_{v,c}|}` the
//!    chance that no neighbour takes `c`, a coin removes `c` with probability
//!    `x = 1 - p*_i/q` so that `c` survives with probability exactly `p*_i`
//!    (`x` is clamped to 0 when `q <= p*_i`, counted as an anomaly);
//! 3. picks become assignments;
//! 4. assigned colours leave the neighbours' lists;
//! 5. coin-flip removals are applied;
//! 6. vertices in monochromatic edges are marked;
//! 7. every list larger than `l'_{i+1}` loses a uniform random subset.
//!
//! After `i*` iterations every marked vertex is uncoloured.
//!
//! All randomness comes from per-vertex streams keyed by `(seed, v, i, purpose)`;
//! with `parallel` set the per-vertex steps run on rayon and produce the same
//! result as the sequential order.

mod lists;
mod postprocess;
mod star;
mod trace;

use rand::seq::index::sample;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::colouring::PartialColouring;
use crate::graph::Graph;
use crate::peace::peace_report;
use crate::rng::{rng_from_seed, split_seed, vertex_stream, Purpose};
use crate::scalar::LogBase;
use lists::ColourLists;

pub use postprocess::{default_low_band, postprocess_recolour, PostprocessError};
pub use star::{simulate_star, star_trial, MeanSd, StarIteration, StarSnapshot, StarStats};
pub use trace::{idealized_trace, IdealizedTrace, TraceError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Policy {
    MonitorOnly,
    /// Start over with a fresh derived seed whenever a monitor fails.
    RestartOnViolation { max_restarts: usize },
}

/// Whether per-vertex colour counts and `|U_{v,c}|` are kept incrementally.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bookkeeping {
    /// Incremental when `n · l_1` is at most 2^23.
    #[default]
    Auto,
    Incremental,
    /// Only list sizes and uncoloured-neighbour counts; the rest is computed on demand.
    Off,
}

const AUTO_LIMIT: usize = 1 << 23;

#[derive(Clone, Debug)]
pub struct NibbleParams {
    pub b_const: f64,
    pub seed: u64,
    pub policy: Policy,
    pub log_base: LogBase,
    pub bookkeeping: Bookkeeping,
    /// Vertices per iteration on which the `|U|` spread and `|Good|` monitors run.
    pub monitor_sample: usize,
    pub parallel: bool,
    pub truncation: bool,
    pub equalizing_flips: bool,
    /// Vertices allowed to activate; all when `None`.
    pub eligible: Option<Vec<bool>>,
    /// Keep every assignment and list removal for later replay.
    pub record_history: bool,
    /// Skipped when `Σ deg² > 2^31`.
    pub check_codegree: bool,
}

impl NibbleParams {
    pub fn new(seed: u64) -> Self {
        NibbleParams {
            b_const: 4.0,
            seed,
            policy: Policy::MonitorOnly,
            log_base: LogBase::Natural,
            bookkeeping: Bookkeeping::Auto,
            monitor_sample: 16,
            parallel: false,
            truncation: true,
            equalizing_flips: true,
            eligible: None,
            record_history: false,
            check_codegree: true,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NibbleError {
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error("monitors still failing after {attempts} attempts (last: iteration {iteration}, {violation})")]
    RestartBudgetExhausted {
        attempts: usize,
        iteration: usize,
        violation: String,
    },
}

/// Monitor results for the state at the start of `iteration`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MonitorRecord {
    pub iteration: usize,
    /// `|D_v - D_i| > Δ^{2/3}`.
    pub a_violations: usize,
    pub a_max_deviation: f64,
    /// More than `Δ/log³Δ` neighbours newly in a monochromatic edge.
    pub b_violations: usize,
    pub b_max: usize,
    /// `max_c |U_{v,c}| - min_c |U_{v,c}| > Δ/log⁴Δ` over colours other than `v`'s own.
    pub c_checked: usize,
    pub c_violations: usize,
    pub c_max_spread: usize,
    /// `|L_v| != l'_i`.
    pub d_violations: usize,
    /// `|Good_v| < g_i - iΔ/log^{7/2}Δ`.
    pub e_checked: usize,
    pub e_violations: usize,
    pub e_min_slack: f64,
}

impl MonitorRecord {
    pub fn total_violations(&self) -> usize {
        self.a_violations + self.b_violations + self.c_violations + self.d_violations + self.e_violations
    }

    fn describe(&self) -> String {
        format!(
            "A {} B {} C {} D {} E {}",
            self.a_violations, self.b_violations, self.c_violations, self.d_violations, self.e_violations
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    pub l: f64,
    pub list_target: i64,
    pub next_target: i64,
    pub p_star: f64,
    pub activated: usize,
    /// Activated vertices whose list was empty.
    pub starved: usize,
    pub new_conflicts: usize,
    /// Pairs `(v, c)` with `q < p*_i`.
    pub anomalies: u64,
    pub flip_removals: usize,
    pub truncation_removals: usize,
    /// Vertices whose list was already below `l'_{i+1}` before truncation.
    pub truncation_deficits: usize,
    pub monitors: MonitorRecord,
}

/// Everything that changed lists or assignments in one iteration.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationHistory {
    pub assignments: Vec<(usize, usize)>,
    pub flip_removals: Vec<(usize, usize)>,
    pub truncations: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NibbleStats {
    pub delta: usize,
    pub palette: usize,
    pub i_star: usize,
    pub bookkeeping: Bookkeeping,
    pub attempts: usize,
    pub iterations: Vec<IterationRecord>,
    pub codegree: Option<usize>,
    pub codegree_limit: f64,
    pub codegree_warning: bool,
    pub coloured_before_cleanup: usize,
    pub uncoloured_by_conflict: usize,
    pub coloured: usize,
    /// Per vertex: neighbours whose colour appears on no other neighbour.
    pub unique_neighbours: Vec<usize>,
    pub anomalies: u64,
}

#[derive(Clone, Debug)]
pub struct NibbleOutcome {
    pub colouring: PartialColouring,
    pub stats: NibbleStats,
    pub trace: IdealizedTrace<f64>,
    pub history: Option<Vec<IterationHistory>>,
}

struct ColourCounts {
    counts: Vec<u32>,
    good: Vec<usize>,
}

/// Mutable state of one attempt.
pub struct NibbleState {
    palette: usize,
    lists: ColourLists,
    assigned: Vec<Option<(usize, usize)>>,
    in_conflict: Vec<bool>,
    uncoloured_nbrs: Vec<usize>,
    bad_nbrs: Vec<usize>,
    fresh_bad_nbrs: Vec<usize>,
    counts: Option<ColourCounts>,
    u: Option<Vec<u32>>,
    history: Option<Vec<IterationHistory>>,
}

impl NibbleState {
    fn new(g: &Graph, palette: usize, incremental: bool, record: bool) -> Self {
        let n = g.n();
        let degrees: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
        let u = incremental.then(|| {
            let mut u = vec![0u32; n * palette];
            for v in 0..n {
                u[v * palette..(v + 1) * palette].fill(degrees[v] as u32);
            }
            u
        });
        NibbleState {
            palette,
            lists: ColourLists::full(n, palette),
            assigned: vec![None; n],
            in_conflict: vec![false; n],
            uncoloured_nbrs: degrees,
            bad_nbrs: vec![0; n],
            fresh_bad_nbrs: vec![0; n],
            counts: incremental.then(|| ColourCounts {
                counts: vec![0; n * palette],
                good: vec![0; n],
            }),
            u,
            history: record.then(Vec::new),
        }
    }

    pub fn palette(&self) -> usize {
        self.palette
    }

    pub fn list_len(&self, v: usize) -> usize {
        self.lists.len(v)
    }

    pub fn list(&self, v: usize) -> Vec<usize> {
        self.lists.iter(v).collect()
    }

    /// `(colour, iteration)` of `v`'s assignment.
    pub fn assigned(&self, v: usize) -> Option<(usize, usize)> {
        self.assigned[v]
    }

    pub fn in_conflict(&self, v: usize) -> bool {
        self.in_conflict[v]
    }

    pub fn uncoloured_neighbours(&self, v: usize) -> usize {
        self.uncoloured_nbrs[v]
    }

    /// `|Bad_v|`: neighbours in a monochromatic edge.
    pub fn bad_neighbours(&self, v: usize) -> usize {
        self.bad_nbrs[v]
    }

    /// Incrementally kept `|Good_v|`, if bookkeeping is on.
    pub fn good(&self, v: usize) -> Option<usize> {
        self.counts.as_ref().map(|c| c.good[v])
    }

    /// Incrementally kept `|U_{v,c}|`, if bookkeeping is on.
    pub fn u_count(&self, v: usize, c: usize) -> Option<usize> {
        self.u.as_ref().map(|u| u[v * self.palette + c] as usize)
    }

    pub fn history(&self) -> Option<&[IterationHistory]> {
        self.history.as_deref()
    }

    /// `|U_{v,c}|` for every colour, from the lists of uncoloured neighbours.
    fn u_row(&self, g: &Graph, v: usize) -> Vec<u32> {
        if let Some(u) = &self.u {
            return u[v * self.palette..(v + 1) * self.palette].to_vec();
        }
        let mut row = vec![0u32; self.palette];
        for w in g.neighbours(v).filter(|&w| self.assigned[w].is_none()) {
            for c in self.lists.iter(w) {
                row[c] += 1;
            }
        }
        row
    }

    fn good_of(&self, g: &Graph, v: usize) -> usize {
        if let Some(good) = self.good(v) {
            return good;
        }
        let mut colours: Vec<usize> = g.neighbours(v).filter_map(|w| self.assigned[w].map(|a| a.0)).collect();
        colours.sort_unstable();
        colours
            .chunk_by(|a, b| a == b)
            .filter(|run| run.len() == 1)
            .count()
    }

    /// Drops `c` from `w`'s list; `U` counts follow if `w` is still uncoloured.
    fn drop_colour(&mut self, g: &Graph, w: usize, c: usize) -> bool {
        if !self.lists.remove(w, c) {
            return false;
        }
        if self.assigned[w].is_none() {
            if let Some(u) = &mut self.u {
                for x in g.neighbours(w) {
                    u[x * self.palette + c] -= 1;
                }
            }
        }
        true
    }

    fn assign(&mut self, g: &Graph, v: usize, c: usize, iteration: usize) {
        debug_assert!(self.lists.contains(v, c));
        if let Some(u) = &mut self.u {
            for d in self.lists.iter(v) {
                for w in g.neighbours(v) {
                    u[w * self.palette + d] -= 1;
                }
            }
        }
        self.assigned[v] = Some((c, iteration));
        for w in g.neighbours(v) {
            self.uncoloured_nbrs[w] -= 1;
            if let Some(cc) = &mut self.counts {
                let slot = &mut cc.counts[w * self.palette + c];
                *slot += 1;
                match *slot {
                    1 => cc.good[w] += 1,
                    2 => cc.good[w] -= 1,
                    _ => {}
                }
            }
        }
    }
}

/// What `parallel` switches between.
fn per_vertex<T: Send>(parallel: bool, n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    if parallel {
        (0..n).into_par_iter().map(f).collect()
    } else {
        (0..n).map(f).collect()
    }
}

/// `(1 - α/l'_i)^u`: chance that none of `u` uncoloured neighbours holding a
/// colour picks it this iteration.
pub fn survival_probability(alpha: f64, list_target: i64, u: usize) -> f64 {
    (1.0 - alpha / list_target as f64).powi(u as i32)
}

/// `1 - p*/q` when `q > p*`, else 0. Removing with this probability brings the
/// survival chance of every colour down to `p*`.
pub fn equalizing_flip_probability(q: f64, p_star: f64) -> f64 {
    if q > p_star {
        1.0 - p_star / q
    } else {
        0.0
    }
}

/// State after each iteration, handed to observers.
pub struct IterationView<'a> {
    pub record: &'a IterationRecord,
    pub state: &'a NibbleState,
    pub trace: &'a IdealizedTrace<f64>,
}

struct Thresholds {
    a: f64,
    b: f64,
    c: f64,
    e_per_iteration: f64,
}

impl Thresholds {
    fn new(delta: usize, log_base: LogBase) -> Self {
        let d = delta as f64;
        let lp = |p: f64| log_base.log_pow(d, p);
        Thresholds {
            a: d.powf(2.0 / 3.0),
            b: d / lp(3.0),
            c: d / lp(4.0),
            e_per_iteration: d / lp(3.5),
        }
    }
}

struct Attempt {
    state: NibbleState,
    records: Vec<IterationRecord>,
    violation: Option<(usize, String)>,
}

fn run_attempt(
    g: &Graph,
    params: &NibbleParams,
    trace: &IdealizedTrace<f64>,
    seed: u64,
    incremental: bool,
    stop_on_violation: bool,
    observer: &mut dyn FnMut(&IterationView<'_>),
) -> Attempt {
    let n = g.n();
    let palette = trace.l1;
    let alpha = trace.alpha;
    let thresholds = Thresholds::new(trace.delta, params.log_base);
    let mut state = NibbleState::new(g, palette, incremental, params.record_history);
    let mut records = Vec::with_capacity(trace.i_star);
    let eligible = |v: usize| params.eligible.as_ref().is_none_or(|e| e[v]);
    let max_deg = g.max_degree();

    for i in 1..=trace.i_star {
        let here = trace.list_target(i);
        let next = trace.list_target(i + 1);
        let p_star = trace.p_star(i);
        state.fresh_bad_nbrs.fill(0);

        let picks: Vec<Option<Option<usize>>> = {
            let st = &state;
            per_vertex(params.parallel, n, |v| {
                if st.assigned[v].is_some() || !eligible(v) {
                    return None;
                }
                let mut rng = vertex_stream(seed, v, i, Purpose::Activation);
                if rng.gen::<f64>() >= alpha {
                    return None;
                }
                let len = st.lists.len(v);
                Some((len > 0).then(|| st.lists.nth(v, rng.gen_range(0..len))))
            })
        };

        let (flips, anomalies): (Vec<Vec<usize>>, u64) = if params.equalizing_flips {
            let survive: Vec<f64> = (0..=max_deg).map(|u| survival_probability(alpha, here, u)).collect();
            let st = &state;
            let per: Vec<(Vec<usize>, u64)> = per_vertex(params.parallel, n, |v| {
                if p_star > 1.0 {
                    return (Vec::new(), st.lists.len(v) as u64);
                }
                let row = st.u_row(g, v);
                let mut rng = vertex_stream(seed, v, i, Purpose::Flip);
                let mut removed = Vec::new();
                let mut anomalies = 0;
                for c in st.lists.iter(v) {
                    let q = survive[row[c] as usize];
                    if q > p_star {
                        if rng.gen::<f64>() < equalizing_flip_probability(q, p_star) {
                            removed.push(c);
                        }
                    } else if q < p_star {
                        anomalies += 1;
                    }
                }
                (removed, anomalies)
            });
            let anomalies = per.iter().map(|p| p.1).sum();
            (per.into_iter().map(|p| p.0).collect(), anomalies)
        } else {
            (vec![Vec::new(); n], 0)
        };

        let mut hist = IterationHistory::default();
        let mut activated = 0;
        let mut starved = 0;
        let mut newly = Vec::new();
        for (v, pick) in picks.iter().enumerate() {
            match pick {
                Some(Some(c)) => {
                    activated += 1;
                    newly.push((v, *c));
                }
                Some(None) => {
                    activated += 1;
                    starved += 1;
                }
                None => {}
            }
        }
        for &(v, c) in &newly {
            state.assign(g, v, c, i);
            hist.assignments.push((v, c));
        }
        for &(v, c) in &newly {
            for w in g.neighbours(v) {
                state.drop_colour(g, w, c);
            }
        }
        let mut flip_removals = 0;
        for (v, removed) in flips.iter().enumerate() {
            for &c in removed {
                if state.drop_colour(g, v, c) {
                    flip_removals += 1;
                    hist.flip_removals.push((v, c));
                }
            }
        }
        let mut new_conflicts = 0;
        for &(v, c) in &newly {
            let clash = g
                .neighbours(v)
                .any(|w| state.assigned[w].is_some_and(|(cw, _)| cw == c));
            if clash && !state.in_conflict[v] {
                state.in_conflict[v] = true;
                new_conflicts += 1;
                for w in g.neighbours(v) {
                    state.bad_nbrs[w] += 1;
                    state.fresh_bad_nbrs[w] += 1;
                }
            }
        }

        let target = next.max(0) as usize;
        let mut truncation_removals = 0;
        let mut truncation_deficits = 0;
        if params.truncation {
            let st = &state;
            let cuts: Vec<Vec<usize>> = per_vertex(params.parallel, n, |v| {
                let len = st.lists.len(v);
                if len <= target {
                    return Vec::new();
                }
                let mut local = ColourLists::from_row(st.lists.row(v));
                let mut rng = vertex_stream(seed, v, i, Purpose::Truncation);
                (0..len - target)
                    .map(|k| {
                        let c = local.nth(0, rng.gen_range(0..len - k));
                        local.remove(0, c);
                        c
                    })
                    .collect()
            });
            for (v, cut) in cuts.iter().enumerate() {
                if state.lists.len(v) < target {
                    truncation_deficits += 1;
                }
                for &c in cut {
                    state.drop_colour(g, v, c);
                    hist.truncations.push((v, c));
                }
                truncation_removals += cut.len();
            }
        }
        if let Some(h) = &mut state.history {
            h.push(hist);
        }

        let monitors = evaluate_monitors(g, &state, trace, i + 1, &thresholds, params, seed);
        let record = IterationRecord {
            iteration: i,
            l: trace.l_at(i),
            list_target: here,
            next_target: next,
            p_star,
            activated,
            starved,
            new_conflicts,
            anomalies,
            flip_removals,
            truncation_removals,
            truncation_deficits,
            monitors,
        };
        observer(&IterationView {
            record: &record,
            state: &state,
            trace,
        });
        let failed = record.monitors.total_violations() > 0;
        let description = record.monitors.describe();
        records.push(record);
        if failed && stop_on_violation {
            return Attempt {
                state,
                records,
                violation: Some((i + 1, description)),
            };
        }
    }
    Attempt {
        state,
        records,
        violation: None,
    }
}

fn evaluate_monitors(
    g: &Graph,
    state: &NibbleState,
    trace: &IdealizedTrace<f64>,
    i: usize,
    th: &Thresholds,
    params: &NibbleParams,
    seed: u64,
) -> MonitorRecord {
    let n = g.n();
    let mut m = MonitorRecord {
        iteration: i,
        e_min_slack: f64::INFINITY,
        ..Default::default()
    };
    let d_i = trace.d_at(i);
    let target = trace.list_target(i);
    for v in 0..n {
        let dev = (state.uncoloured_nbrs[v] as f64 - d_i).abs();
        m.a_max_deviation = m.a_max_deviation.max(dev);
        m.a_violations += usize::from(dev > th.a);
        m.b_max = m.b_max.max(state.fresh_bad_nbrs[v]);
        m.b_violations += usize::from(state.fresh_bad_nbrs[v] as f64 > th.b);
        m.d_violations += usize::from(state.lists.len(v) as i64 != target);
    }
    let k = params.monitor_sample.min(n);
    if k > 0 {
        let mut rng = rng_from_seed(split_seed(split_seed(seed, 0x6d6f6e), i as u64));
        let chosen: Vec<usize> = sample(&mut rng, n, k).into_iter().collect();
        let e_bound = trace.g_at(i) - i as f64 * th.e_per_iteration;
        for &v in &chosen {
            let row = state.u_row(g, v);
            let own = state.assigned[v].map(|a| a.0);
            let others = row.iter().enumerate().filter(|&(c, _)| Some(c) != own).map(|(_, &u)| u);
            let (lo, hi) = others.fold((u32::MAX, 0), |(lo, hi), u| (lo.min(u), hi.max(u)));
            let spread = hi.saturating_sub(lo) as usize;
            m.c_checked += 1;
            m.c_max_spread = m.c_max_spread.max(spread);
            m.c_violations += usize::from(spread as f64 > th.c);

            let slack = state.good_of(g, v) as f64 - e_bound;
            m.e_checked += 1;
            m.e_min_slack = m.e_min_slack.min(slack);
            m.e_violations += usize::from(slack < 0.0);
        }
    }
    if m.e_checked == 0 {
        m.e_min_slack = 0.0;
    }
    m
}

/// Runs the nibble and uncolours every vertex caught in a monochromatic edge.
pub fn nibble_colour(g: &Graph, params: &NibbleParams) -> Result<NibbleOutcome, NibbleError> {
    nibble_colour_observed(g, params, &mut |_| {})
}

/// [`nibble_colour`] with `observer` called after every iteration.
pub fn nibble_colour_observed(
    g: &Graph,
    params: &NibbleParams,
    observer: &mut dyn FnMut(&IterationView<'_>),
) -> Result<NibbleOutcome, NibbleError> {
    let delta = g.max_degree();
    let trace = idealized_trace(delta, params.b_const, params.log_base)?;
    trace.check_schedule()?;
    let incremental = match params.bookkeeping {
        Bookkeeping::Incremental => true,
        Bookkeeping::Off => false,
        Bookkeeping::Auto => g.n().saturating_mul(trace.l1) <= AUTO_LIMIT,
    };
    let d = delta as f64;
    let codegree_limit = d.sqrt() / params.log_base.log_pow(d, 8.0);
    let work: u128 = (0..g.n()).map(|v| (g.degree(v) as u128).pow(2)).sum();
    let codegree = (params.check_codegree && work <= 1 << 31).then(|| g.max_codegree());

    let (max_attempts, stop) = match params.policy {
        Policy::MonitorOnly => (1, false),
        Policy::RestartOnViolation { max_restarts } => (max_restarts + 1, true),
    };
    let mut last = (0, String::new());
    for attempt in 0..max_attempts {
        let seed = if attempt == 0 { params.seed } else { split_seed(params.seed, attempt as u64) };
        let run = run_attempt(g, params, &trace, seed, incremental, stop, observer);
        if let Some(v) = run.violation {
            last = v;
            continue;
        }
        return Ok(finish(g, run, trace, attempt + 1, incremental, codegree, codegree_limit));
    }
    Err(NibbleError::RestartBudgetExhausted {
        attempts: max_attempts,
        iteration: last.0,
        violation: last.1,
    })
}

fn finish(
    g: &Graph,
    run: Attempt,
    trace: IdealizedTrace<f64>,
    attempts: usize,
    incremental: bool,
    codegree: Option<usize>,
    codegree_limit: f64,
) -> NibbleOutcome {
    let n = g.n();
    let mut colouring = PartialColouring::uncoloured(n, trace.l1);
    let mut before = 0;
    let mut removed = 0;
    for v in 0..n {
        if let Some((c, _)) = run.state.assigned[v] {
            before += 1;
            if run.state.in_conflict[v] {
                removed += 1;
            } else {
                colouring.set(v, c);
            }
        }
    }
    let report = peace_report(g, &colouring).expect("conflicting vertices were uncoloured");
    let anomalies = run.records.iter().map(|r| r.anomalies).sum();
    let stats = NibbleStats {
        delta: trace.delta,
        palette: trace.l1,
        i_star: trace.i_star,
        bookkeeping: if incremental { Bookkeeping::Incremental } else { Bookkeeping::Off },
        attempts,
        iterations: run.records,
        codegree,
        codegree_limit,
        codegree_warning: codegree.is_some_and(|c| c as f64 > codegree_limit),
        coloured_before_cleanup: before,
        uncoloured_by_conflict: removed,
        coloured: before - removed,
        unique_neighbours: report.undisturbed,
        anomalies,
    };
    NibbleOutcome {
        colouring,
        stats,
        trace,
        history: run.state.history,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::random_regular;

    #[test]
    fn output_is_proper_partial_and_reproducible() {
        let g = random_regular(300, 20, 5).unwrap();
        let params = NibbleParams::new(9);
        let a = nibble_colour(&g, &params).unwrap();
        a.colouring.validate(&g).unwrap();
        assert_eq!(a.colouring.palette, a.trace.l1);
        assert_eq!(a.stats.iterations.len(), a.trace.i_star);
        let b = nibble_colour(&g, &params).unwrap();
        assert_eq!(a.colouring, b.colouring);
        assert_eq!(a.stats, b.stats);
    }

    #[test]
    fn parallel_matches_sequential() {
        let g = random_regular(200, 16, 2).unwrap();
        let seq = nibble_colour(&g, &NibbleParams::new(4)).unwrap();
        let par = nibble_colour(
            &g,
            &NibbleParams {
                parallel: true,
                ..NibbleParams::new(4)
            },
        )
        .unwrap();
        assert_eq!(seq.colouring, par.colouring);
        assert_eq!(seq.stats, par.stats);
    }

    #[test]
    fn bookkeeping_modes_agree() {
        let g = random_regular(120, 16, 8).unwrap();
        let on = nibble_colour(
            &g,
            &NibbleParams {
                bookkeeping: Bookkeeping::Incremental,
                ..NibbleParams::new(1)
            },
        )
        .unwrap();
        let off = nibble_colour(
            &g,
            &NibbleParams {
                bookkeeping: Bookkeeping::Off,
                ..NibbleParams::new(1)
            },
        )
        .unwrap();
        assert_eq!(on.colouring, off.colouring);
        assert_eq!(on.stats.iterations, off.stats.iterations);
    }

    #[test]
    fn first_iteration_lists_are_full() {
        let g = random_regular(100, 16, 1).unwrap();
        let mut first = None;
        nibble_colour_observed(&g, &NibbleParams::new(3), &mut |view| {
            if first.is_none() {
                first = Some(view.record.list_target);
            }
        })
        .unwrap();
        let t = idealized_trace(16, 4.0, LogBase::Natural).unwrap();
        assert_eq!(first, Some(t.l1 as i64));
    }

    #[test]
    fn restart_budget_is_reported() {
        let g = random_regular(100, 16, 1).unwrap();
        let params = NibbleParams {
            policy: Policy::RestartOnViolation { max_restarts: 1 },
            truncation: false,
            ..NibbleParams::new(3)
        };
        // Without truncation the list-size monitor fails immediately.
        assert!(matches!(
            nibble_colour(&g, &params),
            Err(NibbleError::RestartBudgetExhausted { attempts: 2, .. })
        ));
    }
}
