//! One-shot random colouring with resampling.
//!
//! Every vertex draws a uniform colour from `⌊5Δ/μ⌋` colours, both ends of
//! every monochromatic edge are uncoloured, and vertex `v` is *bad* when
//! `U_v < deg(v) - μΔ + |N(v) - dom f|`. While bad vertices remain, the lowest
//! one has the draws on `N[v]` redrawn (Moser–Tardos). The survivor is then
//! completed greedily, which makes it `μΔ`-peaceful once nothing is bad.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::colouring::PartialColouring;
use crate::graph::Graph;
use crate::peace::{greedy_complete, greedy_extend, peace_report, Histogram};
use crate::rng::{rng_from_seed, StreamRng};
use crate::scalar::{within, Threshold};

#[derive(Clone, Copy, Debug)]
pub struct OneShotParams<T> {
    pub mu: T,
    /// Overrides `⌊5Δ/μ⌋`; must still be at least `Δ + 1`.
    pub palette_size: Option<usize>,
    pub seed: u64,
    /// Defaults to `50 n`.
    pub max_resample_rounds: Option<usize>,
}

impl<T: Threshold> OneShotParams<T> {
    pub fn new(mu: T, seed: u64) -> Self {
        OneShotParams {
            mu,
            palette_size: None,
            seed,
            max_resample_rounds: None,
        }
    }

    /// `max(⌊5Δ/μ⌋, Δ + 1)`, or the override.
    pub fn palette_for(&self, delta: usize) -> usize {
        self.palette_size.unwrap_or_else(|| {
            let five_delta = T::of_count(5 * delta);
            (five_delta / self.mu).floor_count().unwrap_or(0).max(delta + 1)
        })
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum OneShotError {
    #[error("mu must lie in (0, 1], got {0}")]
    InvalidMu(f64),
    #[error("palette of {palette} colours is below delta + 1 = {needed}")]
    PaletteTooSmall { palette: usize, needed: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OneShotStats {
    pub palette: usize,
    pub rounds: usize,
    pub initial_bad_events: usize,
    pub residual_bad_events: usize,
    /// Set when bad events survived the round budget; peacefulness is then only measured.
    pub best_effort: bool,
    pub peacefulness: usize,
}

/// Uniform draws, symmetric conflict uncolouring and bad-event bookkeeping.
pub struct OneShotState<'a, T> {
    g: &'a Graph,
    palette: usize,
    bound: T,
    raw: Vec<usize>,
    retained: PartialColouring,
    bad: BTreeSet<usize>,
    hist: Histogram,
    stamp: Vec<usize>,
    epoch: usize,
    rng: StreamRng,
}

impl<'a, T: Threshold> OneShotState<'a, T> {
    /// Draws all colours and evaluates every event. `bound` is `μΔ`.
    pub fn new(g: &'a Graph, palette: usize, bound: T, mut rng: StreamRng) -> Self {
        let raw: Vec<usize> = (0..g.n()).map(|_| rng.gen_range(0..palette)).collect();
        let mut state = OneShotState {
            g,
            palette,
            bound,
            raw,
            retained: PartialColouring::uncoloured(g.n(), palette),
            bad: BTreeSet::new(),
            hist: Histogram::new(palette),
            stamp: vec![0; g.n()],
            epoch: 0,
            rng,
        };
        for v in 0..g.n() {
            state.refresh_retained(v);
        }
        for v in 0..g.n() {
            state.refresh_event(v);
        }
        state
    }

    pub fn raw_colours(&self) -> &[usize] {
        &self.raw
    }

    /// The draws with both ends of every monochromatic edge removed.
    pub fn retained(&self) -> &PartialColouring {
        &self.retained
    }

    pub fn bad_vertices(&self) -> &BTreeSet<usize> {
        &self.bad
    }

    /// Whether `v`'s event holds, recomputed from the retained colouring.
    pub fn event_holds(&mut self, v: usize) -> bool {
        let uncoloured = self.hist.load(self.g, &self.retained, v);
        let undisturbed = self.hist.singletons();
        // U_v < deg(v) - μΔ + |N(v) - dom f|  <=>  deg(v) - U_v + |N(v) - dom f| > μΔ.
        !within(self.g.degree(v) - undisturbed + uncoloured, self.bound)
    }

    fn refresh_retained(&mut self, v: usize) {
        let c = self.raw[v];
        if self.g.neighbours(v).any(|w| self.raw[w] == c) {
            self.retained.unset(v);
        } else {
            self.retained.set(v, c);
        }
    }

    fn refresh_event(&mut self, v: usize) {
        if self.event_holds(v) {
            self.bad.insert(v);
        } else {
            self.bad.remove(&v);
        }
    }

    /// Vertices within distance `radius` of `v`.
    fn ball(&mut self, v: usize, radius: usize) -> Vec<usize> {
        self.epoch += 1;
        let mut out = vec![v];
        self.stamp[v] = self.epoch;
        let mut frontier_start = 0;
        for _ in 0..radius {
            let frontier_end = out.len();
            for i in frontier_start..frontier_end {
                for w in self.g.neighbours(out[i]) {
                    if self.stamp[w] != self.epoch {
                        self.stamp[w] = self.epoch;
                        out.push(w);
                    }
                }
            }
            frontier_start = frontier_end;
        }
        out
    }

    /// Redraws the colours of `N[v]` and re-evaluates everything they can affect.
    pub fn resample(&mut self, v: usize) {
        self.raw[v] = self.rng.gen_range(0..self.palette);
        for w in self.g.neighbours(v) {
            self.raw[w] = self.rng.gen_range(0..self.palette);
        }
        // Retention depends on draws within distance 1, events on retention within distance 1.
        for u in self.ball(v, 2) {
            self.refresh_retained(u);
        }
        for u in self.ball(v, 3) {
            self.refresh_event(u);
        }
    }
}

/// Runs all four phases and returns a total proper colouring.
pub fn oneshot_colour<T: Threshold>(
    g: &Graph,
    params: &OneShotParams<T>,
) -> Result<(PartialColouring, OneShotStats), OneShotError> {
    let zero = T::zero();
    let one = T::one();
    if !(params.mu > zero && params.mu <= one) {
        return Err(OneShotError::InvalidMu(params.mu.to_f64_lossy()));
    }
    let delta = g.max_degree();
    let palette = params.palette_for(delta);
    if palette < delta + 1 {
        return Err(OneShotError::PaletteTooSmall {
            palette,
            needed: delta + 1,
        });
    }
    let bound = params.mu * T::of_count(delta);
    let max_rounds = params.max_resample_rounds.unwrap_or(50 * g.n());

    let mut state = OneShotState::new(g, palette, bound, rng_from_seed(params.seed));
    let initial_bad_events = state.bad.len();
    let mut rounds = 0;
    while rounds < max_rounds {
        let Some(&v) = state.bad.iter().next() else { break };
        state.resample(v);
        rounds += 1;
    }
    let residual = state.bad.len();
    let colouring = if residual == 0 {
        greedy_complete(g, &state.retained, bound, &[]).expect("no bad events means the greedy preconditions hold")
    } else {
        greedy_extend(g, &state.retained).expect("palette has at least delta + 1 colours")
    };
    let peacefulness = peace_report(g, &colouring)
        .expect("greedy completion is proper")
        .peacefulness;
    Ok((
        colouring,
        OneShotStats {
            palette,
            rounds,
            initial_bad_events,
            residual_bad_events: residual,
            best_effort: residual > 0,
            peacefulness,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    #[test]
    fn edgeless_graph_keeps_phase_one() {
        let g = Graph::empty(6);
        let (f, stats) = oneshot_colour(&g, &OneShotParams::new(0.5, 3)).unwrap();
        assert!(f.is_total());
        assert_eq!(stats.initial_bad_events, 0);
        assert_eq!(stats.rounds, 0);
        let state = OneShotState::new(&g, stats.palette, 0.0, rng_from_seed(3));
        assert_eq!(f.colours, state.retained().colours);
    }

    #[test]
    fn clashing_edge_is_recoloured() {
        let g = Graph::path(2);
        // Palette 1 forces both ends to clash, so both are uncoloured.
        let state = OneShotState::new(&g, 1, 1.0, rng_from_seed(0));
        assert_eq!(state.retained().coloured_count(), 0);
        let params = OneShotParams {
            palette_size: Some(2),
            ..OneShotParams::new(1.0, 0)
        };
        let (f, _) = oneshot_colour(&g, &params).unwrap();
        f.validate_total(&g).unwrap();
    }

    #[test]
    fn parameter_checks() {
        let g = Graph::cycle(6);
        assert!(matches!(
            oneshot_colour(&g, &OneShotParams::new(1.5, 0)),
            Err(OneShotError::InvalidMu(_))
        ));
        let params = OneShotParams {
            palette_size: Some(2),
            ..OneShotParams::new(Rational::new(1, 2), 0)
        };
        assert!(matches!(oneshot_colour(&g, &params), Err(OneShotError::PaletteTooSmall { .. })));
        assert_eq!(OneShotParams::new(Rational::new(1, 2), 0).palette_for(16), 160);
    }

    #[test]
    fn regular_graph_run_is_peaceful() {
        let g = crate::graph::random_regular(200, 16, 1).unwrap();
        let (f, stats) = oneshot_colour(&g, &OneShotParams::new(Rational::new(1, 2), 7)).unwrap();
        f.validate_total(&g).unwrap();
        assert_eq!(stats.palette, 160);
        if !stats.best_effort {
            assert!(stats.peacefulness <= 8);
        }
    }
}
