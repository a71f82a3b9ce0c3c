//! Exhaustive minimum peacefulness on tiny graphs.
//!
//! Backtracking colours vertices in degeneracy order. Each vertex keeps a count
//! of every colour among its coloured neighbours; a count reaching 2 adds two
//! disturbed neighbours and each further repeat adds one. Disturbed counts only
//! grow as the colouring grows, so the running maximum is a lower bound that
//! prunes any branch unable to beat the incumbent.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::colouring::PartialColouring;
use crate::graph::Graph;
use crate::scalar::Threshold;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("search space {colours}^{n} exceeds the cap of {cap} states")]
    CapExceeded { colours: usize, n: usize, cap: u128 },
    #[error("graph has no proper {0}-colouring")]
    NotColourable(usize),
}

#[derive(Clone, Copy, Debug)]
pub struct OracleOptions {
    /// Largest admissible `c^n`.
    pub cap: u128,
    /// Restrict the k-th vertex to colours `<= max used so far + 1`.
    pub symmetry_breaking: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            cap: 100_000_000,
            symmetry_breaking: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult {
    pub p_star: usize,
    pub witness: PartialColouring,
}

/// Minimum peacefulness over all proper `c`-colourings, with a witness.
pub fn min_peacefulness_exact(g: &Graph, c: usize) -> Result<OracleResult, OracleError> {
    min_peacefulness_with(g, c, OracleOptions::default())
}

pub fn min_peacefulness_with(g: &Graph, c: usize, options: OracleOptions) -> Result<OracleResult, OracleError> {
    check_cap(g, c, options.cap)?;
    let mut search = Search::new(g, c, options.symmetry_breaking, usize::MAX);
    search.descend(0, 0, 0);
    match search.best_colours {
        Some(colours) => Ok(OracleResult {
            p_star: search.best,
            witness: PartialColouring::from_total(c, colours),
        }),
        None => Err(OracleError::NotColourable(c)),
    }
}

/// True iff every proper `c`-colouring of `g` has peacefulness greater than `p`.
///
/// Runs its own search bounded by `p` rather than deferring to
/// [`min_peacefulness_exact`], so the two answers can be cross-checked.
pub fn certify_no_peaceful<T: Threshold>(g: &Graph, c: usize, p: T) -> Result<bool, OracleError> {
    check_cap(g, c, OracleOptions::default().cap)?;
    let Some(limit) = p.floor_count() else {
        // A negative bound is unattainable, provided a proper colouring exists.
        return find_any(g, c).map(|_| true);
    };
    let mut search = Search::new(g, c, true, limit.saturating_add(1));
    search.stop_on_first = true;
    search.descend(0, 0, 0);
    if search.best_colours.is_some() {
        return Ok(false);
    }
    find_any(g, c).map(|_| true)
}

fn find_any(g: &Graph, c: usize) -> Result<(), OracleError> {
    let mut search = Search::new(g, c, true, usize::MAX);
    search.stop_on_first = true;
    search.descend(0, 0, 0);
    search.best_colours.map(|_| ()).ok_or(OracleError::NotColourable(c))
}

fn check_cap(g: &Graph, c: usize, cap: u128) -> Result<(), OracleError> {
    let states = (c as u128).checked_pow(g.n() as u32);
    match states {
        Some(s) if s <= cap => Ok(()),
        _ => Err(OracleError::CapExceeded {
            colours: c,
            n: g.n(),
            cap,
        }),
    }
}

/// Reverse of the smallest-last elimination order.
fn degeneracy_order(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n).filter(|&v| !removed[v]).min_by_key(|&v| (degree[v], v)).unwrap();
        removed[v] = true;
        order.push(v);
        for w in g.neighbours(v) {
            if !removed[w] {
                degree[w] -= 1;
            }
        }
    }
    order.reverse();
    order
}

struct Search<'a> {
    g: &'a Graph,
    c: usize,
    order: Vec<usize>,
    symmetry: bool,
    colour: Vec<Option<usize>>,
    counts: Vec<u32>,
    disturbed: Vec<usize>,
    /// Solutions must have peacefulness strictly below this.
    best: usize,
    best_colours: Option<Vec<usize>>,
    stop_on_first: bool,
}

impl<'a> Search<'a> {
    fn new(g: &'a Graph, c: usize, symmetry: bool, bound: usize) -> Self {
        Search {
            g,
            c,
            order: degeneracy_order(g),
            symmetry,
            colour: vec![None; g.n()],
            counts: vec![0; g.n() * c],
            disturbed: vec![0; g.n()],
            best: bound,
            best_colours: None,
            stop_on_first: false,
        }
    }

    fn done(&self) -> bool {
        self.best_colours.is_some() && (self.stop_on_first || self.best == 0)
    }

    fn descend(&mut self, depth: usize, max_used: usize, peace: usize) {
        if depth == self.order.len() {
            if peace < self.best {
                self.best = peace;
                self.best_colours = Some(self.colour.iter().map(|c| c.unwrap()).collect());
            }
            return;
        }
        let v = self.order[depth];
        let limit = if self.symmetry { (max_used + 1).min(self.c) } else { self.c };
        for col in 0..limit {
            if self.g.neighbours(v).any(|w| self.colour[w] == Some(col)) {
                continue;
            }
            let worst = self.assign(v, col).max(peace);
            if worst < self.best {
                self.descend(depth + 1, max_used.max(col + 1), worst);
            }
            self.unassign(v, col);
            if self.done() {
                return;
            }
        }
    }

    /// Colours `v`; returns the largest disturbed count among its neighbours afterwards.
    fn assign(&mut self, v: usize, col: usize) -> usize {
        self.colour[v] = Some(col);
        let mut worst = 0;
        for w in self.g.neighbours(v) {
            let slot = &mut self.counts[w * self.c + col];
            *slot += 1;
            match *slot {
                2 => self.disturbed[w] += 2,
                s if s > 2 => self.disturbed[w] += 1,
                _ => {}
            }
            worst = worst.max(self.disturbed[w]);
        }
        worst
    }

    fn unassign(&mut self, v: usize, col: usize) {
        self.colour[v] = None;
        for w in self.g.neighbours(v) {
            let slot = &mut self.counts[w * self.c + col];
            match *slot {
                2 => self.disturbed[w] -= 2,
                s if s > 2 => self.disturbed[w] -= 1,
                _ => {}
            }
            *slot -= 1;
        }
    }
}
