//! Peacefulness verification and greedy completion.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::colouring::{ColouringError, PartialColouring};
use crate::graph::Graph;
use crate::scalar::{within, Threshold};

/// Per-vertex neighbourhood statistics of a partial colouring.
///
/// For each `v`: `undisturbed[v] + disturbed[v] + uncoloured_neighbours[v] = deg(v)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeaceReport {
    pub undisturbed: Vec<usize>,
    pub disturbed: Vec<usize>,
    pub uncoloured_neighbours: Vec<usize>,
    pub peacefulness: usize,
}

impl PeaceReport {
    /// Mean of `undisturbed[v] / coloured_degree(v)` over vertices with a coloured neighbour.
    pub fn unique_fraction_mean(&self) -> f64 {
        let mut total = 0.0;
        let mut count = 0usize;
        for v in 0..self.undisturbed.len() {
            let coloured = self.undisturbed[v] + self.disturbed[v];
            if coloured > 0 {
                total += self.undisturbed[v] as f64 / coloured as f64;
                count += 1;
            }
        }
        if count == 0 {
            0.0
        } else {
            total / count as f64
        }
    }

    /// Mean number of undisturbed neighbours per vertex.
    pub fn undisturbed_mean(&self) -> f64 {
        if self.undisturbed.is_empty() {
            return 0.0;
        }
        self.undisturbed.iter().sum::<usize>() as f64 / self.undisturbed.len() as f64
    }
}

/// Reusable colour counter over one neighbourhood at a time.
pub(crate) struct Histogram {
    counts: Vec<u32>,
    touched: Vec<usize>,
}

impl Histogram {
    pub(crate) fn new(palette: usize) -> Self {
        Histogram {
            counts: vec![0; palette],
            touched: Vec::new(),
        }
    }

    /// Loads the colours of `N(v)`; returns the number of uncoloured neighbours.
    pub(crate) fn load(&mut self, g: &Graph, f: &PartialColouring, v: usize) -> usize {
        self.clear();
        let mut uncoloured = 0;
        for w in g.neighbours(v) {
            match f.get(w) {
                Some(c) => self.add(c),
                None => uncoloured += 1,
            }
        }
        uncoloured
    }

    #[inline]
    pub(crate) fn add(&mut self, c: usize) {
        if self.counts[c] == 0 {
            self.touched.push(c);
        }
        self.counts[c] += 1;
    }

    /// Colours loaded exactly once.
    pub(crate) fn singletons(&self) -> usize {
        self.touched.iter().filter(|&&c| self.counts[c] == 1).count()
    }

    pub(crate) fn clear(&mut self) {
        for &c in &self.touched {
            self.counts[c] = 0;
        }
        self.touched.clear();
    }
}

/// Exact per-vertex undisturbed/disturbed/uncoloured counts.
///
/// Rejects colourings that are malformed or improper for `g`.
pub fn peace_report(g: &Graph, f: &PartialColouring) -> Result<PeaceReport, ColouringError> {
    f.validate(g)?;
    let n = g.n();
    let mut report = PeaceReport {
        undisturbed: vec![0; n],
        disturbed: vec![0; n],
        uncoloured_neighbours: vec![0; n],
        peacefulness: 0,
    };
    let mut hist = Histogram::new(f.palette);
    for v in 0..n {
        let uncoloured = hist.load(g, f, v);
        let undisturbed = hist.singletons();
        let disturbed = g.degree(v) - uncoloured - undisturbed;
        report.undisturbed[v] = undisturbed;
        report.disturbed[v] = disturbed;
        report.uncoloured_neighbours[v] = uncoloured;
        report.peacefulness = report.peacefulness.max(disturbed);
    }
    Ok(report)
}

/// Disturbed counts straight from the definition: `w ∈ N(v)` is disturbed when
/// some other `u ∈ N(v)` has the same colour. Quadratic in the degree.
pub fn disturbed_by_definition(g: &Graph, f: &PartialColouring) -> Vec<usize> {
    (0..g.n())
        .map(|v| {
            let nv = g.neighbour_slice(v);
            nv.iter()
                .filter(|&&w| {
                    let Some(cw) = f.get(w as usize) else { return false };
                    nv.iter().any(|&u| u != w && f.get(u as usize) == Some(cw))
                })
                .count()
        })
        .collect()
}

/// True iff the total colouring `f` has peacefulness at most `p`.
pub fn is_p_peaceful<T: Threshold>(g: &Graph, f: &PartialColouring, p: T) -> Result<bool, ColouringError> {
    f.validate_total(g)?;
    Ok(within(peace_report(g, f)?.peacefulness, p))
}

#[derive(Debug, Error)]
pub enum GreedyError {
    #[error(transparent)]
    Colouring(#[from] ColouringError),
    #[error("palette of {palette} colours is below delta + 1 = {needed}")]
    PaletteTooSmall { palette: usize, needed: usize },
    #[error("exempt set {index} is not a clique")]
    ExemptNotClique { index: usize },
    #[error("exempt clique {index} has {size} vertices, below delta + 1 - p/2")]
    ExemptTooSmall { index: usize, size: usize },
    #[error("greedy precondition fails at {} vertices (first: {:?})", .0.len(), .0.first())]
    Preconditions(Vec<usize>),
}

/// Non-exempt vertices `v` with `U_v - |N(v) - dom f| < deg(v) - p`.
pub fn greedy_precondition_violations<T: Threshold>(
    g: &Graph,
    f: &PartialColouring,
    p: T,
    exempt: &[Vec<usize>],
) -> Result<Vec<usize>, GreedyError> {
    let report = peace_report(g, f)?;
    let mut is_exempt = vec![false; g.n()];
    for (index, clique) in exempt.iter().enumerate() {
        if !g.is_clique(clique) || clique.iter().any(|&v| v >= g.n()) {
            return Err(GreedyError::ExemptNotClique { index });
        }
        // |K| >= Δ + 1 - p/2, doubled to stay in integer-friendly arithmetic.
        if T::of_count(2 * clique.len()) + p < T::of_count(2 * (g.max_degree() + 1)) {
            return Err(GreedyError::ExemptTooSmall {
                index,
                size: clique.len(),
            });
        }
        for &v in clique {
            is_exempt[v] = true;
        }
    }
    Ok((0..g.n())
        .filter(|&v| {
            // deg(v) - U_v + |N(v) - dom f| <= p; the left side is never negative.
            let lhs = g.degree(v) - report.undisturbed[v] + report.uncoloured_neighbours[v];
            !is_exempt[v] && !within(lhs, p)
        })
        .collect())
}

/// Extends `f` to a total colouring, visiting uncoloured vertices in index order
/// and giving each the smallest colour absent from its coloured neighbourhood.
///
/// Fails with a list of offending vertices when the completion is not
/// guaranteed to be `p`-peaceful.
pub fn greedy_complete<T: Threshold>(
    g: &Graph,
    f: &PartialColouring,
    p: T,
    exempt: &[Vec<usize>],
) -> Result<PartialColouring, GreedyError> {
    let needed = g.max_degree() + 1;
    if f.palette < needed {
        return Err(GreedyError::PaletteTooSmall {
            palette: f.palette,
            needed,
        });
    }
    let violations = greedy_precondition_violations(g, f, p, exempt)?;
    if !violations.is_empty() {
        return Err(GreedyError::Preconditions(violations));
    }
    Ok(greedy_extend(g, f).expect("a palette of delta + 1 colours always suffices"))
}

/// Greedy extension without peacefulness preconditions.
///
/// Returns `None` if some vertex sees every palette colour on its neighbours.
pub fn greedy_extend(g: &Graph, f: &PartialColouring) -> Option<PartialColouring> {
    let mut out = f.clone();
    let mut stamp = vec![usize::MAX; f.palette];
    for v in 0..g.n() {
        if out.get(v).is_some() {
            continue;
        }
        for w in g.neighbours(v) {
            if let Some(c) = out.get(w) {
                stamp[c] = v;
            }
        }
        let c = (0..f.palette).find(|&c| stamp[c] != v)?;
        out.set(v, c);
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    fn star_with_leaves(colours: &[usize]) -> (Graph, PartialColouring) {
        let g = Graph::star(colours.len());
        let mut all = vec![0];
        all.extend_from_slice(colours);
        (g, PartialColouring::from_total(4, all))
    }

    #[test]
    fn rainbow_triangle() {
        let g = Graph::complete(3);
        let f = PartialColouring::from_total(3, vec![0, 1, 2]);
        let r = peace_report(&g, &f).unwrap();
        assert_eq!(r.disturbed, vec![0, 0, 0]);
        assert_eq!(r.peacefulness, 0);
        assert!(is_p_peaceful(&g, &f, 0.0).unwrap());
    }

    #[test]
    fn star_hand_count() {
        let (g, f) = star_with_leaves(&[1, 1, 2]);
        let r = peace_report(&g, &f).unwrap();
        assert_eq!(r.disturbed, vec![2, 0, 0, 0]);
        assert_eq!(r.undisturbed[0], 1);
        assert_eq!(r.peacefulness, 2);
    }

    #[test]
    fn five_cycle() {
        let g = Graph::cycle(5);
        let f = PartialColouring::from_total(3, vec![0, 1, 0, 1, 2]);
        let r = peace_report(&g, &f).unwrap();
        // N(1) = {0,2} both coloured 0; N(0) = {1,4}; N(4) = {3,0}; N(2) = {1,3} both 1.
        assert_eq!(r.disturbed, vec![0, 2, 2, 0, 0]);
        assert_eq!(r.peacefulness, 2);
        assert_eq!(disturbed_by_definition(&g, &f), r.disturbed);
        assert!(!is_p_peaceful(&g, &f, Ratio::new(1i64, 1)).unwrap());
    }

    #[test]
    fn improper_and_partial_inputs_rejected() {
        let g = Graph::complete(3);
        let bad = PartialColouring::from_total(3, vec![0, 0, 1]);
        assert!(peace_report(&g, &bad).unwrap_err().is_improper());
        let partial = PartialColouring {
            palette: 3,
            colours: vec![Some(0), None, Some(1)],
        };
        assert!(peace_report(&g, &partial).is_ok());
        assert!(matches!(is_p_peaceful(&g, &partial, 3.0), Err(ColouringError::Uncoloured(1))));
    }

    #[test]
    fn greedy_examples() {
        let total = PartialColouring::from_total(3, vec![0, 1, 2]);
        let k3 = Graph::complete(3);
        assert_eq!(greedy_complete(&k3, &total, 2.0, &[]).unwrap(), total);

        let p3 = Graph::path(3);
        let mut f = PartialColouring::uncoloured(3, 3);
        f.set(0, 0);
        let out = greedy_extend(&p3, &f).unwrap();
        assert_eq!(out.colours, vec![Some(0), Some(1), Some(0)]);

        let k4 = Graph::complete(4);
        let empty = PartialColouring::uncoloured(4, 4);
        let out = greedy_complete(&k4, &empty, 0.0, &[(0..4).collect()]).unwrap();
        assert!(is_p_peaceful(&k4, &out, 0.0).unwrap());
        assert!(matches!(
            greedy_complete(&k4, &empty, 0.0, &[]),
            Err(GreedyError::Preconditions(v)) if v == vec![0, 1, 2, 3]
        ));
        assert!(matches!(
            greedy_complete(&k4, &PartialColouring::uncoloured(4, 3), 0.0, &[]),
            Err(GreedyError::PaletteTooSmall { .. })
        ));
        assert!(matches!(
            greedy_complete(&k4, &empty, 0.0, &[vec![0, 1, 2]]),
            Err(GreedyError::ExemptTooSmall { .. })
        ));
    }
}
