use thiserror::Error;

use crate::colouring::{ColouringError, PartialColouring};
use crate::dsatur::{dsatur, DsaturError};
use crate::graph::Graph;
use crate::scalar::LogBase;

#[derive(Debug, Error)]
pub enum PostprocessError {
    #[error(transparent)]
    Colouring(#[from] ColouringError),
    #[error("recolouring needs more than the {c_prime} low colours; try a larger band")]
    BandTooSmall { c_prime: usize, source: DsaturError },
}

/// `⌈4Δ / log Δ⌉`.
pub fn default_low_band(delta: usize, log_base: LogBase) -> usize {
    let d = delta as f64;
    (4.0 * d / log_base.log(d)).ceil() as usize
}

/// Uncolours every vertex whose colour is below `c_prime` or at least `Δ + 1`,
/// then recolours all uncoloured vertices greedily (DSATUR) with colours
/// `0..c_prime`. Colours in `c_prime..Δ+1` are untouched.
pub fn postprocess_recolour(g: &Graph, f: &PartialColouring, c_prime: usize) -> Result<PartialColouring, PostprocessError> {
    f.validate(g)?;
    let top = g.max_degree() + 1;
    let mut base = PartialColouring::uncoloured(g.n(), f.palette.max(top).max(c_prime));
    for v in 0..g.n() {
        if let Some(c) = f.get(v).filter(|&c| c >= c_prime && c < top) {
            base.set(v, c);
        }
    }
    let mut out = dsatur(g, &base, 0..c_prime).map_err(|source| PostprocessError::BandTooSmall { c_prime, source })?;
    out.palette = top.max(c_prime);
    Ok(out)
}
