//! Peaceful colourings of bounded-degree graphs.
//!
//! A proper colouring is `p`-peaceful when every vertex has at most `p`
//! neighbours whose colour is repeated elsewhere in its neighbourhood. The crate
//! contains an exact verifier, exhaustive oracles for tiny graphs, several
//! randomized colourers and the audits used to stress them.

pub mod adversary;
pub mod colouring;
pub mod dense;
pub mod dsatur;
pub mod graph;
pub mod nibble;
pub mod oneshot;
pub mod oracle;
pub mod peace;
pub mod rng;
pub mod scalar;
pub mod zcolour;

pub use colouring::{ColouringError, PartialColouring};
pub use graph::{Bipartition, Graph, GraphError};
pub use peace::{greedy_complete, greedy_extend, is_p_peaceful, peace_report, GreedyError, PeaceReport};
pub use scalar::{LogBase, Threshold};

/// Exact rational bound, e.g. `Ratio::new(1, 2)` for `μ = 1/2`.
pub type Rational = num_rational::Ratio<i64>;

pub type OneShotParamsF64 = oneshot::OneShotParams<f64>;
pub type OneShotParamsExact = oneshot::OneShotParams<Rational>;
pub type ZParamsF64 = zcolour::ZParams<f64>;
pub type ZParamsExact = zcolour::ZParams<Rational>;
pub type Trace = nibble::IdealizedTrace<f64>;
pub type TraceF32 = nibble::IdealizedTrace<f32>;
