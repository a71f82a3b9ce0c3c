//! Library half of the `peacekit` command-line tool: graph families, algorithm
//! dispatch and config-driven sweeps.

pub mod algos;
pub mod families;
pub mod scalar;
pub mod sweep;
