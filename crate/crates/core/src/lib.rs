//! Steady-state genetic algorithm for the all-pairs shortest path problem.
//!
//! * [`graph`]: directed weighted graphs, generators, edge-list format
//! * [`exact`]: Floyd–Warshall and Dijkstra oracles, edge-count classes
//! * [`rng`]: reproducible random streams (Poisson, Bernoulli, uniform index)
//! * [`evo`]: individuals, population, operators, and the run loop
//! * [`harness`]: seeded experiments, summaries, exponent fits, model curves

pub mod error;
pub mod evo;
pub mod exact;
pub mod graph;
pub mod harness;
pub mod rng;

#[cfg(feature = "cli")]
pub mod cli;

pub use error::{Error, Result};
