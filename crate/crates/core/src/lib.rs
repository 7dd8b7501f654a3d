//! Approximate recovery of binary vertex labels from noisy node and edge
//! observations on grids, expanders and general small graphs.
//!
//! The crate is organised as:
//! - [`graph`]: grids, general graphs, boundaries, region types, filled-in
//!   sets, dual cycles, the polygon census, expansion and minimum cut;
//! - [`noise`]: ground truths, the corruption process and error metrics;
//! - [`inference`]: the exact solvers and the two-stage algorithm;
//! - [`oracles`]: brute-force references and lemma checkers;
//! - [`bounds`]: closed-form calculators for the error bounds.

pub mod bounds;
pub mod error;
pub mod fmt;
pub mod graph;
pub mod inference;
pub mod noise;
pub mod oracles;
pub mod rng;

pub use error::{Error, Result};
pub use graph::{build_grid, Graph, GridGraph};
pub use inference::{FirstStageResult, GammaWeight, MarginalTable};
pub use noise::{Labeling, NoiseParams, Observations, Signals};
