//! Simulation and characterization of gate-addressable split-gate switch
//! arrays on proximitized InAs two-dimensional electron gases.
//!
//! [`physics`] derives transport scales of the 2DEG, [`chip`] models an
//! eight-junction chip and its manifest, [`simulator`] produces lock-in gate
//! sweeps, [`analysis`] extracts switching metrics and yield statistics, and
//! [`cli`] ties them into the `nanoswitch` binary.

// `!(x > 0.0)` is used on purpose: NaN must fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod chip;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod physics;
pub mod seeds;
pub mod simulator;

pub use error::{Error, Result};
