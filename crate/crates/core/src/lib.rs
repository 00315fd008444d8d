//! Online false discovery rate control with the LOND rule for platform trials
//! whose arms are analysed group-sequentially (one interim look per arm).
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: normal, Student t and bivariate normal kernels, t-test.
//! * [`beta`]: β-sequences distributing the overall level over hypotheses.
//! * [`boundaries`]: spending functions and two-stage boundary solving.
//! * [`engine`]: the online decision state machine (LOND, gsLOND and variants).
//! * [`sim`]: platform-trial simulation, metrics, and scenario grids.
//! * [`tables`]: boundary tables for worked examples.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beta;
pub mod boundaries;
pub mod engine;
mod error;
pub mod numerics;
pub mod sim;
pub mod sum;
pub mod tables;

pub use beta::{BetaMode, BetaSchedule};
pub use boundaries::{BoundaryCache, BoundaryPair, SpendingKind};
pub use engine::{EngineConfig, LondEngine, ProcedureKind};
pub use error::{Error, Result};
pub use numerics::Probability;
