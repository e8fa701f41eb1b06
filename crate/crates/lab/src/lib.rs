//! Experiments on remote coherence creation: the phase-damping Monte Carlo
//! sweep, seeded property suites and single (state, channel) evaluation.

pub mod compute;
pub mod config;
pub mod error;
pub mod fig1;
pub mod parallel;
pub mod verify;

pub use config::ExperimentConfig;
pub use error::{LabError, Result};
