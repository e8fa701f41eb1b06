//! Remote creation of quantum coherence.
//!
//! A bipartite system AB is shared between two parties. B applies a quantum
//! operation and announces the outcome; this crate computes how much
//! l1-norm coherence that creates on A, decides which states and operations
//! can create any, and evaluates the entanglement bounds on the
//! outcome-averaged coherence.
//!
//! ```
//! use rcc_core::channel::{phase_damping, Channel};
//! use rcc_core::linalg::C64;
//! use rcc_core::rcc::average_rcc;
//! use rcc_core::state::BipartitePureState;
//!
//! // (|0⟩|+⟩ + |1⟩|−⟩)/√2 under phase damping with rate 0.5
//! let psi = BipartitePureState::new(
//!     2,
//!     2,
//!     vec![C64::new(0.5, 0.0), C64::new(0.5, 0.0), C64::new(0.5, 0.0), C64::new(-0.5, 0.0)],
//! )
//! .unwrap();
//! let channel: Channel = phase_damping(0.5).unwrap().into();
//! let report = average_rcc(&psi, &channel).unwrap();
//! assert!((report.average_rcc - 0.5).abs() < 1e-12);
//! ```

pub mod channel;
pub mod coherence;
pub mod error;
pub mod linalg;
pub mod numfmt;
pub mod rcc;
pub mod sampling;
pub mod state;

pub use channel::{Channel, ChannelEnsemble, KrausOperation};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, SeededRng, C64};
pub use rcc::{OutcomeRecord, RccReport};
pub use state::{BipartiteDensity, BipartitePureState, DensityMatrix, SchmidtForm};
