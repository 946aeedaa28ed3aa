//! Noisy one-dimensional partitioned quantum cellular automata restricted to
//! the single-excitation sector.
//!
//! A chain of `N` two-level sites carries exactly one excitation, so the
//! state lives in an `N x N` density matrix. Each elementary step applies a
//! 2x2 block unitary to neighbouring pairs (partition A, then the shifted
//! partition B), each block followed by dephasing and amplitude damping.
//! The [`metrics`] module measures how well the approximate inverse step
//! recovers the initial state, and [`oracle`] re-runs the same dynamics in
//! the full `2^N` qubit space as an independent check.

pub mod automaton;
pub mod error;
pub mod metrics;
pub mod oracle;
pub mod sector;

pub use automaton::{
    AutomatonConfig, Block, BlockUnitary, NoiseParams, Partition, RuleParams, Stepper,
};
pub use error::{QcaError, Result};
pub use metrics::{ContractionReport, EvolutionRecord, TIrr, DEFAULT_DELTA};
pub use sector::SectorState;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
