//! Grover-search simulation, exact phase-tuned schedules, and query-cost
//! analysis.
//!
//! The crate is organized around one geometric fact: running Grover
//! iterations on an instance with `t` of `N` elements marked rotates the
//! state inside a fixed plane by an angle `theta` per step. [`subspace`]
//! works in that plane directly, [`statevector`] simulates the full
//! `N`-dimensional state as the independent brute-force cross-check,
//! [`exact`] tunes the phases of one final iteration so success becomes
//! certain, [`analysis`] turns the closed forms into worst-case floors and
//! query plans, and [`search`] executes the resulting procedures against a
//! query-counting black-box oracle.

pub mod analysis;
pub mod error;
pub mod exact;
pub mod search;
pub mod statevector;
pub mod subspace;

pub use analysis::{
    AlgorithmPlan, AsymptoticConstants, Part1Schedules, PlannerConfig, QueryEstimate, RandomRunLaw,
    WorstCaseReport,
};
pub use error::{Error, Result};
pub use exact::ExactSchedule;
pub use search::{Algorithm, BlackBoxOracle, McSummary, Outcome, SearchResult};
pub use statevector::{MarkedSet, StateVector};
pub use subspace::{PhasePair, RotationAngles, SearchInstance, SubspaceState};
