//! Two-population competitive coevolution with disengagement mitigation.
//!
//! The crate is organised around a domain-agnostic generational [`engine`]
//! that evaluates hosts and parasites through sampled competitions, applies
//! one of the [`mitigation`] strategies (baseline, reduced virulence,
//! autonomous virulence adaptation or substitution of the fittest) and then
//! breeds the next generation by tournament selection.
//!
//! Two domains plug into the engine:
//!
//! * [`domain::greater_than`]: bit strings whose only observable property is
//!   a pairwise "greater than" comparison of their number of ones, with a
//!   per-population mutation bias that controls how asymmetric the game is.
//! * [`domain::wellbeing`]: daily meal and exercise plans scored by a
//!   four-part error against a user profile.
//!
//! [`experiments`] drives parameter sweeps over both domains and writes
//! replayable CSV results plus a manifest.

pub mod domain;
pub mod engine;
pub mod error;
pub mod experiments;
pub mod mitigation;
pub mod rng;

pub use engine::{
    compute_delta, evaluate_subjective, run, run_single_population, run_trial, subjective_score,
    tournament_select, Direction, Domain, EngineConfig, GenerationStats, Individual, Mode,
    Population, Role, TrialResult, TrialSummary,
};
pub use error::{Error, Result};
pub use mitigation::{AvaConfig, RvConfig, RvTarget, Strategy, Technique};
pub use rng::TrialRng;
