//! Simulation engine for studying training-data interference between
//! recommendation policies that are evaluated side by side in an online
//! experiment.
//!
//! The library runs several multi-armed bandit policies concurrently
//! against one Bernoulli environment under two data regimes:
//!
//! * **pooled** — after every round each policy's statistics are updated
//!   with the action/reward pairs observed by *all* policies;
//! * **siloed** — each policy only ever sees its own observations.
//!
//! A third mode, **solo replay**, reruns any single policy alone on the
//! identical random streams it would have consumed in the joint run.
//! Trajectory equality between a siloed joint run and the solo replay is
//! exact by construction, which turns "the experiment is isolated" from a
//! plausibility argument into a checkable invariant. Under pooling the
//! trajectories diverge, demonstrating constructively that concurrently
//! trained variants interfere.
//!
//! Modules:
//!
//! * [`numerics`] — keyed deterministic RNG streams, Gamma/Beta sampling,
//!   the regularized incomplete beta function and its inverse.
//! * [`bandit`] — the five policies (MLE-Greedy, MAP-Greedy, ε-Greedy,
//!   Thompson, Bayes-UCB) over per-arm success/failure counts.
//! * [`environment`] — hidden Bernoulli arm means, reward draws, regret.
//! * [`harness`] — the round loop, data regimes, solo replay, parallel
//!   replications.
//! * [`stats`] — cross-replication aggregation, confidence intervals,
//!   treatment-effect estimation, interference-bias reporting.
//! * [`validate`] — self-check suites (numeric oracles and harness
//!   invariants) runnable at build time and from the CLI.

pub mod bandit;
pub mod environment;
mod error;
pub mod harness;
pub mod numerics;
pub mod stats;
pub mod validate;

pub use error::CoreError;

/// Crate version string, echoed into run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
