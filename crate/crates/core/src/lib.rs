//! Expansion-testing laboratory core.
//!
//! The crate bundles everything needed to run vertex-expansion testers on
//! bounded-degree multigraphs and to validate their building blocks:
//!
//! - [`graph`]: slot-indexed multigraphs, self-loop regularization,
//!   expansion/conductance measures, generators, and exhaustive oracles.
//! - [`walk`]: dense lazy-random-walk propagation, collision and escape
//!   probabilities, and exact diffusion cores.
//! - [`esp`]: the (volume-biased) evolving set process with exact kernel
//!   rows, cost accounting, stopping rules, and seed-set growth.
//! - [`qff`]: Chebyshev fast-forwarding of walk powers and a modeled
//!   amplitude-estimation 2-norm estimator.
//! - [`tester`]: the collision baseline, the unseeded norm tester, and the
//!   seeded norm tester, all with query ledgers.
//! - [`checks`] and [`scaling`]: the verification suites and complexity
//!   trend fits consumed by the CLI and the acceptance tests.
//!
//! All randomness flows through [`rng`] streams derived from a single master
//! seed, so every experiment is reproducible across thread schedules. With
//! the default `parallel` feature, batch helpers fan out over rayon; without
//! it they degrade to sequential loops with identical results.

pub mod checks;
pub mod error;
pub mod esp;
pub mod graph;
pub mod ledger;
pub mod parallel;
pub mod qff;
pub mod rng;
pub mod scaling;
pub mod tester;
pub mod walk;

pub use error::{Error, Result};
pub use graph::{Graph, GraphSpec, NodeSet};
pub use ledger::QueryLedger;
