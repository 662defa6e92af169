//! Randomized approximation schemes for fragile-dense minimization CSPs,
//! with exact oracles, problem encoders, instance generators and a benchmark
//! harness.
//!
//! # What's here
//!
//! * [`csp`] — exact MIN-kCSP instances: integer penalty tables over a shared
//!   scale, objective / rewrite / per-variable cost `b`, all comparisons in
//!   exact rational arithmetic.
//! * [`encode`] — encoders between concrete problems and CSPs: the
//!   Gale-Berlekamp switching game and its equivalent formulations, nearest
//!   codeword (XOR equations), unique games, MIN-kSAT (DNF form), multiway
//!   cut, and correlation / hierarchical clustering.
//! * [`fragility`] — per-constraint fragility checks and the fragile-dense
//!   verifier.
//! * [`additive`] — additive-error solver used as pre-pass and finisher,
//!   with EXACT and SAMPLED backends, pinned variables, linear cost terms,
//!   and the arity-padding reduction for constrained subproblems.
//! * [`fragile`] — the sampling + double-greedy + clear-cut approximation
//!   scheme for fragile-dense MIN-kCSP.
//! * [`rigid`] — the recursive scheme for rigid MIN-2CSPs: correlation
//!   clustering and, via trunk enumeration, hierarchical clustering.
//! * [`oracle`] — independent exhaustive solvers used as ground truth.
//! * [`generate`] — seeded planted-instance generators.
//! * [`bench`] — seeded experiment grids emitting CSV (approximation ratios
//!   and runtime scaling).
//!
//! # Runnable examples
//!
//! Each major capability has a runnable example under `examples/`:
//! `gale_berlekamp`, `nearest_codeword`, `unique_games`,
//! `min_ksat_and_multiway_cut`, `correlation_clustering`,
//! `hierarchical_clustering`, `additive_backends`, `bench_grid`. Run with
//! `cargo run --release --example <name>`.
//!
//! The `mincsp` binary exposes the same functionality as subcommands
//! (`encode`, `gen`, `solve`, `oracle`, `bench`).

pub mod additive;
pub mod bench;
pub mod cost;
pub mod csp;
pub mod encode;
mod enumerate;
pub mod error;
pub mod fragile;
pub mod fragility;
pub mod generate;
pub mod oracle;
pub mod report;
pub mod rigid;
pub mod rng;

pub use cost::{binomial, ExactCost};
pub use csp::{Assignment, CspInstance, Domain, PenaltySource, PenaltyTable};
pub use error::{Error, Result};
