//! Counting, estimating and bounding Hamiltonian cycles.
//!
//! - [`graph`]: bit-row digraphs and undirected graphs, the doubling map,
//!   matrix contraction and cycle witnesses.
//! - [`generate`]: seeded `G(n, p)` and named families.
//! - [`exact`]: brute force, subset DP, Ryser permanent, and the exact
//!   expectation of the estimators.
//! - [`estimator`]: the sequential importance estimators and Monte Carlo
//!   aggregation.
//! - [`bounds`]: Minc, Brégman and the symmetric-digraph bound, with their
//!   undirected counterparts.
//! - [`suites`]: cross-checking suites used by the tests and the CLI.

pub mod bounds;
pub mod error;
pub mod estimator;
pub mod exact;
pub mod generate;
pub mod graph;
pub mod suites;

pub use error::{Error, Result};
pub use estimator::{RowOrderPolicy, RowTable};
pub use exact::{Count, ExactRational};
pub use generate::{Family, Graph, GraphKind};
pub use graph::{CycleWitness, DegreeSequence, DiGraph, UndiGraph, ZeroOneMatrix};
