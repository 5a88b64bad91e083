//! Low-adaptivity basis finding for matroids given by an independence oracle.
//!
//! Every algorithm talks to the matroid only through a [`QuerySession`],
//! which batches queries and counts adaptive rounds. Instances are concrete
//! ([`MatroidInstance`]); algorithms see them through [`MatroidView`]s that
//! record deletions and contractions.

pub mod baseline;
pub mod decomposition;
pub mod element;
pub mod error;
pub mod experiment;
pub mod format;
pub mod general;
pub mod generate;
pub mod instance;
pub mod partition;
pub mod session;
pub mod view;

// Lets the shared brute-force oracles, written against the public API,
// compile inside the crate's own tests.
#[cfg(test)]
extern crate self as parbasis;
#[cfg(test)]
#[path = "../tests/common/mod.rs"]
mod brute;
#[cfg(test)]
mod properties;

pub use element::{ElementId, ElementSet};
pub use error::{Error, Result};
pub use instance::{CircuitClass, MatroidInstance};
pub use session::{CircuitHit, LedgerRow, QuerySession, RoundLedger, SpanHit, Ticket};
pub use view::MatroidView;
pub use baseline::kuw_find_basis;
pub use decomposition::{early_stop_decomposition, iterative_peel, DecompConfig, DecompositionResult};
pub use experiment::{run_experiment, Algorithm, ExperimentRecord, ExperimentSpec, SolverConfig};
pub use general::{general_find_basis, GeneralConfig};
pub use generate::{Family, FamilySpec};
pub use partition::{partition_find_basis, PartitionConfig};
