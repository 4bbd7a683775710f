//! Canonical and microcanonical random-graph ensembles under degree-sequence
//! and edge-count constraints, with largest-eigenvalue statistics and
//! relative entropies between the two ensembles.

pub mod ensembles;
pub mod entropy;
pub mod enumeration;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod io;
pub mod report;
pub mod rng;
pub mod schedule;
pub mod spectral;
pub mod stats;

pub use error::{Error, Result};
pub use graph::{ConstraintKind, ConstraintSpec, DegreeSequence, Graph};
