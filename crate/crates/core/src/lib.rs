//! Finite relational structures: dismantling, homomorphism reconfiguration,
//! spatial mixing, finite-volume Gibbs distributions and homomorphism duality.

pub mod constructions;
pub mod dismantling;
pub mod duality;
pub mod error;
pub mod fixtures;
pub mod gibbs;
pub mod homgraph;
pub mod homs;
pub mod iso;
pub mod metric;
pub mod mixing;
pub mod parse;
pub mod random;
pub mod structure;
pub mod suite;

pub use error::{Error, Result};
pub use structure::{ElemId, RelStructure, Signature};
