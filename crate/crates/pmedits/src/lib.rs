//! Pattern matching with edits.
//!
//! The crate computes every k-edit occurrence of a pattern in a text, and
//! builds a compact sketch from which all of those occurrences, their costs
//! and their edit information can be decoded without access to either
//! string. Supporting modules provide LZ77 factorization, self-edit distance,
//! the alignment graph machinery behind the sketch, and a structural
//! decomposition of the pattern used by the candidate-filtering matcher.

pub mod analysis;
pub mod compress;
pub mod edit;
mod error;
pub mod graph;
pub mod matcher;
pub mod sketch;
pub mod strings;
pub mod workload;

pub use error::{Error, Result};
pub use strings::Sym;
