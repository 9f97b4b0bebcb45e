//! Exact symbolic kernel for truncated meromorphic open-string vertex
//! algebras (MOSVAs) and their left, right and bi-modules.
//!
//! Everything is computed in exact rational arithmetic at a weight cutoff.
//! Data above the cutoff is *absent* rather than zero, and every result
//! carries the window on which it is exact.

pub mod constructions;
pub mod error;
pub mod exact_laurent;
pub mod graded;
pub mod par;
pub mod report;
pub mod structures;
pub mod verification;
pub mod workbench;

pub use error::Error;
pub use exact_laurent::Scalar;
