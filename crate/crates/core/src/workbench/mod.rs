//! Example generators and the instance document format.

pub mod document;
pub mod examples;

pub use document::{certificate_from_json, certificate_to_json, DocKind, Instance, InstanceDocument, Metadata};
pub use examples::{build_heisenberg, build_matrix_mosva, matrix_algebra, regular_module};
