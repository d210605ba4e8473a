//! Exact Kasteleyn signs by deformation, boundary measurements and the
//! positivity structures they carry.
//!
//! A drawing is deformed from a canonical start to the target; each time a
//! vertex passes through an edge, that edge's sign flips. Minors of the
//! resulting matrices count boundary-constrained matchings, which are then
//! cross-checked against a brute-force oracle.

pub mod format;
pub mod generate;
pub mod geometry;
pub mod graph;
pub mod identities;
pub mod immersion;
pub mod json;
pub mod linalg;
pub mod measure;
pub mod oracle;
pub mod transport;
