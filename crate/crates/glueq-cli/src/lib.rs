//! IO, file formats, numerical oracles, and the verification suite on top of
//! `glueq-core`.
//!
//! * [`format`] — the canonical triangulation JSON, peripheral-curve and
//!   shape-assignment files, deterministic matrix exports, and the report
//!   schema;
//! * [`newton`] — a least-squares Newton solver used as the committed oracle
//!   for complete-structure shape assignments;
//! * [`verify`] — the symplectic, homological, boundary-map, and
//!   multiplicative check suites with machine-readable results.

pub mod format;
pub mod newton;
pub mod verify;
