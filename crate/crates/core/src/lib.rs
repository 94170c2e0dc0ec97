//! Core library for rfqa: structural model quality assessment.
//!
//! The pipeline: parse PDB-style models into pools ([`structure`]), score
//! model similarity with superposition-based GDT-TS ([`geometry`]) and
//! pairwise consensus ([`consensus`]), derive per-residue feature vectors
//! ([`features`]), train a random-forest distance predictor ([`forest`]),
//! combine both routes into QA predictions ([`qa`]), and measure the result
//! ([`eval`]). [`synth`] generates synthetic structures for tests and
//! benchmarks.

pub mod consensus;
pub mod error;
pub mod eval;
pub mod features;
pub mod forest;
pub mod geometry;
pub mod qa;
pub mod structure;
pub mod synth;

pub use error::{Error, Result};
