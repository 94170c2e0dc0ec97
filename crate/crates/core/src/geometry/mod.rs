//! Rigid-body superposition and model-vs-model similarity scores.

mod gdt;
mod kabsch;

pub use gdt::{gdt_ts, gdt_ts_norm, per_residue_distances, GdtResult};
pub use kabsch::{kabsch, Superposition};

use crate::structure::Point3;

pub(crate) fn sub(a: Point3, b: Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn norm(a: Point3) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

/// Euclidean distance between two points.
pub fn dist(a: Point3, b: Point3) -> f64 {
    norm(sub(a, b))
}
