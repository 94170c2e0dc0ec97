//! Kabsch least-squares superposition of two point sets.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::structure::Point3;

/// Optimal rigid transform mapping one point set onto another:
/// `x -> rotation * x + translation`.
#[derive(Debug, Clone)]
pub struct Superposition {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
    pub rmsd: f64,
}

impl Superposition {
    pub fn apply(&self, p: Point3) -> Point3 {
        let v = self.rotation * Vector3::new(p[0], p[1], p[2]) + self.translation;
        [v.x, v.y, v.z]
    }
}

/// Least-squares superposition of `a` onto `b` (paired points).
///
/// The covariance matrix is decomposed by SVD; a reflection shows up as a
/// negative determinant and is corrected by flipping the smallest singular
/// direction, so the result is always a proper rotation.
pub fn kabsch(a: &[Point3], b: &[Point3]) -> Result<Superposition> {
    if a.len() != b.len() {
        return Err(Error::PointLengthMismatch(a.len(), b.len()));
    }
    let n = a.len();
    if n < 3 {
        return Err(Error::TooFewPoints(n));
    }
    let nf = n as f64;

    let mut ca = Vector3::zeros();
    let mut cb = Vector3::zeros();
    for i in 0..n {
        ca += Vector3::new(a[i][0], a[i][1], a[i][2]);
        cb += Vector3::new(b[i][0], b[i][1], b[i][2]);
    }
    ca /= nf;
    cb /= nf;

    // Covariance of centered coordinates.
    let mut h = Matrix3::zeros();
    for i in 0..n {
        let pa = Vector3::new(a[i][0], a[i][1], a[i][2]) - ca;
        let pb = Vector3::new(b[i][0], b[i][1], b[i][2]) - cb;
        h += pa * pb.transpose();
    }

    let svd = nalgebra::SVD::new(h, true, true);
    let u = svd.u.expect("svd with u requested");
    let v_t = svd.v_t.expect("svd with v_t requested");
    let d = (v_t.transpose() * u.transpose()).determinant();
    let sign = if d < 0.0 { -1.0 } else { 1.0 };
    // Singular values come out sorted descending, so index 2 is the smallest
    // direction - the one to flip in the reflection case.
    let correction = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, sign));
    let rotation = v_t.transpose() * correction * u.transpose();
    let translation = cb - rotation * ca;

    let mut ssd = 0.0;
    for i in 0..n {
        let pa = rotation * Vector3::new(a[i][0], a[i][1], a[i][2]) + translation;
        let diff = pa - Vector3::new(b[i][0], b[i][1], b[i][2]);
        ssd += diff.norm_squared();
    }
    let rmsd = (ssd / nf).sqrt();

    Ok(Superposition { rotation, translation, rmsd })
}
