//! Shrake-Rupley solvent-accessible surface area over the stored backbone
//! atoms (N, CA, C, O), 92 test points per atom, 1.4 Å probe.
//!
//! The test sphere is a fixed golden-spiral point set. A fixed grid is not
//! exactly rotation-invariant, so atoms are first moved into a canonical
//! frame derived from the structure itself (principal axes of the atom
//! cloud, signs fixed by coordinate skewness). Any rigid transform of the
//! input then lands in the same canonical pose and yields identical areas,
//! which downstream feature invariants rely on.

use nalgebra::{Matrix3, Vector3};

use crate::structure::{Point3, StructureModel};

pub const PROBE_RADIUS: f64 = 1.4;
pub const N_SPHERE_POINTS: usize = 92;

const RADIUS_N: f64 = 1.55;
const RADIUS_C: f64 = 1.70;
const RADIUS_O: f64 = 1.52;
#[allow(dead_code)]
pub const RADIUS_S: f64 = 1.80; // kept with the table; no sulfur backbone atoms exist

fn sphere_points() -> Vec<Point3> {
    // golden-spiral quasi-uniform points on the unit sphere
    let golden_angle = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
    (0..N_SPHERE_POINTS)
        .map(|k| {
            let z = 1.0 - 2.0 * (k as f64 + 0.5) / N_SPHERE_POINTS as f64;
            let r = (1.0 - z * z).sqrt();
            let theta = golden_angle * k as f64;
            [r * theta.cos(), r * theta.sin(), z]
        })
        .collect()
}

/// Atoms as (residue list index, position, vdW radius).
fn collect_atoms(model: &StructureModel) -> Vec<(usize, Point3, f64)> {
    let mut atoms = Vec::new();
    for (i, r) in model.residues.iter().enumerate() {
        atoms.push((i, r.ca, RADIUS_C)); // CA treated as carbon
        if let Some(n) = r.n {
            atoms.push((i, n, RADIUS_N));
        }
        if let Some(c) = r.c {
            atoms.push((i, c, RADIUS_C));
        }
        if let Some(o) = r.o {
            atoms.push((i, o, RADIUS_O));
        }
    }
    atoms
}

/// Rotate/translate positions into the canonical frame: centroid at the
/// origin, axes along the covariance eigenvectors (descending eigenvalue),
/// each axis sign chosen so the projected coordinates skew positive, third
/// axis completing a right-handed system.
fn canonicalize(points: &[Point3]) -> Vec<Point3> {
    let n = points.len();
    if n == 0 {
        return Vec::new();
    }
    let nf = n as f64;
    let mut c = Vector3::zeros();
    for p in points {
        c += Vector3::new(p[0], p[1], p[2]);
    }
    c /= nf;

    let mut cov = Matrix3::zeros();
    for p in points {
        let d = Vector3::new(p[0], p[1], p[2]) - c;
        cov += d * d.transpose();
    }
    cov /= nf;

    let eig = nalgebra::SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..3).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());

    let axis = |k: usize| -> Vector3<f64> {
        let mut v: Vector3<f64> = eig.eigenvectors.column(order[k]).into();
        let skew: f64 = points
            .iter()
            .map(|p| {
                let t = (Vector3::new(p[0], p[1], p[2]) - c).dot(&v);
                t * t * t
            })
            .sum();
        if skew < 0.0 {
            v = -v;
        }
        v
    };
    let e1 = axis(0);
    let e2 = axis(1);
    let e3 = e1.cross(&e2);

    points
        .iter()
        .map(|p| {
            let d = Vector3::new(p[0], p[1], p[2]) - c;
            [d.dot(&e1), d.dot(&e2), d.dot(&e3)]
        })
        .collect()
}

/// Per-residue solvent-accessible area in Å².
pub fn sasa_per_residue(model: &StructureModel) -> Vec<f64> {
    let atoms = collect_atoms(model);
    let positions: Vec<Point3> = atoms.iter().map(|a| a.1).collect();
    let canon = canonicalize(&positions);
    let sphere = sphere_points();

    let mut areas = vec![0.0; model.residues.len()];
    for (ai, &(res_idx, _, radius)) in atoms.iter().enumerate() {
        let center = canon[ai];
        let big_r = radius + PROBE_RADIUS;

        // neighbors whose probe-expanded spheres can intersect this one
        let neighbors: Vec<(Point3, f64)> = atoms
            .iter()
            .enumerate()
            .filter(|(bi, _)| *bi != ai)
            .filter_map(|(bi, &(_, _, r_b))| {
                let q = canon[bi];
                let reach = big_r + r_b + PROBE_RADIUS;
                let d2 = (q[0] - center[0]).powi(2) + (q[1] - center[1]).powi(2) + (q[2] - center[2]).powi(2);
                (d2 < reach * reach).then_some((q, r_b + PROBE_RADIUS))
            })
            .collect();

        let mut accessible = 0usize;
        'point: for s in &sphere {
            let p = [
                center[0] + big_r * s[0],
                center[1] + big_r * s[1],
                center[2] + big_r * s[2],
            ];
            for &(q, r_occ) in &neighbors {
                let d2 = (p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2);
                if d2 < r_occ * r_occ {
                    continue 'point;
                }
            }
            accessible += 1;
        }
        areas[res_idx] += 4.0 * std::f64::consts::PI * big_r * big_r * accessible as f64
            / N_SPHERE_POINTS as f64;
    }
    areas
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{AminoAcid, Residue, StructureModel};

    fn ca_model(coords: &[Point3]) -> StructureModel {
        let residues = coords
            .iter()
            .enumerate()
            .map(|(i, c)| Residue::ca_only(i as u32 + 1, AminoAcid::Gly, *c))
            .collect();
        StructureModel::new("m", "t", residues).unwrap()
    }

    #[test]
    fn isolated_atoms_get_the_full_sphere() {
        // far enough apart that nothing occludes: full 4*pi*(1.7+1.4)^2 each
        let m = ca_model(&[[0.0, 0.0, 0.0], [50.0, 0.0, 0.0], [0.0, 50.0, 0.0]]);
        let areas = sasa_per_residue(&m);
        let full = 4.0 * std::f64::consts::PI * (RADIUS_C + PROBE_RADIUS).powi(2);
        for a in areas {
            assert!((a - full).abs() < 1e-9, "area {a}, expected {full}");
        }
    }

    #[test]
    fn caged_atom_is_buried() {
        // a CA at the origin surrounded by a dense cage of close residues
        let mut coords = vec![[0.0, 0.0, 0.0]];
        for i in 0..26 {
            let (a, b, c) = (i % 3, (i / 3) % 3, i / 9);
            let v = [(a as f64 - 1.0) * 2.2, (b as f64 - 1.0) * 2.2, (c as f64 - 1.0) * 2.2];
            if v != [0.0, 0.0, 0.0] {
                coords.push(v);
            }
        }
        let m = ca_model(&coords);
        let areas = sasa_per_residue(&m);
        assert!(areas[0] < 1.0, "caged area {}", areas[0]);
    }

    #[test]
    fn translated_twins_get_equal_areas() {
        // two copies of the same dimer, 40 Å apart: residue 0 matches 2 and
        // 1 matches 3 (the 0/3 pair is a mirror image, which the discrete
        // sphere sampling only matches approximately)
        let m = ca_model(&[[0.0, 0.0, 0.0], [3.8, 0.0, 0.0], [40.0, 0.0, 0.0], [43.8, 0.0, 0.0]]);
        let areas = sasa_per_residue(&m);
        assert!((areas[0] - areas[2]).abs() < 1e-9);
        assert!((areas[1] - areas[3]).abs() < 1e-9);
        assert!((areas[0] - areas[1]).abs() < 8.0);
        // every dimer member loses area to its partner
        let isolated = 4.0 * std::f64::consts::PI * (1.70 + PROBE_RADIUS) * (1.70 + PROBE_RADIUS);
        for a in &areas {
            assert!(*a < isolated - 10.0, "area {a} not occluded");
        }
    }

    #[test]
    fn rigid_transform_leaves_areas_unchanged() {
        let coords: Vec<Point3> = (0..12)
            .map(|i| {
                let t = i as f64 * 0.9;
                [t.cos() * 5.0 + 0.3 * i as f64, t.sin() * 4.0, i as f64 * 1.7]
            })
            .collect();
        let m1 = ca_model(&coords);
        // rotate about z by 77 degrees, then translate
        let ang = 77.0_f64.to_radians();
        let moved: Vec<Point3> = coords
            .iter()
            .map(|p| {
                [
                    p[0] * ang.cos() - p[1] * ang.sin() + 11.0,
                    p[0] * ang.sin() + p[1] * ang.cos() - 3.0,
                    p[2] + 40.0,
                ]
            })
            .collect();
        let m2 = ca_model(&moved);
        let a1 = sasa_per_residue(&m1);
        let a2 = sasa_per_residue(&m2);
        for (x, y) in a1.iter().zip(a2.iter()) {
            assert!((x - y).abs() < 1e-9, "{x} vs {y}");
        }
    }
}
