//! Helpers shared by the integration suites: hand-rolled rigid transforms,
//! independent re-implementations used as oracles, and rank statistics.
#![allow(dead_code)]

use rfqa_core::forest::rng::Rng;
use rfqa_core::geometry::kabsch;
use rfqa_core::structure::{Point3, Residue, StructureModel};

/// The standard GDT distance cutoffs, restated here so the oracle does not
/// borrow them from the implementation under test.
pub const CUTOFFS: [f64; 4] = [1.0, 2.0, 4.0, 8.0];

pub type Mat3 = [[f64; 3]; 3];

/// Rodrigues rotation matrix from an axis (normalized here) and angle.
pub fn rotation(axis: Point3, angle: f64) -> Mat3 {
    let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let (x, y, z) = (axis[0] / n, axis[1] / n, axis[2] / n);
    let (s, c) = angle.sin_cos();
    let t = 1.0 - c;
    [
        [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
        [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
        [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
    ]
}

pub fn random_rotation(rng: &mut Rng) -> Mat3 {
    let axis = [rng.next_gaussian(), rng.next_gaussian(), rng.next_gaussian()];
    let angle = rng.next_f64() * 2.0 * std::f64::consts::PI;
    rotation(axis, angle)
}

pub fn rotate(m: &Mat3, p: Point3) -> Point3 {
    [
        m[0][0] * p[0] + m[0][1] * p[1] + m[0][2] * p[2],
        m[1][0] * p[0] + m[1][1] * p[1] + m[1][2] * p[2],
        m[2][0] * p[0] + m[2][1] * p[1] + m[2][2] * p[2],
    ]
}

pub fn transform_point(m: &Mat3, t: Point3, p: Point3) -> Point3 {
    let r = rotate(m, p);
    [r[0] + t[0], r[1] + t[1], r[2] + t[2]]
}

/// Apply a rigid transform to every atom of a model.
pub fn transform_model(model: &StructureModel, rot: &Mat3, t: Point3, id: &str) -> StructureModel {
    let residues = model
        .residues
        .iter()
        .map(|r| Residue {
            seq_index: r.seq_index,
            aa: r.aa,
            ca: transform_point(rot, t, r.ca),
            n: r.n.map(|p| transform_point(rot, t, p)),
            c: r.c.map(|p| transform_point(rot, t, p)),
            o: r.o.map(|p| transform_point(rot, t, p)),
        })
        .collect();
    StructureModel::new(id, model.target_id.clone(), residues).unwrap()
}

fn dist(a: Point3, b: Point3) -> f64 {
    let d = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

/// Independent re-implementation of the documented GDT search, for use as
/// an oracle: fragment seeds of length 3/5/7/full stepped by 4, each seed
/// superposition refined per cutoff by re-fitting on in-cutoff residues
/// until the membership set repeats (max 20 rounds), best counts taken over
/// every candidate superposition at all four cutoffs.
pub fn naive_gdt_counts(model: &StructureModel, reference: &StructureModel) -> [usize; 4] {
    // pair residues by sequence index
    let mut xa: Vec<Point3> = Vec::new();
    let mut xb: Vec<Point3> = Vec::new();
    for ra in &model.residues {
        if let Some(pos) = reference.position_of(ra.seq_index) {
            xa.push(ra.ca);
            xb.push(reference.residues[pos].ca);
        }
    }
    let m = xa.len();
    assert!(m >= 3, "oracle needs 3 shared residues");

    let mut starts: Vec<(usize, usize)> = Vec::new();
    for len in [3usize, 5, 7] {
        if len <= m {
            for s in (0..=m - len).step_by(4) {
                starts.push((s, len));
            }
        }
    }
    starts.push((0, m));

    let score_candidate = |members: &[usize]| -> Option<Vec<f64>> {
        if members.len() < 3 {
            return None;
        }
        let pa: Vec<Point3> = members.iter().map(|&i| xa[i]).collect();
        let pb: Vec<Point3> = members.iter().map(|&i| xb[i]).collect();
        let sup = kabsch(&pa, &pb).ok()?;
        Some(xa.iter().zip(&xb).map(|(a, b)| dist(sup.apply(*a), *b)).collect())
    };

    let mut best = [0usize; 4];
    let mut absorb = |dists: &[f64]| {
        for (k, cutoff) in CUTOFFS.iter().enumerate() {
            let n = dists.iter().filter(|d| **d <= *cutoff).count();
            best[k] = best[k].max(n);
        }
    };

    for (s, len) in starts {
        let seed_members: Vec<usize> = (s..s + len).collect();
        let Some(seed_dists) = score_candidate(&seed_members) else { continue };
        absorb(&seed_dists);
        for cutoff in CUTOFFS {
            let mut members: Vec<usize> = (0..m).filter(|&i| seed_dists[i] <= cutoff).collect();
            for _ in 0..20 {
                let Some(dists) = score_candidate(&members) else { break };
                absorb(&dists);
                let next: Vec<usize> = (0..m).filter(|&i| dists[i] <= cutoff).collect();
                if next == members {
                    break;
                }
                members = next;
            }
        }
    }
    best
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let ra = ranks(a);
    let rb = ranks(b);
    let n = ra.len() as f64;
    let ma = ra.iter().sum::<f64>() / n;
    let mb = rb.iter().sum::<f64>() / n;
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in ra.iter().zip(&rb) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap());
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            out[k] = avg;
        }
        i = j + 1;
    }
    out
}

/// Exhaustive best-variance-reduction split with the same tie-break order
/// the trainer documents: scan features ascending, thresholds ascending,
/// replace only on strictly greater score.
pub fn brute_force_best_split(
    x: &[Vec<f64>],
    y: &[f64],
    min_leaf: usize,
) -> Option<(usize, f64)> {
    let n = x.len();
    let n_features = x[0].len();
    let total: f64 = y.iter().sum();
    let parent_score = total * total / n as f64;
    let mut best: Option<(usize, f64, f64)> = None;

    for f in 0..n_features {
        let mut values: Vec<f64> = x.iter().map(|row| row[f]).collect();
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        values.dedup();
        for w in values.windows(2) {
            let (a, b) = (w[0], w[1]);
            let mut threshold = a + (b - a) * 0.5;
            if threshold >= b {
                threshold = a;
            }
            let mut nl = 0usize;
            let mut sl = 0.0;
            for (row, label) in x.iter().zip(y) {
                if row[f] <= threshold {
                    nl += 1;
                    sl += label;
                }
            }
            let nr = n - nl;
            if nl < min_leaf || nr < min_leaf {
                continue;
            }
            let sr = total - sl;
            let score = sl * sl / nl as f64 + sr * sr / nr as f64;
            if best.is_none_or(|(_, _, s)| score > s) {
                best = Some((f, threshold, score));
            }
        }
    }
    best.filter(|(_, _, s)| *s > parent_score).map(|(f, t, _)| (f, t))
}

/// A dataset on an integer grid: features in {0..8}, labels k/8. All split
/// statistics are then exact in f64, so the oracle and the trainer agree
/// bitwise.
pub fn integer_grid_dataset(rng: &mut Rng, max_n: usize, max_f: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let n = 4 + rng.gen_range(max_n.saturating_sub(3));
    let p = 1 + rng.gen_range(max_f);
    let x: Vec<Vec<f64>> =
        (0..n).map(|_| (0..p).map(|_| rng.gen_range(9) as f64).collect()).collect();
    let y: Vec<f64> = (0..n).map(|_| rng.gen_range(9) as f64 / 8.0).collect();
    (x, y)
}
