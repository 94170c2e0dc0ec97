//! Synthetic structure generators for tests and benchmarks: ideal backbone
//! chains from torsion angles, self-avoiding CA traces, and noisy decoys.

use crate::features::{assign_ss, sasa_per_residue};
use crate::forest::rng::Rng;
use crate::structure::{AminoAcid, Point3, PredictedAnnotations, Residue, StructureModel};

// canonical backbone geometry
const LEN_N_CA: f64 = 1.458;
const LEN_CA_C: f64 = 1.525;
const LEN_C_N: f64 = 1.329;
const LEN_C_O: f64 = 1.231;
const ANG_N_CA_C: f64 = 111.2;
const ANG_CA_C_N: f64 = 116.2;
const ANG_C_N_CA: f64 = 121.7;
const ANG_CA_C_O: f64 = 120.8;
const OMEGA: f64 = 180.0;

const CA_STEP: f64 = 3.8;
const MIN_NONADJACENT: f64 = 4.0;

fn sub(a: Point3, b: Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn add(a: Point3, b: Point3) -> Point3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn scale(a: Point3, s: f64) -> Point3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn dot(a: Point3, b: Point3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: Point3, b: Point3) -> Point3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm(a: Point3) -> f64 {
    dot(a, a).sqrt()
}

fn unit(a: Point3) -> Point3 {
    scale(a, 1.0 / norm(a))
}

/// Dihedral angle A-B-C-D in degrees, IUPAC sign convention (cis = 0).
pub fn torsion(a: Point3, b: Point3, c: Point3, d: Point3) -> f64 {
    let b1 = sub(b, a);
    let b2 = sub(c, b);
    let b3 = sub(d, c);
    let c23 = cross(b2, b3);
    let c12 = cross(b1, b2);
    let y = norm(b2) * dot(b1, c23);
    let x = dot(c12, c23);
    y.atan2(x).to_degrees()
}

/// Planar angle A-B-C in degrees.
pub fn bond_angle(a: Point3, b: Point3, c: Point3) -> f64 {
    let u = unit(sub(a, b));
    let v = unit(sub(c, b));
    dot(u, v).clamp(-1.0, 1.0).acos().to_degrees()
}

/// Place D so that |CD| = length, angle(B,C,D) = angle_deg and
/// torsion(A,B,C,D) = torsion_deg.
fn place_atom(a: Point3, b: Point3, c: Point3, length: f64, angle_deg: f64, torsion_deg: f64) -> Point3 {
    let theta = angle_deg.to_radians();
    let phi = torsion_deg.to_radians();
    let bc = unit(sub(c, b));
    let n = unit(cross(sub(b, a), bc));
    let m = cross(n, bc);
    let d_local = [
        -length * theta.cos(),
        length * theta.sin() * phi.cos(),
        length * theta.sin() * phi.sin(),
    ];
    add(c, add(scale(bc, d_local[0]), add(scale(m, d_local[1]), scale(n, d_local[2]))))
}

/// Full-backbone chain built from per-residue (φ, ψ) in degrees with ideal
/// bond geometry and ω = 180°. φ of the first residue and ψ of the last
/// only orient terminal atoms. Residues are numbered from 1.
pub fn backbone_chain(seq: &[AminoAcid], phi_psi: &[(f64, f64)], model_id: &str) -> StructureModel {
    assert_eq!(seq.len(), phi_psi.len(), "one (phi, psi) pair per residue");
    assert!(seq.len() >= 3, "chains shorter than 3 residues are not valid models");
    let n_res = seq.len();

    let mut n_pos = vec![[0.0; 3]; n_res];
    let mut ca_pos = vec![[0.0; 3]; n_res];
    let mut c_pos = vec![[0.0; 3]; n_res];

    n_pos[0] = [0.0, 0.0, 0.0];
    ca_pos[0] = [LEN_N_CA, 0.0, 0.0];
    let ang = (180.0 - ANG_N_CA_C).to_radians();
    c_pos[0] = add(ca_pos[0], [LEN_CA_C * ang.cos(), LEN_CA_C * ang.sin(), 0.0]);

    for i in 1..n_res {
        let psi_prev = phi_psi[i - 1].1;
        n_pos[i] = place_atom(n_pos[i - 1], ca_pos[i - 1], c_pos[i - 1], LEN_C_N, ANG_CA_C_N, psi_prev);
        ca_pos[i] = place_atom(ca_pos[i - 1], c_pos[i - 1], n_pos[i], LEN_N_CA, ANG_C_N_CA, OMEGA);
        c_pos[i] = place_atom(c_pos[i - 1], n_pos[i], ca_pos[i], LEN_CA_C, ANG_N_CA_C, phi_psi[i].0);
    }

    let residues: Vec<Residue> = (0..n_res)
        .map(|i| {
            let o = place_atom(n_pos[i], ca_pos[i], c_pos[i], LEN_C_O, ANG_CA_C_O, phi_psi[i].1 + 180.0);
            Residue {
                seq_index: (i + 1) as u32,
                aa: seq[i],
                ca: ca_pos[i],
                n: Some(n_pos[i]),
                c: Some(c_pos[i]),
                o: Some(o),
            }
        })
        .collect();
    StructureModel::new(model_id, "synthetic", residues).expect("generated chain is valid")
}

/// The 20 amino acids cycled to length n, as a sequence string.
pub fn cycled_sequence(n: usize) -> String {
    "ACDEFGHIKLMNPQRSTVWY".chars().cycle().take(n).collect()
}

pub fn random_sequence(n: usize, seed: u64) -> Vec<AminoAcid> {
    let mut rng = Rng::from_seed(seed);
    (0..n).map(|_| AminoAcid::ALL[rng.gen_range(AminoAcid::ALL.len())]).collect()
}

fn gaussian_vec(rng: &mut Rng) -> Point3 {
    [rng.next_gaussian(), rng.next_gaussian(), rng.next_gaussian()]
}

/// Self-avoiding CA-only random walk: 3.8 Å steps with a persistent
/// direction, every non-adjacent pair kept at least 4 Å apart. Residue i
/// carries the i-th letter of `cycled_sequence`.
pub fn synthetic_native(n: usize, seed: u64) -> StructureModel {
    assert!(n >= 3);
    let mut rng = Rng::from_seed(seed);
    let aas = crate::structure::sequence_to_aas(&cycled_sequence(n)).unwrap();

    let mut positions: Vec<Point3> = vec![[0.0, 0.0, 0.0]];
    let mut dir: Point3 = [1.0, 0.0, 0.0];
    while positions.len() < n {
        let mut placed = false;
        for attempt in 0..10_000 {
            // drift the previous direction; fall back to fully random kicks
            // if the chain has painted itself into a corner
            let kick = gaussian_vec(&mut rng);
            let proposal = if attempt < 30 {
                unit(add(dir, scale(kick, 0.5)))
            } else {
                unit(kick)
            };
            let candidate = add(*positions.last().unwrap(), scale(proposal, CA_STEP));
            let clash = positions[..positions.len() - 1]
                .iter()
                .any(|p| norm(sub(candidate, *p)) < MIN_NONADJACENT);
            if !clash {
                positions.push(candidate);
                dir = proposal;
                placed = true;
                break;
            }
        }
        assert!(placed, "self-avoiding walk failed to extend at length {}", positions.len());
    }

    let residues = positions
        .into_iter()
        .enumerate()
        .map(|(i, ca)| Residue::ca_only((i + 1) as u32, aas[i], ca))
        .collect();
    StructureModel::new("native", "synthetic", residues).expect("walk produces a valid model")
}

/// Copy of `native` with every atom coordinate displaced by N(0, sigma²)
/// noise. sigma = 0 returns an exact copy under a new id.
pub fn noisy_decoy(native: &StructureModel, sigma: f64, seed: u64, model_id: &str) -> StructureModel {
    let mut rng = Rng::from_seed(seed);
    let mut jitter = |p: Point3| -> Point3 {
        let g = gaussian_vec(&mut rng);
        add(p, scale(g, sigma))
    };
    let residues = native
        .residues
        .iter()
        .map(|r| Residue {
            seq_index: r.seq_index,
            aa: r.aa,
            ca: jitter(r.ca),
            n: r.n.map(&mut jitter),
            c: r.c.map(&mut jitter),
            o: r.o.map(&mut jitter),
        })
        .collect();
    StructureModel::new(model_id, native.target_id.clone(), residues)
        .expect("decoy keeps the native's residue numbering")
}

/// Self-consistent predictions: the model's own secondary structure and
/// relative solvent accessibility, with unresolved sequence positions
/// filled with coil / 0.25. Annotation length equals the model's last
/// residue index.
pub fn annotations_from_model(model: &StructureModel) -> PredictedAnnotations {
    let len = model.residues.last().unwrap().seq_index as usize;
    let ss = assign_ss(model);
    let areas = sasa_per_residue(model);
    let mut ss_pred = vec![crate::structure::Ss3::C; len];
    let mut sa_pred = vec![0.25; len];
    for (i, r) in model.residues.iter().enumerate() {
        let slot = (r.seq_index - 1) as usize;
        ss_pred[slot] = ss[i];
        sa_pred[slot] = (areas[i] / r.aa.max_area()).clamp(0.0, 1.0);
    }
    PredictedAnnotations { ss_pred, sa_pred }
}
