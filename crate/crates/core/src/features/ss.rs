//! Backbone-geometry secondary structure assignment.
//!
//! Hydrogen bonds are detected with the Kabsch-Sander electrostatic energy
//! (amide H reconstructed from the previous residue's carbonyl); helices come
//! from consecutive i -> i+4 turn patterns, strands from bridge ladders.
//! Residues missing backbone atoms fall back to coil.

use std::collections::{HashMap, HashSet};

use crate::geometry::dist;
use crate::structure::{AminoAcid, Point3, Ss3, StructureModel};

/// 0.084 * 332 kcal/mol: the Kabsch-Sander dipole coupling constant.
const HB_ENERGY_FACTOR: f64 = 27.888;
/// Bond accepted when the energy is below this (kcal/mol).
const HB_ENERGY_CUTOFF: f64 = -0.5;
/// Donor/acceptor pairs farther apart than this (CA-CA) are not examined.
const HB_CA_CUTOFF: f64 = 9.0;
/// Atoms closer than this are treated as malformed input, not a bond.
const MIN_ATOM_SEPARATION: f64 = 0.5;

fn addp(a: Point3, b: Point3) -> Point3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn subp(a: Point3, b: Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn scale(a: Point3, s: f64) -> Point3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// All backbone hydrogen bonds as (donor seq_index, acceptor seq_index):
/// the N-H of the donor residue points at the C=O of the acceptor.
pub(crate) fn hydrogen_bonds(model: &StructureModel) -> HashSet<(u32, u32)> {
    let res = &model.residues;
    let by_seq: HashMap<u32, usize> = res.iter().enumerate().map(|(i, r)| (r.seq_index, i)).collect();

    // Amide H reconstruction: unit C=O direction of the sequence-adjacent
    // previous residue, added to N. Prolines have no amide H; chain starts
    // and gap starts have no defined previous carbonyl.
    let mut h_pos: Vec<Option<Point3>> = vec![None; res.len()];
    for (i, r) in res.iter().enumerate() {
        if r.aa == AminoAcid::Pro {
            continue;
        }
        let (Some(n), Some(prev_idx)) = (r.n, r.seq_index.checked_sub(1).and_then(|s| by_seq.get(&s))) else {
            continue;
        };
        let prev = &res[*prev_idx];
        let (Some(c_prev), Some(o_prev)) = (prev.c, prev.o) else { continue };
        let co = subp(c_prev, o_prev);
        let len = dist(c_prev, o_prev);
        if len < 1e-6 {
            continue;
        }
        h_pos[i] = Some(addp(n, scale(co, 1.0 / len)));
    }

    let mut bonds = HashSet::new();
    for (i, donor) in res.iter().enumerate() {
        let (Some(n), Some(h)) = (donor.n, h_pos[i]) else { continue };
        for (j, acceptor) in res.iter().enumerate() {
            if i == j {
                continue;
            }
            let ds = donor.seq_index;
            let as_ = acceptor.seq_index;
            if ds.abs_diff(as_) < 2 {
                continue;
            }
            if dist(donor.ca, acceptor.ca) >= HB_CA_CUTOFF {
                continue;
            }
            let (Some(c), Some(o)) = (acceptor.c, acceptor.o) else { continue };
            let d_on = dist(o, n);
            let d_ch = dist(c, h);
            let d_oh = dist(o, h);
            let d_cn = dist(c, n);
            if d_on.min(d_ch).min(d_oh).min(d_cn) < MIN_ATOM_SEPARATION {
                continue;
            }
            let energy = HB_ENERGY_FACTOR * (1.0 / d_on + 1.0 / d_ch - 1.0 / d_oh - 1.0 / d_cn);
            if energy < HB_ENERGY_CUTOFF {
                bonds.insert((ds, as_));
            }
        }
    }
    bonds
}

/// Turn the bond set into 3-state assignments for the given residue
/// positions. Bond tuples are (donor, acceptor).
pub(crate) fn states_from_bonds(positions: &[u32], bonds: &HashSet<(u32, u32)>) -> Vec<Ss3> {
    // 4-turn at s: the NH of s+4 bonds back to the CO of s.
    let turn4 = |s: u32| bonds.contains(&(s + 4, s));

    let mut helix: HashSet<u32> = HashSet::new();
    for &s in positions {
        // two consecutive 4-turns (at s-1 and s) make residues s..s+3 helical
        if s >= 1 && turn4(s - 1) && turn4(s) {
            for k in 0..4 {
                helix.insert(s + k);
            }
        }
    }

    // Kabsch-Sander bridge patterns; hb(a, b) below is "CO of a accepts from
    // NH of b", matching the classic notation.
    let hb = |a: i64, b: i64| -> bool {
        if a < 0 || b < 0 {
            return false;
        }
        bonds.contains(&(b as u32, a as u32))
    };
    let mut bridges: Vec<(u32, u32, bool)> = Vec::new(); // (i, j, parallel?)
    for &i in positions {
        for &j in positions {
            if j < i + 3 {
                continue;
            }
            let (ii, jj) = (i as i64, j as i64);
            let parallel = (hb(ii - 1, jj) && hb(jj, ii + 1)) || (hb(jj - 1, ii) && hb(ii, jj + 1));
            let antiparallel = (hb(ii, jj) && hb(jj, ii)) || (hb(ii - 1, jj + 1) && hb(jj - 1, ii + 1));
            if parallel {
                bridges.push((i, j, true));
            }
            if antiparallel {
                bridges.push((i, j, false));
            }
        }
    }

    // A lone bridge is not a strand: require a ladder, i.e. an adjacent
    // bridge of the same type one step along both strands.
    let bridge_set: HashSet<(u32, u32, bool)> = bridges.iter().copied().collect();
    let mut strand: HashSet<u32> = HashSet::new();
    for &(i, j, par) in &bridges {
        let laddered = if par {
            bridge_set.contains(&(i + 1, j + 1, true))
                || (i >= 1 && j >= 1 && bridge_set.contains(&(i - 1, j - 1, true)))
        } else {
            (j >= 1 && bridge_set.contains(&(i + 1, j - 1, false)))
                || (i >= 1 && bridge_set.contains(&(i - 1, j + 1, false)))
        };
        if laddered {
            strand.insert(i);
            strand.insert(j);
        }
    }

    positions
        .iter()
        .map(|s| {
            if helix.contains(s) {
                Ss3::H
            } else if strand.contains(s) {
                Ss3::E
            } else {
                Ss3::C
            }
        })
        .collect()
}

/// Per-residue 3-state secondary structure for a model. Residues without the
/// backbone atoms needed for hydrogen bonding simply come out as coil.
pub fn assign_ss(model: &StructureModel) -> Vec<Ss3> {
    let positions: Vec<u32> = model.residues.iter().map(|r| r.seq_index).collect();
    let bonds = hydrogen_bonds(model);
    states_from_bonds(&positions, &bonds)
}
