//! Feature extraction: model-derived annotations (secondary structure,
//! surface area) and the fixed 313-value per-residue feature vector.

pub mod dataset;
mod sasa;
mod ss;

pub use sasa::{sasa_per_residue, N_SPHERE_POINTS, PROBE_RADIUS};
pub use ss::assign_ss;

use crate::error::{Error, Result};
use crate::geometry::dist;
use crate::structure::{PredictedAnnotations, Ss3, StructureModel, NUM_AMINO_ACIDS};

/// Identifies the feature vector layout below. Persisted models carry this
/// string and refuse vectors built under any other layout.
pub const FEATURE_LAYOUT_VERSION: &str = "rfqa-313-v1";

/// Sliding window size for the local features (7 on each side of the center).
pub const WINDOW: usize = 15;
const HALF_WINDOW: i64 = (WINDOW as i64 - 1) / 2;

/// A residue counts as exposed when its relative accessibility exceeds this.
pub const EXPOSED_RSA_THRESHOLD: f64 = 0.25;

/// Residue spacing of the fully extended reference chain (Å).
pub const EXTENDED_SPACING: f64 = 3.8;

pub const NUM_ONE_HOT: usize = WINDOW * NUM_AMINO_ACIDS; // 300
pub const NUM_FRAGMENT_FEATURES: usize = 6;
pub const NUM_GLOBAL_FEATURES: usize = 7;
pub const NUM_FEATURES: usize = NUM_ONE_HOT + NUM_FRAGMENT_FEATURES + NUM_GLOBAL_FEATURES; // 313

/// Structure-derived annotations for one model.
#[derive(Debug, Clone)]
pub struct ModelAnnotations {
    pub ss_model: Vec<Ss3>,
    pub sasa: Vec<f64>,
    /// Relative accessibility: sasa / max_area(aa), clamped to [0,1].
    pub rsa: Vec<f64>,
}

pub fn annotate_model(model: &StructureModel) -> ModelAnnotations {
    let ss_model = assign_ss(model);
    let sasa = sasa_per_residue(model);
    let rsa = model
        .residues
        .iter()
        .zip(sasa.iter())
        .map(|(r, a)| (a / r.aa.max_area()).clamp(0.0, 1.0))
        .collect();
    ModelAnnotations { ss_model, sasa, rsa }
}

/// The whole-model feature block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlobalFeatures {
    /// Fraction of residues whose model SS disagrees with the predicted SS.
    pub ss_diff: f64,
    /// Mean |model rsa - predicted rsa|.
    pub sa_diff: f64,
    /// Mean pairwise CA distance over the mean for the extended chain.
    pub euclid_score: f64,
    /// Mismatched predicted helix/strand residues over predicted helix/strand count.
    pub ss_penalty: f64,
    /// Exposed nonpolar area over total exposed area.
    pub surface_polar: f64,
    /// Hydrophobicity-weighted exposed area over total area.
    pub weighted_exposed: f64,
    /// Total area over the theoretical maximum.
    pub total_surface: f64,
}

impl GlobalFeatures {
    pub fn as_array(&self) -> [f64; NUM_GLOBAL_FEATURES] {
        [
            self.ss_diff,
            self.sa_diff,
            self.euclid_score,
            self.ss_penalty,
            self.surface_polar,
            self.weighted_exposed,
            self.total_surface,
        ]
    }
}

/// Fragment-level scores share the global formulas, restricted to a residue
/// subset; this is the common carrier.
struct SubsetScores {
    ss_diff: f64,
    euclid_score: f64,
    ss_penalty: f64,
    surface_polar: f64,
    weighted_exposed: f64,
    total_surface: f64,
}

/// Kyte-Doolittle hydropathy, min-max normalized to [0,1].
fn hydro_weight(aa: crate::structure::AminoAcid) -> f64 {
    (aa.kyte_doolittle() + 4.5) / 9.0
}

/// Reusable per-model extraction state: the model annotations and global
/// features are computed once, then each residue's window vector is cheap.
pub struct FeatureContext<'a> {
    model: &'a StructureModel,
    ann: &'a PredictedAnnotations,
    model_ann: ModelAnnotations,
    global: GlobalFeatures,
}

impl<'a> FeatureContext<'a> {
    pub fn new(model: &'a StructureModel, ann: &'a PredictedAnnotations) -> Result<FeatureContext<'a>> {
        if ann.ss_pred.len() != ann.sa_pred.len() {
            return Err(Error::AnnotationLength {
                field: "solvent accessibility",
                found: ann.sa_pred.len(),
                expected: ann.ss_pred.len(),
            });
        }
        if let Some(r) = model.residues.last() {
            if r.seq_index as usize > ann.len() {
                return Err(Error::ResidueOutOfRange {
                    model: model.model_id.clone(),
                    seq_index: r.seq_index,
                    len: ann.len(),
                });
            }
        }
        let model_ann = annotate_model(model);
        let mut ctx = FeatureContext {
            model,
            ann,
            model_ann,
            global: GlobalFeatures {
                ss_diff: 0.0,
                sa_diff: 0.0,
                euclid_score: 0.0,
                ss_penalty: 0.0,
                surface_polar: 0.0,
                weighted_exposed: 0.0,
                total_surface: 0.0,
            },
        };
        let all: Vec<usize> = (0..model.residues.len()).collect();
        let s = ctx.subset_scores(&all);
        let sa_diff = {
            let mut sum = 0.0;
            for (i, r) in model.residues.iter().enumerate() {
                let pred = ctx.ann.sa_pred[r.seq_index as usize - 1];
                sum += (ctx.model_ann.rsa[i] - pred).abs();
            }
            sum / model.residues.len() as f64
        };
        ctx.global = GlobalFeatures {
            ss_diff: s.ss_diff,
            sa_diff,
            euclid_score: s.euclid_score,
            ss_penalty: s.ss_penalty,
            surface_polar: s.surface_polar,
            weighted_exposed: s.weighted_exposed,
            total_surface: s.total_surface,
        };
        Ok(ctx)
    }

    pub fn global(&self) -> &GlobalFeatures {
        &self.global
    }

    pub fn model_annotations(&self) -> &ModelAnnotations {
        &self.model_ann
    }

    /// The shared score formulas over a subset of residue list indices.
    fn subset_scores(&self, idxs: &[usize]) -> SubsetScores {
        let res = &self.model.residues;
        let ma = &self.model_ann;

        let mut ss_mismatch = 0usize;
        let mut pred_he = 0usize;
        let mut penalty_hits = 0usize;
        let mut exposed_area = 0.0;
        let mut exposed_nonpolar_area = 0.0;
        let mut weighted_sum = 0.0;
        let mut area_sum = 0.0;
        let mut max_area_sum = 0.0;

        for &i in idxs {
            let r = &res[i];
            let pred = self.ann.ss_pred[r.seq_index as usize - 1];
            let got = ma.ss_model[i];
            if pred != got {
                ss_mismatch += 1;
            }
            if pred == Ss3::H || pred == Ss3::E {
                pred_he += 1;
                if pred != got {
                    penalty_hits += 1;
                }
            }
            let area = ma.sasa[i];
            area_sum += area;
            max_area_sum += r.aa.max_area();
            if ma.rsa[i] > EXPOSED_RSA_THRESHOLD {
                exposed_area += area;
                if r.aa.is_nonpolar() {
                    exposed_nonpolar_area += area;
                }
                weighted_sum += area * hydro_weight(r.aa);
            }
        }

        let mut dist_sum = 0.0;
        let mut ext_sum = 0.0;
        for (a, &i) in idxs.iter().enumerate() {
            for &j in idxs.iter().skip(a + 1) {
                dist_sum += dist(res[i].ca, res[j].ca);
                ext_sum += EXTENDED_SPACING * res[i].seq_index.abs_diff(res[j].seq_index) as f64;
            }
        }

        let n = idxs.len().max(1) as f64;
        SubsetScores {
            ss_diff: ss_mismatch as f64 / n,
            // a single-residue subset has no pairs; by convention it matches
            // the extended reference exactly
            euclid_score: if ext_sum > 0.0 { dist_sum / ext_sum } else { 1.0 },
            ss_penalty: if pred_he > 0 { penalty_hits as f64 / pred_he as f64 } else { 0.0 },
            surface_polar: if exposed_area > 0.0 { exposed_nonpolar_area / exposed_area } else { 0.0 },
            weighted_exposed: if area_sum > 0.0 { weighted_sum / area_sum } else { 0.0 },
            total_surface: if max_area_sum > 0.0 { (area_sum / max_area_sum).clamp(0.0, 1.0) } else { 0.0 },
        }
    }

    /// The full 313-value vector for one residue: window one-hot block,
    /// fragment scores over the in-window residues, then the global block.
    pub fn window_features(&self, center_seq: u32) -> Result<Vec<f64>> {
        let Some(_) = self.model.position_of(center_seq) else {
            return Err(Error::ResidueNotInModel(center_seq));
        };
        let mut v = vec![0.0; NUM_FEATURES];

        let mut window_idxs = Vec::with_capacity(WINDOW);
        for offset in -HALF_WINDOW..=HALF_WINDOW {
            let seq = center_seq as i64 + offset;
            if seq < 1 {
                continue; // padding position, one-hot stays zero
            }
            if let Some(idx) = self.model.position_of(seq as u32) {
                let slot = (offset + HALF_WINDOW) as usize;
                v[slot * NUM_AMINO_ACIDS + self.model.residues[idx].aa.index()] = 1.0;
                window_idxs.push(idx);
            }
        }

        let frag = self.subset_scores(&window_idxs);
        v[NUM_ONE_HOT] = frag.ss_diff;
        v[NUM_ONE_HOT + 1] = frag.euclid_score;
        v[NUM_ONE_HOT + 2] = frag.ss_penalty;
        v[NUM_ONE_HOT + 3] = frag.surface_polar;
        v[NUM_ONE_HOT + 4] = frag.weighted_exposed;
        v[NUM_ONE_HOT + 5] = frag.total_surface;

        let g = self.global.as_array();
        v[NUM_ONE_HOT + NUM_FRAGMENT_FEATURES..NUM_FEATURES].copy_from_slice(&g);
        Ok(v)
    }
}

/// One-shot global feature computation.
pub fn global_features(model: &StructureModel, ann: &PredictedAnnotations) -> Result<GlobalFeatures> {
    Ok(*FeatureContext::new(model, ann)?.global())
}

/// One-shot window vector; building a [`FeatureContext`] is cheaper when
/// extracting many residues of the same model.
pub fn window_features(model: &StructureModel, ann: &PredictedAnnotations, center_seq: u32) -> Result<Vec<f64>> {
    FeatureContext::new(model, ann)?.window_features(center_seq)
}

/// Column names for the exported feature matrix, in vector order.
pub fn feature_names() -> Vec<String> {
    let mut names = Vec::with_capacity(NUM_FEATURES);
    for pos in 0..WINDOW {
        for aa in crate::structure::AminoAcid::ALL {
            names.push(format!("aa{}_{}", pos, aa.one_letter()));
        }
    }
    for f in ["ss_diff", "euclid", "ss_penalty", "surface_polar", "weighted_exposed", "total_surface"] {
        names.push(format!("frag_{f}"));
    }
    for f in [
        "ss_diff",
        "sa_diff",
        "euclid",
        "ss_penalty",
        "surface_polar",
        "weighted_exposed",
        "total_surface",
    ] {
        names.push(format!("glob_{f}"));
    }
    names
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::structure::{AminoAcid, Point3, Residue};

    /// Five CA-only residues on the x axis, 10 Å apart: far enough that no
    /// atom occludes any other, so every area is the full carbon sphere.
    fn fixture() -> (StructureModel, PredictedAnnotations) {
        let aas = [AminoAcid::Gly, AminoAcid::Lys, AminoAcid::Ala, AminoAcid::Asp, AminoAcid::Leu];
        let residues = aas
            .iter()
            .enumerate()
            .map(|(i, aa)| Residue::ca_only(i as u32 + 1, *aa, [i as f64 * 10.0, 0.0, 0.0]))
            .collect();
        let model = StructureModel::new("fix", "t", residues).unwrap();
        let ann = PredictedAnnotations {
            ss_pred: vec![Ss3::H, Ss3::H, Ss3::E, Ss3::E, Ss3::C],
            sa_pred: vec![0.0; 5],
        };
        (model, ann)
    }

    #[test]
    fn hand_computed_global_features() {
        let (model, ann) = fixture();
        let g = global_features(&model, &ann).unwrap();
        let a0 = 4.0 * std::f64::consts::PI * (1.7 + 1.4_f64).powi(2);

        // model SS is all coil (CA only), prediction H H E E C: 4 mismatches
        assert_eq!(g.ss_diff, 4.0 / 5.0);
        // all four predicted H/E residues mismatch
        assert_eq!(g.ss_penalty, 1.0);
        // pairwise distances 10*|i-j| vs extended 3.8*|i-j|
        assert!((g.euclid_score - 10.0 / 3.8).abs() < 1e-12);
        // every residue fully exposed; nonpolar G, A, L of five equal areas
        assert!((g.surface_polar - 3.0 / 5.0).abs() < 1e-12);
        // mean hydro weight of G K A D L
        let want_we = ((-0.4 + 4.5) + (-3.9 + 4.5) + (1.8 + 4.5) + (-3.5 + 4.5) + (3.8 + 4.5)) / (9.0 * 5.0);
        assert!((g.weighted_exposed - want_we).abs() < 1e-12);
        // five equal spheres over the summed maxima
        let want_ts = 5.0 * a0 / (104.0 + 236.0 + 129.0 + 193.0 + 201.0);
        assert!((g.total_surface - want_ts).abs() < 1e-12);
        // rsa: G clamps to 1.0, the rest are a0/max
        let rsa = [1.0_f64, a0 / 236.0, a0 / 129.0, a0 / 193.0, a0 / 201.0];
        let want_sad = rsa.iter().sum::<f64>() / 5.0; // sa_pred is all zero
        assert!((g.sa_diff - want_sad).abs() < 1e-12);
    }

    #[test]
    fn window_one_hot_layout() {
        let (model, ann) = fixture();
        let ctx = FeatureContext::new(&model, &ann).unwrap();
        let v = ctx.window_features(3).unwrap();
        assert_eq!(v.len(), NUM_FEATURES);
        // residues 1..5 sit at window slots 5..9 around center 3
        let expected_hot = [
            5 * 20 + AminoAcid::Gly.index(),
            6 * 20 + AminoAcid::Lys.index(),
            7 * 20 + AminoAcid::Ala.index(),
            8 * 20 + AminoAcid::Asp.index(),
            9 * 20 + AminoAcid::Leu.index(),
        ];
        for (i, x) in v[..NUM_ONE_HOT].iter().enumerate() {
            let want = if expected_hot.contains(&i) { 1.0 } else { 0.0 };
            assert_eq!(*x, want, "one-hot index {i}");
        }
        // the full model fits in the window, so fragment scores must equal
        // the global ones (which do not include sa_diff)
        let g = ctx.global().as_array();
        assert_eq!(v[NUM_ONE_HOT], g[0]); // ss_diff
        assert_eq!(v[NUM_ONE_HOT + 1], g[2]); // euclid
        assert_eq!(v[NUM_ONE_HOT + 2], g[3]); // ss_penalty
        assert_eq!(v[NUM_ONE_HOT + 3], g[4]);
        assert_eq!(v[NUM_ONE_HOT + 4], g[5]);
        assert_eq!(v[NUM_ONE_HOT + 5], g[6]);
        assert_eq!(&v[NUM_ONE_HOT + NUM_FRAGMENT_FEATURES..], &g);
    }

    #[test]
    fn terminal_window_pads_with_zeros() {
        let (model, ann) = fixture();
        let ctx = FeatureContext::new(&model, &ann).unwrap();
        let v = ctx.window_features(1).unwrap();
        // slots 0..6 (offsets -7..-1) are before the chain start
        for slot in 0..7 {
            for k in 0..20 {
                assert_eq!(v[slot * 20 + k], 0.0);
            }
        }
        assert_eq!(v[7 * 20 + AminoAcid::Gly.index()], 1.0);
    }

    #[test]
    fn straight_fragment_euclid_is_one() {
        let coords: Vec<Point3> = (0..20).map(|i| [i as f64 * 3.8, 0.0, 0.0]).collect();
        let residues: Vec<Residue> = coords
            .iter()
            .enumerate()
            .map(|(i, c)| Residue::ca_only(i as u32 + 1, AminoAcid::Ala, *c))
            .collect();
        let model = StructureModel::new("ext", "t", residues).unwrap();
        let ann = PredictedAnnotations { ss_pred: vec![Ss3::C; 20], sa_pred: vec![0.5; 20] };
        let ctx = FeatureContext::new(&model, &ann).unwrap();
        let v = ctx.window_features(10).unwrap();
        assert!((v[NUM_ONE_HOT + 1] - 1.0).abs() < 1e-12, "fragment euclid {}", v[NUM_ONE_HOT + 1]);
        assert!((ctx.global().euclid_score - 1.0).abs() < 1e-12);
    }

    #[test]
    fn homopolymer_interior_windows_are_identical() {
        // 4.0 Å spacing keeps every coordinate exactly representable, so
        // the two windows are exact translates of each other
        let coords: Vec<Point3> = (0..30).map(|i| [i as f64 * 4.0, 0.0, 0.0]).collect();
        let residues: Vec<Residue> = coords
            .iter()
            .enumerate()
            .map(|(i, c)| Residue::ca_only(i as u32 + 1, AminoAcid::Ala, *c))
            .collect();
        let model = StructureModel::new("homo", "t", residues).unwrap();
        let ann = PredictedAnnotations { ss_pred: vec![Ss3::C; 30], sa_pred: vec![0.5; 30] };
        let ctx = FeatureContext::new(&model, &ann).unwrap();
        let a = ctx.window_features(12).unwrap();
        let b = ctx.window_features(15).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn missing_residue_is_an_error() {
        let (model, ann) = fixture();
        let ctx = FeatureContext::new(&model, &ann).unwrap();
        assert!(matches!(ctx.window_features(9), Err(Error::ResidueNotInModel(9))));
    }

    #[test]
    fn annotations_must_cover_the_model() {
        let (model, _) = fixture();
        let short = PredictedAnnotations { ss_pred: vec![Ss3::C; 4], sa_pred: vec![0.5; 4] };
        assert!(matches!(
            FeatureContext::new(&model, &short),
            Err(Error::ResidueOutOfRange { seq_index: 5, len: 4, .. })
        ));
    }

    #[test]
    fn feature_names_match_layout() {
        let names = feature_names();
        assert_eq!(names.len(), NUM_FEATURES);
        assert_eq!(names[0], "aa0_A");
        assert_eq!(names[299], "aa14_Y");
        assert_eq!(names[300], "frag_ss_diff");
        assert_eq!(names[306], "glob_ss_diff");
        assert_eq!(names[312], "glob_total_surface");
    }
}
