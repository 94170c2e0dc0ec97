//! Labeled training data: feature vectors paired with superposition-derived
//! per-residue distances, plus the feature-matrix text format used to move
//! training data between the extract and train commands.

use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::features::{feature_names, FeatureContext, FEATURE_LAYOUT_VERSION, NUM_FEATURES};
use crate::geometry::per_residue_distances;
use crate::qa::s_score;
use crate::structure::{ModelPool, PredictedAnnotations, StructureModel};

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub target_id: String,
    pub model_id: String,
    pub seq_index: u32,
    pub features: Vec<f64>,
    pub true_distance: f64,
    pub true_quality: f64,
}

/// One target's worth of training input.
#[derive(Debug, Clone)]
pub struct TargetData {
    pub pool: ModelPool,
    /// Targets without a solved structure contribute no labels.
    pub native: Option<StructureModel>,
    pub ann: PredictedAnnotations,
}

#[derive(Debug, Clone, Default)]
pub struct DatasetBuild {
    pub samples: Vec<LabeledSample>,
    /// Human-readable notes for every target or model left out.
    pub skipped: Vec<String>,
}

fn model_samples(
    target_id: &str,
    model: &StructureModel,
    native: &StructureModel,
    ann: &PredictedAnnotations,
) -> Result<Vec<LabeledSample>> {
    let ctx = FeatureContext::new(model, ann)?;
    let dists = per_residue_distances(model, native)?;
    let mut out = Vec::with_capacity(dists.len());
    for (seq_index, d) in dists {
        out.push(LabeledSample {
            target_id: target_id.to_string(),
            model_id: model.model_id.clone(),
            seq_index,
            features: ctx.window_features(seq_index)?,
            true_distance: d,
            true_quality: s_score(d),
        });
    }
    Ok(out)
}

/// Build labeled samples for every (model, residue) pair that the native
/// structure also resolves. Models are processed in parallel; output order
/// is by target, then model (pool order), then residue.
pub fn build_dataset(targets: &[TargetData]) -> DatasetBuild {
    let mut build = DatasetBuild::default();
    for t in targets {
        let Some(native) = &t.native else {
            build.skipped.push(format!("target {}: no native structure", t.pool.target_id));
            continue;
        };
        let per_model: Vec<(String, Result<Vec<LabeledSample>>)> = t
            .pool
            .models
            .par_iter()
            .map(|m| {
                (m.model_id.clone(), model_samples(&t.pool.target_id, m, native, &t.ann))
            })
            .collect();
        for (model_id, result) in per_model {
            match result {
                Ok(samples) => build.samples.extend(samples),
                Err(e) => build.skipped.push(format!(
                    "target {} model {model_id}: {e}",
                    t.pool.target_id
                )),
            }
        }
    }
    build
}

/// `#layout` line, header row naming every column, then one tab-separated
/// row per sample. Floats use the shortest round-tripping representation.
pub fn write_feature_matrix(samples: &[LabeledSample]) -> String {
    let mut out = String::new();
    out.push_str(&format!("#layout {FEATURE_LAYOUT_VERSION}\n"));
    out.push_str("target\tmodel\tresidue_index\t");
    out.push_str(&feature_names().join("\t"));
    out.push_str("\ttrue_distance\ttrue_quality\n");
    for s in samples {
        out.push_str(&format!("{}\t{}\t{}", s.target_id, s.model_id, s.seq_index));
        for f in &s.features {
            out.push_str(&format!("\t{f}"));
        }
        out.push_str(&format!("\t{}\t{}\n", s.true_distance, s.true_quality));
    }
    out
}

fn bad(line: usize, msg: &str) -> Error {
    Error::FeatureMatrix(format!("line {line}: {msg}"))
}

/// Returns the layout tag from the `#layout` line plus the parsed samples.
/// The column count is enforced against the current layout.
pub fn parse_feature_matrix(text: &str) -> Result<(String, Vec<LabeledSample>)> {
    let mut lines = text.lines().enumerate();
    let (_, first) = lines.next().ok_or_else(|| bad(1, "empty file"))?;
    let layout = first
        .strip_prefix("#layout ")
        .ok_or_else(|| bad(1, "missing #layout line"))?
        .trim()
        .to_string();
    let (_, header) = lines.next().ok_or_else(|| bad(2, "missing header row"))?;
    let expected_cols = NUM_FEATURES + 5;
    if header.split('\t').count() != expected_cols {
        return Err(bad(2, "header column count does not match layout"));
    }

    let mut samples = Vec::new();
    for (i, line) in lines {
        let lineno = i + 1;
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != expected_cols {
            return Err(bad(lineno, "wrong column count"));
        }
        let seq_index: u32 =
            cols[2].parse().map_err(|_| bad(lineno, "bad residue index"))?;
        let mut features = Vec::with_capacity(NUM_FEATURES);
        for c in &cols[3..3 + NUM_FEATURES] {
            features.push(c.parse().map_err(|_| bad(lineno, "bad feature value"))?);
        }
        let true_distance: f64 =
            cols[3 + NUM_FEATURES].parse().map_err(|_| bad(lineno, "bad distance"))?;
        let true_quality: f64 =
            cols[4 + NUM_FEATURES].parse().map_err(|_| bad(lineno, "bad quality"))?;
        if !(0.0..=1.0).contains(&true_quality) || true_distance < 0.0 {
            return Err(bad(lineno, "label out of range"));
        }
        if (true_quality - s_score(true_distance)).abs() > 1e-6 {
            return Err(bad(lineno, "quality does not match distance"));
        }
        samples.push(LabeledSample {
            target_id: cols[0].to_string(),
            model_id: cols[1].to_string(),
            seq_index,
            features,
            true_distance,
            true_quality,
        });
    }
    Ok((layout, samples))
}

pub fn save_feature_matrix(path: &Path, samples: &[LabeledSample]) -> Result<()> {
    fs::write(path, write_feature_matrix(samples))?;
    Ok(())
}

pub fn load_feature_matrix(path: &Path) -> Result<(String, Vec<LabeledSample>)> {
    parse_feature_matrix(&fs::read_to_string(path)?)
}
