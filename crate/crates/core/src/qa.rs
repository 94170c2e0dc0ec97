//! The quality-assessment engine: hybrid global scoring (pairwise consensus
//! gated against a single-model fallback) and per-residue distance
//! prediction, plus the distance <-> quality transforms shared by training
//! and prediction.

use std::collections::BTreeMap;

use crate::consensus::pairwise_scores;
use crate::error::{Error, Result};
use crate::features::{FeatureContext, FEATURE_LAYOUT_VERSION};
use crate::forest::RandomForestModel;
use crate::structure::qa_format::QaRecord;
use crate::structure::{ModelPool, PredictedAnnotations, StructureModel};

/// Distance scale of the quality transform (Å).
pub const D0: f64 = 3.8;
/// No emitted distance may exceed this (Å).
pub const DISTANCE_CAP: f64 = 15.0;
/// Pairwise scores are trusted only when the pool maximum is strictly above
/// this; otherwise the single-model path is used.
pub const DEFAULT_GATE: f64 = 0.2;
/// QA files require strictly positive distances; zeros are floored to this.
pub const QA_MIN_DISTANCE: f64 = 0.1;

/// Quality of a residue at distance `d` from its true position: 1 at 0 Å,
/// 0.5 at d0, approaching 0 far away.
pub fn s_score(d: f64) -> f64 {
    1.0 / (1.0 + (d / D0).powi(2))
}

/// Inverse of [`s_score`], saturating at the distance cap. Non-positive
/// qualities clamp to the cap rather than erroring.
pub fn s_to_distance(s: f64) -> f64 {
    if s <= 0.0 {
        return DISTANCE_CAP;
    }
    let d = D0 * (1.0 / s - 1.0).max(0.0).sqrt();
    d.min(DISTANCE_CAP)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodUsed {
    Pairwise,
    Single,
}

impl std::fmt::Display for MethodUsed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MethodUsed::Pairwise => "pairwise",
            MethodUsed::Single => "single",
        })
    }
}

#[derive(Debug, Clone)]
pub struct ModelQa {
    pub model_id: String,
    pub global_score: f64,
    /// Predicted distance per resolved residue, ascending seq_index.
    pub distances: Vec<(u32, f64)>,
}

#[derive(Debug, Clone)]
pub struct QaPrediction {
    pub target_id: String,
    pub method_used: MethodUsed,
    /// Maximum mean pairwise score; None for single-model pools where no
    /// pairwise matrix exists.
    pub pool_max: Option<f64>,
    pub models: Vec<ModelQa>,
}

/// Forest outputs for every residue of one model, on the quality scale.
fn predict_qualities(
    model: &StructureModel,
    ann: &PredictedAnnotations,
    forest: &RandomForestModel,
) -> Result<Vec<(u32, f64)>> {
    if forest.feature_layout_version != FEATURE_LAYOUT_VERSION {
        return Err(Error::LayoutMismatch {
            found: forest.feature_layout_version.clone(),
            expected: FEATURE_LAYOUT_VERSION.to_string(),
        });
    }
    let ctx = FeatureContext::new(model, ann)?;
    model
        .residues
        .iter()
        .map(|r| {
            let v = ctx.window_features(r.seq_index)?;
            Ok((r.seq_index, forest.predict(&v)?))
        })
        .collect()
}

/// Per-residue predicted distances (Å, capped) for one model.
pub fn local_predict(
    model: &StructureModel,
    ann: &PredictedAnnotations,
    forest: &RandomForestModel,
) -> Result<Vec<(u32, f64)>> {
    Ok(predict_qualities(model, ann, forest)?
        .into_iter()
        .map(|(seq, s)| (seq, s_to_distance(s)))
        .collect())
}

/// Single-model global score: the mean predicted residue quality.
pub fn single_model_global(
    model: &StructureModel,
    ann: &PredictedAnnotations,
    forest: &RandomForestModel,
) -> Result<f64> {
    let qs = predict_qualities(model, ann, forest)?;
    let n = qs.len() as f64;
    Ok(qs.iter().map(|(_, s)| *s).sum::<f64>() / n)
}

/// Lines of `<model_id> <score>`; scores must be in [0,1].
pub fn parse_external_scores(text: &str) -> Result<BTreeMap<String, f64>> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut toks = line.split_whitespace();
        let id = toks.next().unwrap().to_string();
        let score_tok = toks
            .next()
            .ok_or_else(|| Error::QaFormat(format!("score file line {}: missing score", i + 1)))?;
        let score: f64 = score_tok
            .parse()
            .map_err(|_| Error::QaFormat(format!("score file line {}: bad score {score_tok:?}", i + 1)))?;
        if !(0.0..=1.0).contains(&score) {
            return Err(Error::ScoreOutOfRange(score));
        }
        map.insert(id, score);
    }
    Ok(map)
}

/// Score a whole pool: every model gets per-residue distances, and global
/// scores come from the pairwise consensus when the pool supports it
/// (more than one model and pool max strictly above the gate) or from the
/// single-model predictor otherwise. `external` overrides the single-model
/// score per model id.
pub fn hybrid_global(
    pool: &ModelPool,
    ann: &PredictedAnnotations,
    forest: &RandomForestModel,
    external: Option<&BTreeMap<String, f64>>,
    gate: f64,
) -> Result<QaPrediction> {
    if pool.models.is_empty() {
        return Err(Error::EmptyPool { target: pool.target_id.clone() });
    }

    let consensus = if pool.models.len() > 1 { Some(pairwise_scores(pool)?) } else { None };
    let pool_max = consensus.as_ref().map(|c| c.pool_max);
    let use_pairwise = pool_max.map(|m| m > gate).unwrap_or(false);

    let mut models = Vec::with_capacity(pool.models.len());
    for (i, model) in pool.models.iter().enumerate() {
        let distances = local_predict(model, ann, forest)?;
        let global_score = if use_pairwise {
            consensus.as_ref().unwrap().scores[i].1
        } else {
            match external.and_then(|m| m.get(&model.model_id)) {
                Some(s) => *s,
                None => single_model_global(model, ann, forest)?,
            }
        };
        models.push(ModelQa { model_id: model.model_id.clone(), global_score, distances });
    }

    Ok(QaPrediction {
        target_id: pool.target_id.clone(),
        method_used: if use_pairwise { MethodUsed::Pairwise } else { MethodUsed::Single },
        pool_max,
        models,
    })
}

/// Convert a prediction to QA records: one distance column per target
/// position, unresolved residues marked not-predicted, distances floored to
/// the minimum the format allows.
pub fn to_qa_records(pred: &QaPrediction, target_length: usize) -> Vec<QaRecord> {
    pred.models
        .iter()
        .map(|m| {
            let mut distances = vec![None; target_length];
            for (seq, d) in &m.distances {
                let col = *seq as usize - 1;
                if col < target_length {
                    distances[col] = Some(d.clamp(QA_MIN_DISTANCE, DISTANCE_CAP));
                }
            }
            QaRecord { model_id: m.model_id.clone(), global: m.global_score, distances }
        })
        .collect()
}
