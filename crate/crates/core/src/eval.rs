//! Evaluation harness: correlation and ranking-loss statistics for global
//! scores, binned absolute-error curves for local distances, and the
//! consensus-threshold sweep. Emits tab-delimited, plot-ready tables.

use std::collections::BTreeMap;

use crate::consensus::ConsensusScores;
use crate::error::{Error, Result};

/// Pearson r, or Undefined when either side has zero variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Correlation {
    Defined(f64),
    Undefined,
}

impl Correlation {
    pub fn value(self) -> Option<f64> {
        match self {
            Correlation::Defined(r) => Some(r),
            Correlation::Undefined => None,
        }
    }
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<Correlation> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(Error::TooFewPairs(xs.len()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - mx;
        let dy = y - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(Correlation::Undefined);
    }
    Ok(Correlation::Defined((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)))
}

/// Ranking loss: best achievable quality minus the quality of the model the
/// predictor ranked first. Argmax ties go to the lexicographically smallest
/// model id.
pub fn gdt_loss(truths: &BTreeMap<String, f64>, predictions: &BTreeMap<String, f64>) -> Result<f64> {
    if truths.is_empty() {
        return Err(Error::EmptyScoreMap);
    }
    if truths.len() != predictions.len() || !truths.keys().eq(predictions.keys()) {
        return Err(Error::ModelSetMismatch(format!(
            "{} truth models vs {} predicted",
            truths.len(),
            predictions.len()
        )));
    }
    // BTreeMap iterates in key order, so strictly-greater keeps the smallest id on ties.
    let mut top: Option<(&String, f64)> = None;
    for (id, score) in predictions {
        if top.is_none_or(|(_, best)| *score > best) {
            top = Some((id, *score));
        }
    }
    let (picked, _) = top.expect("non-empty map");
    let best_truth = truths.values().fold(f64::MIN, |a, b| a.max(*b));
    Ok(best_truth - truths[picked])
}

#[derive(Debug, Clone, PartialEq)]
pub struct TargetEval {
    pub target_id: String,
    pub n_models: usize,
    /// None when the correlation is undefined or the target has one model.
    pub r: Option<f64>,
    pub loss: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GlobalEval {
    /// Sorted by target id; only targets with at least one comparable model.
    pub per_target: Vec<TargetEval>,
    pub ave_corr: Option<f64>,
    pub over_corr: Option<f64>,
    pub ave_loss: f64,
    pub diagnostics: Vec<String>,
}

pub type ScoresByTarget = BTreeMap<String, BTreeMap<String, f64>>;

/// Per-target Pearson and loss plus the pooled correlation. Targets absent
/// from the truth set, or sharing no models with it, are skipped with a
/// diagnostic. Single-model targets count toward the loss (0 by definition)
/// but not the correlation average.
pub fn evaluate_global(predictions: &ScoresByTarget, truths: &ScoresByTarget) -> Result<GlobalEval> {
    let mut per_target = Vec::new();
    let mut diagnostics = Vec::new();
    let mut pooled_pred = Vec::new();
    let mut pooled_truth = Vec::new();

    for (target_id, pred) in predictions {
        let Some(truth) = truths.get(target_id) else {
            diagnostics.push(format!("target {target_id}: no truth scores, skipped"));
            continue;
        };
        let shared: Vec<&String> = pred.keys().filter(|m| truth.contains_key(*m)).collect();
        if shared.is_empty() {
            diagnostics.push(format!("target {target_id}: no overlapping models, skipped"));
            continue;
        }
        let ps: Vec<f64> = shared.iter().map(|m| pred[*m]).collect();
        let ts: Vec<f64> = shared.iter().map(|m| truth[*m]).collect();
        pooled_pred.extend_from_slice(&ps);
        pooled_truth.extend_from_slice(&ts);

        let r = if shared.len() < 2 {
            diagnostics.push(format!("target {target_id}: single model, correlation skipped"));
            None
        } else {
            match pearson(&ps, &ts)? {
                Correlation::Defined(r) => Some(r),
                Correlation::Undefined => {
                    diagnostics
                        .push(format!("target {target_id}: zero-variance scores, correlation undefined"));
                    None
                }
            }
        };
        let sub_truth: BTreeMap<String, f64> =
            shared.iter().map(|m| ((*m).clone(), truth[*m])).collect();
        let sub_pred: BTreeMap<String, f64> =
            shared.iter().map(|m| ((*m).clone(), pred[*m])).collect();
        let loss = gdt_loss(&sub_truth, &sub_pred)?;
        per_target.push(TargetEval {
            target_id: target_id.clone(),
            n_models: shared.len(),
            r,
            loss,
        });
    }

    if per_target.is_empty() {
        return Err(Error::EmptyScoreMap);
    }
    let defined: Vec<f64> = per_target.iter().filter_map(|t| t.r).collect();
    let ave_corr = if defined.is_empty() {
        None
    } else {
        Some(defined.iter().sum::<f64>() / defined.len() as f64)
    };
    let over_corr = if pooled_pred.len() >= 2 {
        pearson(&pooled_pred, &pooled_truth)?.value()
    } else {
        None
    };
    let ave_loss = per_target.iter().map(|t| t.loss).sum::<f64>() / per_target.len() as f64;
    Ok(GlobalEval { per_target, ave_corr, over_corr, ave_loss, diagnostics })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BinStat {
    pub lo: f64,
    /// None for the open-ended last bin.
    pub hi: Option<f64>,
    pub count: usize,
    pub mean_abs_err: Option<f64>,
}

pub const N_LOCAL_BINS: usize = 20;

/// Absolute local-distance error, binned by the real distance into 1 Å bins
/// [0,1), [1,2), ..., [19,∞).
pub fn local_binned_error(real: &[f64], predicted: &[f64]) -> Result<Vec<BinStat>> {
    if real.len() != predicted.len() {
        return Err(Error::LengthMismatch(real.len(), predicted.len()));
    }
    let mut counts = [0usize; N_LOCAL_BINS];
    let mut sums = [0.0f64; N_LOCAL_BINS];
    for (r, p) in real.iter().zip(predicted) {
        let bin = (r.max(0.0).floor() as usize).min(N_LOCAL_BINS - 1);
        counts[bin] += 1;
        sums[bin] += (r - p).abs();
    }
    Ok((0..N_LOCAL_BINS)
        .map(|b| BinStat {
            lo: b as f64,
            hi: (b + 1 < N_LOCAL_BINS).then(|| (b + 1) as f64),
            count: counts[b],
            mean_abs_err: (counts[b] > 0).then(|| sums[b] / counts[b] as f64),
        })
        .collect())
}

#[derive(Debug, Clone)]
pub struct SweepTarget {
    pub target_id: String,
    pub consensus: ConsensusScores,
    pub truths: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub threshold: f64,
    pub n_targets: usize,
    /// Mean per-target r over admitted targets; None when none are admitted
    /// or every admitted correlation is undefined.
    pub avg_corr: Option<f64>,
}

/// For each threshold t, restrict to targets whose pool_max ≤ t and average
/// the per-target correlation of the consensus score against the truths.
pub fn threshold_sweep(targets: &[SweepTarget], thresholds: &[f64]) -> Vec<SweepEntry> {
    // correlation per target is threshold-independent, compute once
    let per_target: Vec<(f64, Option<f64>)> = targets
        .iter()
        .map(|t| {
            let mut ps = Vec::new();
            let mut ts = Vec::new();
            for (model, score) in &t.consensus.scores {
                if let Some(truth) = t.truths.get(model) {
                    ps.push(*score);
                    ts.push(*truth);
                }
            }
            let r = if ps.len() >= 2 {
                pearson(&ps, &ts).ok().and_then(Correlation::value)
            } else {
                None
            };
            (t.consensus.pool_max, r)
        })
        .collect();

    thresholds
        .iter()
        .map(|&threshold| {
            let admitted: Vec<&(f64, Option<f64>)> =
                per_target.iter().filter(|(pm, _)| *pm <= threshold).collect();
            let defined: Vec<f64> = admitted.iter().filter_map(|(_, r)| *r).collect();
            SweepEntry {
                threshold,
                n_targets: admitted.len(),
                avg_corr: (!defined.is_empty())
                    .then(|| defined.iter().sum::<f64>() / defined.len() as f64),
            }
        })
        .collect()
}

/// Truth file: `<target_id> <model_id> <gdt_ts>` per line, `#` comments and
/// blank lines ignored.
pub fn parse_truth_file(text: &str) -> Result<ScoresByTarget> {
    let mut out: ScoresByTarget = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(Error::TruthFormat(format!("line {}: expected 3 fields", i + 1)));
        }
        let gdt: f64 = parts[2]
            .parse()
            .map_err(|_| Error::TruthFormat(format!("line {}: bad score", i + 1)))?;
        if !(0.0..=1.0).contains(&gdt) {
            return Err(Error::TruthFormat(format!("line {}: score outside [0,1]", i + 1)));
        }
        let prev = out
            .entry(parts[0].to_string())
            .or_default()
            .insert(parts[1].to_string(), gdt);
        if prev.is_some() {
            return Err(Error::TruthFormat(format!(
                "line {}: duplicate entry for {} {}",
                i + 1,
                parts[0],
                parts[1]
            )));
        }
    }
    Ok(out)
}

pub fn write_truth_file(truths: &ScoresByTarget) -> String {
    let mut out = String::new();
    for (target, models) in truths {
        for (model, gdt) in models {
            out.push_str(&format!("{target} {model} {gdt:.6}\n"));
        }
    }
    out
}

fn opt6(v: Option<f64>) -> String {
    v.map_or(String::new(), |v| format!("{v:.6}"))
}

pub fn write_summary_table(eval: &GlobalEval) -> String {
    let mut out = String::from("n_targets\tave_corr\tover_corr\tave_loss\n");
    out.push_str(&format!(
        "{}\t{}\t{}\t{:.6}\n",
        eval.per_target.len(),
        opt6(eval.ave_corr),
        opt6(eval.over_corr),
        eval.ave_loss
    ));
    out
}

pub fn write_per_target_table(eval: &GlobalEval) -> String {
    let mut out = String::from("target\tn_models\tpearson\tgdt_loss\n");
    for t in &eval.per_target {
        out.push_str(&format!(
            "{}\t{}\t{}\t{:.6}\n",
            t.target_id,
            t.n_models,
            opt6(t.r),
            t.loss
        ));
    }
    out
}

pub fn write_local_bins_table(bins: &[BinStat]) -> String {
    let mut out = String::from("bin_lo\tbin_hi\tcount\tmean_abs_error\n");
    for b in bins {
        out.push_str(&format!(
            "{:.0}\t{}\t{}\t{}\n",
            b.lo,
            b.hi.map_or(String::new(), |h| format!("{h:.0}")),
            b.count,
            opt6(b.mean_abs_err)
        ));
    }
    out
}

pub fn write_sweep_table(entries: &[SweepEntry]) -> String {
    let mut out = String::from("threshold\tn_targets\tavg_corr\n");
    for e in entries {
        out.push_str(&format!(
            "{:.6}\t{}\t{}\n",
            e.threshold,
            e.n_targets,
            opt6(e.avg_corr)
        ));
    }
    out
}
