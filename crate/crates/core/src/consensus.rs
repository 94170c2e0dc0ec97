//! Pairwise consensus scoring: a model's global quality is its mean GDT-TS
//! against every other model in the pool.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::gdt_ts_norm;
use crate::structure::ModelPool;

/// Mean pairwise GDT-TS per model, in pool order, plus the pool maximum.
#[derive(Debug, Clone)]
pub struct ConsensusScores {
    pub scores: Vec<(String, f64)>,
    pub pool_max: f64,
}

impl ConsensusScores {
    pub fn score_of(&self, model_id: &str) -> Option<f64> {
        self.scores.iter().find(|(id, _)| id == model_id).map(|(_, s)| *s)
    }
}

/// Compute the full pairwise GDT-TS matrix (each unordered pair once; the
/// score is symmetric because both directions share the same residue pairs
/// and the same full-target-length denominator) and average per model.
pub fn pairwise_scores(pool: &ModelPool) -> Result<ConsensusScores> {
    let n = pool.models.len();
    if n < 2 {
        return Err(Error::SingleModelPool(n));
    }
    let denom = pool.target_length();

    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let gdts: Result<Vec<f64>> = pairs
        .par_iter()
        .map(|&(i, j)| Ok(gdt_ts_norm(&pool.models[i], &pool.models[j], denom)?.gdt_ts))
        .collect();
    let gdts = gdts?;

    let mut sums = vec![0.0f64; n];
    for (&(i, j), g) in pairs.iter().zip(gdts.iter()) {
        sums[i] += g;
        sums[j] += g;
    }
    let scores: Vec<(String, f64)> = pool
        .models
        .iter()
        .zip(sums.iter())
        .map(|(m, s)| (m.model_id.clone(), s / (n - 1) as f64))
        .collect();
    let pool_max = scores.iter().map(|(_, s)| *s).fold(f64::NEG_INFINITY, f64::max);
    Ok(ConsensusScores { scores, pool_max })
}
