//! Shared fixtures for the benchmark targets.

use rfqa_core::structure::{ModelPool, PredictedAnnotations, StructureModel};
use rfqa_core::synth::{annotations_from_model, noisy_decoy, synthetic_native};

/// A synthetic target with graded-noise decoys, sized for benchmarking.
pub struct BenchTarget {
    pub native: StructureModel,
    pub pool: ModelPool,
    pub ann: PredictedAnnotations,
}

pub fn bench_target(n_residues: usize, n_models: usize, seed: u64) -> BenchTarget {
    let native = synthetic_native(n_residues, seed);
    let seq = native.resolved_sequence();
    let ann = annotations_from_model(&native);
    let decoys: Vec<StructureModel> = (0..n_models)
        .map(|i| {
            let sigma = 0.5 + 6.0 * i as f64 / n_models.max(2) as f64;
            noisy_decoy(&native, sigma, seed + 1 + i as u64, &format!("m{i:03}"))
        })
        .collect();
    let pool = ModelPool::new("bench", seq, decoys).expect("valid bench pool");
    BenchTarget { native, pool, ann }
}
