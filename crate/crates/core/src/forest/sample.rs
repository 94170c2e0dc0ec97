//! Quality-balanced subsampling of the training data.

use crate::features::dataset::LabeledSample;
use crate::forest::rng::{derive_seed, Rng};

pub const NUM_QUALITY_CLASSES: usize = 5;

/// Class of a quality value: [0,0.2) -> 0, [0.2,0.4) -> 1, ..., [0.8,1] -> 4.
/// Bins are half-open at the left edge, so exactly 0.2 belongs to class 1.
pub fn quality_class(q: f64) -> usize {
    if q < 0.2 {
        0
    } else if q < 0.4 {
        1
    } else if q < 0.6 {
        2
    } else if q < 0.8 {
        3
    } else {
        4
    }
}

#[derive(Debug, Clone)]
pub struct BalancedSample {
    pub samples: Vec<LabeledSample>,
    pub per_class_counts: [usize; NUM_QUALITY_CLASSES],
    /// One line per class that could not fill the requested cap.
    pub diagnostics: Vec<String>,
}

/// Draw up to `per_class` samples uniformly without replacement from each
/// quality class. Classes with fewer members contribute everything they
/// have, with a diagnostic. Output order is deterministic: classes
/// ascending, members in shuffled draw order.
pub fn balanced_sample(dataset: &[LabeledSample], per_class: usize, seed: u64) -> BalancedSample {
    let mut class_members: [Vec<usize>; NUM_QUALITY_CLASSES] = Default::default();
    for (i, s) in dataset.iter().enumerate() {
        class_members[quality_class(s.true_quality)].push(i);
    }

    let mut samples = Vec::new();
    let mut per_class_counts = [0usize; NUM_QUALITY_CLASSES];
    let mut diagnostics = Vec::new();
    for (c, members) in class_members.iter_mut().enumerate() {
        let mut rng = Rng::from_seed(derive_seed(seed, c as u64));
        rng.shuffle(members);
        let take = per_class.min(members.len());
        if members.len() < per_class {
            diagnostics.push(format!(
                "class {c}: only {} of the requested {per_class} samples available",
                members.len()
            ));
        }
        per_class_counts[c] = take;
        samples.extend(members[..take].iter().map(|&i| dataset[i].clone()));
    }
    BalancedSample { samples, per_class_counts, diagnostics }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_with_quality(q: f64) -> LabeledSample {
        LabeledSample {
            target_id: "t".into(),
            model_id: "m".into(),
            seq_index: 1,
            features: vec![q],
            true_distance: 0.0,
            true_quality: q,
        }
    }

    #[test]
    fn class_bins_are_half_open() {
        assert_eq!(quality_class(0.0), 0);
        assert_eq!(quality_class(0.19999), 0);
        assert_eq!(quality_class(0.2), 1);
        assert_eq!(quality_class(0.4), 2);
        assert_eq!(quality_class(0.6), 3);
        assert_eq!(quality_class(0.8), 4);
        assert_eq!(quality_class(1.0), 4);
    }

    #[test]
    fn caps_a_single_class() {
        let data: Vec<LabeledSample> = (0..100).map(|i| sample_with_quality(i as f64 * 0.001)).collect();
        let b = balanced_sample(&data, 10, 42);
        assert_eq!(b.samples.len(), 10);
        assert_eq!(b.per_class_counts, [10, 0, 0, 0, 0]);
        // classes 1..5 are empty and reported short
        assert_eq!(b.diagnostics.len(), 4);
    }

    #[test]
    fn short_classes_contribute_everything() {
        let data: Vec<LabeledSample> =
            [0.1, 0.3, 0.5, 0.7, 0.9, 0.95].iter().map(|q| sample_with_quality(*q)).collect();
        let b = balanced_sample(&data, 10, 1);
        assert_eq!(b.samples.len(), 6);
        assert_eq!(b.per_class_counts, [1, 1, 1, 1, 2]);
        assert_eq!(b.diagnostics.len(), 5);
    }

    #[test]
    fn deterministic_in_seed() {
        let data: Vec<LabeledSample> = (0..500).map(|i| sample_with_quality((i % 100) as f64 / 100.0)).collect();
        let a = balanced_sample(&data, 20, 7);
        let b = balanced_sample(&data, 20, 7);
        let ids = |s: &BalancedSample| s.samples.iter().map(|x| x.true_quality).collect::<Vec<_>>();
        assert_eq!(ids(&a), ids(&b));
        let c = balanced_sample(&data, 20, 8);
        assert_ne!(ids(&a), ids(&c));
    }

    #[test]
    fn selection_is_without_replacement() {
        let data: Vec<LabeledSample> = (0..50).map(|i| sample_with_quality(i as f64 / 1000.0)).collect();
        let b = balanced_sample(&data, 50, 3);
        let mut qs: Vec<f64> = b.samples.iter().map(|s| s.true_quality).collect();
        qs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        qs.dedup();
        assert_eq!(qs.len(), 50);
    }
}
