//! A single CART regression tree with random feature subsets per node.

use crate::forest::rng::Rng;

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Leaf {
        value: f64,
    },
    Split {
        feature: usize,
        threshold: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { value } => return *value,
                TreeNode::Split { feature, threshold, left, right } => {
                    node = if x[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Split { left, right, .. } => left.leaf_count() + right.leaf_count(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct TreeConfig {
    pub mtry: usize,
    pub min_leaf: usize,
    pub max_depth: Option<usize>,
}

/// Mean that is exact for constant inputs (centered accumulation) and is
/// guaranteed to stay inside the input range.
pub(crate) fn stable_mean(values: &[f64]) -> f64 {
    let Some(&v0) = values.first() else { return 0.0 };
    let mut lo = v0;
    let mut hi = v0;
    let mut acc = 0.0;
    for &v in values {
        acc += v - v0;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (v0 + acc / values.len() as f64).clamp(lo, hi)
}

fn leaf_of(idx: &[usize], y: &[f64]) -> TreeNode {
    let labels: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
    TreeNode::Leaf { value: stable_mean(&labels) }
}

struct BestSplit {
    score: f64,
    feature: usize,
    threshold: f64,
}

/// Find the best variance-reduction split over `mtry` randomly drawn
/// features. Maximizing `sum_l^2/n_l + sum_r^2/n_r` is equivalent to
/// maximizing the reduction in summed squared error. Candidate thresholds
/// are midpoints between consecutive distinct sorted values; exact score
/// ties resolve to the lowest feature index, then the lowest threshold
/// (features and positions are scanned in ascending order and only a
/// strictly better score replaces the incumbent).
fn best_split<X: AsRef<[f64]>>(
    x: &[X],
    y: &[f64],
    idx: &[usize],
    n_features: usize,
    cfg: &TreeConfig,
    rng: &mut Rng,
) -> Option<BestSplit> {
    let n = idx.len();
    let total_sum: f64 = idx.iter().map(|&i| y[i]).sum();
    let parent_score = total_sum * total_sum / n as f64;

    let features = rng.sample_indices(n_features, cfg.mtry);
    let mut best: Option<BestSplit> = None;
    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(n);

    for f in features {
        pairs.clear();
        pairs.extend(idx.iter().map(|&i| (x[i].as_ref()[f], y[i])));
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

        let mut left_sum = 0.0;
        for k in 0..n - 1 {
            left_sum += pairs[k].1;
            if pairs[k].0 == pairs[k + 1].0 {
                continue; // not a boundary between distinct values
            }
            let left_n = k + 1;
            let right_n = n - left_n;
            if left_n < cfg.min_leaf || right_n < cfg.min_leaf {
                continue;
            }
            let (a, b) = (pairs[k].0, pairs[k + 1].0);
            let mut threshold = a + (b - a) * 0.5;
            if threshold >= b {
                // the midpoint rounded up to b; fall back to a so that
                // `value <= threshold` reproduces exactly this partition
                threshold = a;
            }
            let right_sum = total_sum - left_sum;
            let score = left_sum * left_sum / left_n as f64 + right_sum * right_sum / right_n as f64;
            if best.as_ref().is_none_or(|b| score > b.score) {
                best = Some(BestSplit { score, feature: f, threshold });
            }
        }
    }

    // no candidate, or no split strictly better than the parent -> leaf
    best.filter(|b| b.score > parent_score)
}

fn build<X: AsRef<[f64]>>(
    x: &[X],
    y: &[f64],
    idx: Vec<usize>,
    depth: usize,
    n_features: usize,
    cfg: &TreeConfig,
    rng: &mut Rng,
) -> TreeNode {
    if idx.len() < 2 * cfg.min_leaf {
        return leaf_of(&idx, y);
    }
    if let Some(max) = cfg.max_depth {
        if depth >= max {
            return leaf_of(&idx, y);
        }
    }
    let first = y[idx[0]];
    if idx.iter().all(|&i| y[i] == first) {
        return TreeNode::Leaf { value: first }; // zero label variance
    }

    let Some(split) = best_split(x, y, &idx, n_features, cfg, rng) else {
        return leaf_of(&idx, y);
    };

    let (left_idx, right_idx): (Vec<usize>, Vec<usize>) =
        idx.into_iter().partition(|&i| x[i].as_ref()[split.feature] <= split.threshold);
    debug_assert!(!left_idx.is_empty() && !right_idx.is_empty());

    let left_seed = rng.next_u64();
    let right_seed = rng.next_u64();
    let left = build(x, y, left_idx, depth + 1, n_features, cfg, &mut Rng::from_seed(left_seed));
    let right = build(x, y, right_idx, depth + 1, n_features, cfg, &mut Rng::from_seed(right_seed));
    TreeNode::Split {
        feature: split.feature,
        threshold: split.threshold,
        left: Box::new(left),
        right: Box::new(right),
    }
}

/// Train one tree on the rows selected by `idx` (duplicates allowed: that is
/// how bootstrap resamples arrive).
pub(crate) fn train_tree<X: AsRef<[f64]>>(
    x: &[X],
    y: &[f64],
    idx: Vec<usize>,
    n_features: usize,
    cfg: &TreeConfig,
    rng: &mut Rng,
) -> TreeNode {
    build(x, y, idx, 0, n_features, cfg, rng)
}
