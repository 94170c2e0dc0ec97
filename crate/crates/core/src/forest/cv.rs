//! Repeated k-fold cross-validation for the forest regressor.

use crate::error::{Error, Result};
use crate::forest::rng::{derive_seed, Rng};
use crate::forest::{train, ForestParams};

#[derive(Debug, Clone, PartialEq)]
pub struct CvRepeatStats {
    pub mae: f64,
    pub mse: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub k: usize,
    pub repeats: usize,
    pub per_repeat: Vec<CvRepeatStats>,
    pub mae_mean: f64,
    /// Sample std across repeats; None with a single repeat.
    pub mae_std: Option<f64>,
    pub mse_mean: f64,
    pub mse_std: Option<f64>,
}

impl CvReport {
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        out.push_str("metric\trepeat\tvalue\n");
        for (i, r) in self.per_repeat.iter().enumerate() {
            out.push_str(&format!("mae\t{}\t{:.6}\n", i + 1, r.mae));
            out.push_str(&format!("mse\t{}\t{:.6}\n", i + 1, r.mse));
        }
        out.push_str(&format!("mae_mean\t-\t{:.6}\n", self.mae_mean));
        out.push_str(&format!(
            "mae_std\t-\t{}\n",
            self.mae_std.map_or(String::new(), |v| format!("{v:.6}"))
        ));
        out.push_str(&format!("mse_mean\t-\t{:.6}\n", self.mse_mean));
        out.push_str(&format!(
            "mse_std\t-\t{}\n",
            self.mse_std.map_or(String::new(), |v| format!("{v:.6}"))
        ));
        out
    }
}

/// First `n % k` folds take the extra sample, so sizes differ by at most one.
pub(crate) fn fold_sizes(n: usize, k: usize) -> Vec<usize> {
    let base = n / k;
    let extra = n % k;
    (0..k).map(|f| base + usize::from(f < extra)).collect()
}

fn mean_and_sample_std(values: &[f64]) -> (f64, Option<f64>) {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, None);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, Some(var.sqrt()))
}

/// Repeated k-fold CV. Each repeat reshuffles the sample, trains on k-1
/// folds, predicts the held-out fold, and pools the errors over all n
/// points. Seeds are derived from `(seed, repeat)` for the shuffle and
/// `(seed, repeat * k + fold)` for each forest, so the report is
/// reproducible and every fold trains an independent model.
pub fn k_fold_cv<X: AsRef<[f64]> + Sync>(
    x: &[X],
    y: &[f64],
    params: &ForestParams,
    k: usize,
    repeats: usize,
    seed: u64,
) -> Result<CvReport> {
    let n = x.len();
    if n == 0 {
        return Err(Error::EmptyDataset);
    }
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len(), y.len()));
    }
    if k < 2 || repeats == 0 {
        return Err(Error::EmptyDataset);
    }
    if n < k {
        return Err(Error::SampleSmallerThanFolds { n, k });
    }

    let mut per_repeat = Vec::with_capacity(repeats);
    for rep in 0..repeats {
        let mut perm: Vec<usize> = (0..n).collect();
        let mut shuffle_rng = Rng::from_seed(derive_seed(seed, 1_000_000 + rep as u64));
        shuffle_rng.shuffle(&mut perm);

        let mut abs_sum = 0.0;
        let mut sq_sum = 0.0;
        let mut start = 0;
        for (fold, size) in fold_sizes(n, k).into_iter().enumerate() {
            let test = &perm[start..start + size];
            let train_idx: Vec<usize> =
                perm[..start].iter().chain(perm[start + size..].iter()).copied().collect();
            start += size;

            let tx: Vec<&[f64]> = train_idx.iter().map(|&i| x[i].as_ref()).collect();
            let ty: Vec<f64> = train_idx.iter().map(|&i| y[i]).collect();
            let forest_seed = derive_seed(seed, (rep * k + fold) as u64);
            let model = train(&tx, &ty, params, forest_seed, "cv")?;
            for &i in test {
                let err = model.predict(x[i].as_ref())? - y[i];
                abs_sum += err.abs();
                sq_sum += err * err;
            }
        }
        per_repeat.push(CvRepeatStats { mae: abs_sum / n as f64, mse: sq_sum / n as f64 });
    }

    let maes: Vec<f64> = per_repeat.iter().map(|r| r.mae).collect();
    let mses: Vec<f64> = per_repeat.iter().map(|r| r.mse).collect();
    let (mae_mean, mae_std) = mean_and_sample_std(&maes);
    let (mse_mean, mse_std) = mean_and_sample_std(&mses);
    Ok(CvReport { k, repeats, per_repeat, mae_mean, mae_std, mse_mean, mse_std })
}
