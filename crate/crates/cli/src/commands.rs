//! The five pipeline commands. Progress goes to standard error; machine
//! output goes only to files under the configured output directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use rfqa_core::consensus::pairwise_scores;
use rfqa_core::eval::{
    evaluate_global, local_binned_error, parse_truth_file, threshold_sweep, write_local_bins_table,
    write_per_target_table, write_summary_table, write_sweep_table, ScoresByTarget, SweepTarget,
};
use rfqa_core::features::dataset::{build_dataset, load_feature_matrix, save_feature_matrix, TargetData};
use rfqa_core::features::FEATURE_LAYOUT_VERSION;
use rfqa_core::forest::persist::{load_forest, save_forest};
use rfqa_core::forest::{self, balanced_sample, quality_class, NUM_QUALITY_CLASSES};
use rfqa_core::geometry::per_residue_distances;
use rfqa_core::qa::{hybrid_global, parse_external_scores, to_qa_records, MethodUsed, DISTANCE_CAP};
use rfqa_core::structure::annotations::{parse_annotations, TargetAnnotations};
use rfqa_core::structure::pdb::parse_pdb;
use rfqa_core::structure::pool::{load_pool, model_files_in_dir, PoolLoad};
use rfqa_core::structure::qa_format::{parse_qa_file, write_qa_output, QaFile};
use rfqa_core::structure::StructureModel;

use crate::config::RunConfig;

/// A failed command, tagged with the exit code family it belongs to:
/// config/usage problems exit 1, data problems exit 2.
pub enum Failure {
    Config(anyhow::Error),
    Data(anyhow::Error),
}

pub type CmdResult = Result<(), Failure>;

fn data_err<T>(r: anyhow::Result<T>) -> Result<T, Failure> {
    r.map_err(Failure::Data)
}

fn warn(msg: impl std::fmt::Display) {
    eprintln!("warning: {msg}");
}

fn require<'a>(opt: &'a Option<PathBuf>, key: &str) -> Result<&'a Path, Failure> {
    opt.as_deref().ok_or_else(|| {
        Failure::Config(anyhow!("missing required path `{key}` (config key or --{key} flag)"))
    })
}

/// Sorted (target_id, directory) pairs: one subdirectory per target.
fn target_dirs(root: &Path) -> anyhow::Result<Vec<(String, PathBuf)>> {
    let mut out = Vec::new();
    let entries = std::fs::read_dir(root)
        .with_context(|| format!("reading pool root {}", root.display()))?;
    for entry in entries {
        let path = entry?.path();
        if path.is_dir() {
            if let Some(name) = path.file_name() {
                out.push((name.to_string_lossy().into_owned(), path));
            }
        }
    }
    out.sort();
    Ok(out)
}

/// `annotations` may be a directory of `<target>.ann` files or one file.
fn annotations_for(annotations: &Path, target_id: &str) -> anyhow::Result<TargetAnnotations> {
    let path = if annotations.is_dir() {
        annotations.join(format!("{target_id}.ann"))
    } else {
        annotations.to_path_buf()
    };
    let text = std::fs::read_to_string(&path)
        .with_context(|| format!("reading annotations {}", path.display()))?;
    parse_annotations(&text).with_context(|| format!("parsing {}", path.display()))
}

fn pool_for(dir: &Path, target_id: &str, sequence: &str) -> anyhow::Result<PoolLoad> {
    let files = model_files_in_dir(dir)
        .with_context(|| format!("listing models in {}", dir.display()))?;
    let load = load_pool(&files, target_id, sequence)
        .with_context(|| format!("loading pool {}", dir.display()))?;
    Ok(load)
}

/// Write one output file, creating the output directory on first use.
fn write_output(cfg: &RunConfig, name: &str, text: &str) -> Result<PathBuf, Failure> {
    data_err(
        std::fs::create_dir_all(&cfg.out)
            .with_context(|| format!("creating output directory {}", cfg.out.display())),
    )?;
    let path = cfg.out.join(name);
    data_err(
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display())),
    )?;
    eprintln!("wrote {}", path.display());
    Ok(path)
}

pub fn extract_features(cfg: &RunConfig) -> CmdResult {
    let pools = require(&cfg.pools, "pools")?;
    let natives = require(&cfg.natives, "natives")?;
    let annotations = require(&cfg.annotations, "annotations")?;
    if !natives.is_dir() {
        return Err(Failure::Data(anyhow!("native directory {} does not exist", natives.display())));
    }

    let targets = data_err(target_dirs(pools))?;
    if targets.is_empty() {
        return Err(Failure::Data(anyhow!("no target directories under {}", pools.display())));
    }

    let mut target_data = Vec::new();
    for (target_id, dir) in &targets {
        let ta = match annotations_for(annotations, target_id) {
            Ok(ta) => ta,
            Err(e) => {
                warn(format!("target {target_id}: {e:#}; skipped"));
                continue;
            }
        };
        let load = match pool_for(dir, target_id, &ta.sequence) {
            Ok(load) => load,
            Err(e) => {
                warn(format!("target {target_id}: {e:#}; skipped"));
                continue;
            }
        };
        for line in &load.rejected {
            warn(line);
        }
        let native_path = natives.join(format!("{target_id}.pdb"));
        let native = match std::fs::read_to_string(&native_path) {
            Ok(text) => match parse_pdb(&text, target_id) {
                Ok(m) => Some(m),
                Err(e) => {
                    warn(format!("native {}: {e}; target skipped", native_path.display()));
                    None
                }
            },
            Err(_) => {
                warn(format!("target {target_id}: no native at {}; skipped", native_path.display()));
                None
            }
        };
        eprintln!("target {target_id}: {} models", load.pool.len());
        target_data.push(TargetData { pool: load.pool, native, ann: ta.ann });
    }

    let build = build_dataset(&target_data);
    for note in &build.skipped {
        warn(note);
    }
    if build.samples.is_empty() {
        return Err(Failure::Data(anyhow!(
            "zero usable samples (are the natives in {}?)",
            natives.display()
        )));
    }

    let mut hist = [0usize; NUM_QUALITY_CLASSES];
    for s in &build.samples {
        hist[quality_class(s.true_quality)] += 1;
    }
    eprintln!("extracted {} samples; per-class counts {hist:?}", build.samples.len());

    data_err(
        std::fs::create_dir_all(&cfg.out)
            .with_context(|| format!("creating output directory {}", cfg.out.display())),
    )?;
    let path = cfg.out.join("features.tsv");
    data_err(
        save_feature_matrix(&path, &build.samples)
            .map_err(anyhow::Error::from)
            .with_context(|| format!("writing {}", path.display())),
    )?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

pub fn train(cfg: &RunConfig) -> CmdResult {
    let features = require(&cfg.features, "features")?;
    let (layout, samples) = data_err(
        load_feature_matrix(features)
            .map_err(anyhow::Error::from)
            .with_context(|| format!("reading {}", features.display())),
    )?;
    if layout != FEATURE_LAYOUT_VERSION {
        return Err(Failure::Data(anyhow!(
            "feature file layout {layout:?} does not match this build ({FEATURE_LAYOUT_VERSION:?})"
        )));
    }
    if samples.is_empty() {
        return Err(Failure::Data(anyhow!("{} holds no samples", features.display())));
    }

    let balanced = balanced_sample(&samples, cfg.per_class, cfg.seed);
    for note in &balanced.diagnostics {
        warn(note);
    }
    eprintln!(
        "training on {} rows (per-class counts {:?}, seed {})",
        balanced.samples.len(),
        balanced.per_class_counts,
        cfg.seed
    );

    let params = cfg.forest_params();
    let model = data_err(
        forest::train_on_samples(&balanced, &params, cfg.seed, FEATURE_LAYOUT_VERSION)
            .map_err(anyhow::Error::from),
    )?;

    // run CV before writing anything so a failure never leaves partial output
    let report = if balanced.samples.len() >= cfg.cv_k {
        let x: Vec<&[f64]> = balanced.samples.iter().map(|s| s.features.as_slice()).collect();
        let y: Vec<f64> = balanced.samples.iter().map(|s| s.true_quality).collect();
        let report = data_err(
            forest::cv::k_fold_cv(&x, &y, &params, cfg.cv_k, cfg.cv_repeats, cfg.seed)
                .map_err(anyhow::Error::from),
        )?;
        eprintln!(
            "cross-validation ({}x{}-fold): MAE {:.4}, MSE {:.4}",
            cfg.cv_repeats, cfg.cv_k, report.mae_mean, report.mse_mean
        );
        Some(report)
    } else {
        warn(format!(
            "skipping cross-validation: {} samples < {} folds",
            balanced.samples.len(),
            cfg.cv_k
        ));
        None
    };

    data_err(
        std::fs::create_dir_all(&cfg.out)
            .with_context(|| format!("creating output directory {}", cfg.out.display())),
    )?;
    let model_path = cfg.out.join("forest.model");
    data_err(
        save_forest(&model_path, &model)
            .map_err(anyhow::Error::from)
            .with_context(|| format!("writing {}", model_path.display())),
    )?;
    eprintln!("wrote {}", model_path.display());
    if let Some(report) = report {
        write_output(cfg, "cv_report.tsv", &report.to_tsv())?;
    }
    Ok(())
}

pub fn score(cfg: &RunConfig, target_flag: Option<&str>) -> CmdResult {
    let pool_dir = require(&cfg.pool, "pool")?;
    let model_path = require(&cfg.model, "model")?;
    let annotations = require(&cfg.annotations, "annotations")?;

    let target_id = match target_flag {
        Some(t) => t.to_string(),
        None => pool_dir
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .ok_or_else(|| Failure::Config(anyhow!("cannot infer target id from {}", pool_dir.display())))?,
    };

    let forest = data_err(
        load_forest(model_path)
            .map_err(anyhow::Error::from)
            .with_context(|| format!("loading model {}", model_path.display())),
    )?;
    if forest.feature_layout_version != FEATURE_LAYOUT_VERSION {
        return Err(Failure::Data(anyhow!(
            "model was trained under layout {:?}, this build expects {FEATURE_LAYOUT_VERSION:?}",
            forest.feature_layout_version
        )));
    }

    let ta = data_err(annotations_for(annotations, &target_id))?;
    let load = data_err(pool_for(pool_dir, &target_id, &ta.sequence))?;
    for line in &load.rejected {
        warn(line);
    }

    let external = match &cfg.external {
        Some(path) => {
            let text = data_err(
                std::fs::read_to_string(path)
                    .with_context(|| format!("reading external scores {}", path.display())),
            )?;
            Some(data_err(parse_external_scores(&text).map_err(anyhow::Error::from))?)
        }
        None => None,
    };

    let pred = data_err(
        hybrid_global(&load.pool, &ta.ann, &forest, external.as_ref(), cfg.gate)
            .map_err(anyhow::Error::from),
    )?;
    match pred.method_used {
        MethodUsed::Pairwise => eprintln!(
            "target {target_id}: {} models, pairwise path (pool max {:.4})",
            load.pool.len(),
            pred.pool_max.unwrap_or(f64::NAN)
        ),
        MethodUsed::Single => eprintln!(
            "target {target_id}: {} models, single-model path{}",
            load.pool.len(),
            match pred.pool_max {
                Some(m) => format!(" (pool max {m:.4} at or below gate {})", cfg.gate),
                None => String::new(),
            }
        ),
    }

    let mut records = to_qa_records(&pred, ta.sequence.len());
    if cfg.cap < DISTANCE_CAP {
        for rec in &mut records {
            for d in rec.distances.iter_mut().flatten() {
                *d = d.min(cfg.cap);
            }
        }
    }
    let text = data_err(write_qa_output(&target_id, &records).map_err(anyhow::Error::from))?;
    write_output(cfg, &format!("{target_id}.qa"), &text)?;
    Ok(())
}

pub fn evaluate(cfg: &RunConfig) -> CmdResult {
    let pred_dir = require(&cfg.predictions, "predictions")?;
    let truth_path = require(&cfg.truths, "truths")?;

    let truth_text = data_err(
        std::fs::read_to_string(truth_path)
            .with_context(|| format!("reading truths {}", truth_path.display())),
    )?;
    let truths = data_err(parse_truth_file(&truth_text).map_err(anyhow::Error::from))?;

    let mut qa_files: Vec<PathBuf> = data_err(
        std::fs::read_dir(pred_dir)
            .with_context(|| format!("reading predictions {}", pred_dir.display())),
    )?
    .filter_map(|e| e.ok().map(|e| e.path()))
    .filter(|p| p.extension().is_some_and(|x| x == "qa"))
    .collect();
    qa_files.sort();
    if qa_files.is_empty() {
        return Err(Failure::Data(anyhow!("no .qa files in {}", pred_dir.display())));
    }

    let mut parsed: Vec<QaFile> = Vec::new();
    let mut predictions: ScoresByTarget = BTreeMap::new();
    for path in &qa_files {
        let text = data_err(
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display())),
        )?;
        let qa = data_err(
            parse_qa_file(&text)
                .map_err(anyhow::Error::from)
                .with_context(|| format!("parsing {}", path.display())),
        )?;
        let globals: BTreeMap<String, f64> =
            qa.records.iter().map(|r| (r.model_id.clone(), r.global)).collect();
        predictions.insert(qa.target_id.clone(), globals);
        parsed.push(qa);
    }

    let eval = data_err(evaluate_global(&predictions, &truths).map_err(anyhow::Error::from))?;
    for note in &eval.diagnostics {
        warn(note);
    }
    eprintln!(
        "{} targets: ave_corr {}, over_corr {}, ave_loss {:.4}",
        eval.per_target.len(),
        eval.ave_corr.map_or("-".into(), |v| format!("{v:.4}")),
        eval.over_corr.map_or("-".into(), |v| format!("{v:.4}")),
        eval.ave_loss
    );

    write_output(cfg, "summary.tsv", &write_summary_table(&eval))?;
    write_output(cfg, "per_target.tsv", &write_per_target_table(&eval))?;

    match (&cfg.pools, &cfg.natives) {
        (Some(pools), Some(natives)) => {
            let pairs = data_err(local_error_pairs(&parsed, pools, natives))?;
            if pairs.is_empty() {
                warn("local bins: no (real, predicted) distance pairs could be assembled");
            } else {
                let real: Vec<f64> = pairs.iter().map(|p| p.0).collect();
                let predicted: Vec<f64> = pairs.iter().map(|p| p.1).collect();
                let bins =
                    data_err(local_binned_error(&real, &predicted).map_err(anyhow::Error::from))?;
                write_output(cfg, "local_bins.tsv", &write_local_bins_table(&bins))?;
            }
        }
        _ => eprintln!("local bins: skipped (set `pools` and `natives` to enable)"),
    }
    Ok(())
}

/// Pair up real per-residue distances (model vs native) with the predicted
/// distances from a QA file, for every model of every evaluated target.
fn local_error_pairs(
    parsed: &[QaFile],
    pools: &Path,
    natives: &Path,
) -> anyhow::Result<Vec<(f64, f64)>> {
    let mut pairs = Vec::new();
    for qa in parsed {
        let native_path = natives.join(format!("{}.pdb", qa.target_id));
        let Ok(native_text) = std::fs::read_to_string(&native_path) else {
            warn(format!("local bins: no native for {}; skipped", qa.target_id));
            continue;
        };
        let native: StructureModel = match parse_pdb(&native_text, &qa.target_id) {
            Ok(m) => m,
            Err(e) => {
                warn(format!("local bins: native {}: {e}", native_path.display()));
                continue;
            }
        };
        let pool_dir = pools.join(&qa.target_id);
        for rec in &qa.records {
            let model_path = pool_dir.join(format!("{}.pdb", rec.model_id));
            let Ok(text) = std::fs::read_to_string(&model_path) else {
                warn(format!("local bins: missing {}; skipped", model_path.display()));
                continue;
            };
            let Ok(model) = parse_pdb(&text, &rec.model_id) else {
                warn(format!("local bins: unparsable {}; skipped", model_path.display()));
                continue;
            };
            let Ok(real) = per_residue_distances(&model, &native) else {
                warn(format!("local bins: {}/{}: no shared residues", qa.target_id, rec.model_id));
                continue;
            };
            for (seq, d) in real {
                let col = seq as usize - 1;
                if let Some(Some(pred)) = rec.distances.get(col) {
                    pairs.push((d, *pred));
                }
            }
        }
    }
    Ok(pairs)
}

pub fn sweep(cfg: &RunConfig) -> CmdResult {
    let pools = require(&cfg.pools, "pools")?;
    let annotations = require(&cfg.annotations, "annotations")?;
    let truth_path = require(&cfg.truths, "truths")?;

    let truth_text = data_err(
        std::fs::read_to_string(truth_path)
            .with_context(|| format!("reading truths {}", truth_path.display())),
    )?;
    let truths = data_err(parse_truth_file(&truth_text).map_err(anyhow::Error::from))?;

    let targets = data_err(target_dirs(pools))?;
    let mut sweep_targets = Vec::new();
    for (target_id, dir) in &targets {
        let Some(target_truths) = truths.get(target_id) else {
            warn(format!("target {target_id}: not in the truth file; skipped"));
            continue;
        };
        let ta = match annotations_for(annotations, target_id) {
            Ok(ta) => ta,
            Err(e) => {
                warn(format!("target {target_id}: {e:#}; skipped"));
                continue;
            }
        };
        let load = match pool_for(dir, target_id, &ta.sequence) {
            Ok(load) => load,
            Err(e) => {
                warn(format!("target {target_id}: {e:#}; skipped"));
                continue;
            }
        };
        for line in &load.rejected {
            warn(line);
        }
        let consensus = match pairwise_scores(&load.pool) {
            Ok(c) => c,
            Err(e) => {
                warn(format!("target {target_id}: {e}; skipped"));
                continue;
            }
        };
        sweep_targets.push(SweepTarget {
            target_id: target_id.clone(),
            consensus,
            truths: target_truths.clone(),
        });
    }
    if sweep_targets.is_empty() {
        return Err(Failure::Data(anyhow!("no usable multi-model pools under {}", pools.display())));
    }
    eprintln!("sweeping {} thresholds over {} targets", cfg.thresholds.len(), sweep_targets.len());

    let entries = threshold_sweep(&sweep_targets, &cfg.thresholds);
    write_output(cfg, "sweep.tsv", &write_sweep_table(&entries))?;
    Ok(())
}
