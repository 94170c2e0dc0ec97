//! Run configuration: documented defaults, overridden by a flat key=value
//! config file, overridden again by command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rfqa_core::forest::ForestParams;
use rfqa_core::qa::{D0, DEFAULT_GATE, DISTANCE_CAP};

#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Directory of per-target subdirectories, each holding model PDB files.
    pub pools: Option<PathBuf>,
    /// Model directory for a single target (the `score` command).
    pub pool: Option<PathBuf>,
    /// Directory of `<target>.pdb` reference structures.
    pub natives: Option<PathBuf>,
    /// Directory of `<target>.ann` annotation files (or one file directly).
    pub annotations: Option<PathBuf>,
    /// Persisted forest, as written by `train`.
    pub model: Option<PathBuf>,
    /// Feature matrix file (written by `extract-features`, read by `train`).
    pub features: Option<PathBuf>,
    /// Truth file of `target model gdt` lines.
    pub truths: Option<PathBuf>,
    /// Directory of `.qa` prediction files (the `evaluate` command).
    pub predictions: Option<PathBuf>,
    /// Optional per-model external global scores for the single-model path.
    pub external: Option<PathBuf>,
    /// Output directory for everything a command writes.
    pub out: PathBuf,

    pub n_trees: usize,
    pub mtry: Option<usize>,
    pub min_leaf: usize,
    pub max_depth: Option<usize>,
    pub bootstrap: bool,
    pub cv_k: usize,
    pub cv_repeats: usize,

    /// Consensus gate: the pairwise path is taken only when the pool's best
    /// consensus score is strictly above this.
    pub gate: f64,
    /// Ceiling applied to emitted per-residue distances.
    pub cap: f64,
    /// Distance scale of the quality transform.
    pub d0: f64,
    /// Per-class cap used when balancing the training sample.
    pub per_class: usize,
    pub seed: u64,
    pub threads: Option<usize>,
    /// Consensus thresholds swept by `sweep-threshold`.
    pub thresholds: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        let forest = ForestParams::default();
        RunConfig {
            pools: None,
            pool: None,
            natives: None,
            annotations: None,
            model: None,
            features: None,
            truths: None,
            predictions: None,
            external: None,
            out: PathBuf::from("."),
            n_trees: forest.n_trees,
            mtry: forest.mtry,
            min_leaf: forest.min_leaf,
            max_depth: forest.max_depth,
            bootstrap: forest.bootstrap,
            cv_k: 5,
            cv_repeats: 1,
            gate: DEFAULT_GATE,
            cap: DISTANCE_CAP,
            d0: D0,
            per_class: 10_000,
            seed: 0,
            threads: None,
            thresholds: (1..=19).map(|i| i as f64 * 0.05).collect(),
        }
    }
}

impl RunConfig {
    pub fn forest_params(&self) -> ForestParams {
        ForestParams {
            n_trees: self.n_trees,
            mtry: self.mtry,
            min_leaf: self.min_leaf,
            max_depth: self.max_depth,
            bootstrap: self.bootstrap,
        }
    }

    /// Merge one config file into self (later writers win).
    pub fn load_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("config {} line {}: expected key=value, got {raw:?}", path.display(), lineno + 1);
            };
            self.set(key.trim(), value.trim())
                .with_context(|| format!("config {} line {}", path.display(), lineno + 1))?;
        }
        Ok(())
    }

    /// Apply one key. Unknown keys are rejected so typos fail loudly.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value.parse().map_err(|_| anyhow::anyhow!("bad value {value:?} for {key}"))
        }
        // `none` clears the optional numeric knobs back to their defaults
        fn opt<T: std::str::FromStr>(key: &str, value: &str) -> Result<Option<T>> {
            if value.eq_ignore_ascii_case("none") {
                Ok(None)
            } else {
                parse(key, value).map(Some)
            }
        }
        match key {
            "pools" => self.pools = Some(PathBuf::from(value)),
            "pool" => self.pool = Some(PathBuf::from(value)),
            "natives" => self.natives = Some(PathBuf::from(value)),
            "annotations" => self.annotations = Some(PathBuf::from(value)),
            "model" => self.model = Some(PathBuf::from(value)),
            "features" => self.features = Some(PathBuf::from(value)),
            "truths" => self.truths = Some(PathBuf::from(value)),
            "predictions" => self.predictions = Some(PathBuf::from(value)),
            "external" => self.external = Some(PathBuf::from(value)),
            "out" => self.out = PathBuf::from(value),
            "n_trees" => self.n_trees = parse(key, value)?,
            "mtry" => self.mtry = opt(key, value)?,
            "min_leaf" => self.min_leaf = parse(key, value)?,
            "max_depth" => self.max_depth = opt(key, value)?,
            "bootstrap" => self.bootstrap = parse(key, value)?,
            "cv_k" => self.cv_k = parse(key, value)?,
            "cv_repeats" => self.cv_repeats = parse(key, value)?,
            "gate" => self.gate = parse(key, value)?,
            "cap" => self.cap = parse(key, value)?,
            "d0" => self.d0 = parse(key, value)?,
            "per_class" => self.per_class = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "threads" => self.threads = Some(parse(key, value)?),
            "thresholds" => self.thresholds = parse_thresholds(value)?,
            other => bail!("unknown config key {other:?}"),
        }
        Ok(())
    }

    /// Reject impossible settings before any command touches its outputs.
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.gate) {
            bail!("gate must be in [0,1], got {}", self.gate);
        }
        if self.cap <= 0.0 {
            bail!("cap must be > 0, got {}", self.cap);
        }
        if self.cap > DISTANCE_CAP {
            bail!("cap must not exceed {DISTANCE_CAP} (the output format's ceiling), got {}", self.cap);
        }
        if self.d0 <= 0.0 {
            bail!("d0 must be > 0, got {}", self.d0);
        }
        if self.d0 != D0 {
            // the transform constant is baked into trained models and the
            // feature layout; changing it silently would corrupt labels
            bail!("d0 is fixed at {D0} by the feature layout, got {}", self.d0);
        }
        if self.n_trees == 0 {
            bail!("n_trees must be >= 1");
        }
        if self.min_leaf == 0 {
            bail!("min_leaf must be >= 1");
        }
        if self.cv_k < 2 {
            bail!("cv_k must be >= 2, got {}", self.cv_k);
        }
        if self.cv_repeats == 0 {
            bail!("cv_repeats must be >= 1");
        }
        if self.per_class == 0 {
            bail!("per_class must be >= 1");
        }
        if self.thresholds.is_empty() {
            bail!("thresholds must not be empty");
        }
        for t in &self.thresholds {
            if !(0.0..=1.0).contains(t) {
                bail!("thresholds must be in [0,1], got {t}");
            }
        }
        if let Some(0) = self.threads {
            bail!("threads must be >= 1");
        }
        Ok(())
    }
}

pub fn parse_thresholds(value: &str) -> Result<Vec<f64>> {
    let out: Vec<f64> = value
        .split(',')
        .map(|tok| tok.trim().parse::<f64>().map_err(|_| anyhow::anyhow!("bad threshold {tok:?}")))
        .collect::<Result<_>>()?;
    if out.is_empty() {
        bail!("thresholds must not be empty");
    }
    Ok(out)
}
