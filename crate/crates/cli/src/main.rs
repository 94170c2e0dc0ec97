//! `rfqa`: pool-based protein model quality assessment.
//!
//! Exit codes: 0 success, 1 usage/config error, 2 data error.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use commands::Failure;
use config::RunConfig;

#[derive(Parser)]
#[command(name = "rfqa", version, about = "Model quality assessment over structure pools")]
struct Cli {
    /// Flat key=value config file; command-line flags override its values.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Seed for sampling, training, and cross-validation.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,

    /// Worker threads (default: all cores). Thread count never changes
    /// any output value.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    /// Directory that receives every output file.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the labeled feature matrix from pools, natives, and annotations.
    ExtractFeatures {
        /// Directory of per-target subdirectories of model PDB files.
        #[arg(long, value_name = "DIR")]
        pools: Option<PathBuf>,
        /// Directory of `<target>.pdb` reference structures.
        #[arg(long, value_name = "DIR")]
        natives: Option<PathBuf>,
        /// Directory of `<target>.ann` files (sequence, ss, accessibility).
        #[arg(long, value_name = "DIR")]
        annotations: Option<PathBuf>,
    },
    /// Train the per-residue forest and write its cross-validation report.
    Train {
        /// Feature matrix written by extract-features.
        #[arg(long, value_name = "FILE")]
        features: Option<PathBuf>,
        /// Trees in the forest.
        #[arg(long, value_name = "N")]
        n_trees: Option<usize>,
        /// Cap on training rows drawn per quality class.
        #[arg(long, value_name = "N")]
        per_class: Option<usize>,
    },
    /// Score one target's pool of models and write `<target>.qa`.
    Score {
        /// Directory of this target's model PDB files.
        #[arg(long, value_name = "DIR")]
        pool: Option<PathBuf>,
        /// Trained forest file.
        #[arg(long, value_name = "FILE")]
        model: Option<PathBuf>,
        /// Annotation file for this target (or a directory of them).
        #[arg(long, value_name = "PATH")]
        annotations: Option<PathBuf>,
        /// Optional `<model> <score>` file overriding single-model globals.
        #[arg(long, value_name = "FILE")]
        external: Option<PathBuf>,
        /// Target id (default: the pool directory's name).
        #[arg(long, value_name = "ID")]
        target_id: Option<String>,
        /// Consensus gate; the pairwise path needs pool max strictly above.
        #[arg(long, value_name = "X")]
        gate: Option<f64>,
    },
    /// Compare a directory of QA predictions against a truth file.
    Evaluate {
        /// Directory of `.qa` prediction files.
        #[arg(long, value_name = "DIR")]
        predictions: Option<PathBuf>,
        /// Truth file of `target model gdt` lines.
        #[arg(long, value_name = "FILE")]
        truths: Option<PathBuf>,
        /// Pool root; with --natives, enables the per-residue error bins.
        #[arg(long, value_name = "DIR")]
        pools: Option<PathBuf>,
        /// Native structures for the per-residue error bins.
        #[arg(long, value_name = "DIR")]
        natives: Option<PathBuf>,
    },
    /// Average per-target consensus correlation at each admission threshold.
    SweepThreshold {
        /// Directory of per-target subdirectories of model PDB files.
        #[arg(long, value_name = "DIR")]
        pools: Option<PathBuf>,
        /// Directory of `<target>.ann` files.
        #[arg(long, value_name = "DIR")]
        annotations: Option<PathBuf>,
        /// Truth file of `target model gdt` lines.
        #[arg(long, value_name = "FILE")]
        truths: Option<PathBuf>,
        /// Comma-separated thresholds (default: 0.05 to 0.95 step 0.05).
        #[arg(long, value_name = "LIST")]
        thresholds: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage_ok = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return if usage_ok { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        cfg.load_file(path).map_err(Failure::Config)?;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(threads) = cli.threads {
        cfg.threads = Some(threads);
    }
    if let Some(out) = &cli.out {
        cfg.out = out.clone();
    }

    // per-command flags override the config file
    match &cli.command {
        Command::ExtractFeatures { pools, natives, annotations } => {
            override_path(&mut cfg.pools, pools);
            override_path(&mut cfg.natives, natives);
            override_path(&mut cfg.annotations, annotations);
        }
        Command::Train { features, n_trees, per_class } => {
            override_path(&mut cfg.features, features);
            if let Some(n) = n_trees {
                cfg.n_trees = *n;
            }
            if let Some(n) = per_class {
                cfg.per_class = *n;
            }
        }
        Command::Score { pool, model, annotations, external, gate, .. } => {
            override_path(&mut cfg.pool, pool);
            override_path(&mut cfg.model, model);
            override_path(&mut cfg.annotations, annotations);
            override_path(&mut cfg.external, external);
            if let Some(g) = gate {
                cfg.gate = *g;
            }
        }
        Command::Evaluate { predictions, truths, pools, natives } => {
            override_path(&mut cfg.predictions, predictions);
            override_path(&mut cfg.truths, truths);
            override_path(&mut cfg.pools, pools);
            override_path(&mut cfg.natives, natives);
        }
        Command::SweepThreshold { pools, annotations, truths, thresholds } => {
            override_path(&mut cfg.pools, pools);
            override_path(&mut cfg.annotations, annotations);
            override_path(&mut cfg.truths, truths);
            if let Some(list) = thresholds {
                cfg.thresholds = config::parse_thresholds(list).map_err(Failure::Config)?;
            }
        }
    }

    cfg.validate().map_err(Failure::Config)?;

    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Config(e.into()))?;
    }

    match &cli.command {
        Command::ExtractFeatures { .. } => commands::extract_features(&cfg),
        Command::Train { .. } => commands::train(&cfg),
        Command::Score { target_id, .. } => commands::score(&cfg, target_id.as_deref()),
        Command::Evaluate { .. } => commands::evaluate(&cfg),
        Command::SweepThreshold { .. } => commands::sweep(&cfg),
    }
}

fn override_path(slot: &mut Option<PathBuf>, flag: &Option<PathBuf>) {
    if let Some(path) = flag {
        *slot = Some(path.clone());
    }
}
