//! End-to-end command tests: fixture targets are synthesized on disk, then
//! the binary is driven through the full pipeline and its exit codes,
//! stderr, and output files are checked.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rfqa_core::eval::write_truth_file;
use rfqa_core::geometry::gdt_ts;
use rfqa_core::structure::annotations::write_annotations;
use rfqa_core::structure::pdb::write_pdb;
use rfqa_core::structure::qa_format::{parse_qa_file, write_qa_output, QaRecord};
use rfqa_core::synth::{annotations_from_model, noisy_decoy, synthetic_native};
use tempfile::TempDir;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_rfqa")
}

fn run(args: &[&str], cwd: &Path) -> Output {
    Command::new(bin()).args(args).current_dir(cwd).output().expect("spawn rfqa")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn assert_exit(out: &Output, want: i32, what: &str) {
    assert_eq!(out.status.code(), Some(want), "{what}: stderr:\n{}", stderr_of(out));
}

/// On-disk fixture: `pools/<t>/<m>.pdb`, `natives/<t>.pdb`, `anns/<t>.ann`,
/// and a truth file of real GDT_TS values.
struct Fixture {
    _dir: TempDir,
    root: PathBuf,
    pools: PathBuf,
    natives: PathBuf,
    anns: PathBuf,
    truths: PathBuf,
}

fn make_fixture(n_targets: usize, n_models: usize, n_res: usize) -> Fixture {
    let dir = TempDir::new().unwrap();
    let root = dir.path().to_path_buf();
    let pools = root.join("pools");
    let natives = root.join("natives");
    let anns = root.join("anns");
    std::fs::create_dir_all(&natives).unwrap();
    std::fs::create_dir_all(&anns).unwrap();

    let mut truths: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
    for t in 0..n_targets {
        let target_id = format!("t{t:02}");
        let native = synthetic_native(n_res, 1000 + t as u64);
        std::fs::write(natives.join(format!("{target_id}.pdb")), write_pdb(&native)).unwrap();
        let ann = annotations_from_model(&native);
        std::fs::write(
            anns.join(format!("{target_id}.ann")),
            write_annotations(&native.resolved_sequence(), &ann),
        )
        .unwrap();

        let pool_dir = pools.join(&target_id);
        std::fs::create_dir_all(&pool_dir).unwrap();
        let mut target_truths = BTreeMap::new();
        for m in 0..n_models {
            let model_id = format!("m{m:02}");
            // noise grows with the model index, so quality spans the pool
            let sigma = 0.3 + 2.0 * m as f64 / n_models.max(2) as f64;
            let decoy = noisy_decoy(&native, sigma, (t * 97 + m) as u64, &model_id);
            std::fs::write(pool_dir.join(format!("{model_id}.pdb")), write_pdb(&decoy)).unwrap();
            let gdt = gdt_ts(&decoy, &native).unwrap().gdt_ts;
            target_truths.insert(model_id, gdt);
        }
        truths.insert(target_id, target_truths);
    }

    let truths_path = root.join("truths.txt");
    std::fs::write(&truths_path, write_truth_file(&truths)).unwrap();
    Fixture { _dir: dir, root, pools, natives, anns, truths: truths_path }
}

fn s(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

#[test]
fn full_pipeline_runs_and_outputs_parse() {
    let fx = make_fixture(2, 6, 30);
    let out_dir = fx.root.join("out");

    let extract = run(
        &[
            "extract-features",
            "--pools",
            &s(&fx.pools),
            "--natives",
            &s(&fx.natives),
            "--annotations",
            &s(&fx.anns),
            "--out",
            &s(&out_dir),
        ],
        &fx.root,
    );
    assert_exit(&extract, 0, "extract-features");
    let stderr = stderr_of(&extract);
    assert!(stderr.contains("samples"), "histogram missing: {stderr}");
    let features = out_dir.join("features.tsv");
    assert!(features.exists());

    let train = run(
        &[
            "train",
            "--features",
            &s(&features),
            "--n-trees",
            "12",
            "--per-class",
            "200",
            "--seed",
            "7",
            "--out",
            &s(&out_dir),
        ],
        &fx.root,
    );
    assert_exit(&train, 0, "train");
    let model = out_dir.join("forest.model");
    assert!(model.exists());
    assert!(out_dir.join("cv_report.tsv").exists());

    let qa_dir = fx.root.join("qa");
    for target in ["t00", "t01"] {
        let score = run(
            &[
                "score",
                "--pool",
                &s(&fx.pools.join(target)),
                "--model",
                &s(&model),
                "--annotations",
                &s(&fx.anns),
                "--out",
                &s(&qa_dir),
            ],
            &fx.root,
        );
        assert_exit(&score, 0, "score");
        // tight pool at these sigmas: consensus stays above the gate
        assert!(stderr_of(&score).contains("pairwise path"), "{}", stderr_of(&score));

        let text = std::fs::read_to_string(qa_dir.join(format!("{target}.qa"))).unwrap();
        let qa = parse_qa_file(&text).unwrap();
        assert_eq!(qa.target_id, target);
        assert_eq!(qa.records.len(), 6);
        for rec in &qa.records {
            assert!((0.0..=1.0).contains(&rec.global));
            for d in rec.distances.iter().flatten() {
                assert!(*d > 0.0 && *d <= 15.0);
            }
        }
    }

    let eval_dir = fx.root.join("eval");
    let eval = run(
        &[
            "evaluate",
            "--predictions",
            &s(&qa_dir),
            "--truths",
            &s(&fx.truths),
            "--pools",
            &s(&fx.pools),
            "--natives",
            &s(&fx.natives),
            "--out",
            &s(&eval_dir),
        ],
        &fx.root,
    );
    assert_exit(&eval, 0, "evaluate");
    for name in ["summary.tsv", "per_target.tsv", "local_bins.tsv"] {
        assert!(eval_dir.join(name).exists(), "{name} missing");
    }
    let summary = std::fs::read_to_string(eval_dir.join("summary.tsv")).unwrap();
    let mut lines = summary.lines();
    assert_eq!(lines.next().unwrap(), "n_targets\tave_corr\tover_corr\tave_loss");
    let row: Vec<&str> = lines.next().unwrap().split('\t').collect();
    assert_eq!(row[0], "2");
    let ave_corr: f64 = row[1].parse().unwrap();
    // consensus on pools with monotone noise should track the truth well
    assert!(ave_corr > 0.5, "ave_corr {ave_corr}");

    let sweep = run(
        &[
            "sweep-threshold",
            "--pools",
            &s(&fx.pools),
            "--annotations",
            &s(&fx.anns),
            "--truths",
            &s(&fx.truths),
            "--thresholds",
            "0.1,0.5,0.9",
            "--out",
            &s(&eval_dir),
        ],
        &fx.root,
    );
    assert_exit(&sweep, 0, "sweep-threshold");
    let sweep_text = std::fs::read_to_string(eval_dir.join("sweep.tsv")).unwrap();
    assert_eq!(sweep_text.lines().count(), 4, "{sweep_text}");
    assert!(sweep_text.starts_with("threshold\tn_targets\tavg_corr\n"));
}

#[test]
fn single_model_pool_takes_single_path_and_external_overrides() {
    let fx = make_fixture(1, 1, 24);
    let out_dir = fx.root.join("out");

    // a forest is still needed; train a tiny one on this fixture
    let extract = run(
        &[
            "extract-features",
            "--pools",
            &s(&fx.pools),
            "--natives",
            &s(&fx.natives),
            "--annotations",
            &s(&fx.anns),
            "--out",
            &s(&out_dir),
        ],
        &fx.root,
    );
    assert_exit(&extract, 0, "extract-features");
    let train = run(
        &[
            "train",
            "--features",
            &s(&out_dir.join("features.tsv")),
            "--n-trees",
            "5",
            "--per-class",
            "50",
            "--out",
            &s(&out_dir),
        ],
        &fx.root,
    );
    assert_exit(&train, 0, "train");
    let model = out_dir.join("forest.model");

    let score = run(
        &[
            "score",
            "--pool",
            &s(&fx.pools.join("t00")),
            "--model",
            &s(&model),
            "--annotations",
            &s(&fx.anns),
            "--out",
            &s(&out_dir),
        ],
        &fx.root,
    );
    assert_exit(&score, 0, "score single");
    assert!(stderr_of(&score).contains("single-model path"), "{}", stderr_of(&score));

    // an external score takes precedence on the single-model path
    let ext = fx.root.join("ext.txt");
    std::fs::write(&ext, "m00 0.77\n").unwrap();
    let score2 = run(
        &[
            "score",
            "--pool",
            &s(&fx.pools.join("t00")),
            "--model",
            &s(&model),
            "--annotations",
            &s(&fx.anns),
            "--external",
            &s(&ext),
            "--out",
            &s(&out_dir),
        ],
        &fx.root,
    );
    assert_exit(&score2, 0, "score external");
    let qa = parse_qa_file(&std::fs::read_to_string(out_dir.join("t00.qa")).unwrap()).unwrap();
    assert_eq!(qa.records[0].global, 0.77);
}

#[test]
fn usage_and_config_errors_exit_1() {
    let fx = make_fixture(1, 2, 12);

    // unknown flag: usage error
    let out = run(&["score", "--nonsense"], &fx.root);
    assert_exit(&out, 1, "unknown flag");

    // missing required path: config error
    let out = run(&["train"], &fx.root);
    assert_exit(&out, 1, "missing features path");
    assert!(stderr_of(&out).contains("features"));

    // config file with an unknown key
    let cfg = fx.root.join("bad.conf");
    std::fs::write(&cfg, "gatte = 0.3\n").unwrap();
    let out = run(&["train", "--config", &s(&cfg)], &fx.root);
    assert_exit(&out, 1, "unknown config key");

    // invariant violation
    let cfg2 = fx.root.join("bad2.conf");
    std::fs::write(&cfg2, "gate = 1.5\n").unwrap();
    let out = run(&["train", "--config", &s(&cfg2)], &fx.root);
    assert_exit(&out, 1, "gate out of range");

    // the transform constants are pinned
    let cfg3 = fx.root.join("bad3.conf");
    std::fs::write(&cfg3, "d0 = 4.2\n").unwrap();
    let out = run(&["train", "--config", &s(&cfg3)], &fx.root);
    assert_exit(&out, 1, "non-default d0");
    assert!(stderr_of(&out).contains("fixed"));

    // --help is not an error
    let out = run(&["--help"], &fx.root);
    assert_exit(&out, 0, "help");
}

#[test]
fn data_errors_exit_2() {
    let fx = make_fixture(1, 2, 12);
    let out_dir = fx.root.join("out");

    // natives directory that does not exist, named in the message
    let out = run(
        &[
            "extract-features",
            "--pools",
            &s(&fx.pools),
            "--natives",
            &s(&fx.root.join("nowhere")),
            "--annotations",
            &s(&fx.anns),
            "--out",
            &s(&out_dir),
        ],
        &fx.root,
    );
    assert_exit(&out, 2, "missing natives dir");
    assert!(stderr_of(&out).contains("nowhere"), "{}", stderr_of(&out));

    // unreadable model file
    let out = run(
        &[
            "score",
            "--pool",
            &s(&fx.pools.join("t00")),
            "--model",
            &s(&fx.root.join("no_such.model")),
            "--annotations",
            &s(&fx.anns),
            "--out",
            &s(&out_dir),
        ],
        &fx.root,
    );
    assert_exit(&out, 2, "unreadable model");

    // corrupt feature file
    let garbled = fx.root.join("garbled.tsv");
    std::fs::write(&garbled, "#layout wrong-layout\nheader\n").unwrap();
    let out = run(&["train", "--features", &s(&garbled), "--out", &s(&out_dir)], &fx.root);
    assert_exit(&out, 2, "corrupt features");

    // evaluate with zero overlap between predictions and truths
    let qa_dir = fx.root.join("qa_alien");
    std::fs::create_dir_all(&qa_dir).unwrap();
    let rec = QaRecord { model_id: "x1".into(), global: 0.5, distances: vec![Some(1.0)] };
    std::fs::write(qa_dir.join("alien.qa"), write_qa_output("alien", &[rec]).unwrap()).unwrap();
    let out = run(
        &[
            "evaluate",
            "--predictions",
            &s(&qa_dir),
            "--truths",
            &s(&fx.truths),
            "--out",
            &s(&out_dir),
        ],
        &fx.root,
    );
    assert_exit(&out, 2, "zero overlap");
}

#[test]
fn evaluating_predictions_equal_to_truths_is_perfect() {
    // truths on the QA format's 2-decimal grid, so the round-trip is exact
    let dir = TempDir::new().unwrap();
    let root = dir.path().to_path_buf();
    let mut truths: BTreeMap<String, BTreeMap<String, f64>> = BTreeMap::new();
    for (t, scores) in [("t00", [0.3, 0.5, 0.7]), ("t01", [0.2, 0.55, 0.9])] {
        let models: BTreeMap<String, f64> =
            scores.iter().enumerate().map(|(i, g)| (format!("m{i:02}"), *g)).collect();
        truths.insert(t.to_string(), models);
    }
    let truths_path = root.join("truths.txt");
    std::fs::write(&truths_path, write_truth_file(&truths)).unwrap();

    let qa_dir = root.join("qa_truth");
    std::fs::create_dir_all(&qa_dir).unwrap();
    for (target, models) in &truths {
        let records: Vec<QaRecord> = models
            .iter()
            .map(|(m, g)| QaRecord { model_id: m.clone(), global: *g, distances: vec![Some(1.0)] })
            .collect();
        std::fs::write(qa_dir.join(format!("{target}.qa")), write_qa_output(target, &records).unwrap())
            .unwrap();
    }

    let out_dir = root.join("eval");
    let out = run(
        &[
            "evaluate",
            "--predictions",
            &s(&qa_dir),
            "--truths",
            &s(&truths_path),
            "--out",
            &s(&out_dir),
        ],
        &root,
    );
    assert_exit(&out, 0, "self evaluate");
    let summary = std::fs::read_to_string(out_dir.join("summary.tsv")).unwrap();
    let row = summary.lines().nth(1).unwrap();
    let cols: Vec<&str> = row.split('\t').collect();
    assert_eq!(cols[1], "1.000000", "{summary}");
    assert_eq!(cols[3], "0.000000", "{summary}");
}
