mod common;

use std::process::Command;

use bir_core::dataset::{ImageRecord, Manifest, SegAvailability, Split, Variant};
use bir_core::eval::Report;
use bir_core::metric::TrainConfig;
use common::{crafted_corpus, p, run, run_err, synth, write_corpus};

const CLUSTERS: &[&str] = &[
    "--preset",
    "clusters",
    "--train-ids",
    "10",
    "--images-per-id",
    "20",
];

fn read(path: &std::path::Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

fn capable_manifest(n: usize) -> Manifest {
    let records = (0..n)
        .map(|i| {
            let mut r = ImageRecord::new(
                format!("img/{i:05}.png"),
                (i / 4) as u64,
                (i % 4) as u32,
                Split::Train,
            );
            r.availability = SegAvailability::Kept;
            r
        })
        .collect();
    Manifest::new(records, 0)
}

#[test]
fn postprocess_all_kept() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = crafted_corpus();
    let kept: Vec<_> = cases.iter().filter(|c| c.expected_kept()).collect();
    let (masks, images) = write_corpus(tmp.path(), &kept);
    let out = tmp.path().join("out");
    let res = run(&[
        "postprocess",
        "--masks",
        p(&masks),
        "--images",
        p(&images),
        "--out",
        p(&out),
    ]);
    assert_eq!(
        res.stdout.trim(),
        format!("kept={} discarded=0 errors=0", kept.len())
    );
    assert_eq!(res.code, 0);
    for case in &kept {
        assert!(out
            .join("masks")
            .join(format!("{}.png", case.stem))
            .is_file());
        assert!(out
            .join("images")
            .join(format!("{}.png", case.stem))
            .is_file());
    }
}

#[test]
fn postprocess_logs_three_discards_and_is_repeatable() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = crafted_corpus();
    let mut chosen: Vec<_> = cases.iter().filter(|c| c.expected_kept()).take(5).collect();
    let below = ["band_11", "ring_01", "speck_09"];
    chosen.extend(cases.iter().filter(|c| below.contains(&c.stem.as_str())));
    let (masks, images) = write_corpus(tmp.path(), &chosen);

    let out_a = tmp.path().join("a");
    let res = run(&[
        "postprocess",
        "--masks",
        p(&masks),
        "--images",
        p(&images),
        "--out",
        p(&out_a),
    ]);
    assert_eq!(res.stdout.trim(), "kept=5 discarded=3 errors=0");
    let log = read(&out_a.join("outcomes.tsv"));
    for stem in below {
        let line = log.lines().find(|l| l.starts_with(stem)).unwrap();
        assert!(
            line.contains("\tdiscarded\t") && line.ends_with("below-threshold"),
            "{line}"
        );
    }

    let out_b = tmp.path().join("b");
    run(&[
        "postprocess",
        "--masks",
        p(&masks),
        "--images",
        p(&images),
        "--out",
        p(&out_b),
    ]);
    for sub in ["outcomes.tsv", "masks/band_15.png", "images/band_15.png"] {
        assert_eq!(
            std::fs::read(out_a.join(sub)).unwrap(),
            std::fs::read(out_b.join(sub)).unwrap(),
            "{sub}"
        );
    }
}

#[test]
fn postprocess_with_no_successes_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let masks = tmp.path().join("masks");
    let images = tmp.path().join("images");
    std::fs::create_dir_all(&masks).unwrap();
    std::fs::create_dir_all(&images).unwrap();
    std::fs::write(masks.join("broken.png"), b"not a png").unwrap();
    std::fs::write(images.join("broken.png"), b"not a png").unwrap();
    let out = tmp.path().join("out");
    let res = run(&[
        "postprocess",
        "--masks",
        p(&masks),
        "--images",
        p(&images),
        "--out",
        p(&out),
    ]);
    assert_eq!(res.code, 2);
    assert!(res.stderr.contains("broken"));
    assert!(read(&out.join("outcomes.tsv")).contains("broken\terror"));
}

#[test]
fn postprocess_rejects_bad_threshold_before_writing() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = crafted_corpus();
    let (masks, images) = write_corpus(tmp.path(), &[&cases[20]]);
    let out = tmp.path().join("out");
    let err = run_err(&[
        "postprocess",
        "--masks",
        p(&masks),
        "--images",
        p(&images),
        "--out",
        p(&out),
        "--threshold",
        "1.5",
    ]);
    assert_eq!(err.code(), 1);
    assert!(!out.exists());
}

#[test]
fn mix_k_zero_keeps_variants() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("in.tsv");
    capable_manifest(200).write(&input).unwrap();
    let out = tmp.path().join("out.tsv");
    let res = run(&["mix", "--manifest", p(&input), "--k", "0", "--out", p(&out)]);
    assert_eq!(res.stdout.trim(), "segmented=0 original=200");
    let a = Manifest::read(&input).unwrap();
    let b = Manifest::read(&out).unwrap();
    let variants = |m: &Manifest| m.records.iter().map(|r| r.variant).collect::<Vec<_>>();
    assert_eq!(variants(&a), variants(&b));
}

#[test]
fn mix_is_deterministic_and_records_seed() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("in.tsv");
    capable_manifest(500).write(&input).unwrap();
    let (a, b) = (tmp.path().join("a.tsv"), tmp.path().join("b.tsv"));
    run(&[
        "mix",
        "--manifest",
        p(&input),
        "--k",
        "0.2",
        "--seed",
        "7",
        "--out",
        p(&a),
    ]);
    run(&[
        "mix",
        "--manifest",
        p(&input),
        "--k",
        "0.2",
        "--seed",
        "7",
        "--out",
        p(&b),
    ]);
    assert_eq!(read(&a), read(&b));
    let m = Manifest::read(&a).unwrap();
    assert_eq!(m.seed, 7);
    assert!(m.count_variant(Variant::Segmented) > 0);
}

#[test]
fn mix_rejects_k_outside_unit_interval() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("in.tsv");
    capable_manifest(10).write(&input).unwrap();
    let out = tmp.path().join("out.tsv");
    let err = run_err(&[
        "mix",
        "--manifest",
        p(&input),
        "--k",
        "1.2",
        "--out",
        p(&out),
    ]);
    assert_eq!(err.code(), 1);
    assert!(!out.exists());
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_bir");
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("in.tsv");
    capable_manifest(10).write(&input).unwrap();
    let out = tmp.path().join("out.tsv");
    let status = Command::new(bin)
        .args([
            "mix",
            "--manifest",
            p(&input),
            "--k",
            "1.2",
            "--out",
            p(&out),
        ])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(1));
    let ok = Command::new(bin)
        .args([
            "mix",
            "--manifest",
            p(&input),
            "--k",
            "0.5",
            "--out",
            p(&out),
        ])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let help = Command::new(bin).arg("--help").output().unwrap();
    assert_eq!(help.status.code(), Some(0));
}

#[test]
fn train_defaults_log_batch_size_72() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = synth(tmp.path(), &[]);
    let model = tmp.path().join("model.json");
    let res = run(&[
        "train",
        "--manifest",
        p(&dir.join("train.tsv")),
        "--features",
        p(&dir.join("train_original.csv")),
        "--epochs",
        "2",
        "--out",
        p(&model),
    ]);
    assert!(res.stdout.starts_with("batch_size=72 "), "{}", res.stdout);
    let log = read(&tmp.path().join("model.loss.tsv"));
    assert!(log.lines().next().unwrap().contains("batch_size=72"));
    assert_eq!(log.lines().count(), 1 + 2);
}

#[test]
fn train_with_zero_lr_returns_initialisation() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = synth(tmp.path(), CLUSTERS);
    let model = tmp.path().join("model.json");
    run(&[
        "train",
        "--features",
        p(&dir.join("train_original.csv")),
        "--p",
        "10",
        "--epochs",
        "1",
        "--lr",
        "0",
        "--seed",
        "5",
        "--out",
        p(&model),
    ]);
    let config = TrainConfig::<f64> {
        p: 10,
        seed: 5,
        ..TrainConfig::default()
    };
    let init = config.initial_model(2).unwrap();
    assert_eq!(read(&model).trim_end(), init.to_json());
}

#[test]
fn train_loss_decreases_on_clusters() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = synth(tmp.path(), CLUSTERS);
    let model = tmp.path().join("model.json");
    run(&[
        "train",
        "--features",
        p(&dir.join("train_original.csv")),
        "--p",
        "10",
        "--epochs",
        "30",
        "--out",
        p(&model),
    ]);
    let losses: Vec<f64> = read(&tmp.path().join("model.loss.tsv"))
        .lines()
        .skip(1)
        .map(|l| l.split('\t').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(losses.len(), 30);
    assert!(losses[29] < losses[0], "{losses:?}");
}

#[test]
fn train_rejects_p_above_identity_count() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = synth(tmp.path(), CLUSTERS);
    let model = tmp.path().join("model.json");
    let err = run_err(&[
        "train",
        "--features",
        p(&dir.join("train_original.csv")),
        "--out",
        p(&model),
    ]);
    assert_eq!(err.code(), 1);
    assert!(!model.exists());
}

fn train_and_eval(tmp: &std::path::Path, report: &std::path::Path) -> bir_cli::Output {
    let dir = tmp.join("corpus");
    let model = tmp.join("model.json");
    if !model.exists() {
        run(&[
            "train",
            "--features",
            p(&dir.join("train_original.csv")),
            "--p",
            "10",
            "--epochs",
            "50",
            "--out",
            p(&model),
        ]);
    }
    let test = dir.join("test.tsv");
    let feats = dir.join("test_original.csv");
    run(&[
        "eval",
        "--model",
        p(&model),
        "--query",
        p(&test),
        "--query-features",
        p(&feats),
        "--gallery",
        p(&test),
        "--gallery-features",
        p(&feats),
        "--out",
        p(report),
    ])
}

#[test]
fn eval_reports_high_map_on_clusters_and_is_repeatable() {
    let tmp = tempfile::tempdir().unwrap();
    synth(tmp.path(), CLUSTERS);
    let (a, b) = (tmp.path().join("a.tsv"), tmp.path().join("b.tsv"));
    let out_a = train_and_eval(tmp.path(), &a);
    let out_b = train_and_eval(tmp.path(), &b);
    assert_eq!(out_a.stdout, out_b.stdout);
    assert_eq!(read(&a), read(&b));
    let report = Report::parse_machine(&read(&a), "report").unwrap();
    let row = &report.rows[0];
    assert!(row.map >= 0.95, "mAP {}", row.map);
    assert!(out_a.stdout.contains("mAP"));
}

#[test]
fn eval_missing_features_names_the_path() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = synth(tmp.path(), CLUSTERS);
    let model = tmp.path().join("model.json");
    run(&[
        "train",
        "--features",
        p(&dir.join("train_original.csv")),
        "--p",
        "10",
        "--epochs",
        "1",
        "--out",
        p(&model),
    ]);
    let missing = dir.join("nope.csv");
    let test = dir.join("test.tsv");
    let err = run_err(&[
        "eval",
        "--model",
        p(&model),
        "--query",
        p(&test),
        "--query-features",
        p(&missing),
        "--gallery",
        p(&test),
        "--gallery-features",
        p(&dir.join("test_original.csv")),
    ]);
    assert_ne!(err.code(), 0);
    assert!(err.to_string().contains(p(&missing)), "{err}");
}

fn ablate_args<'a>(dir: &'a std::path::Path, names: &'a mut Vec<String>) -> Vec<&'a str> {
    for f in [
        "train.tsv",
        "train_original.csv",
        "train_segmented.csv",
        "test.tsv",
        "test_original.csv",
        "test_segmented.csv",
    ] {
        names.push(dir.join(f).to_str().unwrap().to_string());
    }
    vec![
        "ablate",
        "--train",
        &names[0],
        "--train-features",
        &names[1],
        "--train-seg-features",
        &names[2],
        "--test",
        &names[3],
        "--test-features",
        &names[4],
        "--test-seg-features",
        &names[5],
    ]
}

#[test]
fn ablate_baseline_only_is_one_row_and_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = synth(tmp.path(), &[]);
    let mut names = Vec::new();
    let base = ablate_args(&dir, &mut names);
    let (a, b) = (tmp.path().join("a.tsv"), tmp.path().join("b.tsv"));
    for out in [&a, &b] {
        let mut args = base.clone();
        args.extend([
            "--variants",
            "baseline",
            "--epochs",
            "10",
            "--seed",
            "3",
            "--out",
            p(out),
        ]);
        let res = run(&args);
        assert_eq!(res.code, 0);
    }
    assert_eq!(read(&a), read(&b));
    let report = Report::parse_machine(&read(&a), "report").unwrap();
    assert_eq!(report.rows.len(), 1);
    assert_eq!(report.rows[0].label, "Baseline");
}

#[test]
fn ablate_rows_are_independent_of_their_neighbours() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = synth(tmp.path(), &[]);
    let mut names = Vec::new();
    let base = ablate_args(&dir, &mut names);
    let (a, b) = (tmp.path().join("a.tsv"), tmp.path().join("b.tsv"));
    let mut args = base.clone();
    args.extend([
        "--variants",
        "baseline,seg",
        "--epochs",
        "5",
        "--out",
        p(&a),
    ]);
    run(&args);
    let mut args = base.clone();
    args.extend([
        "--variants",
        "baseline,seg",
        "--k-grid",
        "0.5",
        "--epochs",
        "5",
        "--out",
        p(&b),
    ]);
    run(&args);
    let ra = Report::parse_machine(&read(&a), "report").unwrap();
    let rb = Report::parse_machine(&read(&b), "report").unwrap();
    assert_eq!(rb.rows.len(), 3);
    assert_eq!(ra.rows[..], rb.rows[..2]);
}

#[test]
fn config_file_supplies_flags_and_command_line_wins() {
    let tmp = tempfile::tempdir().unwrap();
    let input = tmp.path().join("in.tsv");
    capable_manifest(300).write(&input).unwrap();
    let conf = tmp.path().join("mix.conf");
    let out = tmp.path().join("out.tsv");
    std::fs::write(
        &conf,
        format!(
            "# mixing\nmanifest = {}\nk = 1\nseed = 9\nout = {}\n",
            p(&input),
            p(&out)
        ),
    )
    .unwrap();

    let res = run(&["mix", "--config", p(&conf)]);
    assert_eq!(res.stdout.trim(), "segmented=300 original=0");
    let res = run(&["mix", "--config", p(&conf), "--k", "0"]);
    assert_eq!(res.stdout.trim(), "segmented=0 original=300");
    assert_eq!(Manifest::read(&out).unwrap().seed, 9);

    std::fs::write(&conf, "k: 0.5\n").unwrap();
    assert_eq!(run_err(&["mix", "--config", p(&conf)]).code(), 1);
}

#[test]
fn root_env_resolves_relative_paths() {
    let tmp = tempfile::tempdir().unwrap();
    capable_manifest(20)
        .write(&tmp.path().join("in.tsv"))
        .unwrap();
    let bin = env!("CARGO_BIN_EXE_bir");
    let status = Command::new(bin)
        .env("BIR_ROOT", tmp.path())
        .args([
            "mix",
            "--manifest",
            "in.tsv",
            "--k",
            "0.5",
            "--out",
            "derived/out.tsv",
        ])
        .status()
        .unwrap();
    assert!(status.success());
    assert!(tmp.path().join("derived/out.tsv").is_file());
}
