use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use annealnet::build::read_layout;
use annealnet::nn::read_weights;
use annealnet::qubo::{read_qubo, SampleSet};

fn annealnet(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_annealnet"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn ok(o: Output) -> Output {
    assert!(
        o.status.success(),
        "stdout:\n{}\nstderr:\n{}",
        stdout(&o),
        stderr(&o)
    );
    o
}

/// Fixture glyphs and trained weights in a fresh directory.
fn trained() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("glyphs.txt"),
        include_str!("../../core/data/glyphs.txt"),
    )
    .unwrap();
    ok(annealnet(dir.path(), &["train", "--out", "w.txt"]));
    dir
}

const SMALL_RUN: &[&str] = &["--reads", "200", "--sweeps", "200", "--k", "50"];

#[test]
fn train_fits_the_bundled_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let o = ok(annealnet(dir.path(), &["train", "--out", "w.txt"]));
    assert!(stdout(&o).contains("accuracy 1.0000"), "{}", stdout(&o));
    let w = read_weights(dir.path().join("w.txt")).unwrap();
    assert_eq!(w.num_classes(), 5);
    assert_eq!(w.dense.dim(), (5, 5));
}

#[test]
fn train_seed_changes_the_weights() {
    let dir = tempfile::tempdir().unwrap();
    ok(annealnet(dir.path(), &["train", "--out", "a.txt"]));
    ok(annealnet(dir.path(), &["train", "--out", "b.txt"]));
    ok(annealnet(
        dir.path(),
        &["train", "--out", "c.txt", "--seed", "9"],
    ));
    let read = |name: &str| fs::read(dir.path().join(name)).unwrap();
    assert_eq!(read("a.txt"), read("b.txt"));
    assert_ne!(read("a.txt"), read("c.txt"));
}

#[test]
fn failed_training_exits_with_runtime_code() {
    let dir = tempfile::tempdir().unwrap();
    let o = annealnet(dir.path(), &["train", "--out", "w.txt", "--epochs", "0"]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(!dir.path().join("w.txt").exists());
}

#[test]
fn missing_data_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let o = annealnet(
        dir.path(),
        &["train", "--data", "no-such-glyphs.txt", "--out", "w.txt"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("no-such-glyphs.txt"), "{}", stderr(&o));
}

#[test]
fn unknown_backend_is_a_usage_error_before_any_file_is_read() {
    let dir = tempfile::tempdir().unwrap();
    let o = annealnet(
        dir.path(),
        &[
            "classify",
            "--weights",
            "missing.txt",
            "--data",
            "missing.txt",
            "--backend",
            "qpu",
        ],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("qpu"), "{}", stderr(&o));
}

#[test]
fn bad_flags_exit_with_usage_code() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["train", "--bogus"][..],
        &["sample", "--qubo", "q.txt", "--reads", "many"],
        &["sample", "--qubo", "q.txt", "--beta-start", "hot"],
        &[
            "classify",
            "--weights",
            "w",
            "--data",
            "d",
            "--features",
            "f",
        ],
        &[
            "classify",
            "--weights",
            "w",
            "--data",
            "d",
            "--reads",
            "10",
            "--k",
            "11",
        ],
        &[
            "build-qubo",
            "--weights",
            "w",
            "--data",
            "d",
            "--out",
            "q",
            "--clamp-mode",
            "half",
        ],
        &[
            "build-qubo",
            "--weights",
            "w",
            "--data",
            "d",
            "--out",
            "q",
            "--alpha",
            "-1",
        ],
        &["sample"],
    ] {
        let o = annealnet(dir.path(), args);
        assert_eq!(o.status.code(), Some(1), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn bench_rejects_zero_reads() {
    let dir = tempfile::tempdir().unwrap();
    let o = annealnet(dir.path(), &["bench", "--reads", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("reads"), "{}", stderr(&o));
}

#[test]
fn bench_prints_microsecond_timings() {
    let dir = tempfile::tempdir().unwrap();
    let o = ok(annealnet(
        dir.path(),
        &[
            "bench",
            "--reads",
            "2",
            "--sweeps",
            "10",
            "--repetitions",
            "3",
        ],
    ));
    let text = stdout(&o);
    assert!(text.contains("358 nodes"), "{text}");
    assert!(text.contains("median") && text.contains(" us"), "{text}");
    assert!(text.contains("no quantum annealer timing"), "{text}");
}

#[test]
fn build_then_sample_round_trip() {
    let dir = trained();
    let d = dir.path();
    let o = ok(annealnet(
        d,
        &[
            "build-qubo",
            "--weights",
            "w.txt",
            "--data",
            "glyphs.txt",
            "--index",
            "1",
            "--out",
            "q.txt",
        ],
    ));
    assert!(stdout(&o).contains("30 nodes"), "{}", stdout(&o));
    let q = read_qubo(d.join("q.txt")).unwrap();
    let layout = read_layout(d.join("q.txt.layout")).unwrap();
    assert_eq!((q.n(), layout.n(), layout.num_classes()), (30, 30, 5));

    ok(annealnet(
        d,
        &[
            "sample", "--qubo", "q.txt", "--reads", "20", "--sweeps", "100", "--out", "s.txt",
        ],
    ));
    let to_stdout = ok(annealnet(
        d,
        &[
            "sample", "--qubo", "q.txt", "--reads", "20", "--sweeps", "100",
        ],
    ));
    let from_file = fs::read_to_string(d.join("s.txt")).unwrap();
    assert_eq!(stdout(&to_stdout), from_file);
    let set = SampleSet::parse(&from_file).unwrap();
    assert_eq!((set.n(), set.reads()), (30, 20));

    // The folded model is small enough to enumerate.
    ok(annealnet(
        d,
        &[
            "build-qubo",
            "--weights",
            "w.txt",
            "--data",
            "glyphs.txt",
            "--out",
            "f.txt",
            "--layout",
            "f.layout",
            "--clamp-mode",
            "folded",
        ],
    ));
    assert_eq!(read_layout(d.join("f.layout")).unwrap().n(), 10);
    let exact = ok(annealnet(
        d,
        &[
            "sample",
            "--qubo",
            "f.txt",
            "--backend",
            "exact",
            "--reads",
            "8",
        ],
    ));
    assert_eq!(SampleSet::parse(&stdout(&exact)).unwrap().reads(), 8);
}

#[test]
fn build_index_out_of_range() {
    let dir = trained();
    let o = annealnet(
        dir.path(),
        &[
            "build-qubo",
            "--weights",
            "w.txt",
            "--data",
            "glyphs.txt",
            "--index",
            "5",
            "--out",
            "q.txt",
        ],
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(!dir.path().join("q.txt").exists());
}

#[test]
fn classify_is_deterministic_across_runs_and_threads() {
    let dir = trained();
    let mut args = vec![
        "classify",
        "--weights",
        "w.txt",
        "--data",
        "glyphs.txt",
        "--format",
        "csv",
    ];
    args.extend_from_slice(SMALL_RUN);
    let a = ok(annealnet(dir.path(), &args));
    let b = ok(annealnet(dir.path(), &args));
    args.extend_from_slice(&["--threads", "3"]);
    let c = ok(annealnet(dir.path(), &args));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let csv = stdout(&a);
    assert!(csv.starts_with("input,0,1,2,3,4,predicted\n"), "{csv}");
    assert_eq!(csv.lines().count(), 6);
}

#[test]
fn classify_text_table() {
    let dir = trained();
    let mut args = vec![
        "classify",
        "--weights",
        "w.txt",
        "--data",
        "glyphs.txt",
        "--beta-start",
        "auto",
    ];
    args.extend_from_slice(SMALL_RUN);
    let o = ok(annealnet(dir.path(), &args));
    let text = stdout(&o);
    assert!(
        text.starts_with("input |    0    1    2    3    4 | predicted"),
        "{text}"
    );
    assert!(text.contains("diagonal argmax: "), "{text}");
}

#[test]
fn dense_only_weights_with_feature_file() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(
        d.join("w.txt"),
        "dense rows=4 cols=2\n2.0 -2.0\n2.0 -2.0\n-2.0 2.0\n-2.0 2.0\n",
    )
    .unwrap();
    fs::write(
        d.join("f.txt"),
        "features n=4 classes=2\n0 0.9 1.0 0.0 0.1\n1 0.1 0.0 0.8 1.0\n",
    )
    .unwrap();
    let o = ok(annealnet(
        d,
        &[
            "classify",
            "--weights",
            "w.txt",
            "--features",
            "f.txt",
            "--format",
            "csv",
            "--reads",
            "100",
            "--k",
            "20",
        ],
    ));
    let csv = stdout(&o);
    let predicted: Vec<&str> = csv
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap())
        .collect();
    assert_eq!(predicted, ["0", "1"], "{csv}");

    // Glyph input needs a conv layer.
    fs::write(d.join("g.txt"), include_str!("../../core/data/glyphs.txt")).unwrap();
    let o = annealnet(d, &["classify", "--weights", "w.txt", "--data", "g.txt"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));

    // Class counts must agree.
    fs::write(d.join("bad.txt"), "features n=4 classes=3\n0 0 0 0 0\n").unwrap();
    let o = annealnet(
        d,
        &["classify", "--weights", "w.txt", "--features", "bad.txt"],
    );
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = trained();
    let d = dir.path();
    ok(annealnet(
        d,
        &[
            "build-qubo",
            "--weights",
            "w.txt",
            "--data",
            "glyphs.txt",
            "--out",
            "q.txt",
        ],
    ));
    fs::write(
        d.join("run.cfg"),
        "# sampler settings\nqubo = q.txt\nreads = 7\nsweeps = 20\nbackend = qpu\n",
    )
    .unwrap();

    let o = annealnet(d, &["--config", "run.cfg", "sample"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));

    let o = ok(annealnet(
        d,
        &["sample", "--config", "run.cfg", "--backend", "anneal"],
    ));
    assert_eq!(SampleSet::parse(&stdout(&o)).unwrap().reads(), 7);
    let o = ok(annealnet(
        d,
        &[
            "--config",
            "run.cfg",
            "sample",
            "--backend",
            "gibbs",
            "--reads",
            "3",
        ],
    ));
    assert_eq!(SampleSet::parse(&stdout(&o)).unwrap().reads(), 3);

    fs::write(d.join("bad.cfg"), "temperature = 3\n").unwrap();
    let o = annealnet(d, &["--config", "bad.cfg", "sample"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("temperature"), "{}", stderr(&o));

    let o = annealnet(d, &["--config", "absent.cfg", "sample"]);
    assert_eq!(o.status.code(), Some(2));
}
