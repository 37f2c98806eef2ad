use std::path::Path;

use clap::CommandFactory;
use selcls::bench::synthetic;
use selcls::dataio::serialize_libsvm;
use selcls::models::TrainedClassifier;
use selcls::Dataset;

use super::*;

const PATH_FLAGS: &[&str] = &["--manifest", "--model", "--score", "--out", "--curve", "--atoms", "--config", "--out-dir"];

/// `selcls args` with file arguments resolved inside `dir`.
fn argv(dir: &Path, args: &[&str]) -> Vec<String> {
    let mut v = vec!["selcls".to_string()];
    for (i, a) in args.iter().enumerate() {
        if i > 0 && PATH_FLAGS.contains(&args[i - 1]) {
            v.push(dir.join(a).display().to_string());
        } else {
            v.push(a.to_string());
        }
    }
    v
}

fn run_in(dir: &Path, args: &[&str]) -> CliResult<String> {
    run(Cli::try_parse_from(argv(dir, args)).expect("valid arguments"))
}

fn out(dir: &Path, args: &[&str]) -> String {
    run_in(dir, args).unwrap_or_else(|e| panic!("{args:?}: {e}"))
}

fn code(dir: &Path, args: &[&str]) -> u8 {
    execute(argv(dir, args))
}

fn value(out: &str, key: &str) -> f64 {
    out.lines()
        .find_map(|l| l.strip_prefix(&format!("{key} ")))
        .unwrap_or_else(|| panic!("no {key} in {out}"))
        .parse()
        .unwrap()
}

fn write_dataset(dir: &Path, name: &str, data: &Dataset, seed: u64) {
    std::fs::write(dir.join(format!("{name}.libsvm")), serialize_libsvm(data)).unwrap();
    std::fs::write(
        dir.join(format!("{name}.json")),
        format!(r#"{{"name": "{name}", "path": "{name}.libsvm", "format": "libsvm", "seed": {seed}, "loss": "zero_one_times100"}}"#),
    )
    .unwrap();
}

fn toy(dir: &Path) {
    write_dataset(dir, "toy", &synthetic::noise_by_feature(300, 3, 0.5, 4).unwrap(), 4);
}

#[test]
fn trained_model_loads_back() {
    let dir = tempfile::tempdir().unwrap();
    toy(dir.path());
    let report = out(dir.path(), &["train", "--manifest", "toy.json", "--kind", "lr", "--out", "m.txt"]);
    assert!(report.contains("chosen_c ") && report.contains("objective ") && report.contains("relative_gap "));
    let text = std::fs::read_to_string(dir.path().join("m.txt")).unwrap();
    assert!(text.starts_with("# selcls "));
    assert!(text.contains("# seed 4\n") && text.contains("# config "));
    let (m, labels) = TrainedClassifier::from_text(&text).unwrap();
    assert_eq!((m.num_classes, m.dim), (3, 3));
    assert_eq!(labels.unwrap(), vec![1.0, 2.0, 3.0]);
    assert_eq!(m.reg_const, value(&report, "chosen_c"));
}

#[test]
fn rerun_gives_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    toy(dir.path());
    let read = |f: &str| std::fs::read(dir.path().join(f)).unwrap();
    let train = |file: &str| out(dir.path(), &["train", "--manifest", "toy.json", "--kind", "svm", "--out", file]);
    assert_eq!(train("a.txt"), train("b.txt"));
    let (a, b) = (read("a.txt"), read("b.txt"));
    assert_eq!(a, b);
    // a different seed changes the split and the header
    out(dir.path(), &["train", "--manifest", "toy.json", "--kind", "svm", "--seed", "5", "--out", "c.txt"]);
    assert_ne!(a, read("c.txt"));
}

#[test]
fn thread_count_does_not_change_outputs() {
    let dir = tempfile::tempdir().unwrap();
    toy(dir.path());
    out(dir.path(), &["train", "--manifest", "toy.json", "--kind", "lr", "--out", "m.txt"]);
    for (threads, file) in [("1", "s1.txt"), ("3", "s3.txt")] {
        out(
            dir.path(),
            &["score", "--manifest", "toy.json", "--model", "m.txt", "--method", "sele", "--c-grid", "0,1,10", "--threads", threads, "--out", file],
        );
    }
    let read = |f: &str| std::fs::read(dir.path().join(f)).unwrap();
    assert_eq!(read("s1.txt"), read("s3.txt"));
}

#[test]
fn exit_codes_by_error_class() {
    let dir = tempfile::tempdir().unwrap();
    toy(dir.path());
    let code = |args: &[&str]| code(dir.path(), args);
    assert_eq!(code(&["train", "--manifest", "toy.json", "--kind", "lr", "--c-grid", "1,ten", "--out", "m.txt"]), 2);
    assert_eq!(code(&["train", "--manifest", "toy.json", "--kind", "forest", "--out", "m.txt"]), 2);
    assert_eq!(code(&["train", "--manifest", "missing.json", "--kind", "lr", "--out", "m.txt"]), 5);
    assert_eq!(code(&["train", "--bogus"]), 2);
    std::fs::write(dir.path().join("bad.txt"), "0.1 0.5\nnot a number\n").unwrap();
    assert_eq!(code(&["reject", "--rejection", "coverage", "--omega", "0.5", "--atoms", "bad.txt"]), 3);
    std::fs::write(dir.path().join("bad.json"), "{\"name\": ").unwrap();
    assert_eq!(code(&["inspect", "--manifest", "bad.json"]), 3);
    std::fs::write(dir.path().join("a.txt"), "0.1 0.5\n0.3 0.5\n").unwrap();
    assert_eq!(code(&["reject", "--rejection", "coverage", "--omega", "1.5", "--atoms", "a.txt"]), 2);
    assert_eq!(code(&["reject", "--rejection", "improvement", "--atoms", "a.txt"]), 2);
    assert_eq!(code(&["--version"]), 0);
}

#[test]
fn tcp_needs_logistic_base() {
    let dir = tempfile::tempdir().unwrap();
    toy(dir.path());
    out(dir.path(), &["train", "--manifest", "toy.json", "--kind", "svm", "--out", "m.txt"]);
    let err = run_in(dir.path(), &["score", "--manifest", "toy.json", "--model", "m.txt", "--method", "tcp", "--out", "s.txt"]).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    let msg = err.to_string();
    assert!(msg.contains("tcp") && msg.contains("svm"), "{msg}");
}

#[test]
fn reject_on_fixture_distribution() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("atoms.txt"), "# risk mass\n0.1 0.5\n0.3 0.5\n").unwrap();
    let r = out(dir.path(), &["reject", "--rejection", "coverage", "--omega", "0.75", "--atoms", "atoms.txt"]);
    assert_eq!(value(&r, "threshold"), 0.3);
    assert_eq!(value(&r, "accept_prob"), 0.5);
    assert_eq!(value(&r, "coverage"), 0.75);
    assert!((value(&r, "selective_risk") - 1.0 / 6.0).abs() < 1e-15);

    let r = out(dir.path(), &["reject", "--rejection", "cost", "--epsilon", "0.2", "--atoms", "atoms.txt"]);
    assert_eq!(value(&r, "coverage"), 0.5);
    assert!((value(&r, "expected_cost") - 0.15).abs() < 1e-15);

    let r = out(dir.path(), &["reject", "--rejection", "improvement", "--lambda", "0.05", "--atoms", "atoms.txt"]);
    assert_eq!(value(&r, "coverage"), 0.0);
    assert!(r.contains("selective_risk undefined") && r.contains("infeasible true"));
}

#[test]
fn eval_on_zero_loss_predictions() {
    let dir = tempfile::tempdir().unwrap();
    write_dataset(dir.path(), "sep", &synthetic::separable(200, 3).unwrap(), 3);
    out(dir.path(), &["train", "--manifest", "sep.json", "--kind", "svm", "--out", "m.txt"]);
    let report = out(dir.path(), &["eval", "--manifest", "sep.json", "--model", "m.txt", "--split", "all", "--curve", "c.csv"]);
    assert_eq!(value(&report, "aurc"), 0.0);
    assert_eq!(value(&report, "r_at_100"), 0.0);
    assert_eq!(value(&report, "samples"), 200.0);
    let csv = std::fs::read_to_string(dir.path().join("c.csv")).unwrap();
    let body: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body[0], "coverage,selective_risk,threshold");
    assert_eq!(body.len(), 201);
}

#[test]
fn score_then_eval_and_inspect() {
    let dir = tempfile::tempdir().unwrap();
    toy(dir.path());
    out(dir.path(), &["train", "--manifest", "toy.json", "--kind", "lr", "--out", "m.txt"]);
    for method in ["baseline", "sele", "reg", "tcp"] {
        let file = format!("{method}.txt");
        out(dir.path(), &["score", "--manifest", "toy.json", "--model", "m.txt", "--method", method, "--out", &file]);
        let ev = out(dir.path(), &["eval", "--manifest", "toy.json", "--model", "m.txt", "--score", &file]);
        let (a, r100) = (value(&ev, "aurc"), value(&ev, "r_at_100"));
        assert!(a.is_finite() && (0.0..=100.0).contains(&a));
        // the base classifier and the split are shared
        assert!(r100 > 0.0);
        let info = out(dir.path(), &["inspect", "--score", &file]);
        assert!(info.contains(&format!("score {method}")) && info.contains("base lr"));
    }
    let info = out(dir.path(), &["inspect", "--manifest", "toy.json"]);
    assert_eq!(value(&info, "samples"), 300.0);
    let sizes: f64 = ["trn1", "val1", "trn2", "val2", "tst"].iter().map(|s| value(&info, &format!("split_{s}"))).sum();
    assert_eq!(sizes, 300.0);
}

#[test]
fn bench_writes_complete_grid() {
    let dir = tempfile::tempdir().unwrap();
    write_dataset(dir.path(), "a", &synthetic::noise_by_feature(250, 3, 0.5, 1).unwrap(), 1);
    write_dataset(dir.path(), "b", &synthetic::noise_by_feature(250, 2, 0.5, 2).unwrap(), 2);
    std::fs::write(
        dir.path().join("bench.cfg"),
        "# toy benchmark\ndatasets = a.json, b.json\nmodel = lr\nmethods = baseline, sele, tcp\n\
         classifier_grid = 1, 10\nscore_grid = 0, 1\nreplicates = 2\noutput_dir = out\n",
    )
    .unwrap();
    let report = out(dir.path(), &["bench", "--config", "bench.cfg", "--threads", "2"]);
    let csv = std::fs::read_to_string(dir.path().join("out/results.csv")).unwrap();
    let rows: Vec<Vec<&str>> = csv
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 2 * 2 * 3);
    for d in ["a", "b"] {
        for m in ["lr+baseline", "lr+sele", "lr+tcp"] {
            assert_eq!(rows.iter().filter(|r| r[0] == d && r[1] == m).count(), 2);
        }
    }
    // R@100 is shared by methods with the same base and replicate
    for r in &rows {
        assert!(rows.iter().filter(|o| o[0] == r[0] && o[2] == r[2]).all(|o| o[7] == r[7]));
    }
    let ranks: f64 = report
        .lines()
        .filter_map(|l| l.strip_prefix("average rank "))
        .map(|l| l.split_whitespace().last().unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((ranks - 6.0).abs() < 1e-9, "{report}");
    let json = std::fs::read_to_string(dir.path().join("out/summary.json")).unwrap();
    assert!(json.contains("\"config\": ") && json.contains("\"statistics\""));

    std::fs::write(dir.path().join("bad.cfg"), "datasets = a.json\nmodel = lr\nmethods = sele\nspeed = fast\n").unwrap();
    assert_eq!(code(dir.path(), &["bench", "--config", "bad.cfg"]), 2);
    std::fs::write(dir.path().join("svm.cfg"), "datasets = a.json\nmodel = svm\nmethods = tcp\n").unwrap();
    assert_eq!(code(dir.path(), &["bench", "--config", "svm.cfg"]), 2);
}

#[test]
fn help_documents_bench_grammar() {
    let help = Cli::command().find_subcommand_mut("bench").unwrap().render_long_help().to_string();
    assert!(help.contains("key = value") && help.contains("score_grid"));
}
