use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn sparsefit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sparsefit"))
        .args(args)
        .output()
        .expect("spawn sparsefit")
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("examples/data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn s(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn assert_usage_error(o: &Output) {
    assert_eq!(o.status.code(), Some(2), "stderr: {}", stderr(o));
    let err = stderr(o);
    assert!(err.starts_with("error[usage]: "), "stderr: {err}");
    assert_eq!(err.trim_end().lines().count(), 1, "stderr: {err}");
}

fn encode_status(dir: &Path) -> String {
    let out = dir.join("enc");
    let o = sparsefit(&[
        "encode",
        "--csv",
        &data("cases.csv"),
        "--schema",
        &data("status_schema.json"),
        "--out-dir",
        &s(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    s(&out.join("encoded.csv"))
}

#[test]
fn encode_writes_vocabulary_and_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let o = sparsefit(&[
        "encode",
        "--csv",
        &data("cases.csv"),
        "--schema",
        &data("model1_schema.json"),
        "--top-k",
        "2",
        "--out-dir",
        &s(dir.path()),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let vocab = std::fs::read_to_string(dir.path().join("vocabulary.json")).unwrap();
    assert!(vocab.contains("\"sector\""));
    let encoded = std::fs::read_to_string(dir.path().join("encoded.csv")).unwrap();
    let header = encoded.lines().next().unwrap();
    // six categorical columns with two categories each, plus id and target
    assert_eq!(header.split(',').count(), 6 * 2 + 2);
    assert!(header.starts_with("row_id,") && header.ends_with(",wage"));
    assert_eq!(encoded.lines().count(), 241);
}

#[test]
fn missing_input_file_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = sparsefit(&[
        "encode",
        "--csv",
        "/definitely/not/here.csv",
        "--schema",
        &data("model1_schema.json"),
        "--out-dir",
        &s(dir.path()),
    ]);
    assert_usage_error(&o);
}

#[test]
fn unknown_flag_and_missing_seed_are_usage_errors() {
    assert_usage_error(&sparsefit(&["encode", "--bogus"]));
    let o = sparsefit(&[
        "sweep",
        "--data",
        &data("cases.csv"),
        "--out",
        "/tmp/never-written.csv",
    ]);
    assert_usage_error(&o);
    assert!(stderr(&o).contains("--seed"));
}

#[test]
fn empty_gamma_grid_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let enc = encode_status(dir.path());
    let o = sparsefit(&[
        "sweep",
        "--data",
        &enc,
        "--gammas=",
        "--seed",
        "1",
        "--out",
        &s(&dir.path().join("sweep.csv")),
    ]);
    assert_usage_error(&o);
    assert!(!dir.path().join("sweep.csv").exists());
}

#[test]
fn schema_problems_are_runtime_errors() {
    let dir = tempfile::tempdir().unwrap();
    let schema = dir.path().join("bad.json");
    std::fs::write(&schema, r#"[{"name": "sector", "kind": "categorical"}]"#).unwrap();
    let o = sparsefit(&[
        "encode",
        "--csv",
        &data("cases.csv"),
        "--schema",
        &s(&schema),
        "--out-dir",
        &s(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.starts_with("error[runtime]: "), "{err}");
    assert_eq!(err.trim_end().lines().count(), 1);
}

#[test]
fn help_exits_zero() {
    let o = sparsefit(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    for cmd in [
        "encode",
        "cv-fit",
        "importance",
        "evaluate",
        "sweep",
        "synth",
    ] {
        assert!(text.contains(cmd), "help lacks {cmd}");
    }
}

#[test]
fn lasso_fit_then_importance() {
    let dir = tempfile::tempdir().unwrap();
    let syn = dir.path().join("syn");
    let o = sparsefit(&[
        "synth",
        "--kind",
        "linear",
        "--n",
        "200",
        "--p",
        "10",
        "--sparsity",
        "3",
        "--seed",
        "4",
        "--out-dir",
        &s(&syn),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["data.csv", "schema.json", "truth.json"] {
        assert!(syn.join(f).is_file(), "{f}");
    }
    let enc = dir.path().join("enc");
    let o = sparsefit(&[
        "encode",
        "--csv",
        &s(&syn.join("data.csv")),
        "--schema",
        &s(&syn.join("schema.json")),
        "--out-dir",
        &s(&enc),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let fit = dir.path().join("fit");
    let o = sparsefit(&[
        "cv-fit",
        "--task",
        "lasso",
        "--data",
        &s(&enc.join("encoded.csv")),
        "--folds",
        "5",
        "--seed",
        "4",
        "--out-dir",
        &s(&fit),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in [
        "model.json",
        "cv_report.json",
        "cv_report.csv",
        "evaluation.json",
    ] {
        assert!(fit.join(f).is_file(), "{f}");
    }
    let eval: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(fit.join("evaluation.json")).unwrap())
            .unwrap();
    assert!(eval["r2_out_of_sample"].as_f64().unwrap() > 0.8);

    let imp = dir.path().join("imp");
    let o = sparsefit(&[
        "importance",
        "--model",
        &s(&fit.join("model.json")),
        "--top-n",
        "2",
        "--out-dir",
        &s(&imp),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(imp.join("importance.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("sign,rank,feature,coefficient"));
    assert!(csv.lines().count() <= 5);
}

#[test]
fn logreg_fit_writes_curves_per_scheme_and_evaluates() {
    let dir = tempfile::tempdir().unwrap();
    let enc = encode_status(dir.path());
    let fit = dir.path().join("fit");
    let o = sparsefit(&[
        "cv-fit",
        "--task",
        "logreg",
        "--data",
        &enc,
        "--folds",
        "4",
        "--grid",
        "0.01,0.1",
        "--seed",
        "2",
        "--out-dir",
        &s(&fit),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    for scheme in ["oversample_minority", "undersample_majority", "original"] {
        assert!(fit.join(format!("roc_{scheme}.csv")).is_file());
        assert!(fit.join(format!("pr_{scheme}.csv")).is_file());
        assert!(fit.join(format!("model_{scheme}.json")).is_file());
    }
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(fit.join("cv_report.json")).unwrap())
            .unwrap();
    assert_eq!(report["score_kind"], "auc");
    assert_eq!(report["cells"].as_array().unwrap().len(), 2 * 4 * 3);

    let ev = dir.path().join("ev");
    let o = sparsefit(&[
        "evaluate",
        "--model",
        &s(&fit.join("model.json")),
        "--data",
        &enc,
        "--out-dir",
        &s(&ev),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let eval: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(ev.join("evaluation.json")).unwrap())
            .unwrap();
    let auc = eval["auc"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&auc));
    assert!(ev.join("roc.csv").is_file() && ev.join("pr.csv").is_file());
}

#[test]
fn config_file_supplies_flags_and_command_line_wins() {
    let dir = tempfile::tempdir().unwrap();
    let enc = encode_status(dir.path());
    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        r#"{"seed": 3, "sweep": {"lambdas": [0.01, 1.0], "gammas": [0.0, 1.0], "test_fraction": 0.25}}"#,
    )
    .unwrap();
    let out = dir.path().join("sweep.csv");
    let o = sparsefit(&[
        "--config",
        &s(&config),
        "sweep",
        "--data",
        &enc,
        "--gammas",
        "0,0.5,1",
        "--out",
        &s(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    // 2 lambdas (from the file) x 3 gammas (command line) x 3 schemes
    assert_eq!(text.lines().count(), 1 + 2 * 3 * 3);

    std::fs::write(&config, r#"{"sweep": {"no_such_flag": 1}}"#).unwrap();
    let o = sparsefit(&[
        "--config",
        &s(&config),
        "sweep",
        "--data",
        &enc,
        "--seed",
        "1",
        "--out",
        &s(&out),
    ]);
    assert_usage_error(&o);
}

#[test]
fn synth_rejects_impossible_sparsity() {
    let dir = tempfile::tempdir().unwrap();
    let o = sparsefit(&[
        "synth",
        "--kind",
        "linear",
        "--n",
        "10",
        "--p",
        "3",
        "--sparsity",
        "5",
        "--seed",
        "1",
        "--out-dir",
        &s(dir.path()),
    ]);
    assert_usage_error(&o);
}

#[test]
fn missing_target_column_is_named() {
    let dir = tempfile::tempdir().unwrap();
    let schema = dir.path().join("schema.json");
    std::fs::write(
        &schema,
        r#"[{"name": "sector", "kind": "categorical"}, {"name": "salary", "kind": "target_numeric"}]"#,
    )
    .unwrap();
    let o = sparsefit(&[
        "encode",
        "--csv",
        &data("cases.csv"),
        "--schema",
        &s(&schema),
        "--out-dir",
        &s(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("salary"), "{}", stderr(&o));
}
