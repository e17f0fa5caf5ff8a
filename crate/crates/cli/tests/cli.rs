use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/five_label_chain.csv")
}

fn ccorder(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccorder"))
        .args(args)
        .output()
        .expect("spawn ccorder")
}

fn json_ok(args: &[&str]) -> Value {
    let out = ccorder(args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn names(v: &Value) -> Vec<String> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|s| s.as_str().unwrap().to_string())
        .collect()
}

#[test]
fn gocc_order_of_the_fixture() {
    let f = fixture();
    let v = json_ok(&[
        "order",
        f.to_str().unwrap(),
        "--labels",
        "5",
        "--method",
        "gocc",
    ]);
    assert_eq!(names(&v["order"]["order"]), ["l2", "l1", "l3", "l4", "l5"]);
    assert_eq!(v["head"]["first"], "l2");
    assert_eq!(v["format_version"], 1);
    assert!(v.get("cr_matrix").is_none());
}

#[test]
fn random_order_echoes_seed_and_matrix_on_request() {
    let f = fixture();
    let v = json_ok(&[
        "order",
        f.to_str().unwrap(),
        "--labels",
        "5",
        "--method",
        "random",
        "--seed",
        "1",
        "--emit-matrix",
    ]);
    assert_eq!(v["order"]["seed"], 1);
    let mut order = names(&v["order"]["order"]);
    order.sort();
    assert_eq!(order, ["l1", "l2", "l3", "l4", "l5"]);
    assert_eq!(v["cr_matrix"]["q"], 5);
    assert_eq!(v["cr_matrix"]["values"].as_array().unwrap().len(), 25);
}

#[test]
fn stats_reports_shape() {
    let f = fixture();
    let v = json_ok(&["stats", f.to_str().unwrap(), "--labels", "5"]);
    assert_eq!(
        (v["n"].as_u64(), v["k"].as_u64(), v["q"].as_u64()),
        (Some(1000), Some(1), Some(5))
    );
}

#[test]
fn train_then_predict() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model.json");
    let f = fixture();
    for alg in ["tocc", "ngram:2", "cc_random", "br", "ecc"] {
        let v = json_ok(&[
            "train",
            f.to_str().unwrap(),
            "--labels",
            "5",
            "--algorithm",
            alg,
            "--iterations",
            "50",
            "--out",
            model.to_str().unwrap(),
        ]);
        assert_eq!(v["order"].is_null(), alg == "br" || alg == "ecc", "{alg}");
        let p = json_ok(&[
            "predict",
            f.to_str().unwrap(),
            "--labels",
            "5",
            "--model",
            model.to_str().unwrap(),
        ]);
        for m in ["accuracy", "f1", "hamming_loss"] {
            let x = p["metrics"][m].as_f64().unwrap();
            assert!((0.0..=1.0).contains(&x), "{alg} {m} {x}");
        }
        assert_eq!(p["predictions"].as_array().unwrap().len(), 1000);
    }
}

#[test]
fn bench_outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.csv");
    std::fs::copy(fixture(), &data).unwrap();
    std::fs::write(
        dir.path().join("cfg.json"),
        r#"{"datasets": [{"path": "data.csv", "labels": 5}], "algorithms": ["gocc", "br"], "master_seed": 3, "learner": {"iterations": 40}}"#,
    )
    .unwrap();
    let cfg = dir.path().join("cfg.json");
    let out = dir.path().join("out");
    let mut runs = Vec::new();
    // identical config, output directory included, so the files must match byte for byte
    for _ in 0..2 {
        let v = json_ok(&[
            "bench",
            "--config",
            cfg.to_str().unwrap(),
            "--folds",
            "3",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(v["files"].as_array().unwrap().len(), 6);
        runs.push(
            ["bench.csv", "bench.json"].map(|f| std::fs::read_to_string(out.join(f)).unwrap()),
        );
    }
    assert_eq!(runs[0], runs[1]);
    for text in &runs[0] {
        assert!(
            text.contains("\"n_folds\":3") || text.contains("\"n_folds\": 3"),
            "overrides echoed"
        );
    }
    assert_eq!(runs[0][0].lines().nth(2).unwrap(), "metric,dataset,gocc,br");
}

#[test]
fn sweep_writes_one_row_per_n() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture();
    let v = json_ok(&[
        "sweep-n",
        "--dataset",
        f.to_str().unwrap(),
        "--labels",
        "5",
        "--n",
        "1,3",
        "--iterations",
        "30",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert!(csv.contains("dataset,n,accuracy,f1,hamming_loss"));
}

#[test]
fn config_errors_exit_with_two() {
    let f = fixture();
    let f = f.to_str().unwrap();
    for args in [
        vec!["order", f],
        vec![
            "train",
            f,
            "--labels",
            "5",
            "--algorithm",
            "svm",
            "--out",
            "/tmp/x.json",
        ],
        vec!["bench", "--dataset", f, "--labels", "5"],
        vec![
            "bench",
            "--dataset",
            f,
            "--labels",
            "5",
            "--algorithms",
            "br",
            "--folds",
            "1",
        ],
        vec!["bench", "--config", "/does/not/exist.json"],
        vec!["no-such-command"],
    ] {
        assert_eq!(ccorder(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn data_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "x,a,b\n0.5,1,2\n").unwrap();
    let missing = dir.path().join("missing.csv");
    let f = fixture();
    let model = dir.path().join("m.json");
    std::fs::write(&model, "{not json").unwrap();
    for args in [
        vec!["stats", bad.to_str().unwrap(), "--labels", "2"],
        vec!["order", missing.to_str().unwrap(), "--labels", "2"],
        vec![
            "predict",
            f.to_str().unwrap(),
            "--labels",
            "5",
            "--model",
            model.to_str().unwrap(),
        ],
    ] {
        let out = ccorder(&args);
        assert_eq!(out.status.code(), Some(3), "{args:?}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    }
}
