mod common;

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use iqa::table::inject_mcar;

fn iqa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iqa"))
        .args(args)
        .env("IQA_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Writes a small data set with gaps and a config next to it.
fn workspace(roster: &str) -> (tempfile::TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let t = inject_mcar(&common::linear_features(120, 3), 0.15, 3, &[]).unwrap();
    let mut f = std::fs::File::create(dir.path().join("data.csv")).unwrap();
    t.write_csv(&mut f).unwrap();
    let config = format!(
        r#"{{"data": {{"path": "data.csv"}}, "imputers": {roster}, "threshold": 0.5, "seed": 3}}"#
    );
    let cfg = dir.path().join("config.json");
    std::fs::write(&cfg, config).unwrap();
    (dir, cfg)
}

const FAST_ROSTER: &str = r#"[
    {"id": "mean", "type": "simple", "params": {"strategy": "mean"}},
    {"id": "knn5", "type": "knn", "params": {"n_neighbors": 5}},
    {"id": "iter_br", "type": "iterative", "params": {"estimator": {"type": "ridge"}}}
]"#;

#[test]
fn recommend_m_prints_count() {
    let out = iqa(&["recommend-m", "--gamma", "0.5", "--efficiency", "0.95"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "10");
    let out = iqa(&["recommend-m", "--gamma", "1.5", "--efficiency", "0.95"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn assess_is_reproducible() {
    let (dir, cfg) = workspace(FAST_ROSTER);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = iqa(&["assess", "--config", s(&cfg), "--out", s(out)]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let ra = std::fs::read(a.join("quality_records.json")).unwrap();
    assert_eq!(ra, std::fs::read(b.join("quality_records.json")).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&ra).unwrap();
    assert_eq!(v["records"].as_array().unwrap().len(), 8);
}

#[test]
fn fit_apply_and_report() {
    let (dir, cfg) = workspace(FAST_ROSTER);
    let out = dir.path().join("out");
    let o = iqa(&["fit", "--config", s(&cfg), "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let fresh = inject_mcar(&common::linear_features(40, 99), 0.2, 99, &[]).unwrap();
    let new_csv = dir.path().join("new.csv");
    fresh.write_csv(std::fs::File::create(&new_csv).unwrap()).unwrap();
    let o = iqa(&[
        "apply",
        "--pipeline",
        s(&out.join("pipeline.json")),
        "--data",
        s(&new_csv),
        "--out",
        s(&out),
        "--config",
        s(&cfg),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let imputed = std::fs::read_to_string(out.join("imputed.csv")).unwrap();
    let mut lines = imputed.lines();
    lines.next();
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 40);
    assert!(rows.iter().all(|r| r.split(',').all(|c| !c.is_empty())));

    let o = iqa(&["report", "--records", s(&out.join("quality_records.json")), "--out", s(&out)]);
    assert!(o.status.success());
    let svg = std::fs::read_to_string(out.join("quality_chart.svg")).unwrap();
    roxmltree::Document::parse(&svg).unwrap();
    assert!(std::fs::read_to_string(out.join("summary.txt")).unwrap().contains("threshold 0.5"));
}

#[test]
fn graph_writes_dictionary() {
    let (dir, cfg) = workspace(FAST_ROSTER);
    let o = iqa(&["graph", "--config", s(&cfg), "--out", s(dir.path())]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let dict: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("dependency_dict.json")).unwrap()).unwrap();
    assert_eq!(dict.as_object().unwrap().len(), 8);
}

#[test]
fn audit_writes_tables() {
    let roster = r#"[{"id": "mean", "type": "simple", "params": {"strategy": "mean"}}]"#;
    let (dir, cfg) = workspace(roster);
    let o = iqa(&[
        "audit", "--config", s(&cfg), "--out", s(dir.path()), "--levels", "0.4", "--format", "csv",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = std::fs::read_to_string(dir.path().join("audit_tables.csv")).unwrap();
    assert!(table.starts_with("level,feature,mean,random,iqa"), "{table}");
}

#[test]
fn exit_codes_classify_failures() {
    let (dir, cfg) = workspace(FAST_ROSTER);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"imputers": [], "data": {"paht": "x"}}"#).unwrap();
    let o = iqa(&["assess", "--config", s(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(err["kind"], "config");

    let o = iqa(&["assess", "--config", s(&cfg), "--data", s(&dir.path().join("nope.csv"))]);
    assert_eq!(o.status.code(), Some(3));

    let corrupt = dir.path().join("pipeline.json");
    std::fs::write(&corrupt, "{not json").unwrap();
    let o = iqa(&["apply", "--pipeline", s(&corrupt), "--data", s(&dir.path().join("data.csv"))]);
    assert_eq!(o.status.code(), Some(3));
}
