use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sxmeans"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn schema(name: &str) -> jsonschema::JSONSchema {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(name);
    let value: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::JSONSchema::compile(&value).expect("schema compiles")
}

fn assert_valid(schema_name: &str, doc: &Value) {
    let s = schema(schema_name);
    if let Err(errors) = s.validate(doc) {
        let msgs: Vec<String> = errors.map(|e| format!("{e} at {}", e.instance_path)).collect();
        panic!("{schema_name}: {msgs:?}");
    };
}

const DEMO: [&str; 4] = ["700,100,0,0,-1", "600,40,1,0,0", "400,60,-1,0,0", "300,80,0,0,1"];

fn gen_demo(dir: &Path, seed: &str) -> (PathBuf, Output) {
    let out = dir.join("demo.csv");
    let mut args = vec!["gen", "--dim", "3", "--seed", seed, "--out", out.to_str().unwrap()];
    for c in DEMO {
        args.push("--component");
        args.push(c);
    }
    let o = run(&args);
    (out, o)
}

fn iris() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/iris.csv").display().to_string()
}

#[test]
fn gen_writes_files_and_record() {
    let dir = tempfile::tempdir().unwrap();
    let (path, o) = gen_demo(dir.path(), "7");
    assert_eq!(code(&o), 0);
    let record: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_valid("dataset_record.schema.json", &record);
    assert_eq!(record["n"], 2000);
    assert_eq!(record["true_k"], 4);
    let points = fs::read_to_string(&path).unwrap();
    assert_eq!(points.lines().count(), 2001);
    let labels = fs::read_to_string(dir.path().join("demo.labels.csv")).unwrap();
    assert_eq!(labels.lines().count(), 2001);
}

#[test]
fn gen_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let (pa, oa) = gen_demo(a.path(), "7");
    let (pb, ob) = gen_demo(b.path(), "7");
    assert_eq!(oa.stdout, ob.stdout);
    assert_eq!(fs::read(pa).unwrap(), fs::read(pb).unwrap());
}

#[test]
fn gen_rejects_empty_component() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.csv");
    let o = run(&["gen", "--component", "0,5", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let o = run(&["gen", "--component", "10,abc", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn estimate_demo_reports_four() {
    let dir = tempfile::tempdir().unwrap();
    let (path, _) = gen_demo(dir.path(), "3");
    let report = dir.path().join("rep.json");
    let o = run(&["estimate", "--input", path.to_str().unwrap(), "--mode", "sx", "--output", report.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "4");
    let doc: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_valid("estimation_report.schema.json", &doc);
    assert_eq!(doc["k"], 4);
    assert_eq!(doc["assignment"].as_array().unwrap().len(), 2000);
}

#[test]
fn estimate_output_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (path, _) = gen_demo(dir.path(), "5");
    let mut outputs = Vec::new();
    for name in ["a.json", "b.json"] {
        let rep = dir.path().join(name);
        let o = run(&["estimate", "--input", path.to_str().unwrap(), "--seed", "9", "--output", rep.to_str().unwrap()]);
        assert_eq!(code(&o), 0);
        outputs.push((o.stdout, fs::read(rep).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn estimate_flag_errors() {
    let o = run(&["estimate", "--input", &iris(), "--mode", "fixed"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("--kappa"));
    let o = run(&["estimate", "--input", &iris(), "--mode", "sx", "--kappa", "3"]);
    assert_eq!(code(&o), 2);
    let o = run(&["estimate", "--input", "/definitely/not/here.csv"]);
    assert_eq!(code(&o), 2);
    let o = run(&["estimate", "--input", &iris(), "--mode", "bogus"]);
    assert_eq!(code(&o), 2);
    let o = run(&["estimate"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn estimate_bad_data_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    fs::write(&path, "1,2\n3,oops\n").unwrap();
    let o = run(&["estimate", "--input", path.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("row 2"));
    fs::write(&path, "1,0\n").unwrap();
    let o = run(&["estimate", "--input", path.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn xmeans_ignores_normalize() {
    let o = run(&["estimate", "--input", &iris(), "--label-column", "species", "--mode", "xmeans", "--normalize", "--center"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("ignored"));
    let plain = run(&["estimate", "--input", &iris(), "--label-column", "species", "--mode", "xmeans", "--center"]);
    assert_eq!(o.stdout, plain.stdout);
}

#[test]
fn iris_fixed_kappa_ten() {
    let o = run(&[
        "estimate", "--input", &iris(), "--label-column", "last", "--mode", "fixed", "--kappa", "10", "--center",
        "--normalize",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8_lossy(&o.stdout).trim(), "4");
}

#[test]
fn bench_custom_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b");
    let o = run(&[
        "bench", "--suite", "custom", "--true-k", "2,3", "--n-per-cluster", "150", "--runs", "1", "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let table = fs::read_to_string(out.join("table.md")).unwrap();
    assert_eq!(table.as_bytes(), &o.stdout[..]);
    assert_eq!(table.lines().count(), 4);
    // --runs 1 makes every SD zero
    assert_eq!(table.matches("(0.000)").count(), 8);

    let mut cells: Vec<PathBuf> = fs::read_dir(out.join("cells")).unwrap().map(|e| e.unwrap().path()).collect();
    cells.sort();
    assert_eq!(cells.len(), 8);
    for cell in &cells {
        let doc: Value = serde_json::from_str(&fs::read_to_string(cell).unwrap()).unwrap();
        assert_valid("bench_result.schema.json", &doc);
        let formatted = format!(
            "{:.3} ({:.3})",
            doc["mean_k"].as_f64().unwrap(),
            doc["sd_k"].as_f64().unwrap()
        );
        assert!(table.contains(&formatted));
    }
    let runs = fs::read_to_string(out.join("runs.csv")).unwrap();
    assert_eq!(runs.lines().count(), 9);

    let r = run(&["report", "--input", out.to_str().unwrap()]);
    assert_eq!(code(&r), 0);
    assert_eq!(r.stdout, table.as_bytes());
    fs::remove_file(out.join("suite.json")).unwrap();
    let r = run(&["report", "--input", out.to_str().unwrap()]);
    assert_eq!(r.stdout, table.as_bytes());
}

#[test]
fn bench_table5_marks_missing() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t5");
    let data = dir.path().join("data");
    fs::create_dir(&data).unwrap();
    let o = run(&[
        "bench", "--suite", "table5", "--runs", "1", "--methods", "fixed:10", "--datasets-dir",
        data.to_str().unwrap(), "--out-dir", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let table = String::from_utf8(o.stdout).unwrap();
    assert!(table.contains("| iris | 3 | missing |"));
    assert!(table.lines().any(|l| l.starts_with("| blobs | 3 | ") && !l.contains("missing")));
}

#[test]
fn bench_and_report_errors() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["bench", "--suite", "custom", "--runs", "0", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let o = run(&["bench", "--suite", "custom", "--methods", "gmeans", "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let o = run(&["report", "--input", dir.path().join("nothing").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn xmeans_report_matches_schema() {
    let dir = tempfile::tempdir().unwrap();
    let rep = dir.path().join("x.json");
    let o = run(&["estimate", "--input", &iris(), "--label-column", "last", "--mode", "xmeans", "--center", "--output", rep.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let doc: Value = serde_json::from_str(&fs::read_to_string(&rep).unwrap()).unwrap();
    assert_valid("estimation_report.schema.json", &doc);
    assert_eq!(doc["clusters"][0]["params"]["family"], "gaussian");
}

#[test]
fn schemas_reject_broken_documents() {
    let s = schema("estimation_report.schema.json");
    assert!(!s.is_valid(&serde_json::json!({ "method": "sx", "k": 0 })));
    let s = schema("bench_result.schema.json");
    let doc = serde_json::json!({
        "method": "fixed", "source": "x", "true_k": 2, "runs": 1, "mean_k": 2.0, "sd_k": 0.0,
        "per_run": [{ "seed": 0, "k": 2, "rounds": 1, "valid": true }]
    });
    // fixed without kappa
    assert!(!s.is_valid(&doc));
    let s = schema("dataset_record.schema.json");
    assert!(!s.is_valid(&serde_json::json!({ "name": "a", "n": 0, "d": 2, "true_k": 1,
        "preprocessing": { "centered": true, "normalized": true } })));
}
