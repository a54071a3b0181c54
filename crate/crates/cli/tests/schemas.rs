use std::path::Path;

use jsonschema::JSONSchema;
use serde_json::Value;

use ramanujan_cli::{run_with, EXIT_OK};

const SCHEMA: &str = include_str!("../schemas/ramanujan-cloud.schema.json");

fn schema_for(def: &str) -> JSONSchema {
    let mut doc: Value = serde_json::from_str(SCHEMA).unwrap();
    let root = doc.as_object_mut().unwrap();
    root.remove("oneOf");
    root.insert("$ref".into(), Value::String(format!("#/$defs/{def}")));
    JSONSchema::compile(&doc).unwrap_or_else(|e| panic!("{def}: {e}"))
}

fn assert_valid(def: &str, instance: &Value) {
    let schema = schema_for(def);
    if let Err(errors) = schema.validate(instance) {
        let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("{def} output does not match its schema:\n{}\n{instance:#}", msgs.join("\n"));
    };
}

fn run(args: &[&str]) -> Value {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["ramanujan-cloud"];
    argv.extend_from_slice(args);
    let code = run_with(argv, &mut out, &mut err);
    assert_eq!(code, EXIT_OK, "{args:?}: {}", String::from_utf8_lossy(&err));
    serde_json::from_slice(&out).unwrap_or_else(|e| panic!("{args:?}: {e}"))
}

fn small_config(dir: &Path) -> String {
    let path = dir.join("config.json");
    std::fs::write(
        &path,
        r#"{"series_q": 20000, "exotic_q": 20000, "sample_b": [1, 2, 3], "corroboration_a": [1, 2]}"#,
    )
    .unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn schema_document_compiles() {
    let doc: Value = serde_json::from_str(SCHEMA).unwrap();
    JSONSchema::compile(&doc).unwrap();
    for def in ["csum", "classify", "expand", "verdict", "absconv", "sfcount", "lemma7", "reproduce_all", "criterion_artifact"] {
        schema_for(def);
    }
}

#[test]
fn csum_outputs() {
    assert_valid("csum", &run(&["csum", "12", "6"]));
    assert_valid("csum", &run(&["csum", "12", "6", "--verify"]));
}

#[test]
fn classify_outputs() {
    for args in [
        vec!["classify", "GR"],
        vec!["classify", "GH"],
        vec!["classify", "G0", "p0=3"],
        vec!["classify", "indicator_prime_powers", "p0=2"],
        vec!["classify", "prop1"],
        vec!["classify", "prop5"],
        vec!["classify", "lemma7_h", "s=0.7"],
        vec!["classify", "weakly_exotic_sample"],
    ] {
        assert_valid("classify", &run(&args));
    }
}

#[test]
fn expand_outputs() {
    assert_valid("expand", &run(&["expand", "GR", "--Q", "50", "--exact"]));
    assert_valid("expand", &run(&["expand", "GH", "--a", "6", "--Q", "2000", "--checkpoints", "7,70"]));
    assert_valid("expand", &run(&["expand", "G0", "p0=2", "--Q", "500", "--coprime", "2"]));
}

#[test]
fn verdict_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_config(dir.path());
    for entry in [["GR", ""], ["G0", "p0=2"], ["weakly_exotic_sample", ""]] {
        let mut args = vec!["--config", &config, "verdict", entry[0]];
        if !entry[1].is_empty() {
            args.push(entry[1]);
        }
        assert_valid("verdict", &run(&args));
    }
}

#[test]
fn absconv_outputs() {
    assert_valid("absconv", &run(&["absconv", "GR", "--B", "1000", "--Q", "1000"]));
    assert_valid("absconv", &run(&["absconv", "prop2", "p0=3", "--a", "3", "--B", "1000", "--Q", "1000"]));
}

#[test]
fn sfcount_outputs() {
    assert_valid("sfcount", &run(&["sfcount", "--x", "10000", "--m", "4", "--r", "3"]));
}

#[test]
fn lemma7_outputs() {
    assert_valid("lemma7", &run(&["lemma7", "--to", "20000"]));
}

#[test]
fn reproduce_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let summary = run(&["reproduce-all", "--out", out, "--only", "1,2,4"]);
    assert_valid("reproduce_all", &summary);
    for line in summary["criteria"].as_array().unwrap() {
        let name = line["artifact"].as_str().unwrap();
        let artifact: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join(name)).unwrap()).unwrap();
        assert_valid("criterion_artifact", &artifact);
    }
}

#[test]
fn schemas_reject_drifted_output() {
    let mut v = run(&["sfcount", "--x", "1000"]);
    assert!(schema_for("sfcount").is_valid(&v));
    v.as_object_mut().unwrap().remove("count");
    assert!(!schema_for("sfcount").is_valid(&v));
    let mut v = run(&["expand", "GR", "--Q", "20", "--exact"]);
    v["series"]["checkpoints"][0]["sum"] = serde_json::json!({"num": "1", "den": "0"});
    assert!(!schema_for("expand").is_valid(&v));
    assert!(!schema_for("csum").is_valid(&serde_json::json!("-2")));
}
