use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kasteleyn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let o = run(&all);
    assert!(
        o.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

fn temp_file(text: &str) -> tempfile::NamedTempFile {
    let f = tempfile::NamedTempFile::new().expect("temp file");
    std::fs::write(f.path(), text).expect("write temp file");
    f
}

/// `subset label list -> value` pairs from a `values` array.
fn values(v: &Value) -> Vec<(Vec<String>, String)> {
    v["values"]
        .as_array()
        .expect("values array")
        .iter()
        .map(|row| {
            let s = row["subset"]
                .as_array()
                .unwrap()
                .iter()
                .map(|x| x.as_str().unwrap().to_string())
                .collect();
            (s, row["value"].as_str().unwrap().to_string())
        })
        .collect()
}

#[test]
fn count_grid_matches_oracle() {
    let grid = fixture("grid4x4.kg");
    let o = run(&["count", grid.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "36\n");
    let oracle = json(&["oracle", grid.to_str().unwrap()]);
    assert_eq!(values(&oracle), vec![(vec![], "36".to_string())]);
}

#[test]
fn fan_table_matches_oracle() {
    let fan = fixture("fan.kg");
    let measured = json(&["measure", fan.to_str().unwrap(), "--all"]);
    let oracle = json(&["oracle", fan.to_str().unwrap()]);
    assert_eq!(values(&measured), values(&oracle));
    let nonzero: Vec<String> = values(&measured)
        .into_iter()
        .filter(|(_, v)| v != "0")
        .map(|(s, _)| s.concat())
        .collect();
    assert_eq!(nonzero, ["ab", "ac", "bc", "ad", "bd"]);
}

#[test]
fn single_subset_query() {
    let fan = fixture("fan.kg");
    let o = run(&["measure", fan.to_str().unwrap(), "--subset", "d,b"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "1\n");
    let o = run(&["measure", fan.to_str().unwrap(), "--subset", "c,d"]);
    assert_eq!(stdout(&o), "0\n");
}

#[test]
fn check_all_on_boundary_cycle() {
    let o = run(&[
        "check",
        fixture("c4boundary.kg").to_str().unwrap(),
        "--identity",
        "all",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v = json(&["check", fixture("c4boundary.kg").to_str().unwrap()]);
    assert_eq!(v["all_hold"], Value::Bool(true));
    assert!(!v["reports"].as_array().unwrap().is_empty());
}

#[test]
fn check_bipartite_identities_on_fan() {
    let fan = fixture("fan.kg");
    for id in ["kuo-bipartite", "plucker", "all"] {
        let o = run(&["check", fan.to_str().unwrap(), "--identity", id]);
        assert_eq!(o.status.code(), Some(0), "{id}");
    }
    let o = run(&["check", fan.to_str().unwrap(), "--identity", "pfaffian"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn weights_are_opt_in() {
    let f = fixture("weighted_c4.kg");
    assert_eq!(stdout(&run(&["count", f.to_str().unwrap()])), "2\n");
    // 2*3 + (1/2)*5
    assert_eq!(
        stdout(&run(&["count", f.to_str().unwrap(), "--weights"])),
        "17/2\n"
    );
}

#[test]
fn grassmann_and_pfaffian_point() {
    let g = json(&["grassmann", fixture("fan.kg").to_str().unwrap()]);
    assert_eq!(g["k"], 2);
    assert_eq!(g["nonnegative"], Value::Bool(true));
    assert_eq!(g["consistent"], Value::Bool(true));
    let p = json(&["pfaffian-point", fixture("c4boundary.kg").to_str().unwrap()]);
    assert_eq!(p["base"], "1");
    let o = run(&["pfaffian-point", fixture("fan.kg").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn matrix_respects_theorem_flag() {
    let grid = fixture("grid4x4.kg");
    let v = json(&["matrix", grid.to_str().unwrap(), "--theorem", "1"]);
    assert_eq!(v["kind"], "kasteleyn");
    assert_eq!(v["matrix"]["entries"].as_array().unwrap().len(), 8);
    assert!(v["signs"].get("events").is_none());
    let traced = json(&["matrix", grid.to_str().unwrap(), "--trace"]);
    assert_eq!(
        traced["signs"]["events"].as_array().unwrap().len() as u64,
        traced["signs"]["event_count"]
    );
    let o = run(&["matrix", grid.to_str().unwrap(), "--theorem", "4"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn output_is_deterministic() {
    let fan = fixture("fan.kg");
    for seed in ["0", "7"] {
        let a = run(&[
            "--seed",
            seed,
            "matrix",
            fan.to_str().unwrap(),
            "--trace",
            "--json",
        ]);
        let b = run(&[
            "matrix",
            fan.to_str().unwrap(),
            "--trace",
            "--json",
            "--seed",
            seed,
        ]);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn signed_oracle_on_crossing_drawing() {
    let o = run(&["oracle", fixture("bowtie.kg").to_str().unwrap(), "--signed"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "{} 0\n");
    let o = run(&["oracle", fixture("bowtie.kg").to_str().unwrap()]);
    assert_eq!(stdout(&o), "{} 2\n");
}

#[test]
fn exit_codes() {
    let bad_syntax = temp_file("vertex a black 0 0\nvertex b white 1.5 0\n");
    let o = run(&["count", bad_syntax.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains(":2:16:"));

    let mixed = temp_file("vertex a black 0 0\nvertex b plain 1 0\nedge a b\n");
    assert_eq!(
        run(&["count", mixed.path().to_str().unwrap()])
            .status
            .code(),
        Some(3)
    );

    let bad_weight = temp_file("vertex a plain 0 0\nvertex b plain 1 0\nedge a b weight -1\n");
    assert_eq!(
        run(&["count", bad_weight.path().to_str().unwrap()])
            .status
            .code(),
        Some(3)
    );

    // Crossing drawing: counting needs an embedding.
    assert_eq!(
        run(&["count", fixture("bowtie.kg").to_str().unwrap()])
            .status
            .code(),
        Some(3)
    );

    let fan = fixture("fan.kg");
    let o = run(&["measure", fan.to_str().unwrap(), "--subset", "a,zz"]);
    assert_eq!(o.status.code(), Some(3));

    let slide = fixture("slide.kg");
    assert_eq!(
        run(&["--max-retries", "0", "count", slide.to_str().unwrap()])
            .status
            .code(),
        Some(4)
    );
    let o = run(&["count", slide.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1\n");

    let missing = run(&["count", "/nonexistent/graph.kg"]);
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn json_outputs_match_schema() {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../schema/output.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let mut calls: Vec<Vec<String>> = Vec::new();
    for name in [
        "grid4x4.kg",
        "fan.kg",
        "c4boundary.kg",
        "weighted_c4.kg",
        "slide.kg",
    ] {
        let f = fixture(name).to_str().unwrap().to_string();
        for cmd in [
            &["count"][..],
            &["matrix", "--trace"],
            &["measure"],
            &["oracle"],
            &["check"],
        ] {
            let mut c: Vec<String> = cmd.iter().map(ToString::to_string).collect();
            c.insert(1, f.clone());
            calls.push(c);
        }
    }
    let fan = fixture("fan.kg").to_str().unwrap().to_string();
    let c4 = fixture("c4boundary.kg").to_str().unwrap().to_string();
    let bowtie = fixture("bowtie.kg").to_str().unwrap().to_string();
    calls.push(vec!["grassmann".into(), fan.clone()]);
    calls.push(vec!["pfaffian-point".into(), c4]);
    calls.push(vec!["measure".into(), fan, "--subset".into(), "a,b".into()]);
    calls.push(vec!["oracle".into(), bowtie, "--signed".into()]);
    for c in calls {
        let args: Vec<&str> = c.iter().map(String::as_str).collect();
        let doc = json(&args);
        let errors: Vec<String> = validator.iter_errors(&doc).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{args:?}: {errors:?}");
    }
}
