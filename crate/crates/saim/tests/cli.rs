//! End-to-end checks of the command-line surface: verbs, flags, file
//! outputs, and exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn saim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_saim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

fn read_jsonl(path: &Path) -> Vec<serde_json::Value> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

#[test]
fn penalty_mode_freezes_multipliers() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let result = saim(&[
        "solve",
        "--instances",
        "gen:qkp:n=10,density=0.5,seed=1,count=1",
        "--mode",
        "penalty",
        "--runs",
        "20",
        "--mcs",
        "100",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{}", stderr(&result));
    let trace = read_jsonl(&out.join("trace_qkp_10_50_1_r0.jsonl"));
    assert_eq!(trace.len(), 20);
    for record in &trace {
        let lambda = record["lambda"].as_array().unwrap();
        assert!(lambda.iter().all(|v| v.as_f64().unwrap() == 0.0));
    }
    let records = read_jsonl(&out.join("results.jsonl"));
    assert_eq!(records[0]["mode"], "penalty");
}

#[test]
fn paper_preset_recovers_small_optimum() {
    // a 12-variable instance is small enough for the automatic oracle, so
    // the record carries a real accuracy; under the qkp-paper preset it
    // lands on 100
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let result = saim(&[
        "solve",
        "--instances",
        "gen:qkp:n=12,density=0.5,seed=0,count=1",
        "--preset",
        "qkp-paper",
        "--seed",
        "1",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{}", stderr(&result));
    let records = read_jsonl(&out.join("results.jsonl"));
    assert_eq!(records.len(), 1);
    let accuracy = records[0]["accuracy"].as_f64().unwrap();
    assert!((accuracy - 100.0).abs() < 1e-6, "accuracy {accuracy}");
    // preset values survive into sweep accounting: 2000 runs x 1000 MCS
    assert_eq!(records[0]["total_sweeps"].as_u64().unwrap(), 2_000_000);
}

#[test]
fn records_are_self_describing() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let result = saim(&[
        "solve",
        "--instances",
        "gen:mkp:n=10,m=2,seed=4,count=1,wmax=30",
        "--runs",
        "10",
        "--mcs",
        "50",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{}", stderr(&result));
    let records = read_jsonl(&out.join("results.jsonl"));
    let hash = records[0]["config_hash"].as_str().unwrap();
    assert_eq!(hash.len(), 16);
    assert_eq!(records[0]["format_version"].as_u64().unwrap(), 1);
    assert!(records[0]["seed"].is_u64());
    // trace records embed the same triple
    let trace = read_jsonl(&out.join("trace_mkp_10_2_4_r0.jsonl"));
    assert_eq!(trace[0]["config_hash"].as_str().unwrap(), hash);
    assert_eq!(trace[0]["format_version"].as_u64().unwrap(), 1);
    // scale factors recorded
    assert!(records[0]["scale_obj"].as_f64().unwrap() > 0.0);
    assert!(records[0]["scale_con"].as_f64().unwrap() > 0.0);
}

#[test]
fn no_feasible_solution_still_exits_zero() {
    // tiny budget on a larger instance: likely no feasible sample, still a
    // successful run with null fields
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let result = saim(&[
        "solve",
        "--instances",
        "gen:qkp:n=40,density=0.5,seed=2,count=1",
        "--runs",
        "3",
        "--mcs",
        "20",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{}", stderr(&result));
    let records = read_jsonl(&out.join("results.jsonl"));
    assert!(records[0]["best_cost"].is_null());
    assert!(records[0]["accuracy"].is_null());
}

#[test]
fn generate_is_deterministic_and_loadable() {
    let tmp = tempfile::tempdir().unwrap();
    let dir_a = tmp.path().join("a");
    let dir_b = tmp.path().join("b");
    for dir in [&dir_a, &dir_b] {
        let result = saim(&[
            "generate",
            "--family",
            "qkp",
            "--n",
            "12",
            "--density",
            "0.5",
            "--seed",
            "7",
            "--count",
            "2",
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert!(result.status.success(), "{}", stderr(&result));
    }
    for name in ["qkp_12_50_7.json", "qkp_12_50_8.json"] {
        let a = std::fs::read(dir_a.join(name)).unwrap();
        let b = std::fs::read(dir_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between runs");
    }
    // generated files load back through the solve path
    let out = tmp.path().join("run");
    let pattern = format!("{}/*.json", dir_a.display());
    let result = saim(&[
        "solve",
        "--instances",
        &pattern,
        "--runs",
        "5",
        "--mcs",
        "50",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{}", stderr(&result));
    assert_eq!(read_jsonl(&out.join("results.jsonl")).len(), 2);
}

#[test]
fn oracle_solves_toy_and_refuses_large() {
    let tmp = tempfile::tempdir().unwrap();
    // two-item toy: values (5, 3), weights (4, 2), capacity 6 -> OPT -8
    let toy = tmp.path().join("toy.txt");
    std::fs::write(&toy, "1 2 1 0 5 3 4 2 6").unwrap();
    let result = saim(&["oracle", toy.to_str().unwrap()]);
    assert!(result.status.success(), "{}", stderr(&result));
    let record: serde_json::Value = serde_json::from_str(stdout(&result).trim()).unwrap();
    assert_eq!(record["opt"].as_f64().unwrap(), -8.0);
    assert_eq!(record["state"].as_str().unwrap(), "11");

    // 30 variables exceed the exhaustive limit
    let gen = saim(&[
        "generate",
        "--family",
        "qkp",
        "--n",
        "30",
        "--seed",
        "0",
        "--out",
        tmp.path().join("big").to_str().unwrap(),
    ]);
    assert!(gen.status.success());
    let big = tmp.path().join("big/qkp_30_50_0.json");
    let refusal = saim(&["oracle", big.to_str().unwrap()]);
    assert!(!refusal.status.success());
    let message = stderr(&refusal);
    assert!(message.contains("30 variables"), "{message}");
    assert!(message.contains("limited to 25"), "{message}");
}

#[test]
fn validate_suite_selection() {
    // a cheap single check passes
    let result = saim(&["validate", "--suite", "energy-roundtrip"]);
    assert!(result.status.success(), "{}", stderr(&result));
    let text = stdout(&result);
    assert!(text.contains("energy-roundtrip"), "{text}");
    assert!(text.contains("pass"), "{text}");
    assert!(text.contains("1 of 1 checks passed"), "{text}");

    // empty selection is a usage error
    let empty = saim(&["validate", "--suite", ""]);
    assert!(!empty.status.success());
    assert!(stderr(&empty).contains("empty --suite"));

    // unknown names are usage errors
    let unknown = saim(&["validate", "--suite", "bogus"]);
    assert!(!unknown.status.success());
    assert!(stderr(&unknown).contains("unknown check"));
}

#[test]
fn solve_rejects_bad_inputs() {
    let missing = saim(&[
        "solve",
        "--instances",
        "/nonexistent/path/*.json",
        "--out",
        "/tmp/unused",
    ]);
    assert!(!missing.status.success());
    assert!(stderr(&missing).contains("no files match"));

    let bad_spec = saim(&["solve", "--instances", "gen:qkp:density=0.5", "--out", "/tmp/unused"]);
    assert!(!bad_spec.status.success());
    assert!(stderr(&bad_spec).contains("needs n="));

    let bad_family = saim(&["solve", "--instances", "gen:tsp:n=5", "--out", "/tmp/unused"]);
    assert!(!bad_family.status.success());
    assert!(stderr(&bad_family).contains("unknown gen family"));
}

#[test]
fn format_detection_handles_all_three_layouts() {
    let tmp = tempfile::tempdir().unwrap();
    // community QKP text
    let qkp = tmp.path().join("toy.qkp");
    std::fs::write(&qkp, "toy2\n2\n3 1\n4\n0\n4\n2 3\n").unwrap();
    // OR-Library MKP text
    let mkp = tmp.path().join("toy.mkp");
    std::fs::write(&mkp, "1 2 1 0 5 3 4 2 6").unwrap();
    let out = tmp.path().join("run");
    let result = saim(&[
        "solve",
        "--instances",
        qkp.to_str().unwrap(),
        "--instances",
        mkp.to_str().unwrap(),
        "--runs",
        "10",
        "--mcs",
        "50",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(result.status.success(), "{}", stderr(&result));
    let records = read_jsonl(&out.join("results.jsonl"));
    let names: Vec<&str> = records
        .iter()
        .map(|r| r["instance"].as_str().unwrap())
        .collect();
    assert_eq!(names, vec!["toy2", "2_1_1"]);
}
