use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn critgraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_critgraph")).args(args).output().expect("run critgraph")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&critgraph(&["construct", "--r", "0", "--k", "6", "--seed", "1"])), 1);
    assert_eq!(code(&critgraph(&["construct", "--k", "6"])), 1);
    assert_eq!(code(&critgraph(&["construct", "--r", "1", "--k", "6", "--restarts", "0"])), 1);
    assert_eq!(code(&critgraph(&["construct", "--r", "1", "--k", "6", "--order", "sanity,bogus"])), 1);
    assert_eq!(code(&critgraph(&["frobnicate"])), 1);
    assert_eq!(code(&critgraph(&["lemma-check", "--suite", "nonsense"])), 1);
    assert_eq!(code(&critgraph(&["--help"])), 0);
}

#[test]
fn tiny_construction_fails_honestly_and_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("c.json");
    let dot = dir.path().join("g.dot");
    let out = critgraph(&[
        "construct", "--r", "1", "--k", "2", "--seed", "3", "--out", path_str(&cert), "--dot", path_str(&dot),
    ]);
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("below (s-1)m"));

    let json: Value = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(json["schema"], "critgraph.certificate.v1");
    assert_eq!(json["params"]["n"], 5);
    assert_eq!(json["seed"], 3);
    assert_eq!(json["conclusions"]["robust_to_r"], false);

    let verified = critgraph(&["verify", path_str(&cert)]);
    assert_eq!(code(&verified), 0, "{}", String::from_utf8_lossy(&verified.stdout));

    // G is edgeless here: node lines only
    let text = fs::read_to_string(&dot).unwrap();
    assert_eq!(text.lines().filter(|l| l.ends_with(';') && !l.contains("--")).count(), 5);
    assert_eq!(text.lines().filter(|l| l.contains("--")).count(), 0);
}

#[test]
fn construction_is_byte_identical_for_equal_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    let da = dir.path().join("a.dot");
    let db = dir.path().join("b.dot");
    for (cert, dot, workers) in [(&a, &da, "1"), (&b, &db, "4")] {
        let out = critgraph(&[
            "construct", "--r", "1", "--k", "4", "--seed", "17", "--restarts", "40", "--workers", workers,
            "--out", path_str(cert), "--dot", path_str(dot),
        ]);
        assert_eq!(code(&out), 2);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(fs::read(&da).unwrap(), fs::read(&db).unwrap());

    let json: Value = serde_json::from_str(&fs::read_to_string(&a).unwrap()).unwrap();
    let edges = json["graph"]["edges"].as_array().unwrap().len();
    let dot = fs::read_to_string(&da).unwrap();
    assert_eq!(dot.lines().filter(|l| l.contains(" -- ")).count(), edges);
    assert!(dot.starts_with("graph G {\n") && dot.ends_with("}\n"));
}

/// Consecutive 4-sets on the 9-cycle: vertex-critical, not robust.
fn write_circulant(dir: &Path) -> std::path::PathBuf {
    let edges: Vec<Vec<usize>> = (0..9).map(|i| (0..4).map(|j| (i + j) % 9).collect()).collect();
    let path = dir.join("instance.json");
    fs::write(&path, serde_json::json!({ "n": 9, "edges": edges }).to_string()).unwrap();
    path
}

#[test]
fn supplied_instance_and_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let instance = write_circulant(dir.path());
    let cert = dir.path().join("c.json");
    let out = critgraph(&[
        "construct", "--r", "1", "--k", "3", "--instance", path_str(&instance), "--seed", "0", "--out",
        path_str(&cert),
    ]);
    assert_eq!(code(&out), 2);
    let text = fs::read_to_string(&cert).unwrap();
    let json: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(json["conclusions"]["chi"], 3);
    assert_eq!(json["conclusions"]["vertex_critical"], true);
    assert_eq!(code(&critgraph(&["verify", path_str(&cert)])), 0);

    // break one matching
    let mut bad = json.clone();
    bad["matchability"]["per_vertex"][0]["matching"][0] = serde_json::json!([1, 2, 3, 5]);
    let tampered = dir.path().join("bad.json");
    fs::write(&tampered, serde_json::to_string_pretty(&bad).unwrap()).unwrap();
    let out = critgraph(&["verify", path_str(&tampered)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stdout).contains("matching not disjoint/covering"));

    // claim robustness without evidence
    let mut bad = json;
    bad["conclusions"]["robust_to_r"] = Value::Bool(true);
    fs::write(&tampered, serde_json::to_string_pretty(&bad).unwrap()).unwrap();
    let out = critgraph(&["verify", path_str(&tampered)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stdout).contains("conclusion mismatch"));

    // truncated file
    fs::write(&tampered, &text[..text.len() / 2]).unwrap();
    let out = critgraph(&["verify", path_str(&tampered)]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot parse certificate"));

    // wrong vertex count for the parameters
    let out = critgraph(&["construct", "--r", "1", "--k", "4", "--instance", path_str(&instance)]);
    assert_eq!(code(&out), 1);
}

#[test]
fn lemma_suites() {
    let out = critgraph(&["lemma-check", "--suite", "blocks", "--max-n", "5"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("pass"));

    let out = critgraph(&["lemma-check", "--suite", "obs1", "--max-n", "5", "--max-edges", "4"]);
    assert_eq!(code(&out), 0);

    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("edgebound.json");
    let out = critgraph(&["lemma-check", "--suite", "edgebound", "--samples", "30", "--out", path_str(&report)]);
    assert_eq!(code(&out), 0);
    let json: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert!(json["skipped"].as_u64().unwrap() >= 1);
    assert_eq!(json["counterexamples"].as_array().unwrap().len(), 0);

    let out = critgraph(&["lemma-check", "--suite", "obs1", "--max-n", "8", "--max-edges", "8", "--cap", "1000"]);
    assert_eq!(code(&out), 3);

    for suite in ["sparsity-oracle", "matching-oracle"] {
        assert_eq!(code(&critgraph(&["lemma-check", "--suite", suite, "--samples", "20"])), 0, "{suite}");
    }
}

#[test]
fn sweep_endpoints_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = critgraph(&[
            "sweep", "--s", "3", "--n", "6,9", "--p", "0,0.2,1", "--samples", "20", "--seed", "4", "--out",
            path_str(path),
        ]);
        assert_eq!(code(&out), 0);
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(text.lines().next(), Some("n,p,samples,successes,fraction"));
    assert_eq!(rows.len(), 6);
    for row in &rows {
        match row[1] {
            "0" => assert_eq!(row[4], "0"),
            "1" => assert_eq!(row[4], "1"),
            _ => {}
        }
    }

    let out = critgraph(&["sweep", "--s", "3", "--n", "7", "--p", "0.5", "--samples", "5"]);
    assert_eq!(code(&out), 1);
}
