//! End-to-end runs of the `helly-ecc` binary.

use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn helly_ecc(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_helly-ecc"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const P5: &str = "0 1\n1 2\n2 3\n3 4\n";
const C4: &str = "0 1\n1 2\n2 3\n3 0\n";

#[test]
fn ecc_on_a_path() {
    for algo in ["oracle", "sqrt", "hyp"] {
        let out = helly_ecc(&["--algo", algo, "ecc", "-"], P5);
        assert_eq!(out.status.code(), Some(0), "{algo}");
        let doc = json(&out);
        assert_eq!(doc["schema"], "helly-ecc/1");
        assert_eq!(doc["algorithm"], algo);
        assert_eq!(doc["rad"], 2);
        assert_eq!(doc["diam"], 4);
        assert_eq!(doc["ecc"], serde_json::json!([4, 3, 2, 3, 4]));
        assert_eq!(doc["center"], serde_json::json!([2]));
        assert!(doc.get("labels").is_none());
    }
}

#[test]
fn fields_keep_their_order() {
    let out = helly_ecc(&["ecc", "-"], P5);
    let text = String::from_utf8(out.stdout).unwrap();
    let keys: Vec<usize> = ["schema", "n", "rad", "diam", "ecc", "center"]
        .iter()
        .map(|k| text.find(&format!("\"{k}\":")).unwrap())
        .collect();
    assert!(keys.windows(2).all(|w| w[0] < w[1]), "{text}");
}

#[test]
fn sparse_labels_are_reported() {
    let out = helly_ecc(&["ecc", "-"], "10 20\n20 30\n");
    let doc = json(&out);
    assert_eq!(doc["labels"], serde_json::json!([10, 20, 30]));
    assert_eq!(doc["center"], serde_json::json!([1]));
}

#[test]
fn tsv_output() {
    let out = helly_ecc(&["--format", "tsv", "ecc", "-"], P5);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("ecc\t4,3,2,3,4\n"), "{text}");
    assert!(text.contains("rad\t2\n"));
}

#[test]
fn center_command() {
    let doc = json(&helly_ecc(&["center", "--gen", "path(9)"], ""));
    assert_eq!(doc["vertex"], 4);
    assert_eq!(doc["rad"], 4);
}

#[test]
fn verify_agrees_on_a_king_grid() {
    let out = helly_ecc(&["verify", "--gen", "king-grid(10,10)"], "");
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["summary"], "3/3 algorithms agree");
    assert_eq!(doc["source"], "king-grid(10,10)");
}

#[test]
fn verify_reports_a_mismatch_on_non_helly_input() {
    let out = helly_ecc(&["verify", "-"], C4);
    assert_eq!(out.status.code(), Some(2));
    let doc = json(&out);
    assert_ne!(doc["agree"], doc["total"]);
}

#[test]
fn fast_algorithms_refuse_c4() {
    for algo in ["sqrt", "hyp"] {
        let out = helly_ecc(&["--algo", algo, "ecc", "-"], C4);
        assert_eq!(out.status.code(), Some(3), "{algo}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("not Helly"));
    }
    // The oracle has no Helly precondition.
    let out = helly_ecc(&["--algo", "oracle", "ecc", "-"], C4);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn check_finds_the_c4_witness() {
    let out = helly_ecc(&["check", "-"], C4);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["helly"]["verdict"], "not-helly");
    assert_eq!(doc["helly"]["witness"], serde_json::json!([0, 1, 2, 3]));
    assert_eq!(doc["radius_law"]["holds"], false);
}

#[test]
fn check_passes_on_a_king_grid() {
    let doc = json(&helly_ecc(&["check", "--gen", "king-grid(3,4)"], ""));
    assert_eq!(doc["helly"]["verdict"], "helly");
    assert_eq!(doc["radius_law"]["holds"], true);
    for key in ["unimodality", "center_formula", "center_isometry"] {
        assert_eq!(doc[key]["verdict"], "pass", "{key}");
    }
}

#[test]
fn params_of_c4() {
    let doc = json(&helly_ecc(&["params", "-"], C4));
    assert_eq!(doc["hyperbolicity"]["delta"]["display"], "1");
    assert_eq!(doc["pseudoconvexity"]["beta"], 1);
}

#[test]
fn subset_eccentricities() {
    let doc = json(&helly_ecc(&["subset-ecc", "-", "--subset", "0,4"], P5));
    assert_eq!(doc["rad"], 2);
    assert_eq!(doc["diam"], 4);
    assert_eq!(doc["center"], serde_json::json!([2]));
}

#[test]
fn input_errors_exit_with_one() {
    let cases: [(&[&str], &str); 5] = [
        (&["ecc", "-"], "0 1\n0 1\n"),
        (&["ecc", "-"], "0 1\n2 3\n"),
        (&["ecc", "/nonexistent/graph.txt"], ""),
        (&["ecc", "--gen", "king-grid(0,3)"], ""),
        (&["subset-ecc", "-", "--subset", "9"], P5),
    ];
    for (args, stdin) in cases {
        let out = helly_ecc(args, stdin);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(helly_ecc(&["ecc"], "").status.code(), Some(1));
    assert_eq!(helly_ecc(&["--help"], "").status.code(), Some(0));
}

#[test]
fn oracle_caps_are_enforced() {
    let out = helly_ecc(&["check", "--gen", "path(40)"], "");
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--cap-subsets"));
}

#[test]
fn thread_count_does_not_change_output() {
    for spec in ["king-grid(12,9)", "block-graph(300,4)", "path(400)"] {
        let one = helly_ecc(&["--threads", "1", "verify", "--gen", spec], "");
        let eight = helly_ecc(&["--threads", "8", "verify", "--gen", spec], "");
        assert_eq!(one.stdout, eight.stdout, "{spec}");
        assert_eq!(one.status.code(), Some(0));
    }
}

#[test]
fn generated_graphs_round_trip() {
    let dir = std::env::temp_dir().join(format!("helly-ecc-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let edges = dir.join("g.txt");
    let meta = dir.join("meta.json");
    let out = helly_ecc(
        &[
            "--seed",
            "5",
            "gen",
            "block-graph(60)",
            "--out",
            edges.to_str().unwrap(),
            "--meta",
            meta.to_str().unwrap(),
        ],
        "",
    );
    assert_eq!(out.status.code(), Some(0));
    let meta: Value = serde_json::from_slice(&std::fs::read(&meta).unwrap()).unwrap();
    assert_eq!(meta["n"], 60);
    assert_eq!(meta["expected_helly"], true);

    let from_file = json(&helly_ecc(&["ecc", edges.to_str().unwrap()], ""));
    let from_gen = json(&helly_ecc(
        &["--seed", "5", "ecc", "--gen", "block-graph(60)"],
        "",
    ));
    assert_eq!(from_file["ecc"], from_gen["ecc"]);
    assert_eq!(from_file["m"], meta["m"]);
    std::fs::remove_dir_all(&dir).unwrap();
}
