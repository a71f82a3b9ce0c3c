use std::path::Path;
use std::process::Command;

use peacekit::graph::load_graph;
use peacekit::{peace_report, PartialColouring};
use serde_json::Value;

fn peacekit(args: &[&str]) -> String {
    let out = Command::new(env!("CARGO_BIN_EXE_peacekit")).args(args).output().unwrap();
    assert!(
        out.status.success(),
        "peacekit {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&peacekit(args)).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_colour_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("g.txt");
    let f = dir.path().join("f.json");
    peacekit(&["--seed", "4", "gen", "--family", "regular", "--n", "120", "--delta", "10", "--out", p(&g)]);
    let run = json(&["--seed", "4", "oneshot", "--graph", p(&g), "--mu", "1/2", "--out", p(&f)]);
    let verify = json(&["verify", "--graph", p(&g), "--colouring", p(&f), "--p", "3"]);
    assert_eq!(run["peacefulness"], verify["peacefulness"]);
    assert_eq!(verify["total"], Value::Bool(true));

    // The tool's numbers agree with the library on the files it wrote.
    let graph = load_graph(&g).unwrap();
    let colouring = PartialColouring::load(&f).unwrap();
    let report = peace_report(&graph, &colouring).unwrap();
    assert_eq!(verify["peacefulness"].as_u64(), Some(report.peacefulness as u64));
    let peaceful = verify["p_peaceful"].as_bool().unwrap();
    assert_eq!(peaceful, report.peacefulness <= 3);
}

#[test]
fn oracle_on_petersen() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("p.txt");
    peacekit(&["gen", "--family", "petersen", "--out", p(&g)]);
    let res = json(&["oracle", "--graph", p(&g), "--colours", "4"]);
    let witness: PartialColouring = serde_json::from_value(res["witness"].clone()).unwrap();
    let report = peace_report(&load_graph(&g).unwrap(), &witness).unwrap();
    assert_eq!(res["p_star"].as_u64(), Some(report.peacefulness as u64));
}

#[test]
fn nibble_trace_has_one_record_per_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("r.txt");
    peacekit(&["--seed", "2", "gen", "--family", "regular", "--n", "200", "--delta", "24", "--out", p(&g)]);
    let trace = json(&["--seed", "2", "nibble-run", "--graph", p(&g)]);
    let iterations = trace["iterations"].as_array().unwrap();
    assert!(!iterations.is_empty());
    assert!(iterations.len() as u64 <= trace["i_star"].as_u64().unwrap());
    assert!(iterations.iter().all(|r| r["list_target"].is_number() && r["monitors"].is_object()));
}

#[test]
fn trace_star_and_audit() {
    let t = json(&["trace", "--delta", "64"]);
    assert_eq!(t["iterations"].as_array().unwrap().len() as u64, t["i_star"].as_u64().unwrap() + 1);
    let s = json(&["--seed", "1", "star-sim", "--delta", "32", "--trials", "10"]);
    assert!(s.is_object());
    let a = json(&["--seed", "1", "audit", "--delta", "16", "--subset-samples", "3"]);
    assert_eq!(a["m"], a["m_by_sorting"]);
    assert_eq!(a["averaging_holds"], Value::Bool(true));
}

#[test]
fn sweep_and_check() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.toml");
    std::fs::write(
        &config,
        "[[cells]]\nfamily = \"regular\"\nn = 50\ndelta = 4\nalgorithm = [\"greedy\", \"zcolour\"]\nseeds = 2\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    peacekit(&["--threads", "1", "sweep", "--config", p(&config), "--out", p(&out)]);
    let csv = std::fs::read_to_string(out.join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    peacekit(&["sweep", "--config", p(&config), "--out", p(&out), "--check"]);
}

#[test]
fn bad_input_fails_cleanly() {
    let out = Command::new(env!("CARGO_BIN_EXE_peacekit"))
        .args(["verify", "--graph", "/nonexistent", "--colouring", "/nonexistent"])
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent"));
}
