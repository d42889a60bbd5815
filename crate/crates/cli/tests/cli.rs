use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

const P_STAR: &str = "[1,2],[1,3],[1,4],[1,5],[2,5],[2,6],[3,4]x2,[3,6],[4,6]x2,[5,6]";

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mvcycles"))
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("json output")
}

#[test]
fn enumerate_weights_and_pairs() {
    assert_eq!(json(&["enumerate", "--n", "3", "--weight", "1,1"])["count"], 2);
    let empty = json(&["enumerate", "--weight", "0,0"]);
    assert_eq!(empty["count"], 1);
    assert_eq!(empty["pictures"][0]["loops"], serde_json::json!([]));
    assert_eq!(json(&["enumerate", "--alpha", "1,0,-1", "--beta", "-1,0,1"])["count"], 3);
}

#[test]
fn golden_vertex() {
    let v = json(&["polytope", "--picture", P_STAR, "--lambda", "2,0,1,0,-1,-2"]);
    assert_eq!(v["vertex_by_perm"]["346512"], serde_json::json!([-1, -2, 2, 2, -2, 1]));
    assert_eq!(v["vertex_by_perm"].as_object().unwrap().len(), 720);
}

#[test]
fn small_polytopes() {
    let point = json(&["polytope", "--picture", "{}", "--lambda", "1,0,-1"]);
    let vs: std::collections::BTreeSet<String> = point["vertex_by_perm"]
        .as_object()
        .unwrap()
        .values()
        .map(|v| v.to_string())
        .collect();
    assert_eq!(vs.len(), 1);
    let tri = json(&["polytope", "--picture", "[1,3]", "--lambda", "1,0,-1"]);
    let vs: std::collections::BTreeSet<String> = tri["vertex_by_perm"]
        .as_object()
        .unwrap()
        .values()
        .map(|v| v.to_string())
        .collect();
    assert_eq!(vs.len(), 3);
}

#[test]
fn hexagon_svg() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("hex.svg");
    let out = run(&[
        "polytope",
        "--picture",
        "[1,2]x3,[2,3]x2,[1,3]",
        "--lambda",
        "2,0,-2",
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(text.matches("<circle").count(), 6);

    let out = run(&["polytope", "--picture", "[1,4]", "--lambda", "0,0,0,0", "--svg", svg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lattice_verdicts() {
    let path = |f: &str| data(f).to_str().unwrap().to_string();
    let m = json(&["lattice", "analyze", &path("monomial.json")]);
    assert_eq!(m["picture"]["loops"], serde_json::json!([]));
    assert_eq!(m["relative_dimension"], -3);

    let w = json(&["lattice", "analyze", &path("weak-only.json")]);
    assert_eq!(w["picture_text"], "{[1,3],[2,3],[3,5],[4,6]}");
    assert_eq!(w["relative_dimension"], -6);
    assert_eq!((w["weakly_compatible"].as_bool(), w["compatible"].as_bool()), (Some(true), Some(false)));

    let r = json(&["lattice", "analyze", &path("compatible-not-strong.json")]);
    assert_eq!(r["relative_dimension"], -9);
    assert_eq!(r["compatible"], true);
    assert_eq!(r["strongly_compatible"], false);
    assert_eq!(r["orbit_polytope_is_mv_polytope"], false);

    let s = json(&["lattice", "analyze", &path("strong.json")]);
    assert_eq!(s["strongly_compatible"], true);
    assert_eq!(s["orbit_polytope_is_mv_polytope"], true);
}

#[test]
fn modular_mode_agrees() {
    for f in ["weak-only.json", "compatible-not-strong.json", "strong.json"] {
        let p = data(f);
        let exact = json(&["lattice", "analyze", p.to_str().unwrap()]);
        let modular = json(&["lattice", "analyze", p.to_str().unwrap(), "--arithmetic", "modular"]);
        for key in ["delta", "picture", "lambda", "compatible", "strongly_compatible", "orbit_polytope"] {
            assert_eq!(exact[key], modular[key], "{f} {key}");
        }
    }
}

#[test]
fn sample_is_deterministic_and_reingestible() {
    let args = ["sample", "--picture", "[1,2],[1,3],[2,4]x2", "--lambda", "1,0,0,-1", "--seed", "11"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("y.json");
    std::fs::write(&file, v["lattice"].to_string()).unwrap();
    let r = json(&["lattice", "analyze", file.to_str().unwrap()]);
    assert_eq!(r["strongly_compatible"], true);
    assert_eq!(r["picture_text"], "{[1,2],[1,3],[2,4]x2}");
    assert_eq!(r["lambda"], serde_json::json!([1, 0, 0, -1]));
    assert_eq!(r["lattice"], v["lattice"]);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["sample", "--picture", "[1,2]", "--lambda", "0,0"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "degeneration"]).status.code(), Some(2));
    assert_eq!(run(&["enumerate", "--weight", "1,x"]).status.code(), Some(2));
    assert_eq!(run(&["lattice", "analyze", "/nonexistent.json"]).status.code(), Some(2));
    let out = run(&["sample", "--picture", "[1,3]", "--lambda", "0,0,0", "--seed", "1", "--max-draws", "0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_reports() {
    let v = json(&["verify", "kostant", "--n-max", "4", "--len-max", "6"]);
    assert_eq!(v["passed"], true);
    assert_eq!(v["reports"][0]["name"], "kostant");

    let args = ["verify", "degeneration", "--seed", "3", "--budget", "4"];
    let a = run(&args);
    let b = run(&[&args[..], &["--sequential"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);

    let pure = json(&["verify", "purity", "--alpha", "2,0,-2", "--beta", "-2,0,2"]);
    assert_eq!(pure["passed"], true);

    let table = run(&["verify", "commutativity", "--seed", "1", "--budget", "10", "--n-max", "3", "--format", "table"]);
    let text = String::from_utf8(table.stdout).unwrap();
    assert!(text.starts_with("commutativity  PASS"), "{text}");
    assert!(text.ends_with("PASS\n"));
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("out.json");
    let args = ["enumerate", "--weight", "1,1,1"];
    let stdout = run(&args).stdout;
    let out = run(&[&args[..], &["--output", file.to_str().unwrap()]].concat());
    assert!(out.status.success() && out.stdout.is_empty());
    assert_eq!(std::fs::read(&file).unwrap(), stdout);
}
