use std::path::Path;
use std::process::{Command, Output};

fn sff(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sff"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn genmap(dir: &Path) {
    let out = sff(
        dir,
        &[
            "genmap", "--size", "500", "--density", "0.25", "-n", "4", "--min-separation", "60", "--seed-count", "3",
            "--imax", "30000", "-o", "sc.json",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn plan_writes_forest_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    genmap(dir.path());
    let out = sff(dir.path(), &["plan", "sc.json", "--seed", "2", "-o", "f.json", "--svg", "f.svg"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("f.json")).unwrap()).unwrap();
    assert_eq!(v["planner"], "SFF_STAR");
    assert_eq!(v["seed"], 2);
    assert_eq!(v["tour"]["sequence"].as_array().unwrap().len(), 4);
    assert!(!v["forest"]["nodes"].as_array().unwrap().is_empty());
    let svg = std::fs::read_to_string(dir.path().join("f.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("class=\"tour\""));
}

#[test]
fn lazy_plan_has_no_forest() {
    let dir = tempfile::tempdir().unwrap();
    genmap(dir.path());
    let out = sff(dir.path(), &["plan", "sc.json", "--planner", "LAZY_TSP", "-o", "l.json", "--svg", "l.svg"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("l.json")).unwrap()).unwrap();
    assert!(v["forest"].is_null());
    assert!(v["stats"]["cumulative_cost"].is_null());
}

#[test]
fn bench_then_compare() {
    let dir = tempfile::tempdir().unwrap();
    genmap(dir.path());
    for (planner, file) in [("SFF_STAR", "a.json"), ("MULTI_T_RRT", "b.json")] {
        let out = sff(dir.path(), &["bench", "sc.json", "--planner", planner, "--json", file, "--hist", "h.csv", "--bins", "4"]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let hist = std::fs::read_to_string(dir.path().join("h.csv")).unwrap();
    assert_eq!(hist.lines().count(), 5);
    let out = sff(dir.path(), &["compare", "a.json", "b.json", "--json", "r.json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("verdict"));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap()).unwrap();
    assert!(r["result"]["p_value"].as_f64().is_some());
}

#[test]
fn flag_overrides_reach_the_planner() {
    let dir = tempfile::tempdir().unwrap();
    genmap(dir.path());
    let out = sff(dir.path(), &["bench", "sc.json", "--seed", "7", "--l", "30", "--check-points", "2", "--csv", "s.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.lines().nth(1).unwrap().starts_with("7,"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    genmap(dir.path());
    std::fs::write(dir.path().join("bad.json"), r#"{"version": 1}"#).unwrap();
    assert_eq!(sff(dir.path(), &["bench", "bad.json"]).status.code(), Some(2));
    assert_eq!(sff(dir.path(), &["plan", "missing.json"]).status.code(), Some(2));
    assert_eq!(sff(dir.path(), &["plan", "sc.json", "--pq=1.5"]).status.code(), Some(2));
    assert_eq!(sff(dir.path(), &["plan", "sc.json", "--planner", "DIJKSTRA"]).status.code(), Some(2));
    assert_eq!(sff(dir.path(), &["plan", "sc.json", "--imax", "3"]).status.code(), Some(3));
    assert_eq!(sff(dir.path(), &["bench", "sc.json", "--imax", "3", "--csv", "x.csv"]).status.code(), Some(3));
    assert_eq!(sff(dir.path(), &["plan", "sc.json", "--imax", "30000"]).status.code(), Some(0));
}
