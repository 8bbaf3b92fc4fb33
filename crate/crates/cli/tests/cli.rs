use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const HOME: &str = "[0, 0, 0, -1.5708, 0, 1.8675, 0]";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reachspan")).args(args).output().expect("spawn reachspan")
}

fn scenario(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn vertices(doc: &Value) -> Vec<Vec<f64>> {
    doc["vertices"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect())
        .collect()
}

#[test]
fn planar_polytope_smoke() {
    let dir = tempfile::tempdir().unwrap();
    let s = scenario(dir.path(), "s.json", r#"{"robot": "planar2", "q": [0.3, 0.9], "t_h": 0.1}"#);
    let out = dir.path().join("out");
    let o = run(&["polytope", "--scenario", s.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("vertices"));
    let obj = std::fs::read_to_string(out.join("polytope.obj")).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), 1);
    let doc = read_json(&out.join("polytope.json"));
    assert_eq!(doc["dim"], 2);
    assert!(doc["volume"].as_f64().unwrap() > 0.0);
}

#[test]
fn environment_rows_hold_at_every_vertex() {
    let dir = tempfile::tempdir().unwrap();
    let s = scenario(
        dir.path(),
        "s.json",
        &format!(
            r#"{{"robot": "generic7", "q": {HOME}, "t_h": 0.25,
                "environment": {{"A": [[0, 0, -1], [0, -1, 0]], "b": [-0.5, 0.2]}}}}"#
        ),
    );
    let out = dir.path().join("out");
    let o = run(&["polytope", "--scenario", s.to_str().unwrap(), "--out", out.to_str().unwrap(), "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let vs = vertices(&read_json(&out.join("polytope.json")));
    assert!(!vs.is_empty());
    for v in vs {
        assert!(v[2] >= 0.5 - 1e-9, "{v:?}");
        assert!(v[1] >= -0.2 - 1e-9, "{v:?}");
    }
    assert!(!out.join("polytope.obj").exists());
}

#[test]
fn several_horizons_give_growing_meshes() {
    let dir = tempfile::tempdir().unwrap();
    let s = scenario(dir.path(), "s.json", &format!(r#"{{"robot": "generic7", "q": {HOME}}}"#));
    let out = dir.path().join("out");
    let o = run(&[
        "polytope",
        "--scenario",
        s.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--horizons",
        "0.05,0.15,0.25",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let vols: Vec<f64> = ["0.05", "0.15", "0.25"]
        .iter()
        .map(|t| {
            assert!(out.join(format!("polytope_th{t}.obj")).exists());
            read_json(&out.join(format!("polytope_th{t}.json")))["volume"].as_f64().unwrap()
        })
        .collect();
    assert!(vols[0] < vols[1] && vols[1] < vols[2], "{vols:?}");
}

#[test]
fn missing_horizon_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let s = scenario(dir.path(), "s.json", r#"{"robot": "planar2", "q": [0.3, 0.9]}"#);
    let o = run(&["polytope", "--scenario", s.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("horizon"));
}

#[test]
fn single_point_link_matches_end_effector_polytope() {
    let dir = tempfile::tempdir().unwrap();
    let s = scenario(
        dir.path(),
        "s.json",
        &format!(
            r#"{{"robot": "generic7", "q": {HOME}, "t_h": 0.15, "local_point": [0, 0, 0.1],
                "links": [{{"name": "tip", "envelope": {{"vertices": [{{"frame": 6, "local_point": [0, 0, 0.1]}}]}}}}]}}"#
        ),
    );
    let out = dir.path().join("out");
    let sp = s.to_str().unwrap();
    let op = out.to_str().unwrap();
    assert!(run(&["polytope", "--scenario", sp, "--out", op]).status.success());
    let o = run(&["links", "--scenario", sp, "--out", op]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let a = read_json(&out.join("polytope.json"));
    let b = read_json(&out.join("link_tip.json"));
    let (va, vb) = (a["volume"].as_f64().unwrap(), b["volume"].as_f64().unwrap());
    assert!((va - vb).abs() <= 1e-9 * va, "{va} vs {vb}");
    assert_eq!(vertices(&a).len(), vertices(&b).len());
    let scene = std::fs::read_to_string(out.join("scene.obj")).unwrap();
    assert!(scene.starts_with("o tip"));
    assert_eq!(read_json(&out.join("scene.json"))["links"].as_array().unwrap().len(), 1);
}

#[test]
fn benchmark_writes_one_row_per_pair() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&[
        "benchmark",
        "--robot",
        "planar2",
        "--configs",
        "10",
        "--horizons",
        "0.05,0.25",
        "--out",
        out.to_str().unwrap(),
        "--format",
        "csv,json",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("metrics.csv")).unwrap();
    assert_eq!(csv.lines().count(), 21);
    assert!(out.join("summary.csv").exists());
    assert_eq!(read_json(&out.join("summary.json"))["summary"].as_array().unwrap().len(), 2);
}

#[test]
fn deterministic_benchmark_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("run{k}"));
        let o = run(&[
            "benchmark",
            "--robot",
            "planar2",
            "--configs",
            "5",
            "--horizons",
            "0.05,0.15",
            "--seed",
            "4",
            "--deterministic",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        reports.push(std::fs::read(out.join("metrics.csv")).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn unknown_flag_fails() {
    let o = run(&["polytope", "--no-such-flag"]);
    assert!(!o.status.success());
    let o = run(&["benchmark", "--robot", "planar2", "--delta", "-1"]);
    assert!(!o.status.success());
}

#[test]
fn infeasible_scenario_exits_nonzero_with_stub() {
    let dir = tempfile::tempdir().unwrap();
    let s = scenario(
        dir.path(),
        "s.json",
        &format!(r#"{{"robot": "generic7", "q": {HOME}, "t_h": 0.05, "environment": {{"A": [[0, 0, -1]], "b": [-5]}}}}"#),
    );
    let out = dir.path().join("out");
    let o = run(&["polytope", "--scenario", s.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stdout).contains("empty reachable set"));
    let doc = read_json(&out.join("polytope.json"));
    assert_eq!(doc["empty"], true);
}

#[test]
fn timing_smoke() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = run(&[
        "timing",
        "--robot",
        "planar2",
        "--configs",
        "3",
        "--horizons",
        "0.05",
        "--env-rows",
        "0,10",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(std::fs::read_to_string(out.join("timing.csv")).unwrap().lines().count(), 3);
}

#[test]
fn info_accepts_robot_or_scenario() {
    assert!(run(&["info", "--robot", "generic7"]).status.success());
    assert!(!run(&["info"]).status.success());
}
