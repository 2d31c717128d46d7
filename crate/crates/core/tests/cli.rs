use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn hextremal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hextremal")).args(args).output().expect("spawn binary")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

#[test]
fn solve_json_has_solution_and_config() {
    let o = hextremal(&["solve", "--m", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    let c = v["solution"]["Cstar"].as_f64().unwrap();
    assert!((c - 4.1262698297).abs() < 1e-7);
    assert_eq!(v["config"]["command"], "solve");
    assert_eq!(v["config"]["grid"], 512);
    assert_eq!(v["solution"]["profile"]["gamma"].as_array().unwrap().len(), 512);
}

#[test]
fn solve_csv_has_one_row_per_grid_point() {
    let o = hextremal(&["solve", "--m", "2", "--grid", "200", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("gamma,v,phi,lambda"));
    assert_eq!(lines.count(), 200);
}

#[test]
fn unnormalised_class_matches_ratio() {
    let a = json(&hextremal(&["solve", "--a", "2", "--b", "6", "--genus", "3", "--degree", "-2"]));
    let b = json(&hextremal(&["solve", "--m", "3", "--genus", "3", "--degree", "-2"]));
    assert_eq!(a["solution"]["Cstar"], b["solution"]["Cstar"]);
}

#[test]
fn scan_and_mstar_and_phase() {
    let o = hextremal(&["scan", "--m", "1", "--c-min", "-5", "--c-max", "30", "--steps", "8", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("C,status,gammaStar_or_vEnd"));
    assert_eq!(text.lines().count(), 9);
    assert!(text.contains("breakdown") && text.contains("complete"));

    let v = json(&hextremal(&["mstar", "--m", "1"]));
    let m = v["threshold"]["value"].as_f64().unwrap();
    assert!((m - 17.668926899).abs() < 1e-6);

    let o = hextremal(&["phase", "--ms", "2,0.5,1", "--format", "csv"]);
    assert!(o.status.success());
    let rows: Vec<String> = stdout(&o).lines().map(str::to_owned).collect();
    assert_eq!(rows[0], "m,Cstar,M");
    assert_eq!(rows.len(), 4);
    assert!(rows[1].starts_with("5.0000000000000000e-1,"));
}

#[test]
fn futaki_and_cone() {
    let v = json(&hextremal(&["futaki", "--m", "1"]));
    let text = v.to_string();
    assert!(text.contains("NotHcscK"));

    let o = hextremal(&["cone", "--a", "1", "--b", "-0.5", "--degree", "2"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["verdict"]["isKahler"], false);
    assert_eq!(v["verdict"]["inequalityValues"].as_array().unwrap().len(), 5);
}

#[test]
fn output_file_round_trips_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    let doc = dir.path().join("solve.json");
    let doc_s = doc.to_str().unwrap();
    let o = hextremal(&["solve", "--m", "1.5", "--output", doc_s]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());

    let o = hextremal(&["verify", "--input", doc_s]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert_eq!(json(&o)["passed"], true);

    let o = hextremal(&["verify", "--input", doc_s, "--format", "csv"]);
    assert!(stdout(&o).starts_with("check,stored,recomputed,ok"));

    tamper(&doc, "B");
    let o = hextremal(&["verify", "--input", doc_s]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["passed"], false);
}

fn tamper(path: &Path, key: &str) {
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let x = v["solution"][key].as_f64().unwrap();
    v["solution"][key] = Value::from(x * (1.0 + 1e-6));
    std::fs::write(path, serde_json::to_string(&v).unwrap()).unwrap();
}

#[test]
fn reruns_are_byte_identical() {
    let a = hextremal(&["solve", "--m", "0.7", "--degree", "3"]);
    let b = hextremal(&["solve", "--m", "0.7", "--degree", "3"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exit_codes() {
    assert_eq!(hextremal(&["--help"]).status.code(), Some(0));
    assert_eq!(hextremal(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(hextremal(&["solve"]).status.code(), Some(1));
    assert_eq!(hextremal(&["solve", "--m", "1", "--a", "2"]).status.code(), Some(1));
    assert_eq!(hextremal(&["solve", "--m", "1", "--tol", "1e-2"]).status.code(), Some(1));
    assert_eq!(hextremal(&["solve", "--m", "-1"]).status.code(), Some(1));
    assert_eq!(hextremal(&["solve", "--m", "1", "--genus", "1"]).status.code(), Some(1));
    assert_eq!(hextremal(&["verify", "--input", "/nonexistent/doc.json"]).status.code(), Some(1));
    let o = hextremal(&["solve", "--m", "1", "--grid", "8"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("grid"));
}
