use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn dpcolor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dpcolor")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn line_command_reproduces_worked_line() {
    let out = dpcolor(&["line", "--nb", "4", "--nr", "3", "--rb", "0.8", "--eps-ln", "1.3", "--delta", "0.1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json_of(&out);
    assert_eq!(v["tau"], 1);
    let r: Vec<f64> = v["error_blue"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    for (got, want) in r.iter().zip([0.2554, 0.432, 0.64, 0.8]) {
        assert!((got - want).abs() < 5e-4, "{r:?}");
    }
    let b: Vec<f64> = v["prob_blue_red"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!((b[0] - 1.0 / 13.0).abs() < 1e-12 && b[1] == 0.0 && b[2] == 0.0);
    assert_eq!(v["blue_side"]["nodes"]["1"]["branch"], "terminal");
    assert_eq!(v["blue_side"]["nodes"]["3"]["branch"], "initial");
}

#[test]
fn balanced_voting_table() {
    let out = dpcolor(&["balanced", "--graph", path(&data("cube.json")), "--eps-ln", "2", "--delta", "0.1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json_of(&out);
    let b = |id: &str| v["prob_blue"][id].as_f64().unwrap();
    assert!((b("111") - 0.9).abs() < 1e-12);
    assert!((b("112") - 0.7).abs() < 1e-12);
    assert!((b("122") - 0.3).abs() < 1e-12);
    assert!((b("222") - 0.1).abs() < 1e-12);
}

#[test]
fn verify_exit_codes() {
    let two = data("two.json");
    let ok = dpcolor(&["verify", "--graph", path(&two), "--mech", path(&data("m1.json")), "--eps-ln", "2", "--delta", "0.1"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json_of(&ok)["satisfied"], true);
    let bad = dpcolor(&["verify", "--graph", path(&two), "--mech", path(&data("m1.json")), "--eps", "0.1"]);
    assert_eq!(bad.status.code(), Some(2));
    assert_eq!(json_of(&bad)["satisfied"], false);
}

#[test]
fn compare_and_utility() {
    let two = data("two.json");
    let out = dpcolor(&["compare", "--graph", path(&two), "--first", path(&data("m1.json")), "--second", path(&data("m2.json"))]);
    assert_eq!(json_of(&out)["dominance"], "incomparable");

    let cube = data("cube.json");
    let tmp = tempfile::tempdir().unwrap();
    let mech = tmp.path().join("balanced.json");
    let out = dpcolor(&["balanced", "--graph", path(&cube), "--eps-ln", "2", "--delta", "0.1", "--out", path(&mech)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let out = dpcolor(&["utility", "--graph", path(&cube), "--mech", path(&mech), "--dist", path(&data("uniform_cube.json"))]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    // Two corners err with 0.1, the six others with 0.3.
    assert!((json_of(&out)["hamming_distortion"].as_f64().unwrap() - 0.25).abs() < 1e-12);
}

#[test]
fn solve_matches_homogeneous_byte_for_byte() {
    let tmp = tempfile::tempdir().unwrap();
    let g = data("eighteen.json");
    let m_b = 12.0 / 13.0;
    let bc = tmp.path().join("bc.json");
    fs::write(&bc, format!("{{\"fixed\":{{\"h\":{m_b},\"ℓ\":{m_b}}}}}")).unwrap();
    let (solved, homogeneous) = (tmp.path().join("solved.json"), tmp.path().join("homogeneous.json"));
    let out = dpcolor(&[
        "solve", "--graph", path(&g), "--bc", path(&bc), "--eps-ln", "1.3", "--delta", "0.1", "--mech-out", path(&solved),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(json_of(&out)["status"], "optimal");
    let mb = m_b.to_string();
    let out = dpcolor(&[
        "homogeneous", "--graph", path(&g), "--mb", &mb, "--eps-ln", "1.3", "--delta", "0.1", "--out", path(&homogeneous),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let (a, b) = (fs::read(&solved).unwrap(), fs::read(&homogeneous).unwrap());
    assert_eq!(String::from_utf8(a).unwrap(), String::from_utf8(b).unwrap());
}

#[test]
fn solve_worked_example_and_infeasible() {
    let g = data("eighteen.json");
    let bc = data("eighteen_bc.json");
    let out = dpcolor(&["solve", "--graph", path(&g), "--bc", path(&bc), "--eps-ln", "2", "--delta", "0.1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!((json_of(&out)["mechanism"]["prob_blue"]["c"].as_f64().unwrap() - 0.85).abs() < 1e-12);

    let out = dpcolor(&["solve", "--graph", path(&g), "--bc", path(&bc), "--eps-ln", "1.1"]);
    assert_eq!(out.status.code(), Some(2));
    let v = json_of(&out);
    assert_eq!(v["status"], "infeasible");
    assert!(v["witness"]["slack"].as_f64().unwrap() > 0.0);
}

#[test]
fn output_formats() {
    let two = data("two.json");
    let out = dpcolor(&["export-dot", "--graph", path(&two), "--mech", path(&data("m1.json"))]);
    let dot = String::from_utf8(out.stdout).unwrap();
    assert!(dot.starts_with("graph G {"));
    assert!(dot.contains("color=blue, label=\"1\\nB=0.580000000000\""));
    assert!(dot.contains("color=red, label=\"2\\nB=0.240000000000\""));

    let out = dpcolor(&["balanced", "--graph", path(&two), "--eps-ln", "2", "--format", "csv"]);
    let csv = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "vertex,color,dist,B,R");
    assert_eq!(lines[1], "1,blue,0,0.666666666667,0.333333333333");

    let out = dpcolor(&["verify", "--graph", path(&two), "--mech", path(&data("m1.json")), "--eps", "1", "--format", "dot"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn inspect_and_pullback() {
    let out = dpcolor(&["inspect", "--graph", path(&data("eighteen.json"))]);
    let v = json_of(&out);
    assert_eq!(v["line_spec"]["n_blue"], 3);
    assert_eq!(v["line_spec"]["n_red"], 4);
    assert_eq!(v["boundary_morphism"]["e"], "7");
    assert_eq!(v["topology"]["dist_to_boundary"]["a"], 2);

    let tmp = tempfile::tempdir().unwrap();
    let line_mech = tmp.path().join("line.json");
    fs::write(&line_mech, r#"{"prob_blue":{"1":0.9,"2":0.7,"3":0.3,"4":0.1}}"#).unwrap();
    let out = dpcolor(&[
        "pullback",
        "--source",
        path(&data("cube.json")),
        "--target",
        path(&data("line22.json")),
        "--morphism",
        path(&data("cube_to_line.json")),
        "--mech",
        path(&line_mech),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json_of(&out);
    assert!((v["prob_blue"]["212"].as_f64().unwrap() - 0.3).abs() < 1e-12);
}

#[test]
fn oracle_command() {
    let tmp = tempfile::tempdir().unwrap();
    let bc = tmp.path().join("bc.json");
    fs::write(&bc, r#"{"fixed":{"1":0.6}}"#).unwrap();
    let two = data("two.json");
    let out = dpcolor(&["oracle", "--graph", path(&two), "--bc", path(&bc), "--eps-ln", "2", "--step", "0.1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = json_of(&out);
    assert_eq!(v["status"], "best");
    assert_eq!(v["feasible_count"], 6);

    let mech = tmp.path().join("m.json");
    fs::write(&mech, r#"{"prob_blue":{"1":0.6,"2":0.5}}"#).unwrap();
    let out = dpcolor(&["oracle", "--graph", path(&two), "--bc", path(&bc), "--mech", path(&mech), "--eps-ln", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(json_of(&out)["certified"], false);
}

#[test]
fn input_errors_have_distinct_diagnostics() {
    let tmp = tempfile::tempdir().unwrap();
    let broken = tmp.path().join("broken.json");
    fs::write(&broken, "{\"vertices\": [").unwrap();
    let out = dpcolor(&["inspect", "--graph", path(&broken)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("parse error"));

    let bc = tmp.path().join("bc.json");
    fs::write(&bc, r#"{"fixed":{"zz":0.5}}"#).unwrap();
    let out = dpcolor(&["solve", "--graph", path(&data("two.json")), "--bc", path(&bc), "--eps", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("`zz`"));

    let out = dpcolor(&["line", "--nb", "2", "--nr", "2", "--rb", "0.5", "--eps=-1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("privacy parameters"));

    let out = dpcolor(&["line", "--nb", "2", "--nr", "2", "--rb", "0.5"]);
    assert_eq!(out.status.code(), Some(1));

    let out = dpcolor(&["line", "--nb", "2", "--nr", "2", "--rb", "1.5", "--eps", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("precondition"));

    let out = dpcolor(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn in_process_entry_point() {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = dpcolor::cli::run(["dpcolor", "line", "--nb", "1", "--nr", "1", "--rb", "0.5", "--eps-ln", "2"], &mut out, &mut err);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_slice(&out).unwrap();
    assert!((v["mechanism"]["prob_blue"]["2"].as_f64().unwrap() - 0.25).abs() < 1e-12);
}
