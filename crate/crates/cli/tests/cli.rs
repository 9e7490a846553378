use std::process::{Command, Output};

use serde_json::Value;

fn hfl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hfl")).args(args).env_remove("HFL_TRUNC").output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let out = hfl(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    hfl(args).status.code().unwrap()
}

#[test]
fn strata_genus_two() {
    let v = json(&["strata", "--genus", "2", "--zeros", "3,1"]);
    let dims: Vec<i64> = v["strata"].as_array().unwrap().iter().map(|s| s["dim"].as_i64().unwrap()).collect();
    assert_eq!(dims, vec![3, 2]);
    let v = json(&["strata", "--genus", "2", "--zeros", "1,1,1,1"]);
    assert_eq!(v["strata"].as_array().unwrap().len(), 1);
    assert!(!v["formulas"].as_array().unwrap().is_empty());
}

#[test]
fn strata_rejects_bad_profile() {
    let out = hfl(&["strata", "--genus", "2", "--zeros", "3,2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn strata_dot() {
    let out = hfl(&["strata", "--genus", "2", "--zeros", "2,2", "--dot"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("digraph"));
}

#[test]
fn canon_order_five() {
    let v = json(&["canon", "--d", "5", "--a", "v=1;t=5;4", "--b", "v=0;t=5;2,0,3"]);
    assert_eq!(v["n"], 0);
    assert_eq!(v["u"], serde_json::json!(["2", "-3"]));
    let chart = &v["charts"][0];
    assert_eq!(chart["chart"], "N(1,0)");
    assert_eq!(chart["image"]["normalized"], serde_json::json!(["1", "2", "3"]));
}

#[test]
fn canon_bottom_point() {
    let out = hfl(&["canon", "--d", "5", "--a", "0", "--b", "v=2;t=5;1", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("bottom stratum point"));
}

#[test]
fn canon_rejects_even_order() {
    assert_eq!(code(&["canon", "--d", "4", "--a", "v=1;t=4;1", "--b", "1"]), 2);
    assert_eq!(code(&["canon", "--d", "5", "--a", "v=0;t=5;1", "--b", "1"]), 2);
}

#[test]
fn canon_even_zero() {
    let v = json(&["canon", "--even", "--d", "2", "--a", "v=0;t=2;1", "--b", "v=0;t=2;1"]);
    assert!(v.to_string().contains("datum"));
}

#[test]
fn oracle_suites() {
    assert_eq!(code(&["oracle", "--suite", "counting", "--seed", "7"]), 0);
    assert_eq!(code(&["oracle", "--suite", "glue-order5", "--cases", "200"]), 0);
    assert_eq!(code(&["oracle", "--suite", "nosuch"]), 2);
    let v = json(&["oracle", "--suite", "eigen-twist", "--seed", "3", "--cases", "20"]);
    assert_eq!(v["seed"], 3);
    assert_eq!(v["failures"], serde_json::json!([]));
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["oracle", "--suite", "orbit-invariance", "--seed", "11", "--cases", "30"][..],
        &["strata", "--genus", "3", "--zeros", "4,2,1,1", "--format", "text"][..],
        &["realpoints", "--genus", "3", "--zeros", "6,1,1"][..],
    ] {
        let (a, b) = (hfl(args), hfl(args));
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn realpoints_flags_printed_form() {
    let v = json(&["realpoints", "--genus", "3", "--zeros", "6,1,1"]);
    assert_eq!(v["total"], "448");
    assert!(v.to_string().contains("576"));
}

#[test]
fn trunc_override() {
    let args = ["higgs", "--d", "3", "--a", "v=1;1", "--b", "1"];
    let base = hfl(&args);
    let wide = Command::new(env!("CARGO_BIN_EXE_hfl")).args(args).env("HFL_TRUNC", "20").output().unwrap();
    assert_eq!(base.status.code(), Some(0));
    assert_eq!(wide.status.code(), Some(0));
    assert_ne!(base.stdout, wide.stdout);
    let bad = Command::new(env!("CARGO_BIN_EXE_hfl")).args(args).env("HFL_TRUNC", "x").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
