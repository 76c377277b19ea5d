use std::process::{Command, Output};

use serde_json::Value;

fn heavy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heavy")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = heavy(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn heavy_cover_has_27_intervals() {
    let v = json(&["heavy", "--theta", "[2;(2)]", "--depth", "3", "--format", "json"]);
    assert_eq!(v["result"]["levels"][3]["intervals"].as_array().unwrap().len(), 27);
    assert_eq!(v["config"]["theta"], "[2;(2)]");
    assert_eq!(v["config"]["depth"], 3);
}

#[test]
fn strict_singleton() {
    let v = json(&["strict", "--theta", "[1;(2)]", "--tol", "1e-9"]);
    assert_eq!(v["result"]["exact"], "√2/4");
    let num: f64 = v["result"]["width"]["num"].as_str().unwrap().parse().unwrap();
    let den: f64 = v["result"]["width"]["den"].as_str().unwrap().parse().unwrap();
    assert!(num / den <= 1e-9);
}

#[test]
fn dim_csv_for_e_minus_2() {
    let out = heavy(&["dim", "--theta", "rule:e_minus_2", "--depth", "1000"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let inf: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("# running_inf="))
        .unwrap()
        .parse()
        .unwrap();
    assert!(inf < 0.12);
    assert!(text.contains("n,lower,ratio,upper\n"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1001);
}

#[test]
fn cover_round_trip_matches_in_process() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cover.json");
    let p = path.to_str().unwrap();
    let out = heavy(&["heavy", "--theta", "[1;(2)]", "--depth", "4", "--output", p]);
    assert!(out.status.success());
    let from_file = json(&["oracle", "verify-levels", "--cover", p, "--n", "5000"]);
    let in_process = json(&["oracle", "verify-levels", "--theta", "[1;(2)]", "--depth", "4", "--n", "5000"]);
    assert_eq!(from_file["result"], in_process["result"]);
    assert_eq!(from_file["result"]["failed"], 0);
}

#[test]
fn output_is_reproducible() {
    let args = ["cconst", "--samples", "8", "--burnin", "5", "--length", "20", "--bits", "512", "--seed", "9"];
    let a = heavy(&args);
    let b = heavy(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn exit_codes() {
    assert_eq!(heavy(&["cf", "--theta", "[0,1]"]).status.code(), Some(2));
    assert_eq!(heavy(&["cf", "--theta", "[2;(2)]", "--bogus"]).status.code(), Some(2));
    assert_eq!(heavy(&["nope"]).status.code(), Some(2));
    assert_eq!(heavy(&["oracle", "verify-reversal", "--theta", "[(2)]"]).status.code(), Some(2));
    assert_eq!(heavy(&["dim", "--theta", "random(1,64)", "--depth", "500"]).status.code(), Some(3));
    assert_eq!(heavy(&["cf", "--theta", "random(1,16)", "--digits", "100"]).status.code(), Some(3));
    assert_eq!(heavy(&["dim", "--theta", "random(1,64)", "--depth", "500", "--allow-partial"]).status.code(), Some(3));
}

#[test]
fn oracle_ops() {
    let v = json(&["oracle", "birkhoff", "--theta", "[(2)]", "--x", "1/2", "--n", "7"]);
    assert_eq!(v["result"]["sums"], serde_json::json!([1, 0, 1, 0, 1, 0, -1]));
    let v = json(&["oracle", "heavy-up-to", "--theta", "[(2)]", "--x", "0", "--n", "10000"]);
    assert_eq!(v["result"]["heavy"], true);
    let v = json(&["oracle", "verify-renorm", "--theta", "[3;(2)]", "--samples", "50"]);
    assert_eq!(v["result"]["passed"], 50);
    let v = json(&["oracle", "verify-reversal", "--theta", "[1;(2)]"]);
    assert_eq!(v["result"]["passed"], 200);
    let v = json(&["oracle", "verify-always-infinite", "--theta", "[(2)]"]);
    assert_eq!(v["result"]["passed"], 5);
}

#[test]
fn target_d_digits() {
    let v = json(&["target-d", "--d", "0", "--digits", "8"]);
    assert_eq!(v["result"]["digits"], serde_json::json!(["2", "1", "6", "1", "24", "1", "120", "1"]));
    let v = json(&["target-d", "--d", "1", "--digits", "8"]);
    assert_eq!(v["result"]["digits"], serde_json::json!(["2", "1", "2", "2", "2", "4", "2", "8"]));
}

#[test]
fn renorm_csv_columns() {
    let out = heavy(&["renorm", "--theta", "[2;(2)]", "--depth", "3", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("i,a1,a2,branch,p,delta_lo,delta_hi,f2,Delta_lo,Delta_hi\n0,2,2,even_drop,0,1.715728752538099e-1,"));
}
