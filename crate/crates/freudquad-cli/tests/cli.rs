//! End-to-end checks of the benchmark binary: schemas, determinism and
//! exit codes.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_freudquad"))
}

#[test]
fn nodes_csv_schema_and_mass() {
    let out = bin().args(["nodes", "--m", "6"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("k,node,weight"));
    let mass: f64 = lines
        .map(|l| l.split(',').nth(2).unwrap().parse::<f64>().unwrap())
        .sum();
    assert!((mass - 1.0).abs() < 1e-12, "gauss:d=1 weights sum to 1, got {mass}");
}

#[test]
fn hypercross_nodes_schema() {
    let out = bin()
        .args(["nodes", "--hypercross", "--xi", "3", "--d", "2", "--theta", "0.3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("x1,x2,weight\n"));
    assert!(text.lines().count() > 4);
}

#[test]
fn converge_runs_are_bit_identical() {
    let args = [
        "converge",
        "--method",
        "tg",
        "--fn",
        "comb:r=1,d=1",
        "--n",
        "32,64,128,256",
        "--theta",
        "0.5",
    ];
    let a = bin().args(args).output().unwrap();
    let b = bin().args(args).output().unwrap();
    assert!(a.status.success() && b.status.success());
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout, "consecutive runs must emit identical bytes");
}

#[test]
fn integrate_emits_json_fields() {
    let out = bin()
        .args(["integrate", "--rule", "tg", "--m", "32", "--theta", "0.5", "--fn", "comb:r=1,d=1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["value"].is_f64());
    assert!(v["abs_error"].as_f64().unwrap() >= 0.0);
    assert!(v["n_nodes"].as_u64().unwrap() <= 32);
}

#[test]
fn fit_round_trip_through_file() {
    let dir = std::env::temp_dir().join("freudquad-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let csv = dir.join("table.csv");
    let status = bin()
        .args([
            "converge",
            "--method",
            "tg",
            "--fn",
            "outward:r=1,d=1",
            "--theta",
            "0.2",
            "--n",
            "32,64,128,256,512",
            "--out",
        ])
        .arg(&csv)
        .status()
        .unwrap();
    assert!(status.success());
    let out = bin()
        .args(["fit", "--beta", "0", "--input"])
        .arg(&csv)
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let alpha = v["alpha"].as_f64().unwrap();
    assert!(alpha > 0.2 && alpha < 1.0, "implausible alpha {alpha}");
}

#[test]
fn corpus_listing_is_json() {
    let out = bin()
        .args(["corpus", "--d", "1", "--r", "2", "--seedless"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.as_array().unwrap().len() >= 5);
}

#[test]
fn fool_emits_certified_rows() {
    let out = bin()
        .args(["fool", "--n", "64,256", "--r", "1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("n,nodes,delta,cell_lo,cell_hi,norm_bound,certified_value"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn precondition_errors_exit_2() {
    let out = bin()
        .args(["converge", "--method", "tg", "--fn", "bogus", "--n", "32"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .args(["nodes", "--m", "8", "--weight", "freud:lambda=0.3,a=1,b=0,d=1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn plotdata_format_two_columns() {
    let out = bin()
        .args([
            "converge",
            "--method",
            "fibonacci",
            "--fn",
            "fourier:r=2,d=2",
            "--weight",
            "gauss:d=2",
            "--n",
            "34,89,233",
            "--format",
            "plotdata",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
    for line in text.lines() {
        assert_eq!(line.split_whitespace().count(), 2);
    }
}
