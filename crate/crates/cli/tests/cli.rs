use std::path::PathBuf;
use std::process::{Command, Output};

use sepkit::states::singlet;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sepkit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn tmp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("sepkit_cli_{name}"))
}

fn write_singlet(name: &str) -> PathBuf {
    let path = tmp(name);
    // written with exact dyadic entries so expected outputs print exactly;
    // singlet().to_json() would carry 1/sqrt(2) rounding noise
    let json = serde_json::json!({
        "dims": [2, 2],
        "re": [
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 0.5, -0.5, 0.0],
            [0.0, -0.5, 0.5, 0.0],
            [0.0, 0.0, 0.0, 0.0]
        ],
        "im": [
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, 0.0]
        ]
    });
    std::fs::write(&path, json.to_string()).unwrap();
    // cross-check against the library construction
    let lib = serde_json::to_value(singlet().to_json()).unwrap();
    let lib00 = lib["re"][1][1].as_f64().unwrap();
    assert!((lib00 - 0.5).abs() < 1e-12);
    path
}

#[test]
fn check_reports_and_exit_codes() {
    // violated criterion: exit 3, one JSON report line
    let out = run(&["check", "--family", "so3", "--params", "1,0,0", "--criteria", "ppt"]);
    assert_eq!(out.status.code(), Some(3));
    let report: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(report["name"], "ppt");
    assert_eq!(report["satisfied"], false);
    assert!(report["margin"].as_f64().unwrap() < -0.2);

    // maximally mixed point satisfies everything requested: exit 0
    let out = run(&[
        "check",
        "--family",
        "bell_diagonal",
        "--params",
        "0,0,0",
        "--criteria",
        "ppt,entropic:2,fact1:4,quadratic",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.trim().lines().collect();
    assert_eq!(lines.len(), 4);
    for line in lines {
        let r: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(r["satisfied"], true, "{line}");
    }

    // per-entry alpha and side syntax
    let out = run(&[
        "check",
        "--family",
        "so3",
        "--params",
        "0.1,0.2,0.3",
        "--criteria",
        "fact3:5:A,entropic:inf",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(first["alpha"], 5.0);
}

#[test]
fn check_usage_errors() {
    // neither --family nor --state
    let out = run(&["check", "--criteria", "ppt"]);
    assert_eq!(out.status.code(), Some(2));
    // both (clap conflict)
    let singlet_path = write_singlet("conflict.json");
    let out = run(&[
        "check",
        "--family",
        "so3",
        "--state",
        singlet_path.to_str().unwrap(),
        "--criteria",
        "ppt",
    ]);
    assert_eq!(out.status.code(), Some(2));
    // unknown family / criterion, wrong arity, missing required flag
    let out = run(&["check", "--family", "nope", "--params", "0", "--criteria", "ppt"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["check", "--family", "so3", "--params", "0,0,0", "--criteria", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["check", "--family", "so3", "--params", "1,0", "--criteria", "ppt"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["check", "--family", "so3", "--params", "1,0,0"]);
    assert_eq!(out.status.code(), Some(2));
    // off-simplex point is a runtime failure, not a usage one
    let out = run(&["check", "--family", "so3", "--params", "1,1,1", "--criteria", "ppt"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn check_state_file_and_u_file() {
    let state = write_singlet("state.json");
    let out = run(&[
        "check",
        "--state",
        state.to_str().unwrap(),
        "--criteria",
        "quadratic",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let r: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert!((r["margin"].as_f64().unwrap() + 0.5).abs() < 1e-12);

    // explicit reversal matrix from a file gives the same answer as the
    // canonical default it encodes
    let u = sepkit::maps::AntisymmetricUnitary::canonical(2).unwrap();
    let upath = tmp("u_canonical.json");
    std::fs::write(
        &upath,
        serde_json::to_string(&sepkit::matrix::MatrixJson::from_matrix(u.mat())).unwrap(),
    )
    .unwrap();
    let out = run(&[
        "check",
        "--state",
        state.to_str().unwrap(),
        "--u-file",
        upath.to_str().unwrap(),
        "--criteria",
        "quadratic",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let r2: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(r["margin"], r2["margin"]);
}

#[test]
fn scan_from_spec_file_is_deterministic() {
    let spec = r#"{
        "family": "so3_4x4",
        "fixed": {"p": 0.0},
        "grid": [
            {"name": "q", "min": 0.0, "max": 1.0, "steps": 5},
            {"name": "r", "min": 0.0, "max": 1.0, "steps": 5}
        ],
        "criteria": [{"name": "ppt"}, {"name": "fact3", "alpha": 3}]
    }"#;
    let spec_path = tmp("scan_spec.json");
    std::fs::write(&spec_path, spec).unwrap();
    let csv_a = tmp("scan_a.csv");
    let csv_b = tmp("scan_b.csv");
    let svg = tmp("scan.svg");
    let out = run(&[
        "scan",
        "--spec",
        spec_path.to_str().unwrap(),
        "--out",
        csv_a.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
        "--svg-label",
        "ppt",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&[
        "scan",
        "--spec",
        spec_path.to_str().unwrap(),
        "--threads",
        "2",
        "--out",
        csv_b.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let a = std::fs::read_to_string(&csv_a).unwrap();
    let b = std::fs::read_to_string(&csv_b).unwrap();
    assert_eq!(a, b, "CSV bytes must not depend on thread count");
    assert!(a.starts_with("q,r,valid,margin_ppt,sat_ppt,margin_fact3_a3,sat_fact3_a3\n"));
    assert_eq!(a.lines().count(), 1 + 25);
    let svg_text = std::fs::read_to_string(&svg).unwrap();
    assert!(svg_text.starts_with("<svg "));
    assert!(svg_text.contains("off simplex"));
}

#[test]
fn scan_from_flags_and_usage_errors() {
    let out = run(&[
        "scan",
        "--family",
        "bell_diagonal",
        "--fixed",
        "t3=0",
        "--grid",
        "t1=-0.2:0.2:2,t2=-0.2:0.2:2",
        "--criteria",
        "ppt",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1 + 4);
    assert!(text.starts_with("t1,t2,valid,margin_ppt,sat_ppt\n"));

    // no spec and no family
    let out = run(&["scan", "--criteria", "ppt"]);
    assert_eq!(out.status.code(), Some(2));
    // malformed grid entry
    let out = run(&[
        "scan",
        "--family",
        "bell_diagonal",
        "--fixed",
        "t3=0",
        "--grid",
        "t1=0:1",
        "--criteria",
        "ppt",
    ]);
    assert_eq!(out.status.code(), Some(2));
    // svg without any criterion to plot
    let out = run(&[
        "scan",
        "--family",
        "bell_diagonal",
        "--fixed",
        "t3=0",
        "--grid",
        "t1=-0.2:0.2:2,t2=-0.2:0.2:2",
        "--svg",
        tmp("nope.svg").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    // uncovered parameter
    let out = run(&[
        "scan",
        "--family",
        "bell_diagonal",
        "--grid",
        "t1=-0.2:0.2:2",
        "--criteria",
        "ppt",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn witness_build_verify_export() {
    let wpath = tmp("witness.json");
    let out = run(&[
        "witness",
        "--criterion",
        "fact3",
        "--alpha",
        "3",
        "--dims",
        "2x2",
        "--verify",
        "10",
        "--seed",
        "5",
        "--out",
        wpath.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("matrix_dim=64"));
    assert!(text.contains("max deviation"));
    let w: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&wpath).unwrap()).unwrap();
    assert_eq!(w["copies"], 3);
    assert_eq!(w["per_copy_dims"], serde_json::json!([2, 2]));
    assert_eq!(w["matrix"]["re"].as_array().unwrap().len(), 64);

    // fact4 order constraint
    let out = run(&["witness", "--criterion", "fact4", "--alpha", "4", "--dims", "2x2"]);
    assert_eq!(out.status.code(), Some(2));
    // quadratic pins alpha at 2
    let out = run(&["witness", "--criterion", "quadratic", "--alpha", "3", "--dims", "2x2"]);
    assert_eq!(out.status.code(), Some(2));
    // witness too large to build: runtime failure
    let out = run(&["witness", "--criterion", "fact3", "--alpha", "4", "--dims", "4x4"]);
    assert_eq!(out.status.code(), Some(1));
    // bad dims syntax
    let out = run(&["witness", "--criterion", "fact3", "--alpha", "3", "--dims", "4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_means_and_shots() {
    let state = write_singlet("sim.json");
    let s = state.to_str().unwrap();

    let out = run(&["simulate", "--state", s, "--reflect", "2", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("s1,s2,prob"));
    assert!(text.contains("0,0,0.75"));
    assert!(text.contains("1,1,0.25"));
    assert!(text.trim_end().ends_with("mean = -0.5"));

    // reflecting both qubits flips both copies: the mean is +1 on the singlet
    let out = run(&["simulate", "--state", s, "--reflect", "1,2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).trim_end().ends_with("mean = 1"));

    // CSV to a file leaves only the mean on stdout
    let csv = tmp("sim.csv");
    let out = run(&["simulate", "--state", s, "--reflect", "2", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "mean = -0.5");
    assert!(std::fs::read_to_string(&csv).unwrap().starts_with("s1,s2,prob\n"));

    // finite shots: seeded, so deterministic, and close to the ideal value
    let out = run(&["simulate", "--state", s, "--reflect", "2", "--shots", "200000", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mean: f64 = text
        .lines()
        .last()
        .unwrap()
        .strip_prefix("mean = ")
        .unwrap()
        .parse()
        .unwrap();
    assert!((mean + 0.5).abs() < 0.05, "sampled mean {mean}");
    let again = run(&["simulate", "--state", s, "--reflect", "2", "--shots", "200000", "--seed", "3"]);
    assert_eq!(stdout(&again), text);

    // usage errors: 1-based indexing, count mismatch, out-of-range position
    let out = run(&["simulate", "--state", s, "--reflect", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["simulate", "--state", s, "--reflect", "1", "--n", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["simulate", "--state", s, "--reflect", "3"]);
    assert_eq!(out.status.code(), Some(2));
    // missing file is runtime
    let out = run(&["simulate", "--state", "/nonexistent/x.json", "--reflect", "1"]);
    assert_eq!(out.status.code(), Some(1));
}
