use std::path::Path;
use std::process::{Command, Output};

use bec_design::design::eps::mb_eps_candidate;
use bec_design::io::EnsembleFile;
use bec_design::DegreeDistribution;
use serde_json::Value;

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bec-design"))
        .args(args)
        .env_remove("BEC_DESIGN_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn exit_codes() {
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
    assert_eq!(bin(&["--version"]).status.code(), Some(0));
    assert_eq!(bin(&["design", "--category", "eps"]).status.code(), Some(1));
    assert_eq!(bin(&["reproduce", "table9"]).status.code(), Some(1));

    let out = bin(&["design", "--category", "eps", "--rho", "regular:6", "--eps", "0.1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("0.2"), "{err}");

    let out = bin(&["design", "--category", "rate", "--rho", "regular:4", "--rate", "0.6"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn design_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mb.json");
    let p = path.to_str().unwrap();
    let v = json(&bin(&[
        "--json", "design", "--category", "eps", "--rho", "regular:6", "--eps", "0.48", "--type", "mb",
        "--P", "4", "--out", p,
    ]));
    assert_eq!(v["D_v"], 8);
    assert!(Path::new(&format!("{p}.manifest.json")).exists());

    let file = EnsembleFile::load(&path).unwrap();
    assert_eq!(file.ensemble.lambda.degrees(), vec![2, 3, 4, 8]);
    let back = EnsembleFile::from_json(&file.to_json()).unwrap();
    assert_eq!(back.ensemble, file.ensemble);

    let v = json(&bin(&["--json", "threshold", "--ensemble", p]));
    assert!((v["threshold"].as_f64().unwrap() - 0.48).abs() < 1e-3);
    let v = json(&bin(&["--json", "verify", "--ensemble", p, "--eps", "0.47"]));
    assert_eq!(v["convergent"], true);
}

#[test]
fn verify_rejects_degree_seven_candidate() {
    let rho = DegreeDistribution::check_regular(6).unwrap();
    let e = mb_eps_candidate(&rho, 0.48, 4, 7).unwrap();
    let lambda = e
        .lambda
        .iter()
        .map(|(d, c)| format!("{d}:{c}"))
        .collect::<Vec<_>>()
        .join(",");
    let v = json(&bin(&[
        "--json", "verify", "--lambda", &lambda, "--rho", "6:1", "--eps", "0.48",
    ]));
    assert_eq!(v["convergent"], false);
    assert!(v["margin"].as_f64().unwrap() < 0.0);
}

#[test]
fn taylor_and_bounds() {
    let v = json(&bin(&["--json", "taylor", "--rho", "regular:6", "--terms", "5"]));
    assert!((v["T"][0]["T"].as_f64().unwrap() - 0.2).abs() < 1e-15);
    let v = json(&bin(&["--json", "bounds", "--rho", "regular:6", "--rate", "0.5"]));
    let z = v["threshold_bound"].as_f64().unwrap();
    assert!((z - 0.5 * (1.0 - 0.5f64.powi(6))).abs() < 1e-12);
}

#[test]
fn search_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = bin(&[
        "search", "--P", "3", "--dv-max", "5", "--rho", "regular:5", "--eps", "0.45", "--require-two",
        "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(reader.records().count(), 3);
}

#[test]
fn simulate_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.json");
    json(&bin(&[
        "--json", "design", "--category", "eps", "--rho", "regular:6", "--eps", "0.4", "--type", "mb",
        "--P", "3", "--out", path.to_str().unwrap(),
    ]));
    let run = |seed: &str| {
        bin(&[
            "simulate", "--ensemble", path.to_str().unwrap(), "--eps", "0.3,0.45", "--n", "500",
            "--stop", "10", "--trial-cap", "2000", "--seed", seed,
        ])
        .stdout
    };
    assert_eq!(run("7"), run("7"));
    assert_ne!(run("7"), run("8"));
}
