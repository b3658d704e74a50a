use std::fs;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const EXP1: &str = r#"{"family":"exp","k":1}"#;
const EXP2: &str = r#"{"family":"exp","k":2}"#;
const TWO_EXP: &str = r#"{"family":"exp","k":1,"scale":2}"#;

fn qamlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qamlab")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn check_proportional_pair_random_h() {
    let out = qamlab(&["check", "--f", TWO_EXP, "--g", EXP1]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert!(v["report"]["rel_residual"].as_f64().unwrap() <= 1e-8);
    assert_eq!(v["pass"], true);
}

#[test]
fn check_non_commuting_pair_exits_1() {
    let h = r#"{"values":[[0,0.6931471805599453],[1.0986122886681098,1.3862943611198906]]}"#;
    let out = qamlab(&["check", "--f", EXP1, "--g", EXP2, "--h", h]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    assert!((v["report"]["abs_residual"].as_f64().unwrap() - 3.456_102_545_885_266_8e-3).abs() < 1e-12);
}

#[test]
fn witness_for_exp_pair() {
    let out = qamlab(&["witness", "--f", EXP1, "--g", EXP2, "--grid", "21"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    assert_eq!(v["witness"]["kind"], "block");
    assert!(v["witness"]["rel_residual"].as_f64().unwrap() >= 1.7e-3);
}

#[test]
fn no_witness_for_proportional_pair() {
    let out = qamlab(&["witness", "--f", TWO_EXP, "--g", EXP1, "--grid", "9"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["witness"]["kind"], "none");
}

#[test]
fn witness_json_independent_of_workers() {
    let a = qamlab(&["witness", "--f", EXP1, "--g", EXP2, "--workers", "1"]);
    let b = qamlab(&["witness", "--f", EXP1, "--g", EXP2, "--workers", "3"]);
    let c = qamlab(&["witness", "--f", EXP1, "--g", EXP2]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn matrix_witness_search() {
    let out = qamlab(&["witness", "--matrix", "--f", EXP1, "--g", EXP2, "--grid", "7"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_of(&out)["witness"]["kind"], "matrix");
}

#[test]
fn value_outside_domain_exits_2() {
    let p1 = r#"{"family":"power","p":1}"#;
    let p2 = r#"{"family":"power","p":2}"#;
    let out = qamlab(&["check", "--f", p1, "--g", p2, "--h", r#"{"values":[[1,-1],[2,3]]}"#]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["exit_code"], 2);
}

#[test]
fn malformed_documents_exit_2() {
    assert_eq!(qamlab(&["check", "--f", "{not json", "--g", EXP1]).status.code(), Some(2));
    assert_eq!(qamlab(&["check", "--f", r#"{"family":"exp","k":0}"#, "--g", EXP1]).status.code(), Some(2));
    assert_eq!(qamlab(&["check", "--f", "/no/such/file.json", "--g", EXP1]).status.code(), Some(2));
    assert_eq!(qamlab(&["check", "--g", EXP1]).status.code(), Some(2));
    assert_eq!(qamlab(&["check", "--f", EXP1, "--g", EXP1, "--tol", "-1"]).status.code(), Some(2));
    assert_eq!(qamlab(&["witness", "--f", EXP1, "--g", EXP1, "--range", "3"]).status.code(), Some(2));
    let ragged = r#"{"values":[[1,2],[3]]}"#;
    assert_eq!(qamlab(&["check", "--f", EXP1, "--g", EXP2, "--h", ragged]).status.code(), Some(2));
}

#[test]
fn range_error_exits_3_with_stage() {
    // e^x + 1 has range (1, inf); on total mass 0.2 the inner Y integral drops below 1.
    let f = r#"{"family":"exp","k":1,"affine":{"a":1,"b":1}}"#;
    let out = qamlab(&[
        "check", "--f", f, "--g", f, "--space-x", r#"{"weights":[0.1,0.1]}"#, "--space-y",
        r#"{"weights":[0.1,0.1]}"#, "--h", r#"{"values":[[0,0],[0,0]]}"#,
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["stage"], "inner-Y");
}

#[test]
fn echoed_inputs_reproduce_the_report() {
    let dir = TempDir::new().unwrap();
    let first = qamlab(&["check", "--f", EXP1, "--g", EXP2, "--seed", "7", "--space-x", r#"{"weights":[0.5,2,1]}"#]);
    let v = json_of(&first);
    let write = |name: &str, key: &str| {
        let p = dir.path().join(name);
        fs::write(&p, serde_json::to_string(&v["inputs"][key]).unwrap()).unwrap();
        p.to_string_lossy().into_owned()
    };
    let (f, g, x, y, h) = (write("f.json", "f"), write("g.json", "g"), write("x.json", "space_x"), write("y.json", "space_y"), write("h.json", "h"));
    let out = dir.path().join("out.json");
    let second = qamlab(&[
        "check", "--f", &f, "--g", &g, "--space-x", &x, "--space-y", &y, "--h", &h, "--seed", "7", "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(second.status.code(), first.status.code());
    let again: Value = serde_json::from_slice(&fs::read(&out).unwrap()).unwrap();
    assert_eq!(again["report"], v["report"]);
    assert_eq!(
        again["report"]["lhs"].as_f64().unwrap().to_bits(),
        v["report"]["lhs"].as_f64().unwrap().to_bits()
    );
}

#[test]
fn phi_report_and_csv() {
    let out = qamlab(&["phi", "--f", TWO_EXP, "--g", EXP1]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json_of(&out)["all_pass"], true);

    let out = qamlab(&["phi", "--f", EXP1, "--g", EXP2, "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(&headers[0], "check");
    assert_eq!(&headers[7], "rel_residual");
    let rows: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
    let eq4 = rows.iter().find(|r| &r[0] == "phi_equation").unwrap();
    assert!((eq4[6].parse::<f64>().unwrap() - 0.360_68).abs() < 1e-4);
}

#[test]
fn phi_rejects_non_bijective_generator() {
    let out = qamlab(&["phi", "--f", r#"{"family":"identity"}"#, "--g", EXP1]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn suite_passes_with_default_seed() {
    let dir = TempDir::new().unwrap();
    let csv_path = dir.path().join("suite.csv");
    let out = qamlab(&["suite", "--format", "csv", "--out", csv_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let mut rdr = csv::Reader::from_path(&csv_path).unwrap();
    let n = rdr.records().count();
    assert!(n >= 1000 + 18_000);
}
