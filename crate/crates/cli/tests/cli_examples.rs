use std::process::Command;

use gm_exponents_cli::without_timing;
use serde_json::Value;

fn gmexp(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_gmexp"))
        .args(args)
        .env_remove("GM_MAX_WINDOW_CELLS")
        .output()
        .expect("spawn gmexp");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn report(args: &[&str]) -> Value {
    let (code, stdout, stderr) = gmexp(args);
    assert_eq!(code, 0, "stderr: {stderr}");
    serde_json::from_str(&stdout).expect("json on stdout")
}

#[test]
fn exponent_test_cubic() {
    let r = report(&["exponent-test", "--f", "x1^2*(1-x1)", "--g", "1", "--alpha", "1/2"]);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["mode"], "exponent-test");
    let row = &r["results"][0];
    assert_eq!(row["alpha"], "1/2");
    assert_eq!(row["verdict"], "exponent");
    assert_eq!(row["cokernel_dim"], 1);
    assert!(r["windows"].as_array().is_some_and(|w| w.len() == 4));
    assert_eq!(r["input"]["f"], "x1^2*(1-x1)");
}

#[test]
fn arrangement_plane() {
    let r = report(&["arrangement", "--weights", "1,1,1", "--alphas", "1/3"]);
    let res = &r["results"];
    assert_eq!(res["candidate_set"], serde_json::json!(["1"]));
    assert_eq!(res["gcd_criterion"], true);
    let third = res["oracle"].as_array().unwrap().iter().find(|o| o["alpha"] == "1/3").unwrap();
    assert_eq!(third["verdict"], "not-exponent");
    assert_eq!(third["agree"], true);
    assert_eq!(res["disagreements"], 0);
}

#[test]
fn arrangement_determinant_table() {
    let r = report(&["arrangement", "--weights", "3,1", "--lmin", "0", "--lmax", "0"]);
    let row = &r["results"]["determinant"]["table"][0];
    // roots of the polynomial part are -l - a/3, a = 1, 2
    assert_eq!(row["roots"], serde_json::json!([["-2/3", 1], ["-1/3", 1]]));
}

#[test]
fn univariate_regular_part() {
    let r = report(&["univariate", "--A0", "(D-1/2)*(D-1/3)", "--higher", "1=D^5"]);
    assert_eq!(r["results"]["rank"], 2);
    assert_eq!(r["results"]["rational_roots"], serde_json::json!([["1/3", 1], ["1/2", 1]]));
    let r = report(&["univariate", "--A0", "A0=(D-1/2)^2; A3=D"]);
    assert_eq!(r["results"]["rational_roots"], serde_json::json!([["1/2", 2]]));
}

#[test]
fn family_reduction() {
    let r = report(&["family", "--p", "x1", "--alphas", "1,1/2"]);
    let res = &r["results"];
    assert_eq!(res["f"], "x1");
    assert_eq!(res["g"], "1");
    assert_eq!(res["scaled_exponents"], serde_json::json!(["1"]));
}

#[test]
fn operator_check_witness() {
    let r = report(&["operator-check", "--operator", "ArS(1/3,-4/3,0)", "--tmin", "-3", "--tmax", "3", "--element", "t"]);
    let inv = &r["results"]["invertibility"];
    assert_eq!(inv["invertible"], false);
    assert_eq!(inv["witness"]["monomial"], "1");
    assert_eq!(r["results"]["operator"], "ArS(1/3, -4/3, 0)");
    let r = report(&["operator-check", "--operator", "Dtr(1/2)", "--tmin", "-3", "--tmax", "3", "--element", "t^-1 + 1"]);
    assert_eq!(r["results"]["invertibility"]["invertible"], true);
    assert_eq!(r["results"]["preimage"], "-2*t^-1 + 2");
}

#[test]
fn exit_codes_by_error_class() {
    let (code, _, err) = gmexp(&["exponent-test", "--f", "x1*(1-", "--alpha", "1/2"]);
    assert_eq!(code, 2);
    assert!(err.contains("position"), "{err}");
    let (code, _, _) = gmexp(&["exponent-test", "--f", "x1", "--alpha", "1/0"]);
    assert_eq!(code, 2);
    let (code, _, _) = gmexp(&["exponent-test", "--f", "t*x1", "--alpha", "1/2"]);
    assert_eq!(code, 3);
    let (code, _, _) = gmexp(&["univariate", "--A0", "0"]);
    assert_eq!(code, 3);
    let out = Command::new(env!("CARGO_BIN_EXE_gmexp"))
        .args(["exponent-test", "--f", "x1", "--alpha", "1/2"])
        .env("GM_MAX_WINDOW_CELLS", "10")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn reports_are_deterministic() {
    let args = ["exponent-test", "--f", "x1*x2*(1-x1-x2)", "--alphas", "1/2,1/3,1", "--path", "generic"];
    let a: Value = report(&args);
    let b: Value = report(&args);
    let a = serde_json::to_string(&without_timing(a)).unwrap();
    let b = serde_json::to_string(&without_timing(b)).unwrap();
    assert_eq!(a, b);
    let seq: Value = report(&[&args[..], &["--sequential"]].concat());
    assert_eq!(seq["results"], serde_json::from_str::<Value>(&a).unwrap()["results"]);
}

#[test]
fn output_file_and_matrix_dump() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let mat = dir.path().join("phi.txt");
    let (code, stdout, _) = gmexp(&[
        "--output",
        out.to_str().unwrap(),
        "exponent-test",
        "--f",
        "x1*(1-x1)",
        "--alpha",
        "1/2",
        "--dump-matrix",
        mat.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let dump = &r["results"][0]["matrix_dump"];
    let text = std::fs::read_to_string(&mat).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert_eq!(header, format!("# {} {}", dump["rows"], dump["cols"]));
    let body: Vec<&str> = lines.collect();
    assert_eq!(body.len() as u64, dump["nnz"].as_u64().unwrap());
    for line in body {
        let parts: Vec<&str> = line.split(' ').collect();
        assert_eq!(parts.len(), 3);
        assert!(parts[2].contains('/'));
    }
}

#[test]
fn validation_rejects_foreign_fields() {
    use gm_exponents_cli::{run, CliError, JobConfig, Mode};
    let mut cfg = JobConfig::new(Mode::Univariate);
    cfg.a0 = Some("D".into());
    cfg.weights = Some(vec![1, 1]);
    assert!(matches!(run(&cfg), Err(CliError::Precondition(_))));
    let cfg = JobConfig::new(Mode::ExponentTest);
    assert!(matches!(run(&cfg), Err(CliError::Precondition(_))));
}
