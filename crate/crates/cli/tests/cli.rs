use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name).to_string_lossy().into_owned()
}

fn tresse(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tresse")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let o = tresse(&all);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], 1);
    v
}

#[test]
fn classify_reports_class_and_discriminant() {
    for (file, line) in [
        ("hyperbolic_delta.json", "hyperbolic, Δ = 1/27"),
        ("ultrahyperbolic.json", "ultrahyperbolic, Δ = -4/27"),
        ("degenerate.json", "degenerate, Δ = 0"),
    ] {
        let o = tresse(&["classify", &fixture(file)]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(stdout(&o).trim(), line);
    }
    let v = json(&["classify", &fixture("hyperbolic_delta.json")]);
    assert_eq!(v["command"], "classify");
    assert_eq!(v["class"], "hyperbolic");
    assert_eq!(v["discriminant"], "1/27");
}

#[test]
fn connection_lists_nonzero_entries() {
    let o = tresse(&["connection", &fixture("hyperbolic_x1.json")]);
    let text = stdout(&o);
    assert!(text.contains("Γ^1_11 = (-2/3)/x1"), "{text}");
    assert!(text.contains("Γ^2_21 = (1/3)/x1"), "{text}");
    assert!(text.contains("curvature: zero"));
    let v = json(&["connection", &fixture("hyperbolic_x1.json")]);
    assert_eq!(v["gamma"].as_array().unwrap().len(), 2);
    assert_eq!(v["curvature_zero"], true);
    assert_eq!(v["torsion"].as_array().unwrap().len(), 2);
}

#[test]
fn symbols_and_invariants_on_a_line() {
    let text = stdout(&tresse(&["symbols", &fixture("line_a3x.json")]));
    assert!(text.starts_with("sigma3 = (x)*d1^3"), "{text}");
    assert_eq!(text.lines().count(), 4);
    let v = json(&["symbols", &fixture("line_a3x.json")]);
    for k in 0..4 {
        assert!(v[format!("sigma{k}")].is_object());
    }
    let text = stdout(&tresse(&["invariants", &fixture("line_a3x.json"), "--invariants", "I0,DA0:3"]));
    assert_eq!(text, "I0 = x^3 + 1\nDA0:3 = 162*x^7\n");
}

#[test]
fn descend_generic_line() {
    let v = json(&["descend", "--generic", "1"]);
    assert_eq!(v["command"], "descend");
    assert_eq!(v["relations"].as_array().unwrap().len(), 1);
    assert_eq!(v["eliminated"], serde_json::json!(["f1"]));
    let text = stdout(&tresse(&["descend", "--generic", "1"]));
    assert!(text.contains("X0 := DA0:2"), "{text}");
}

#[test]
fn equiv_verdicts() {
    let a = fixture("family_a.json");
    let v = json(&["equiv", "--op-a", &a, "--op-b", &fixture("family_a_sheared.json"), "--domain-b", "2,4,1,2"]);
    assert_eq!(v["verdict"], "equivalent");
    assert!(v["max_residual"].as_f64().unwrap() <= 1e-9);
    let v = json(&["equiv", "--op-a", &a, "--op-b", &fixture("family_a_shifted.json")]);
    assert_eq!(v["verdict"], "not_equivalent");
    assert_eq!(v["witness"]["invariant"], "I0");
    let flat = fixture("family_flat.json");
    assert_eq!(json(&["equiv", "--op-a", &flat, "--op-b", &flat])["verdict"], "inconclusive");
    let line = json(&["equiv", "--op-a", &fixture("line_family.json"), "--op-b", &fixture("line_family_moved.json"), "--domain-b", "3,5"]);
    assert_eq!(line["verdict"], "equivalent");
}

#[test]
fn equiv_writes_the_report_file() {
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli_equiv_report.json");
    let o = tresse(&["equiv", "--op-a", &fixture("family_a.json"), "--op-b", &fixture("family_a_shifted.json"), "--report", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("verdict: not_equivalent"));
    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(saved["schema"], 1);
    assert_eq!(saved["command"], "equiv");
    assert_eq!(saved["verdict"], "not_equivalent");
}

#[test]
fn oracle_on_a_line() {
    let v = json(&["oracle1d", &fixture("line_a3x.json")]);
    let items = v["items"].as_array().unwrap();
    let gamma = items.iter().find(|i| i["name"] == "Gamma").unwrap();
    assert_eq!(gamma["agrees"], true);
    assert!(v["discrepancies"].is_array());
}

#[test]
fn exit_codes() {
    // usage errors: bad arguments, unreadable or malformed input, wrong dimension
    assert_eq!(tresse(&["nonsense"]).status.code(), Some(2));
    assert_eq!(tresse(&["classify", &fixture("missing.json")]).status.code(), Some(2));
    assert_eq!(tresse(&["classify", &fixture("bad_syntax.json")]).status.code(), Some(2));
    assert_eq!(tresse(&["classify", &fixture("line_a3x.json")]).status.code(), Some(2));
    assert_eq!(tresse(&["invariants", &fixture("line_a3x.json"), "--invariants", "I9"]).status.code(), Some(2));
    // mathematical failure
    let o = tresse(&["invariants", &fixture("degenerate.json")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("I0 = 0"));
    assert_eq!(tresse(&["--help"]).status.code(), Some(0));
}

#[test]
fn json_errors_carry_the_schema() {
    let o = tresse(&["--format", "json", "classify", &fixture("bad_syntax.json")]);
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["error"]["kind"], "usage");
}

#[test]
fn output_is_byte_identical_across_runs() {
    let a = fixture("family_a.json");
    let b = fixture("family_a_sheared.json");
    let cases: Vec<Vec<&str>> = vec![
        vec!["--format", "json", "connection", &a],
        vec!["--format", "json", "invariants", &a, "--y0", "1/2"],
        vec!["--format", "json", "descend", "--generic", "1"],
        vec!["--format", "json", "equiv", "--op-a", &a, "--op-b", &b, "--domain-b", "2,4,1,2"],
    ];
    for args in cases {
        let first = tresse(&args).stdout;
        assert!(!first.is_empty());
        for _ in 0..2 {
            assert_eq!(tresse(&args).stdout, first, "{args:?}");
        }
    }
}
