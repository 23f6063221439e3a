mod common;

use common::fixture;
use dgtilt::cli::run;

fn dgtilt(args: &[&str]) -> (i32, String, String) {
    let mut out = vec![];
    let mut err = vec![];
    let argv: Vec<String> = std::iter::once("dgtilt".to_string()).chain(args.iter().map(|s| s.to_string())).collect();
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn f(name: &str) -> String {
    fixture(name).display().to_string()
}

#[test]
fn check_exit_codes() {
    let (code, out, _) = dgtilt(&["check", &f("a2.dga")]);
    assert_eq!(code, 0);
    assert!(out.contains("PASS  axiom  A2: associativity"), "{out}");
    let (code, _, err) = dgtilt(&["check", &f("ct-corrupt.dga")]);
    assert_eq!(code, 2);
    assert!(err.contains("SemanticError") && err.contains("leibniz"), "{err}");
    let (code, _, _) = dgtilt(&["check", &f("a2.dga"), &f("e2-corrupt.dga")]);
    assert_eq!(code, 2);
}

#[test]
fn parse_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.dga");
    std::fs::write(&p, "[algebra A]\nfield Q\nbasis 1:0 1:0\nunit 1 1\n").unwrap();
    let (code, _, err) = dgtilt(&["check", p.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains(":3:11: ParseError: duplicate basis label"), "{err}");
    let (code, _, _) = dgtilt(&["frobnicate"]);
    assert_eq!(code, 2);
    let (code, _, _) = dgtilt(&["tilt", &f("missing.problem")]);
    assert_eq!(code, 2);
}

#[test]
fn verify_suites() {
    let (code, out, _) = dgtilt(&["verify", &f("a2.problem"), "--suite", "all"]);
    assert_eq!(code, 0);
    for name in ["Lambda = B+C", "Hom(C,B)=0", "Phi quasi-iso", "H0(tilde) = [S Hom(M,X); 0 End(X)^op]"] {
        assert!(out.lines().any(|l| l.starts_with("PASS") && l.contains(name)), "missing {name}:\n{out}");
    }
    assert!(!out.contains("FAIL"));
    let (code, out, _) = dgtilt(&["verify", &f("rigid-fail.problem"), "--suite", "ladkani"]);
    assert_eq!(code, 3);
    assert!(out.contains("FAIL  exactness  RigidityFailed"), "{out}");
    let (code, out, _) = dgtilt(&["verify", &f("e2.problem"), "--suite", "selfdual"]);
    assert_eq!(code, 3);
    assert!(out.contains("NotSelfDual"), "{out}");
    let (code, _, _) = dgtilt(&["verify", &f("dn.problem"), "--suite", "selfdual"]);
    assert_eq!(code, 0);
    let (code, _, _) = dgtilt(&["verify", &f("odd.problem"), "--suite", "recollement"]);
    assert_eq!(code, 0);
}

#[test]
fn tilt_writes_and_reingests() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("a2.dga");
    let rep = dir.path().join("a2.report");
    let (code, _, _) = dgtilt(&["tilt", &f("a2.problem"), "--out", out.to_str().unwrap(), "--report", rep.to_str().unwrap()]);
    assert_eq!(code, 0);
    let report = std::fs::read_to_string(&rep).unwrap();
    assert!(report.contains("PASS  quasi-iso  Phi quasi-iso"));
    let (code, _, _) = dgtilt(&["check", out.to_str().unwrap()]);
    assert_eq!(code, 0);
}

#[test]
fn budget_exit_3() {
    let (code, _, err) = dgtilt(&["tilt", &f("e2-nonperfect.problem")]);
    assert_eq!(code, 3);
    assert!(err.contains("ResolutionBudgetExceeded"), "{err}");
    let (code, _, _) = dgtilt(&["--max-generators", "1", "tilt", &f("a2.problem")]);
    assert_eq!(code, 0);
    let (code, _, _) = dgtilt(&["--max-generators", "1", "tilt", &f("rr.problem")]);
    assert_eq!(code, 3);
    let (code, _, err) = dgtilt(&["--degree-window", "1:2", "verify", &f("a2.problem"), "--suite", "tilt"]);
    assert_eq!(code, 3, "{err}");
}

#[test]
fn homology_and_dualize() {
    let (code, out, _) = dgtilt(&["homology", &f("ct.dga")]);
    assert_eq!(code, 0);
    assert!(out.contains("H^0 = 1: [1 e]") && out.contains("H^1 = 0"), "{out}");
    let (code, _, _) = dgtilt(&["homology", &f("ct.dga"), "--of", "nope"]);
    assert_eq!(code, 2);
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.dga");
    let (code, _, _) = dgtilt(&["dualize", &f("a2.dga"), "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.contains("[module DP2]\nfield Q\nrightover A2\n"), "{text}");
    let (code, _, _) = dgtilt(&["check", out.to_str().unwrap()]);
    assert_eq!(code, 0);
}
