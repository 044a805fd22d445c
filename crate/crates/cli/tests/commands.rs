use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name);
    root.to_string_lossy().into_owned()
}

fn parcomp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_parcomp")).args(args).output().expect("run parcomp")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn innermost_trace_of_running_example() {
    let out = parcomp(&["rewrite", &fixture("size.trs"), "size(Tree(Zero, Nil, Tree(Zero, Nil, Nil)))"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("7 steps to normal form S(S(Zero))"), "{text}");
    assert!(text.contains("[size(Tree(Zero, Nil, Tree(Zero, Nil, Nil)))]"));
}

#[test]
fn parallel_trace_marks_simultaneous_redexes() {
    let out = parcomp(&[
        "rewrite",
        "--strategy",
        "parallel",
        &fixture("size.trs"),
        "size(Tree(Zero, Nil, Tree(Zero, Nil, Nil)))",
    ]);
    let text = stdout(&out);
    assert!(text.contains("5 steps to normal form S(S(Zero))"), "{text}");
    assert!(text.contains("S(plus([size(Nil)], [size(Tree(Zero, Nil, Nil))]))"), "{text}");
}

#[test]
fn normal_form_has_empty_trace() {
    let out = parcomp(&["rewrite", "--json", &fixture("size.trs"), "S(Zero)"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["count"], 0);
    assert_eq!(v["final"], "S(Zero)");
}

#[test]
fn fuel_exhaustion_keeps_partial_trace() {
    let out = parcomp(&["rewrite", "--fuel", "3", &fixture("nonconfluent.trs"), "a"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("fuel exhausted after 3 steps"));
}

#[test]
fn all_paths_reports_longest_derivation() {
    let out = parcomp(&["rewrite", "--all-paths", &fixture("size.trs"), "size(Tree(Zero, Nil, Tree(Zero, Nil, Nil)))"]);
    assert!(stdout(&out).contains("longest derivation: 7"), "{}", stdout(&out));
}

#[test]
fn pdts_of_size_system() {
    let out = parcomp(&["pdts", "--json", &fixture("size.trs")]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let groups = v.as_array().unwrap();
    assert_eq!(groups.len(), 4);
    let all: Vec<&str> = groups.iter().flat_map(|g| g["pdts"].as_array().unwrap()).map(|d| d.as_str().unwrap()).collect();
    assert_eq!(all.len(), 5);
    assert!(all.contains(&"size#(Tree(v, l, r)) -> Com_2(size#(r), plus#(size(l), size(r)))"));
}

#[test]
fn delta_export_reparses() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("mod_delta.trs");
    let out = parcomp(&["delta", &fixture("mod.trs"), "-o", out_path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&out_path).unwrap();
    let parcomp::tpdb::System::Relative(rel) = parcomp::tpdb::parse(&text).unwrap() else {
        panic!("expected a relative system")
    };
    assert_eq!(rel.counted().len(), 11);
    assert_eq!(rel.free().len(), 10);
}

#[test]
fn check_accepts_bundled_certificates() {
    for (system, degree) in [("size", 2), ("doubles", 1)] {
        let out = parcomp(&[
            "check",
            &fixture(&format!("{system}.trs")),
            &fixture(&format!("certificates/{system}.json")),
        ]);
        assert!(out.status.success(), "{system}");
        assert_eq!(stdout(&out).trim(), format!("accepted, degree {degree}"));
    }
}

#[test]
fn check_rejects_foreign_certificate() {
    let out = parcomp(&["check", &fixture("doubles.trs"), &fixture("certificates/size.json")]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn analyze_report_is_self_certifying() {
    let dir = tempfile::tempdir().unwrap();
    let out = parcomp(&["analyze", "--json", &fixture("doubles.trs")]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["upper_bound"]["degree"], 1);
    assert_eq!(v["empirical"]["fitted_irc_degree"], 2);
    assert_eq!(v["empirical"]["fitted_pirc_degree"], 1);
    let report = dir.path().join("report.json");
    std::fs::write(&report, &out.stdout).unwrap();
    let check = parcomp(&["check", &fixture("doubles.trs"), report.to_str().unwrap()]);
    assert_eq!(stdout(&check).trim(), "accepted, degree 1");
}

#[test]
fn analyze_writes_delta_and_handles_several_files() {
    let dir = tempfile::tempdir().unwrap();
    let delta = dir.path().join("size_delta.trs");
    let out = parcomp(&["analyze", "--json", "--no-empirical", &fixture("size.trs"), "--delta-out", delta.to_str().unwrap()]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["delta_path"], delta.to_str().unwrap());
    assert!(delta.exists());

    let out = parcomp(&["analyze", "--no-empirical", &fixture("size.trs"), &fixture("plus.trs")]);
    let text = stdout(&out);
    assert!(text.contains("O(n^2)") && text.contains("pirc = irc"), "{text}");
}

#[test]
fn reports_are_byte_identical_without_timings() {
    let run = || {
        let out = parcomp(&["analyze", "--json", "--max-size", "6", &fixture("recursion_3.trs")]);
        let mut v: Value = serde_json::from_slice(&out.stdout).unwrap();
        v.as_object_mut().unwrap().remove("timings");
        serde_json::to_string(&v).unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn zero_timeout_reports_timeouts() {
    let out = parcomp(&["analyze", "--json", "--timeout", "0", &fixture("recursion_3.trs")]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["upper_bound"], "timeout");
}

#[test]
fn empirical_on_relative_system() {
    let out = parcomp(&["empirical", "--json", "--max-size", "5", &fixture("size_relative.trs")]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["rows"].as_array().unwrap().len() == 5);
}

#[test]
fn input_errors_exit_with_one() {
    assert_eq!(parcomp(&["pdts", "/definitely/missing.trs"]).status.code(), Some(1));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.trs");
    std::fs::write(&bad, "(RULES f(x) -> )").unwrap();
    assert_eq!(parcomp(&["analyze", bad.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(parcomp(&["rewrite", &fixture("size.trs"), "size(("]).status.code(), Some(1));
    assert_eq!(parcomp(&["pdts", &fixture("size_relative.trs")]).status.code(), Some(1));
}
