use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use proptest::prelude::*;
use serde_json::Value;

use derivlab::bundled::SCENARIOS;
use derivlab::{parse_element, parse_tower_str};
use derivlab_core::samples::SampleSet;

fn derivlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_derivlab")).args(args).output().expect("spawn derivlab")
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("derivlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn run_file(path: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["run", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    derivlab(&args)
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

#[test]
fn list_shows_every_bundled_scenario() {
    let out = derivlab(&["list"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for b in SCENARIOS {
        assert!(text.lines().any(|l| l.starts_with(b.name) && l.ends_with(b.anchor())), "{}", b.name);
    }
}

#[test]
fn demos_meet_their_expectations() {
    for b in SCENARIOS {
        let out = derivlab(&["demo", b.name, "--format", "json", "--no-timestamp"]);
        assert_eq!(out.status.code(), Some(0), "{}", b.name);
        let v = json(&out);
        assert_eq!(v["schema"], 1);
        assert_eq!(v["scenario"], b.name);
        assert!(v.get("timestamp").is_none());
        assert_eq!(v["summary"]["violated"], 0);
        assert_eq!(v["summary"]["checks"], v["checks"].as_array().unwrap().len());
    }
}

#[test]
fn timestamp_is_present_by_default() {
    let out = derivlab(&["demo", "power_rule", "--format", "json"]);
    assert!(json(&out)["timestamp"].as_u64().is_some());
}

#[test]
fn violated_expectation_exits_one() {
    let path = scratch(
        "violated.dlab",
        "tower Q(sqrt2 | x^2 - 2)\nmap p = matrix basis(1, sqrt2) images(0, 1)\ncheck linear f=p\ncheck linear f=id\n",
    );
    let out = run_file(&path, &["--format", "json", "--no-timestamp"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert_eq!(v["summary"]["violated"], 1);
    assert_eq!(v["summary"]["met"], 1);
    let first = &v["checks"][0];
    assert_eq!(first["status"], "FAIL");
    assert_eq!(first["met"], false);
    assert!(first["report"]["witness"].is_object());
}

#[test]
fn expected_failure_is_met() {
    let path = scratch(
        "expected.dlab",
        "tower Q(sqrt2 | x^2 - 2)\nmap p = matrix basis(1, sqrt2) images(0, 1)\ncheck linear f=p expect: fail\n",
    );
    let out = run_file(&path, &[]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn syntax_error_exits_two_with_one_diagnostic() {
    let path = scratch("broken.dlab", "tower Q(t)\nmap D = d/dt with D(t)=1\n\ncheck power_rule f=D k=\n");
    let out = run_file(&path, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.contains(":4:") && err.contains("SyntaxError"), "{err}");
}

#[test]
fn unknown_name_and_range_errors_exit_two() {
    let path = scratch("unknown.dlab", "tower Q(t)\ncheck power_rule f=E k=2\n");
    let out = run_file(&path, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("UnknownName"));

    let path = scratch("range.dlab", "tower Q(t)\nmap D = d/dt with D(t)=1\ncheck power_rule f=D k=0\n");
    let out = run_file(&path, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ParameterOutOfRange"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(derivlab(&["demo", "nope"]).status.code(), Some(2));
    assert_eq!(derivlab(&["run", "/nonexistent/derivlab.dlab"]).status.code(), Some(2));
    assert_eq!(derivlab(&["demo", "power_rule", "--samples", "0"]).status.code(), Some(2));
    assert_eq!(derivlab(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn seed_and_sample_size_are_honored() {
    let a = json(&derivlab(&["demo", "reciprocal", "--format", "json", "--no-timestamp", "--seed", "7", "--samples", "5"]));
    let b = json(&derivlab(&["demo", "reciprocal", "--format", "json", "--no-timestamp", "--seed", "7", "--samples", "5"]));
    let c = json(&derivlab(&["demo", "reciprocal", "--format", "json", "--no-timestamp", "--seed", "8", "--samples", "5"]));
    assert_eq!(a, b);
    assert_eq!(a["samples"]["size"], 5);
    assert!(a["samples"]["source"].as_str().unwrap().contains("seed 7"));
    assert_ne!(a["samples"], c["samples"]);
}

#[test]
fn text_report_has_table_and_details() {
    let out = derivlab(&["demo", "nonlinear_witness"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("tower:       Q(sqrt2 | sqrt2^2 - 2)"));
    assert!(text.lines().any(|l| l.starts_with("2  7     linear") && l.contains("FAIL")));
    assert!(text.contains("[2] linear (line 7)"));
    assert!(text.contains("witness: x = sqrt2"));
}

fn tower_names() -> Vec<&'static str> {
    vec!["Q(t)", "Q(sqrt2 | x^2 - 2)", "Q(t, s | s^2 = t)", "Q(a, b | x^2 - 2, x^3 - 5)"]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn printed_elements_reparse(which in 0usize..4, seed in any::<u64>(), i in 0usize..4, j in 0usize..4) {
        let k = parse_tower_str(tower_names()[which]).unwrap();
        let s = SampleSet::random(&k, 4, seed);
        let xs = s.elements();
        prop_assume!(xs.len() == 4);
        let e = xs[i].mul(&xs[j]).unwrap().add(&xs[(i + 1) % 4]).unwrap();
        let printed = e.to_string();
        let back = parse_element(&printed, &k).unwrap();
        prop_assert_eq!(&back, &e);
        prop_assert_eq!(back.to_string(), printed);
    }

    #[test]
    fn integer_arithmetic_matches_rationals(a in -50i64..50, b in 1i64..50, c in -5i64..5) {
        let k = parse_tower_str("Q").unwrap();
        let e = parse_element(&format!("({a})/({b}) + ({c})*({a})"), &k).unwrap();
        let want = num::BigRational::new(a.into(), b.into()) + num::BigRational::from_integer((c * a).into());
        prop_assert_eq!(e.as_rational(), Some(want));
    }
}
