//! End-to-end checks of the binary: output shapes, exit codes, JSON
//! round-trips, and determinism across thread counts.

use std::process::{Command, Output};

fn powmon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_powmon"))
        .args(args)
        .env_remove("POWMON_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = powmon(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn sumset_matches_the_worked_example() {
    assert_eq!(stdout(&["sumset", "{0,2,3}", "{0,1,3}"]).trim(), "{0,1,2,3,4,5,6}");
}

#[test]
fn interval_literals_are_accepted() {
    assert_eq!(stdout(&["rev", "[0,3]"]).trim(), "{0,1,2,3}");
    assert_eq!(stdout(&["nfold", "{0,1}", "5"]).trim(), "{0,1,2,3,4,5}");
}

#[test]
fn fingerprint_json_has_documented_shape() {
    let out = stdout(&["fingerprint", "--monoid", "<2,5>", "--depth", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["root"], 3);
    assert!(v["children"].is_array());
    let out = stdout(&["fingerprint", "--monoid", "<4,5>", "--depth", "2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["children"], serde_json::json!([4, 5, 5]));
}

#[test]
fn atom_reports_certificates() {
    let out = stdout(&["atom", "{0,1,2}", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["atom"], false);
    // certificate literals re-parse as set literals
    let left: String = v["witness"]["left"].as_str().unwrap().into();
    assert_eq!(left, "{0,1}");
    assert_eq!(stdout(&["atom", "{0,2}"]).trim(), "atom");
}

#[test]
fn factorize_lists_the_two_named_factorizations() {
    let out = stdout(&["factorize", "[0,6]"]);
    assert!(out.contains("{0,2,3} + {0,1,3}"));
    assert!(out.contains("{0,1} + {0,1} + {0,1} + {0,1} + {0,1} + {0,1}"));
}

#[test]
fn density_csv_has_the_documented_columns() {
    let out = stdout(&["density-exact", "-n", "4", "--format", "csv"]);
    let mut lines = out.lines();
    assert_eq!(
        lines.next().unwrap(),
        "N,variant,mode,total,atoms,decomposables,estimate,stderr,seed"
    );
    assert_eq!(lines.next().unwrap(), "4,restricted,exact,16,10,5,,,");
}

#[test]
fn json_outputs_reparse(){
    for args in [
        vec!["monoid-info", "<4,6>"],
        vec!["span", "{0,2,3}"],
        vec!["dcs", "{0,1,3}"],
        vec!["lengths", "[0,6]"],
        vec!["nstar", "{0,1,3}"],
        vec!["witnesses", "--monoid", "<2,3>"],
        vec!["density-sample", "-n", "8", "--trials", "500", "--seed", "11"],
        vec!["growth", "--n-max", "6"],
    ] {
        let mut full = args.clone();
        full.extend(["--format", "json"]);
        let out = stdout(&full);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!(v.is_object(), "non-object JSON from {args:?}");
    }
}

#[test]
fn seeded_sampling_is_deterministic_across_threads() {
    let base = ["density-sample", "-n", "10", "--trials", "20000", "--seed", "99"];
    let one = stdout(&[&base[..], &["--threads", "1"]].concat());
    let two = stdout(&[&base[..], &["--threads", "2"]].concat());
    let four = stdout(&[&base[..], &["--threads", "4"]].concat());
    assert_eq!(one, two);
    assert_eq!(two, four);
}

#[test]
fn exit_codes_distinguish_errors() {
    // domain error: malformed set literal
    let out = powmon(&["sumset", "{1,1}", "{0}"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));
    // domain error: budget exhaustion is reported distinctly
    let out = powmon(&["factorize", "[0,6]", "--budget", "4"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
    // usage error: unknown subcommand
    let out = powmon(&["no-such-op"]);
    assert_eq!(out.status.code(), Some(2));
    // usage error: missing argument
    let out = powmon(&["sumset", "{0,1}"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn budget_env_variable_is_honored() {
    let out = Command::new(env!("CARGO_BIN_EXE_powmon"))
        .args(["factorize", "[0,6]"])
        .env("POWMON_BUDGET", "4")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn prime_refuter_and_cancellation_outputs() {
    let out = stdout(&["prime-refute", "{0,1}", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["prime"], false);
    assert_eq!(v["witness"]["left"], "{0,2,3}");
    assert_eq!(stdout(&["prime-refute", "{1}"]).trim(), "prime");

    let out = stdout(&["cancel-refute", "{0,1}", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["n"], 2);
    assert_eq!(v["b"], "{0,2}");
}

#[test]
fn find_lengthset_round_trip() {
    let out = stdout(&["find-lengthset", "--lengths", "2,3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["found"], true);
    let found: String = v["set"].as_str().unwrap().into();
    let lengths = stdout(&["lengths", &found, "--format", "json"]);
    let lv: serde_json::Value = serde_json::from_str(&lengths).unwrap();
    assert_eq!(lv["lengths"], serde_json::json!([2, 3]));
}
