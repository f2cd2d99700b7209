use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn hochkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hochkit")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn json(args: &[&str]) -> (Output, Value) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let o = hochkit(&full);
    let v = serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(&o)));
    (o, v)
}

#[test]
fn trivial_algebra_has_a_single_row() {
    let o = hochkit(&["hh", &data("trivial.json"), "--window", "-3:3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "degree 0: dim 1\n");
}

#[test]
fn leibniz_violation_names_the_pair() {
    let o = hochkit(&["validate", &data("leibniz_violation.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Leibniz"), "{}", stderr(&o));
    assert!(stderr(&o).contains("(u, u)"), "{}", stderr(&o));
}

#[test]
fn malformed_input_reports_the_line() {
    let o = hochkit(&["validate", &data("malformed.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));
    let o = hochkit(&["validate", &data("missing.json")]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(hochkit(&["hh", &data("exterior.json"), "--window", "4:1"]).status.code(), Some(2));
    assert_eq!(hochkit(&["verify-koszul", "--group", "g2", "--window", "0:4"]).status.code(), Some(2));
    assert_eq!(hochkit(&["verify-koszul", "--group", "s1", "--window", "0:4", "--field", "fp:4"]).status.code(), Some(2));
    assert_eq!(hochkit(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn circle_verification_passes_with_a_report() {
    let (o, v) = json(&["verify-koszul", "--group", "s1", "--window", "-1:8"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(v["command"], "verify-koszul");
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["window"], serde_json::json!([-1, 8]));
    assert!(v["first_discrepancy"].is_null());
    let degrees: Vec<&String> = v["dims"].as_object().unwrap().keys().collect();
    assert_eq!(degrees, ["-1", "0", "1", "2", "3", "4", "5", "6", "7", "8"]);
    assert!(v["dims"].as_object().unwrap().values().all(|d| d == 1));
    assert_eq!(v["formality_caveat"], false);
}

#[test]
fn prime_field_runs_carry_the_formality_caveat() {
    let (o, v) = json(&["verify-koszul", "--group", "s1", "--window", "0:4", "--field", "fp:3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(v["formality_caveat"], true);
    assert_eq!(v["field"], "Fp:3");
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let args = ["--json", "verify-koszul", "--group", "su2", "--window", "-3:8"];
    assert_eq!(hochkit(&args).stdout, hochkit(&args).stdout);
    let args = ["--json", "hh", &data("truncated_polynomial.json"), "--window", "-2:6"];
    let first = hochkit(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, hochkit(&args).stdout);
}

#[test]
fn exported_algebra_round_trips() {
    let a = hochkit::parse_algebra(&std::fs::read_to_string(data("truncated_polynomial.json")).unwrap()).unwrap();
    let dir = std::env::temp_dir().join(format!("hochkit-roundtrip-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("truncated_polynomial.json");
    std::fs::write(&path, hochkit::algebra_to_json(&a)).unwrap();
    let exported = path.display().to_string();
    assert_eq!(hochkit(&["validate", &exported]).status.code(), Some(0));
    for cmd in [
        vec!["hh", "--window", "-2:6"],
        vec!["hh-homology", "--window", "-2:8"],
        vec!["bar", "--max-degree", "8"],
    ] {
        let run = |file: &str| {
            let mut args = vec!["--json", cmd[0], file];
            args.extend_from_slice(&cmd[1..]);
            hochkit(&args).stdout
        };
        assert_eq!(run(&data("truncated_polynomial.json")), run(&exported), "{}", cmd[0]);
    }
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn ground_coefficients_give_the_polynomial_dual() {
    let (o, v) = json(&["hh", &data("exterior.json"), "--module", &data("ground_module.json"), "--window", "-2:6"]);
    assert_eq!(o.status.code(), Some(0));
    for t in -2..=6 {
        assert_eq!(v["dims"][t.to_string()], u64::from(t >= 0 && t % 2 == 0), "degree {t}");
    }
    assert_eq!(v["products"], serde_json::json!([]));
}

#[test]
fn bar_cobar_and_koszul_dual_of_the_exterior_algebra() {
    let (_, bar) = json(&["bar", &data("exterior.json"), "--max-degree", "6"]);
    let (_, cobar) = json(&["cobar", &data("exterior.json"), "--max-degree", "6"]);
    let (_, dual) = json(&["koszul-dual", &data("exterior.json"), "--max-degree", "6"]);
    for t in -6..=6 {
        let key = t.to_string();
        assert_eq!(bar["dims"][&key], u64::from(t <= 0 && t % 2 == 0), "bar degree {t}");
        assert_eq!(cobar["dims"][&key], u64::from(t >= 0 && t % 2 == 0), "cobar degree {t}");
        assert_eq!(dual["dims"][&key], cobar["dims"][&key], "dual degree {t}");
    }
}

#[test]
fn homology_of_the_exterior_algebra() {
    let (o, v) = json(&["hh-homology", &data("exterior.json"), "--window", "-6:2"]);
    assert_eq!(o.status.code(), Some(0));
    for t in -6..=2 {
        assert_eq!(v["dims"][t.to_string()], u64::from(t <= 0), "degree {t}");
    }
}

#[test]
fn limit_reports_stabilization_and_unstabilized_degrees() {
    let (o, v) = json(&["limit-hh", &data("exterior.json"), "--stages", "4", "--window", "-3:4"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["lim1_unresolved"], false);
    let (o, v) = json(&["limit-hh", &data("truncated_polynomial.json"), "--stages", "2", "--window", "0:6"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(v["verdict"], "inconclusive");
    assert!(!v["unstabilized_degrees"].as_array().unwrap().is_empty());
    assert_eq!(v["lim1_unresolved"], true);
}

#[test]
fn file_algebras_are_finite_coefficients() {
    // only truncations of infinite algebras are refused as coefficients
    let o = hochkit(&["hh", &data("dual_numbers.json"), "--window", "-2:4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}
