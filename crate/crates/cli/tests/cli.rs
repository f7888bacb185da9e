//! End-to-end checks of the `affalg` binary: the documented examples,
//! output shapes, and exit-code conventions.

use std::process::{Command, Output};

fn affalg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_affalg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = affalg(args);
    assert!(
        out.status.success(),
        "affalg {:?} failed:\n{}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf-8 output")
}

#[test]
fn mul_weyl_example() {
    let out = stdout_of(&["mul", "--algebra", "weyl", "y^2", "x^2"]);
    assert_eq!(out.trim(), "x^2*y^2 + 4*x*y + 2");
}

#[test]
fn classify_shift_example() {
    let out = stdout_of(&["classify", "--q", "1", "--alpha", "0", "--beta", "-3", "--gamma", "0"]);
    assert!(out.contains("class: shift"), "{out}");
    assert!(out.contains("verified: true"), "{out}");
}

#[test]
fn normal_form_partial_symbolic() {
    let out = stdout_of(&["normal-form", "--alpha", "0", "--beta", "0", "--gamma", "1", "y^2*x"]);
    assert_eq!(out.trim(), "q^2*x*y^2 + (q+1)*y");
}

#[test]
fn iso_qweyl_verified() {
    let out = stdout_of(&["iso", "--q", "2", "--alpha", "1", "--beta", "1", "--gamma", "0"]);
    assert!(out.contains("class: q-weyl"), "{out}");
    assert!(out.contains("verified: true"), "{out}");
}

#[test]
fn binomial_weyl_defect() {
    let out = stdout_of(&["binomial", "--algebra", "weyl", "--n", "3"]);
    assert!(out.contains("defect: 3*x + 3*y"), "{out}");
    assert!(out.contains("identity holds: true"), "{out}");
}

#[test]
fn center_over_gf3() {
    let out = stdout_of(&["center", "--algebra", "weyl", "--char", "3", "--degree", "3"]);
    assert!(out.contains("x^3"), "{out}");
    assert!(out.contains("y^3"), "{out}");
}

#[test]
fn engines_agree_through_cli() {
    let reference = stdout_of(&["mul", "--algebra", "weyl", "y^3", "x^2*y"]);
    for engine in ["formula", "recurrence", "pullback", "cached"] {
        let out = stdout_of(&["mul", "--algebra", "weyl", "--engine", engine, "y^3", "x^2*y"]);
        assert_eq!(out, reference, "engine {engine}");
    }
}

#[test]
fn bench_json_request_counts_are_deterministic() {
    let args = ["bench", "--workload", "weyl-powers", "--strategy", "cache-only", "--json"];
    let mut runs = Vec::new();
    for _ in 0..2 {
        let mut value: serde_json::Value =
            serde_json::from_str(&stdout_of(&args)).expect("json output");
        for report in value.as_array_mut().expect("array of reports") {
            report["wall_ms"] = serde_json::Value::Null;
        }
        runs.push(value);
    }
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn bench_csv_has_header_and_rows() {
    let out = stdout_of(&["bench", "--workload", "binomial-weyl", "--strategy", "formulas-only", "--csv"]);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("m,n,count"));
    let first = lines.next().expect("at least one data row");
    assert_eq!(first.split(',').count(), 3);
}

#[test]
fn bench_manual_cleaning_bounds_storage() {
    let peak = |args: &[&str]| -> u64 {
        let value: serde_json::Value = serde_json::from_str(&stdout_of(args)).expect("json");
        value[0]["peak_entries"].as_u64().expect("peak_entries")
    };
    let base = ["bench", "--workload", "weyl-powers", "--strategy", "cache-only", "--json"];
    let mut cleaned = base.to_vec();
    cleaned.extend(["--clear-above", "2"]);
    assert!(peak(&cleaned) <= peak(&base));
}

#[test]
fn json_normal_form_shape() {
    let out = stdout_of(&["normal-form", "--algebra", "weyl", "--json", "y*x"]);
    let value: serde_json::Value = serde_json::from_str(&out).expect("json output");
    assert_eq!(value["normal_form"], "x*y + 1");
    assert_eq!(value["terms"].as_array().map(Vec::len), Some(2));
}

#[test]
fn selftest_covers_all_rows_at_default_degree() {
    let out = stdout_of(&["selftest"]);
    assert_eq!(out.matches("row (").count(), 16, "{out}");
    assert!(out.contains("all 16 rows agree for 0 <= m, n <= 6"), "{out}");
}

#[test]
fn usage_error_exits_with_two() {
    let out = affalg(&["mul", "--algebra", "weyl", "y^2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn computation_error_exits_with_one() {
    let out = affalg(&["normal-form", "--algebra", "weyl", "x + )"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("syntax error"));

    let out = affalg(&["center", "--char", "4", "--q", "1", "--alpha", "0", "--beta", "0", "--gamma", "1"]);
    assert_eq!(out.status.code(), Some(1));

    let out = affalg(&["mul", "--q", "2", "--alpha", "1", "--beta", "1", "--gamma", "1", "--engine", "formula", "y", "x"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn prime_field_requires_explicit_parameters() {
    let out = affalg(&["classify", "--char", "5", "--q", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("required"));
}
