//! End-to-end checks of the binary: the exit-code contract, the stability of
//! every report format, and the configuration precedence chain.

use std::path::Path;
use std::process::{Command, Output};

use qseries::catalog::registry;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_qseries"))
        .args(args)
        .output()
        .expect("binary runs");
    (code(&out), text(&out.stdout), text(&out.stderr))
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal exit")
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8(bytes.to_vec()).expect("utf-8 output")
}

/// Report output with the one volatile line (the timestamp) removed.
fn without_timestamp(report: &str) -> String {
    report
        .lines()
        .filter(|l| !l.contains("started_at"))
        .collect::<Vec<_>>()
        .join("\n")
}

// ------------------------------------------------------------------ eval ----

#[test]
fn eval_theta_weighted_sum_prints_value_and_converges() {
    let (code, out, _) = run(&[
        "eval", "A", "--alpha", "1", "--a", "0", "--q", "0.3", "--t", "1",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("value = 1.441319048113685"), "out: {out}");
    assert!(out.contains("converged = true"));
}

#[test]
fn eval_finite_product_at_index_zero_is_exactly_one() {
    let (code, out, _) = run(&["eval", "poch", "--a", "0.3", "--q", "0.5", "--n", "0"]);
    assert_eq!(code, 0);
    assert!(out.contains("value = 1.e+0"), "out: {out}");
    assert!(out.contains("terms_used = 0"));
}

#[test]
fn eval_bilateral_outside_its_annulus_is_a_domain_error() {
    let (code, _, err) = run(&[
        "eval", "1psi1", "--a", "0.9", "--b", "0.5", "--q", "0.5", "--z", "0.1",
    ]);
    assert_eq!(code, 3);
    assert!(err.contains("annulus"), "err: {err}");
}

#[test]
fn eval_unknown_series_is_a_usage_error() {
    let (code, _, err) = run(&["eval", "wat", "--q", "0.5"]);
    assert_eq!(code, 64);
    assert!(err.contains("unknown series"), "err: {err}");
}

#[test]
fn eval_missing_parameter_names_the_gap() {
    let (code, _, err) = run(&["eval", "A", "--alpha", "1", "--a", "0", "--q", "0.5"]);
    assert_eq!(code, 64);
    assert!(err.contains("--t"), "err: {err}");
}

#[test]
fn eval_stray_parameter_names_the_expected_set() {
    let (code, _, err) = run(&[
        "eval", "poch", "--a", "1", "--n", "2", "--q", "0.5", "--z", "3",
    ]);
    assert_eq!(code, 64);
    assert!(err.contains("--a --n --q"), "err: {err}");
}

#[test]
fn eval_accepts_complex_and_negative_arguments() {
    let (code, out, _) = run(&["eval", "poch-inf", "--a", "-0.3+0.2i", "--q", "0.1-0.05i"]);
    assert_eq!(code, 0);
    assert!(out.contains("converged = true"), "out: {out}");
}

#[test]
fn eval_writes_to_the_requested_file_instead_of_stdout() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("value.txt");
    let (code, out, _) = run(&[
        "eval",
        "poch",
        "--a",
        "0.3",
        "--q",
        "0.5",
        "--n",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let written = std::fs::read_to_string(&path).expect("output file");
    assert!(written.contains("value = "), "file: {written}");
}

// ---------------------------------------------------------------- verify ----

#[test]
fn verify_passing_ids_emit_a_json_report_and_exit_zero() {
    let (code, out, _) = run(&[
        "verify",
        "--ids",
        "RR1,RR2",
        "--samples",
        "2",
        "--seed",
        "42",
    ]);
    assert_eq!(code, 0);
    let report: serde_json::Value = serde_json::from_str(&out).expect("JSON report");
    assert_eq!(report["config"]["ids"], serde_json::json!(["RR1", "RR2"]));
    assert_eq!(report["summary"]["fail"], 0);
    assert_eq!(report["summary"]["inconclusive"], 0);
    assert_eq!(report["records"].as_array().unwrap().len(), 4);
}

#[test]
fn verify_unknown_id_is_a_usage_error() {
    let (code, _, err) = run(&["verify", "--ids", "NOPE"]);
    assert_eq!(code, 64);
    assert!(err.contains("NOPE"), "err: {err}");
}

#[test]
fn verify_empty_id_token_is_a_usage_error() {
    let (code, _, err) = run(&["verify", "--ids", "RR1,,RR2"]);
    assert_eq!(code, 64);
    assert!(err.contains("empty id"), "err: {err}");
}

#[test]
fn verify_all_covers_every_registry_entry() {
    let (code, out, _) = run(&["verify", "--ids", "all", "--samples", "1", "--seed", "1"]);
    assert_eq!(code, 0);
    let report: serde_json::Value = serde_json::from_str(&out).expect("JSON report");
    let seen: Vec<&str> = report["records"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["id"].as_str().unwrap())
        .collect();
    for spec in registry() {
        assert!(
            seen.contains(&spec.id),
            "{} missing from the report",
            spec.id
        );
    }
}

#[test]
fn verify_reports_are_identical_across_runs_and_job_counts() {
    let args = [
        "verify",
        "--ids",
        "QBINOM,LEM1-3,PSI11",
        "--samples",
        "2",
        "--seed",
        "9",
    ];
    let (c1, first, _) = run(&args);
    let (c2, second, _) = run(&args);
    let mut with_jobs = args.to_vec();
    with_jobs.extend(["--jobs", "3"]);
    let (c3, third, _) = run(&with_jobs);
    assert_eq!((c1, c2, c3), (0, 0, 0));
    assert_eq!(without_timestamp(&first), without_timestamp(&second));
    assert_eq!(without_timestamp(&first), without_timestamp(&third));
}

#[test]
fn verify_mutation_flips_every_case_to_fail() {
    let (code, out, _) = run(&[
        "verify",
        "--ids",
        "RR1,F4",
        "--samples",
        "2",
        "--seed",
        "3",
        "--mutation",
    ]);
    assert_eq!(code, 1);
    let report: serde_json::Value = serde_json::from_str(&out).expect("JSON report");
    assert_eq!(report["summary"]["pass"], 0);
    assert_eq!(report["summary"]["fail"], 4);
}

#[test]
fn verify_companion_phase_flag_selects_the_failing_variant() {
    let (code, _, _) = run(&["verify", "--ids", "E2", "--samples", "2", "--seed", "11"]);
    assert_eq!(code, 0);
    let (code, out, _) = run(&[
        "verify",
        "--ids",
        "E2",
        "--samples",
        "2",
        "--seed",
        "11",
        "--e2-phase",
        "r-1",
    ]);
    assert_eq!(code, 1);
    let report: serde_json::Value = serde_json::from_str(&out).expect("JSON report");
    assert_eq!(report["config"]["e2_phase"], "r-1");
    assert_eq!(report["summary"]["pass"], 0);
}

#[test]
fn verify_csv_report_has_the_documented_columns() {
    let (code, out, _) = run(&[
        "verify",
        "--ids",
        "F4",
        "--samples",
        "2",
        "--seed",
        "2",
        "--format",
        "csv",
    ]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(
        lines.next().unwrap(),
        "id,index,params,lhs_re,lhs_im,rhs_re,rhs_im,abs_residual,rel_residual,verdict,\
         lhs_terms,rhs_terms,wall_ms,diagnostics"
    );
    assert_eq!(lines.count(), 2);
}

#[test]
fn verify_text_report_summarises_per_identity() {
    let (code, out, _) = run(&[
        "verify",
        "--ids",
        "LEM1-1",
        "--samples",
        "3",
        "--seed",
        "4",
        "--format",
        "text",
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("per-id pass rates: LEM1-1 3/3"), "out: {out}");
    assert!(out.contains("max rel residual"), "out: {out}");
}

// ---------------------------------------------------------------- oracle ----

#[test]
fn oracle_reports_every_coefficient_up_to_the_cap() {
    let (code, out, _) = run(&["oracle", "--r", "2", "--N", "8", "--a", "0.4", "--q", "0.3"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().filter(|l| l.starts_with("n = ")).count(), 9);
    assert!(out.contains("max |diff|"), "out: {out}");
    assert!(out.trim_end().ends_with("pass"), "out: {out}");
}

#[test]
fn oracle_odd_coefficients_vanish_identically_when_a_is_zero() {
    let (code, out, _) = run(&[
        "oracle", "--r", "2", "--N", "6", "--a", "0", "--q", "0.3", "--format", "json",
    ]);
    assert_eq!(code, 0);
    let report: serde_json::Value = serde_json::from_str(&out).expect("JSON report");
    for row in report["rows"].as_array().unwrap() {
        let n = row["n"].as_u64().unwrap();
        if n % 2 == 1 {
            assert_eq!(row["computed"]["re"], "0.0", "n = {n}");
            assert_eq!(row["computed"]["im"], "0.0", "n = {n}");
        }
    }
}

#[test]
fn oracle_rejects_out_of_range_requests() {
    let (code, _, err) = run(&["oracle", "--r", "7", "--N", "8", "--a", "0.4", "--q", "0.3"]);
    assert_eq!(code, 64);
    assert!(err.contains("r"), "err: {err}");
    let (code, _, _) = run(&[
        "oracle", "--r", "2", "--N", "65", "--a", "0.4", "--q", "0.3",
    ]);
    assert_eq!(code, 64);
}

#[test]
fn oracle_declines_the_bilateral_product() {
    let (code, _, err) = run(&[
        "oracle", "--r", "2", "--N", "8", "--a", "0.4", "--q", "0.3", "--b", "0.2",
    ]);
    assert_eq!(code, 64);
    assert!(err.contains("unilateral"), "err: {err}");
}

// ------------------------------------------------------------------ list ----

#[test]
fn list_text_has_one_line_per_identity() {
    let (code, out, _) = run(&["list"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), registry().len());
    assert!(out.lines().any(|l| l.starts_with("F7")), "out: {out}");
}

#[test]
fn list_json_round_trips_the_registry() {
    let (code, out, _) = run(&["list", "--format", "json"]);
    assert_eq!(code, 0);
    let entries: serde_json::Value = serde_json::from_str(&out).expect("JSON list");
    let entries = entries.as_array().unwrap();
    assert_eq!(entries.len(), registry().len());
    for entry in entries {
        for key in ["id", "description", "params", "domain"] {
            assert!(entry.get(key).is_some(), "{key} missing in {entry}");
        }
    }
}

// ----------------------------------------------------------- config chain ----

#[test]
fn config_file_applies_and_explicit_flags_override_it() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("run.conf");
    std::fs::write(
        &path,
        "# defaults for this machine\nformat = json\nseed = 5\n",
    )
    .expect("config file");
    let base = [
        "eval", "poch", "--a", "0.3", "--q", "0.5", "--n", "2", "--config",
    ];
    let (code, out, _) = run(&[&base[..], &[path.to_str().unwrap()]].concat());
    assert_eq!(code, 0);
    assert!(
        out.trim_start().starts_with('{'),
        "file format applies: {out}"
    );
    let (code, out, _) = run(&[&base[..], &[path.to_str().unwrap(), "--format", "text"]].concat());
    assert_eq!(code, 0);
    assert!(out.contains("value = "), "flag overrides file: {out}");
}

#[test]
fn config_file_unknown_key_is_a_usage_error_naming_the_line() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("bad.conf");
    std::fs::write(&path, "precision = 200\nbogus = 1\n").expect("config file");
    let (code, _, err) = run(&[
        "eval",
        "poch",
        "--a",
        "0.3",
        "--q",
        "0.5",
        "--n",
        "2",
        "--config",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, 64);
    assert!(err.contains("bad.conf:2"), "err: {err}");
}

#[test]
fn missing_config_file_is_a_usage_error() {
    let path = Path::new("definitely-absent.conf");
    assert!(!path.exists());
    let (code, _, _) = run(&[
        "eval",
        "poch",
        "--a",
        "0.3",
        "--q",
        "0.5",
        "--n",
        "2",
        "--config",
        "definitely-absent.conf",
    ]);
    assert_eq!(code, 64);
}

// ------------------------------------------------------------- top level ----

#[test]
fn unknown_flag_is_a_usage_error() {
    let (code, _, _) = run(&["list", "--definitely-not-a-flag"]);
    assert_eq!(code, 64);
}

#[test]
fn help_and_version_exit_zero() {
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("eval"), "help lists subcommands: {out}");
    let (code, _, _) = run(&["--version"]);
    assert_eq!(code, 0);
}
