//! The acceptance gate: one test per criterion, each printing a single
//! pass/fail line (visible with `--nocapture` and on any failure) before
//! asserting, so a run of this target reads as a checklist.

use std::process::Command;
use std::time::Instant;

use qseries::catalog::{
    check_case, f7_prefactor, find, registry, run_suite, run_suite_with, CaseRecord, Params,
    Report, SuiteOptions, Verdict,
};
use qseries::multisection::{coefficient_oracle, multisum_u1, E2Phase};
use qseries::pochhammer::poch_finite;
use qseries::{HpComplex, HpReal, PrecisionContext};

const BITS: usize = 200;

fn ctx() -> PrecisionContext {
    PrecisionContext::default()
}

fn line(number: u32, what: &str, ok: bool) {
    println!(
        "acceptance {number} ({what}): {}",
        if ok { "pass" } else { "FAIL" }
    );
}

fn c(re: &str, im: &str) -> HpComplex {
    HpComplex::from_decimal(re, im, BITS).expect("decimal literal")
}

fn bound(digits: i64) -> HpReal {
    HpReal::pow10(-digits, BITS)
}

fn within(value: &HpComplex, claim: &HpComplex, digits: i64) -> bool {
    let scale = HpReal::one(BITS).max(&claim.abs());
    value.sub(claim).abs().le(&scale.mul(&bound(digits)))
}

fn all_pass_within(records: &[CaseRecord], digits: i64) -> bool {
    records.iter().all(|r| {
        r.verdict == Verdict::Pass
            && r.rel_residual
                .as_ref()
                .is_some_and(|res| res.le(&bound(digits)))
    })
}

fn failures(report: &Report) -> String {
    report
        .records
        .iter()
        .filter(|r| r.verdict != Verdict::Pass)
        .map(|r| {
            format!(
                "{}[{}] {} ({})",
                r.id,
                r.index,
                r.verdict,
                r.diagnostics.join("; ")
            )
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn criterion_01_rogers_ramanujan_fixed_nomes() {
    let ctx = ctx();
    let opts = SuiteOptions::default();
    let mut ok = true;
    let mut detail = String::new();
    for id in ["RR1", "RR2"] {
        let spec = find(id).unwrap();
        for q in ["0.1", "0.3", "0.5", "0.7"] {
            let mut params = Params::new();
            params.set_complex("q", q, "0");
            let start = Instant::now();
            let record = check_case(spec, 0, &params, &ctx, &opts);
            let elapsed = start.elapsed();
            let fast = elapsed.as_secs_f64() < 1.0;
            let tight = record.verdict == Verdict::Pass
                && record
                    .rel_residual
                    .as_ref()
                    .is_some_and(|r| r.le(&bound(30)));
            if !(fast && tight) {
                ok = false;
                detail.push_str(&format!(
                    "{id} at q = {q}: verdict {}, rel {:?}, {elapsed:?}\n",
                    record.verdict, record.rel_residual
                ));
            }
        }
    }
    line(
        1,
        "Rogers-Ramanujan products at q = 0.1, 0.3, 0.5, 0.7, under 1 s per case",
        ok,
    );
    assert!(ok, "{detail}");
}

#[test]
fn criterion_02_qbinom_and_bilateral_sampled_regions() {
    let ctx = ctx();
    let report = run_suite(&["QBINOM", "PSI11"], 100, 20260815, &ctx).unwrap();
    let qbinom: Vec<CaseRecord> = report
        .records
        .iter()
        .filter(|r| r.id == "QBINOM")
        .cloned()
        .collect();
    let psi: Vec<CaseRecord> = report
        .records
        .iter()
        .filter(|r| r.id == "PSI11")
        .cloned()
        .collect();
    let ok = qbinom.len() == 100
        && psi.len() == 100
        && all_pass_within(&qbinom, 30)
        && all_pass_within(&psi, 25);
    line(
        2,
        "q-binomial and bilateral product sides, 100 seeded samples each",
        ok,
    );
    assert!(ok, "{}", failures(&report));
}

#[test]
fn criterion_03_multisection_vanishing_and_matching() {
    let ctx = ctx();
    let points = [
        (c("0.82", "0.11"), c("0.6", "-0.2")),
        (c("-0.45", "0.67"), c("0.28", "0.09")),
    ];
    let mut ok = true;
    let mut detail = String::new();
    for (a, q) in &points {
        for r in 2u32..=5 {
            for n in 0i64..=20 {
                let filtered = multisum_u1(a, q, r, n, &ctx).unwrap();
                if n % r as i64 != 0 {
                    if !filtered.abs().le(&bound(30)) {
                        ok = false;
                        detail.push_str(&format!("r = {r}, n = {n}: |sum| = {}\n", filtered.abs()));
                    }
                    continue;
                }
                let m = n / r as i64;
                let (ar, qr) = (a.pow_i64(r as i64), q.pow_i64(r as i64));
                let claim = poch_finite(&ar, &qr, m, &ctx)
                    .unwrap()
                    .div(&poch_finite(&qr, &qr, m, &ctx).unwrap());
                if !within(&filtered, &claim, 30) {
                    ok = false;
                    detail.push_str(&format!("r = {r}, n = {n}: ratio mismatch\n"));
                }
            }
        }
    }
    line(
        3,
        "filtered multisum vanishes or matches its ratio for r = 2..5, n <= 20",
        ok,
    );
    assert!(ok, "{detail}");
}

#[test]
fn criterion_04_coefficient_oracle() {
    let ctx = ctx();
    let points = [
        (c("0.82", "0.11"), c("0.6", "-0.2")),
        (c("-0.45", "0.67"), c("0.28", "0.09")),
    ];
    let mut ok = true;
    let mut detail = String::new();
    for (a, q) in &points {
        for r in 2u32..=4 {
            let rows = coefficient_oracle(a, None, q, r, 16, &ctx).unwrap();
            for (n, (computed, claimed)) in rows.iter().enumerate() {
                if !computed.sub(claimed).abs().le(&bound(30)) {
                    ok = false;
                    detail.push_str(&format!("r = {r}, n = {n}: oracle disagreement\n"));
                }
            }
        }
    }
    line(
        4,
        "convolution coefficient oracle for r = 2..4, n <= 16",
        ok,
    );
    assert!(ok, "{detail}");
}

#[test]
fn criterion_05_shell_expansions_and_phase_experiment() {
    let ctx = ctx();
    let e1 = run_suite(&["E1"], 10, 5, &ctx).unwrap();
    let e1_ok = all_pass_within(&e1.records, 20);

    let mut passing: Vec<&str> = Vec::new();
    let mut variant_reports = Vec::new();
    for (name, phase) in [("r", E2Phase::SlotLabels), ("r-1", E2Phase::Consecutive)] {
        let opts = SuiteOptions {
            mutation: false,
            e2_phase: phase,
        };
        let report = run_suite_with(&["E2"], 10, 5, &ctx, &opts).unwrap();
        if all_pass_within(&report.records, 20) {
            passing.push(name);
        }
        variant_reports.push((name, report));
    }
    let experiment_ok = passing == ["r"];
    let named = if passing.len() == 1 {
        passing[0]
    } else {
        "none"
    };

    let ok = e1_ok && experiment_ok;
    line(
        5,
        &format!(
            "shell expansions at 10 samples, |t| <= 0.6; phase experiment names variant \"{named}\""
        ),
        ok,
    );
    assert!(e1_ok, "{}", failures(&e1));
    for (name, report) in &variant_reports {
        match *name {
            "r" => assert!(
                report.summary.fail == 0 && report.summary.inconclusive == 0,
                "slot-label variant must pass everywhere:\n{}",
                failures(report)
            ),
            _ => assert_eq!(
                report.summary.pass, 0,
                "consecutive variant must fail every sample"
            ),
        }
    }
    assert!(experiment_ok, "passing variants: {passing:?}");
}

#[test]
fn criterion_06_bilateral_shift_and_corollary() {
    let ctx = ctx();
    let report = run_suite(&["T12R", "C15R"], 10, 6, &ctx).unwrap();
    let ok = report.records.len() == 20 && all_pass_within(&report.records, 15);
    line(
        6,
        "bilateral modulus shift and its summed corollary, 10 samples at r = 2, 3",
        ok,
    );
    assert!(ok, "{}", failures(&report));
}

#[test]
fn criterion_07_entire_series_suite() {
    let ctx = ctx();
    let opts = SuiteOptions::default();

    let f2 = run_suite(&["F2"], 100, 7, &ctx).unwrap();
    let f2_ok = f2.records.len() == 100 && all_pass_within(&f2.records, 30);

    let f3 = run_suite(&["F3"], 20, 7, &ctx).unwrap();
    let f3_ok = f3.records.len() == 20
        && all_pass_within(&f3.records, 30)
        && f3.records.iter().all(|r| r.params.int("n").unwrap() <= 12);

    let f4_spec = find("F4").unwrap();
    let mut f4_ok = true;
    for n in 1i64..=12 {
        for (re, im) in [("0.73", "-0.21"), ("-0.38", "0.52")] {
            let mut params = Params::new();
            params.set_int("n", n);
            params.set_complex("q", "0.41", "0.13");
            params.set_complex("x", re, im);
            let record = check_case(f4_spec, 0, &params, &ctx, &opts);
            f4_ok &= record.verdict == Verdict::Pass
                && record
                    .rel_residual
                    .as_ref()
                    .is_some_and(|r| r.le(&bound(30)));
        }
    }

    let f7_spec = find("F7").unwrap();
    let q = c("0.41", "0");
    let xs = [
        ("0.62", "0.33"),
        ("-0.48", "0.27"),
        ("0.15", "-0.74"),
        ("-0.3", "-0.5"),
        ("0.85", "0.12"),
    ];
    let mut f7_ok = true;
    let mut diagonal_exact = true;
    for m in 0i64..=12 {
        for n in 0i64..=12 {
            for (re, im) in &xs {
                let mut params = Params::new();
                params.set_int("m", m);
                params.set_int("n", n);
                params.set_complex("q", "0.41", "0");
                params.set_complex("x", re, im);
                let record = check_case(f7_spec, 0, &params, &ctx, &opts);
                f7_ok &= record.verdict == Verdict::Pass
                    && record
                        .rel_residual
                        .as_ref()
                        .is_some_and(|r| r.le(&bound(30)));
                if m == n {
                    let pre = f7_prefactor(m, n, &c(re, im), &q, &ctx).unwrap();
                    diagonal_exact &= pre.value.sub(&HpComplex::one(BITS)).is_zero()
                        && pre.abs_error_estimate.is_zero();
                }
            }
        }
    }

    let ok = f2_ok && f3_ok && f4_ok && f7_ok && diagonal_exact;
    line(
        7,
        "entire-series suite: interchange (100), terminating shifts (20), finite reciprocal \
         (n = 1..12), swapped tails (m, n <= 12, 5 arguments); diagonal prefactor exactly 1",
        ok,
    );
    assert!(f2_ok, "{}", failures(&f2));
    assert!(f3_ok, "{}", failures(&f3));
    assert!(f4_ok);
    assert!(f7_ok);
    assert!(diagonal_exact);
}

#[test]
fn criterion_08_coefficient_identity_regressions() {
    let ctx = ctx();
    let ids = ["LEM1-1", "LEM1-2", "LEM1-3", "LEM1-4", "LEM1-5"];
    let report = run_suite(&ids, 10, 8, &ctx).unwrap();
    let unilateral: Vec<CaseRecord> = report
        .records
        .iter()
        .filter(|r| r.id == "LEM1-1" || r.id == "LEM1-2")
        .cloned()
        .collect();
    let bilateral: Vec<CaseRecord> = report
        .records
        .iter()
        .filter(|r| r.id != "LEM1-1" && r.id != "LEM1-2")
        .cloned()
        .collect();
    let ok = report.records.len() == 50
        && all_pass_within(&unilateral, 30)
        && all_pass_within(&bilateral, 15);
    line(
        8,
        "small-r coefficient identities, 10 samples each at their stated tolerances",
        ok,
    );
    assert!(ok, "{}", failures(&report));
}

#[test]
fn criterion_09_mutation_flips_everything() {
    let ctx = ctx();
    let ids: Vec<&str> = registry().iter().map(|s| s.id).collect();
    let opts = SuiteOptions {
        mutation: true,
        ..SuiteOptions::default()
    };
    let report = run_suite_with(&ids, 2, 9, &ctx, &opts).unwrap();
    let ok = report.summary.pass == 0
        && report.summary.inconclusive == 0
        && report.summary.fail == report.records.len();
    line(
        9,
        "perturbing every right side slightly beyond tolerance fails every case",
        ok,
    );
    assert!(
        ok,
        "pass = {}, fail = {}, inconclusive = {} of {}",
        report.summary.pass,
        report.summary.fail,
        report.summary.inconclusive,
        report.records.len()
    );
}

#[test]
fn criterion_10_reports_are_deterministic() {
    let args = ["verify", "--ids", "all", "--samples", "3", "--seed", "7"];
    let runs: Vec<(i32, String)> = (0..2)
        .map(|_| {
            let out = Command::new(env!("CARGO_BIN_EXE_qseries"))
                .args(args)
                .output()
                .expect("binary runs");
            (
                out.status.code().unwrap(),
                String::from_utf8(out.stdout).unwrap(),
            )
        })
        .collect();
    let stable: Vec<String> = runs
        .iter()
        .map(|(_, s)| {
            s.lines()
                .filter(|l| !l.contains("started_at"))
                .collect::<Vec<_>>()
                .join("\n")
        })
        .collect();
    let ok = runs[0].0 == 0 && runs[1].0 == 0 && stable[0] == stable[1] && !stable[0].is_empty();
    line(
        10,
        "two identical verification runs agree byte for byte modulo timestamp",
        ok,
    );
    assert!(ok, "codes {} {}", runs[0].0, runs[1].0);
}
