//! Renderers for the three output formats.
//!
//! The JSON report is the stability surface: decimal strings for every
//! scalar (they round-trip at working precision), sorted object keys, and a
//! single volatile field (`started_at`). Per-case wall times are real in
//! text output only — JSON carries `null` and CSV an empty field so that
//! repeated runs stay byte-identical. CSV flattens records one row per
//! case; text is for people and is not a stability surface.

use std::collections::BTreeMap;

use chrono::{SecondsFormat, Utc};
use qseries::catalog::{CaseRecord, ParamValue, Report, Verdict};
use qseries::{HpComplex, HpReal, PrecisionContext, SeriesValue};
use serde_json::{json, Value};

use crate::config::{phase_name, OutputFormat};

fn complex_json(z: &HpComplex) -> Value {
    json!({ "re": z.re().to_string(), "im": z.im().to_string() })
}

fn complex_csv(z: Option<&HpComplex>) -> (String, String) {
    match z {
        Some(z) => (z.re().to_string(), z.im().to_string()),
        None => (String::new(), String::new()),
    }
}

fn real_json(x: Option<&HpReal>) -> Value {
    match x {
        Some(x) => Value::String(x.to_string()),
        None => Value::Null,
    }
}

fn param_json(value: &ParamValue) -> Value {
    match value {
        ParamValue::Int(n) => json!(n),
        ParamValue::Complex { re, im } => json!({ "re": re, "im": im }),
    }
}

/// Full-precision decimal shortened to a few significant digits, for text
/// columns where eyeballing the magnitude is the point.
fn short_real(x: &HpReal) -> String {
    let s = x.to_string();
    match s.split_once('e') {
        Some((mantissa, exponent)) => {
            let cut = mantissa
                .len()
                .min(if mantissa.starts_with('-') { 5 } else { 4 });
            format!("{}e{}", &mantissa[..cut], exponent)
        }
        None => s,
    }
}

fn finish_json(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable report");
    text.push('\n');
    text
}

fn csv_into_string(build: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    build(&mut writer).expect("in-memory csv");
    String::from_utf8(writer.into_inner().expect("in-memory csv")).expect("utf-8 csv")
}

pub fn render_eval(result: &SeriesValue, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => finish_json(&json!({
            "value": complex_json(&result.value),
            "abs_error_estimate": result.abs_error_estimate.to_string(),
            "terms_used": result.terms_used,
            "converged": result.converged,
        })),
        OutputFormat::Csv => csv_into_string(|w| {
            w.write_record([
                "value_re",
                "value_im",
                "abs_error_estimate",
                "terms_used",
                "converged",
            ])?;
            w.write_record([
                result.value.re().to_string(),
                result.value.im().to_string(),
                result.abs_error_estimate.to_string(),
                result.terms_used.to_string(),
                result.converged.to_string(),
            ])
        }),
        OutputFormat::Text => format!(
            "value = {}\nabs_error_estimate = {}\nterms_used = {}\nconverged = {}\n",
            result.value,
            short_real(&result.abs_error_estimate),
            result.terms_used,
            result.converged
        ),
    }
}

pub fn render_report(report: &Report, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => report_json(report),
        OutputFormat::Csv => report_csv(report),
        OutputFormat::Text => report_text(report),
    }
}

fn record_json(record: &CaseRecord) -> Value {
    let params: serde_json::Map<String, Value> = record
        .params
        .iter()
        .map(|(name, value)| (name.to_string(), param_json(value)))
        .collect();
    json!({
        "id": record.id.as_str(),
        "params": params,
        "lhs": record.lhs.as_ref().map(complex_json),
        "rhs": record.rhs.as_ref().map(complex_json),
        "abs_residual": real_json(record.abs_residual.as_ref()),
        "rel_residual": real_json(record.rel_residual.as_ref()),
        "verdict": record.verdict.to_string(),
        "terms": { "lhs": record.lhs_terms, "rhs": record.rhs_terms },
        "wall_ms": Value::Null,
        "diagnostics": record.diagnostics.join("; "),
    })
}

fn report_json(report: &Report) -> String {
    let cfg = &report.config;
    finish_json(&json!({
        "config": {
            "ids": &cfg.ids,
            "samples": cfg.samples,
            "seed": cfg.seed,
            "precision_bits": cfg.precision_bits,
            "tolerance_digits": cfg.tolerance_digits,
            "max_terms": cfg.max_terms,
            "max_window": cfg.max_window,
            "mutation": cfg.mutation,
            "e2_phase": phase_name(cfg.e2_phase),
        },
        "started_at": Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true),
        "records": report.records.iter().map(record_json).collect::<Vec<_>>(),
        "summary": {
            "pass": report.summary.pass,
            "fail": report.summary.fail,
            "inconclusive": report.summary.inconclusive,
            "max_rel_residual": real_json(report.summary.max_rel_residual.as_ref()),
        },
    }))
}

fn report_csv(report: &Report) -> String {
    csv_into_string(|w| {
        w.write_record([
            "id",
            "index",
            "params",
            "lhs_re",
            "lhs_im",
            "rhs_re",
            "rhs_im",
            "abs_residual",
            "rel_residual",
            "verdict",
            "lhs_terms",
            "rhs_terms",
            "wall_ms",
            "diagnostics",
        ])?;
        for r in &report.records {
            let (lhs_re, lhs_im) = complex_csv(r.lhs.as_ref());
            let (rhs_re, rhs_im) = complex_csv(r.rhs.as_ref());
            w.write_record([
                r.id.clone(),
                r.index.to_string(),
                r.params.to_string(),
                lhs_re,
                lhs_im,
                rhs_re,
                rhs_im,
                r.abs_residual
                    .as_ref()
                    .map(HpReal::to_string)
                    .unwrap_or_default(),
                r.rel_residual
                    .as_ref()
                    .map(HpReal::to_string)
                    .unwrap_or_default(),
                r.verdict.to_string(),
                r.lhs_terms.to_string(),
                r.rhs_terms.to_string(),
                String::new(),
                r.diagnostics.join("; "),
            ])?;
        }
        Ok(())
    })
}

fn report_text(report: &Report) -> String {
    let cfg = &report.config;
    let mut out = String::new();
    out.push_str(&format!(
        "suite: {} id(s), {} sample(s) each, seed {}\n",
        cfg.ids.len(),
        cfg.samples,
        cfg.seed
    ));
    out.push_str(&format!(
        "context: {} bits, {} digits, max_terms {}, max_window {}, e2 phase {}{}\n\n",
        cfg.precision_bits,
        cfg.tolerance_digits,
        cfg.max_terms,
        cfg.max_window,
        phase_name(cfg.e2_phase),
        if cfg.mutation { ", mutation on" } else { "" }
    ));

    let mut per_id: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for r in &report.records {
        let slot = per_id.entry(&r.id).or_default();
        slot.1 += 1;
        if r.verdict == Verdict::Pass {
            slot.0 += 1;
        }
        let verdict = r.verdict.to_string();
        let residual = match &r.rel_residual {
            Some(x) => format!("rel {}", short_real(x)),
            None => "rel -".to_string(),
        };
        out.push_str(&format!(
            "{}[{}] {verdict:<12} {residual:<14} ({:.1} ms)  {}\n",
            r.id, r.index, r.wall_ms, r.params
        ));
        for note in &r.diagnostics {
            out.push_str(&format!("    - {note}\n"));
        }
    }

    out.push('\n');
    let rates: Vec<String> = per_id
        .iter()
        .map(|(id, (pass, total))| format!("{id} {pass}/{total}"))
        .collect();
    out.push_str(&format!("per-id pass rates: {}\n", rates.join(", ")));
    let max_rel = match &report.summary.max_rel_residual {
        Some(x) => short_real(x),
        None => "-".to_string(),
    };
    out.push_str(&format!(
        "summary: {} pass, {} fail, {} inconclusive; max rel residual {}\n",
        report.summary.pass, report.summary.fail, report.summary.inconclusive, max_rel
    ));
    out
}

/// One oracle comparison row: coefficient index, both values, absolute gap.
pub struct OracleRow {
    pub n: usize,
    pub computed: HpComplex,
    pub claimed: HpComplex,
    pub abs_diff: HpReal,
}

pub struct OracleOutcome {
    pub r: u32,
    pub n_max: usize,
    pub a: HpComplex,
    pub q: HpComplex,
    pub rows: Vec<OracleRow>,
    pub max_abs_diff: HpReal,
    pub pass: bool,
}

pub fn render_oracle(
    outcome: &OracleOutcome,
    ctx: &PrecisionContext,
    format: OutputFormat,
) -> String {
    match format {
        OutputFormat::Json => finish_json(&json!({
            "config": {
                "r": outcome.r,
                "n_max": outcome.n_max,
                "a": complex_json(&outcome.a),
                "q": complex_json(&outcome.q),
                "precision_bits": ctx.precision_bits,
                "tolerance_digits": ctx.tolerance_digits,
            },
            "rows": outcome
                .rows
                .iter()
                .map(|row| json!({
                    "n": row.n,
                    "computed": complex_json(&row.computed),
                    "claimed": complex_json(&row.claimed),
                    "abs_diff": row.abs_diff.to_string(),
                }))
                .collect::<Vec<_>>(),
            "max_abs_diff": outcome.max_abs_diff.to_string(),
            "pass": outcome.pass,
        })),
        OutputFormat::Csv => csv_into_string(|w| {
            w.write_record([
                "n",
                "computed_re",
                "computed_im",
                "claimed_re",
                "claimed_im",
                "abs_diff",
            ])?;
            for row in &outcome.rows {
                w.write_record([
                    row.n.to_string(),
                    row.computed.re().to_string(),
                    row.computed.im().to_string(),
                    row.claimed.re().to_string(),
                    row.claimed.im().to_string(),
                    row.abs_diff.to_string(),
                ])?;
            }
            Ok(())
        }),
        OutputFormat::Text => {
            let mut out = format!(
                "coefficient oracle: r = {}, n = 0..={}, a = {}, q = {}\n\n",
                outcome.r, outcome.n_max, outcome.a, outcome.q
            );
            for row in &outcome.rows {
                out.push_str(&format!(
                    "n = {:<3} computed {:<28} claimed {:<28} |diff| {}\n",
                    row.n,
                    short_complex(&row.computed),
                    short_complex(&row.claimed),
                    short_real(&row.abs_diff)
                ));
            }
            out.push_str(&format!(
                "\nmax |diff| {} against tolerance {}: {}\n",
                short_real(&outcome.max_abs_diff),
                short_real(&ctx.tolerance()),
                if outcome.pass { "pass" } else { "fail" }
            ));
            out
        }
    }
}

fn short_complex(z: &HpComplex) -> String {
    if z.im().is_zero() {
        short_real(z.re())
    } else if z.im().is_negative() {
        format!("{} - {}i", short_real(z.re()), short_real(&z.im().abs()))
    } else {
        format!("{} + {}i", short_real(z.re()), short_real(z.im()))
    }
}

pub fn render_list(format: OutputFormat) -> String {
    let entries = qseries::catalog::registry();
    match format {
        OutputFormat::Json => finish_json(
            &entries
                .iter()
                .map(|spec| {
                    json!({
                        "id": spec.id,
                        "description": spec.description,
                        "params": spec.param_names,
                        "domain": spec.domain_summary,
                    })
                })
                .collect::<Value>(),
        ),
        OutputFormat::Csv => csv_into_string(|w| {
            w.write_record(["id", "description", "params", "domain"])?;
            for spec in entries {
                let params = spec.param_names.join(" ");
                w.write_record([
                    spec.id,
                    spec.description,
                    params.as_str(),
                    spec.domain_summary,
                ])?;
            }
            Ok(())
        }),
        OutputFormat::Text => {
            let mut out = String::new();
            for spec in entries {
                out.push_str(&format!(
                    "{:<8} {} | params: {} | domain: {}\n",
                    spec.id,
                    spec.description,
                    spec.param_names.join(", "),
                    spec.domain_summary
                ));
            }
            out
        }
    }
}
