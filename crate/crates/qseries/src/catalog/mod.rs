//! Executable catalog of the identities the engine implements, with a
//! verification runner.
//!
//! Every identity is an [`IdentitySpec`]: a pair of independently computed
//! sides, a parameter sampler over the identity's stated domain, and a
//! per-identity tolerance cap. [`check_case`] evaluates both sides, forms the
//! residual |lhs − rhs| / max(1, |rhs|), and classifies the case as pass,
//! fail, or inconclusive; passes are confirmed once more at elevated
//! precision so a roundoff coincidence cannot slip through. [`run_suite`]
//! drives seeded batches of cases in parallel and is fully deterministic:
//! each case draws from its own counter-derived generator, so reports with
//! the same seed are identical no matter how work is scheduled.

pub mod params;

mod identities;

use std::time::Instant;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::error::QError;
use crate::kernel::{HpComplex, HpReal, PrecisionContext, SeriesValue};
use crate::multisection::E2Phase;

pub use identities::f7_prefactor;
pub use params::{ParamValue, Params};

/// One catalog entry: an identity with independently computed sides.
#[derive(Debug)]
pub struct IdentitySpec {
    /// Stable uppercase identifier, unique in the registry.
    pub id: &'static str,
    /// The identity itself, in plain-text math.
    pub description: &'static str,
    /// Parameter names in display order.
    pub param_names: &'static [&'static str],
    /// Informal statement of the sampled domain.
    pub domain_summary: &'static str,
    /// Tightest tolerance (decimal digits) the evaluation routes support;
    /// requests beyond it are clamped, never silently failed.
    pub tolerance_cap: u32,
    /// Draws one parameter set from the identity's domain.
    pub sample: fn(&mut ChaCha20Rng) -> Params,
    /// Left side.
    pub lhs: fn(&Params, &PrecisionContext) -> Result<SeriesValue, QError>,
    /// Right side, by an independent route.
    pub rhs: fn(&Params, &PrecisionContext) -> Result<SeriesValue, QError>,
}

/// All identities, ordered by id.
pub fn registry() -> &'static [IdentitySpec] {
    identities::REGISTRY
}

/// The entry for `id`, or [`QError::UnknownIdentity`].
pub fn find(id: &str) -> Result<&'static IdentitySpec, QError> {
    registry()
        .iter()
        .find(|s| s.id == id)
        .ok_or_else(|| QError::UnknownIdentity { id: id.to_string() })
}

/// Outcome of one verified case.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Everything recorded about one evaluated case.
#[derive(Clone, Debug)]
pub struct CaseRecord {
    pub id: String,
    /// Sample index within the identity's batch.
    pub index: usize,
    pub params: Params,
    pub lhs: Option<HpComplex>,
    pub rhs: Option<HpComplex>,
    pub abs_residual: Option<HpReal>,
    pub rel_residual: Option<HpReal>,
    pub verdict: Verdict,
    /// Error and convergence notes; empty on a clean pass.
    pub diagnostics: Vec<String>,
    pub lhs_terms: usize,
    pub rhs_terms: usize,
    /// Wall-clock time of the whole check. The one nondeterministic field;
    /// report renderers that promise byte-stable output must drop it.
    pub wall_ms: f64,
}

/// Runner switches beyond the numeric context.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteOptions {
    /// Perturb every right side by slightly more than the pass tolerance;
    /// a healthy suite then fails every case, which is the sensitivity check
    /// for the harness itself.
    pub mutation: bool,
    /// Phase convention used by the E2 entry.
    pub e2_phase: E2Phase,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            mutation: false,
            e2_phase: E2Phase::SlotLabels,
        }
    }
}

/// The inputs a report was generated from (everything needed to reproduce
/// it).
#[derive(Clone, Debug)]
pub struct SuiteConfig {
    pub ids: Vec<String>,
    pub samples: usize,
    pub seed: u64,
    pub precision_bits: usize,
    pub tolerance_digits: u32,
    pub max_terms: usize,
    pub max_window: usize,
    pub mutation: bool,
    pub e2_phase: E2Phase,
}

/// Aggregate counts over a suite run.
#[derive(Clone, Debug)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
    pub max_rel_residual: Option<HpReal>,
}

/// A complete, reproducible verification run.
#[derive(Clone, Debug)]
pub struct Report {
    pub config: SuiteConfig,
    pub records: Vec<CaseRecord>,
    pub summary: Summary,
}

/// The per-case generator: seed, identity, and sample index mixed into the
/// ChaCha key, so every case is independent of batch layout and execution
/// order.
pub fn case_rng(seed: u64, id: &str, index: u64) -> ChaCha20Rng {
    let mut key = [0u8; 32];
    key[0..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&fnv64(id).to_le_bytes());
    key[16..24].copy_from_slice(&index.to_le_bytes());
    ChaCha20Rng::from_seed(key)
}

/// Parameters of case `index` of `spec` under `seed` (what [`run_suite`]
/// evaluates at that slot).
pub fn sample_case(spec: &IdentitySpec, seed: u64, index: u64) -> Params {
    (spec.sample)(&mut case_rng(seed, spec.id, index))
}

/// Working precision that supports `tol` digits: tol·log₂10 plus the 32-bit
/// guard margin, rounded up.
fn bits_for(tol: u32) -> usize {
    (tol as usize * 3322).div_ceil(1000) + 32
}

fn fnv64(s: &str) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in s.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    h
}

/// Evaluates both sides of `spec` at `params` and classifies the residual.
///
/// The effective tolerance is the context's clamped to the identity's cap.
/// Evaluation errors and unconverged sides give `Inconclusive` with the
/// reason recorded; a pass is re-confirmed at 64 extra bits before it is
/// reported.
pub fn check_case(
    spec: &IdentitySpec,
    index: usize,
    params: &Params,
    ctx: &PrecisionContext,
    opts: &SuiteOptions,
) -> CaseRecord {
    let tol_eff = spec.tolerance_cap.min(ctx.tolerance_digits);
    // Evaluate five digits tighter than the verdict threshold: truncated
    // infinite products are only good to about the tolerance they are asked
    // for, and several of them compound in the product-side routes.
    let tol_eval = tol_eff + 5;
    let eval_ctx = PrecisionContext {
        tolerance_digits: tol_eval,
        precision_bits: ctx.precision_bits.max(bits_for(tol_eval)),
        ..ctx.clone()
    };
    let start = Instant::now();
    let mut record = CaseRecord {
        id: spec.id.to_string(),
        index,
        params: params.clone(),
        lhs: None,
        rhs: None,
        abs_residual: None,
        rel_residual: None,
        verdict: Verdict::Inconclusive,
        diagnostics: Vec::new(),
        lhs_terms: 0,
        rhs_terms: 0,
        wall_ms: 0.0,
    };

    match evaluate_sides(spec, params, &eval_ctx, tol_eff, opts) {
        Err(notes) => record.diagnostics = notes,
        Ok((l, r)) => {
            let bits = eval_ctx.precision_bits;
            let (abs, rel) = residuals(&l.value, &r.value, bits);
            record.lhs = Some(l.value.clone());
            record.rhs = Some(r.value.clone());
            record.lhs_terms = l.terms_used;
            record.rhs_terms = r.terms_used;
            record.abs_residual = Some(abs);
            record.rel_residual = Some(rel.clone());
            if !l.converged {
                record
                    .diagnostics
                    .push("lhs: evaluation did not converge internally".into());
            }
            if !r.converged {
                record
                    .diagnostics
                    .push("rhs: evaluation did not converge internally".into());
            }
            if record.diagnostics.is_empty() {
                let threshold = HpReal::pow10(-i64::from(tol_eff), bits);
                if rel.le(&threshold) {
                    record.verdict = Verdict::Pass;
                    if !opts.mutation {
                        confirm_at_elevated_precision(
                            spec,
                            params,
                            &eval_ctx,
                            tol_eff,
                            &mut record,
                        );
                    }
                } else {
                    record.verdict = Verdict::Fail;
                }
            }
        }
    }
    record.wall_ms = start.elapsed().as_secs_f64() * 1e3;
    record
}

fn evaluate_sides(
    spec: &IdentitySpec,
    params: &Params,
    ctx: &PrecisionContext,
    tol_eff: u32,
    opts: &SuiteOptions,
) -> Result<(SeriesValue, SeriesValue), Vec<String>> {
    let lhs = (spec.lhs)(params, ctx);
    let rhs = (spec.rhs)(params, ctx);
    match (lhs, rhs) {
        (Ok(l), Ok(mut r)) => {
            if opts.mutation {
                r.value = mutate(&r.value, tol_eff);
            }
            Ok((l, r))
        }
        (l, r) => {
            let mut notes = Vec::new();
            if let Err(e) = l {
                notes.push(format!("lhs: {e}"));
            }
            if let Err(e) = r {
                notes.push(format!("rhs: {e}"));
            }
            Err(notes)
        }
    }
}

/// Shifts a value by 10^(5−tol) · max(1, |value|): five orders of magnitude
/// above the pass threshold on the same relative scale the verdict uses, and
/// effective for exact-zero sides too.
fn mutate(value: &HpComplex, tol_eff: u32) -> HpComplex {
    let bits = value.bits();
    let bump = HpReal::one(bits)
        .max(&value.abs())
        .mul(&HpReal::pow10(5 - i64::from(tol_eff), bits));
    value.add(&HpComplex::from_real(bump))
}

fn residuals(l: &HpComplex, r: &HpComplex, bits: usize) -> (HpReal, HpReal) {
    let abs = l.to_bits(bits).sub(&r.to_bits(bits)).abs();
    let rel = abs.div(&HpReal::one(bits).max(&r.abs()));
    (abs, rel)
}

fn confirm_at_elevated_precision(
    spec: &IdentitySpec,
    params: &Params,
    eval_ctx: &PrecisionContext,
    tol_eff: u32,
    record: &mut CaseRecord,
) {
    let hi = eval_ctx.with_precision_bits(eval_ctx.precision_bits + 64);
    match ((spec.lhs)(params, &hi), (spec.rhs)(params, &hi)) {
        (Ok(l), Ok(r)) => {
            let (_, rel) = residuals(&l.value, &r.value, hi.precision_bits);
            let threshold = HpReal::pow10(-i64::from(tol_eff), hi.precision_bits);
            if !rel.le(&threshold) {
                record.verdict = Verdict::Fail;
                record
                    .diagnostics
                    .push("failed confirmation at elevated precision".into());
            }
        }
        (l, r) => {
            record.verdict = Verdict::Inconclusive;
            if let Err(e) = l {
                record
                    .diagnostics
                    .push(format!("lhs at elevated precision: {e}"));
            }
            if let Err(e) = r {
                record
                    .diagnostics
                    .push(format!("rhs at elevated precision: {e}"));
            }
        }
    }
}

/// [`run_suite_with`] under default options.
pub fn run_suite(
    ids: &[&str],
    samples: usize,
    seed: u64,
    ctx: &PrecisionContext,
) -> Result<Report, QError> {
    run_suite_with(ids, samples, seed, ctx, &SuiteOptions::default())
}

/// Verifies `samples` seeded cases of each requested identity (duplicates
/// collapsed, order normalized) and aggregates the records into a report.
pub fn run_suite_with(
    ids: &[&str],
    samples: usize,
    seed: u64,
    ctx: &PrecisionContext,
    opts: &SuiteOptions,
) -> Result<Report, QError> {
    if samples == 0 {
        return Err(QError::param("samples", "must be positive"));
    }
    let mut specs = ids
        .iter()
        .map(|id| find(id))
        .collect::<Result<Vec<_>, _>>()?;
    specs.sort_by_key(|s| s.id);
    specs.dedup_by_key(|s| s.id);

    let mut jobs = Vec::with_capacity(specs.len() * samples);
    for spec in &specs {
        for index in 0..samples {
            let mut params = sample_case(spec, seed, index as u64);
            if spec.id == "E2" {
                // The variant toggle overrides the sampled default.
                params.set_int(
                    "phase",
                    match opts.e2_phase {
                        E2Phase::SlotLabels => 0,
                        E2Phase::Consecutive => 1,
                    },
                );
            }
            jobs.push((*spec, index, params));
        }
    }
    let records: Vec<CaseRecord> = jobs
        .par_iter()
        .map(|(spec, index, params)| check_case(spec, *index, params, ctx, opts))
        .collect();

    let mut summary = Summary {
        pass: 0,
        fail: 0,
        inconclusive: 0,
        max_rel_residual: None,
    };
    for rec in &records {
        match rec.verdict {
            Verdict::Pass => summary.pass += 1,
            Verdict::Fail => summary.fail += 1,
            Verdict::Inconclusive => summary.inconclusive += 1,
        }
        if let Some(rel) = &rec.rel_residual {
            summary.max_rel_residual = Some(match summary.max_rel_residual.take() {
                None => rel.clone(),
                Some(m) => m.max(rel),
            });
        }
    }
    Ok(Report {
        config: SuiteConfig {
            ids: specs.iter().map(|s| s.id.to_string()).collect(),
            samples,
            seed,
            precision_bits: ctx.precision_bits,
            tolerance_digits: ctx.tolerance_digits,
            max_terms: ctx.max_terms,
            max_window: ctx.max_window,
            mutation: opts.mutation,
            e2_phase: opts.e2_phase,
        },
        records,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    #[test]
    fn registry_is_sorted_unique_and_complete() {
        let ids: Vec<&str> = registry().iter().map(|s| s.id).collect();
        let mut sorted = ids.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(ids, sorted, "registry ids must be sorted and unique");
        assert_eq!(ids.len(), 21);
        for spec in registry() {
            assert!(!spec.description.is_empty());
            assert!(!spec.param_names.is_empty());
            assert!(spec.tolerance_cap >= 15);
        }
    }

    #[test]
    fn find_reports_unknown_ids() {
        assert!(find("RR1").is_ok());
        let err = find("NOPE").unwrap_err();
        assert!(matches!(err, QError::UnknownIdentity { .. }));
    }

    #[test]
    fn every_entry_passes_a_sampled_case() {
        let ctx = ctx();
        let opts = SuiteOptions::default();
        for spec in registry() {
            let params = sample_case(spec, 424_242, 0);
            let rec = check_case(spec, 0, &params, &ctx, &opts);
            assert_eq!(
                rec.verdict,
                Verdict::Pass,
                "{} at {}: {:?} rel={:?}",
                spec.id,
                params,
                rec.diagnostics,
                rec.rel_residual.map(|r| r.to_string()),
            );
        }
    }

    #[test]
    fn mutation_flips_every_entry() {
        let ctx = ctx();
        let opts = SuiteOptions {
            mutation: true,
            ..SuiteOptions::default()
        };
        for spec in registry() {
            let params = sample_case(spec, 424_242, 0);
            let rec = check_case(spec, 0, &params, &ctx, &opts);
            assert_eq!(
                rec.verdict,
                Verdict::Fail,
                "{} at {} should fail under mutation: {:?}",
                spec.id,
                params,
                rec.diagnostics,
            );
        }
    }

    #[test]
    fn pole_parameters_are_inconclusive_with_a_diagnostic() {
        let ctx = ctx();
        let spec = find("PSI11").unwrap();
        let mut params = Params::new();
        params.set_complex("a", "0.31", "0.0");
        params.set_complex("b", "0.05", "0.0");
        params.set_complex("q", "0.31", "0.0");
        params.set_complex("z", "0.5", "0.0");
        let rec = check_case(spec, 0, &params, &ctx, &SuiteOptions::default());
        assert_eq!(rec.verdict, Verdict::Inconclusive);
        assert!(
            rec.diagnostics.iter().any(|d| d.contains("pole")),
            "diagnostics: {:?}",
            rec.diagnostics
        );
    }

    #[test]
    fn suite_runs_are_deterministic() {
        let ctx = ctx();
        let ids = ["RR1", "QBINOM", "U1"];
        let a = run_suite(&ids, 2, 11, &ctx).unwrap();
        let b = run_suite(&ids, 2, 11, &ctx).unwrap();
        assert_eq!(a.records.len(), 6);
        for (x, y) in a.records.iter().zip(&b.records) {
            assert_eq!(x.id, y.id);
            assert_eq!(x.index, y.index);
            assert_eq!(x.params, y.params);
            assert_eq!(x.verdict, y.verdict);
            assert_eq!(
                x.rel_residual.as_ref().map(|r| r.to_string()),
                y.rel_residual.as_ref().map(|r| r.to_string())
            );
            assert_eq!(
                x.lhs.as_ref().map(|v| v.to_string()),
                y.lhs.as_ref().map(|v| v.to_string())
            );
        }
        assert_eq!(a.summary.pass, 6);
    }

    #[test]
    fn suite_rejects_unknown_ids_and_zero_samples() {
        let ctx = ctx();
        assert!(matches!(
            run_suite(&["NOPE"], 1, 1, &ctx),
            Err(QError::UnknownIdentity { .. })
        ));
        assert!(run_suite(&["RR1"], 0, 1, &ctx).is_err());
    }

    #[test]
    fn suite_collapses_duplicate_ids() {
        let ctx = ctx();
        let rep = run_suite(&["RR1", "RR1"], 1, 3, &ctx).unwrap();
        assert_eq!(rep.records.len(), 1);
        assert_eq!(rep.config.ids, vec!["RR1".to_string()]);
    }

    #[test]
    fn case_rng_separates_ids_and_indices() {
        use rand::RngCore;
        let mut a = case_rng(1, "RR1", 0);
        let mut b = case_rng(1, "RR2", 0);
        let mut c = case_rng(1, "RR1", 1);
        let (x, y, z) = (a.next_u64(), b.next_u64(), c.next_u64());
        assert_ne!(x, y);
        assert_ne!(x, z);
        let mut a2 = case_rng(1, "RR1", 0);
        assert_eq!(a2.next_u64(), x);
    }
}
