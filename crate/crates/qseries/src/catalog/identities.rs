//! The registry entries: per-identity left/right evaluators and parameter
//! samplers.
//!
//! Every entry computes its two sides by genuinely different routes (direct
//! series against product form, multisum against closed form, literal small-r
//! loop against filtered evaluator), so a shared implementation error cannot
//! cancel out of the residual. Samplers draw from each identity's stated
//! domain on the ten-thousandths grid, with integer-arithmetic region tests,
//! and therefore produce identical parameters for a given seed on every
//! platform.

use num_rational::Rational64;
use rand::Rng;
use rand_chacha::ChaCha20Rng;

use crate::error::QError;
use crate::kernel::{roots_table, HpComplex, HpReal, PrecisionContext, SeriesValue};
use crate::multisection::{
    bilateral_ratio_values, eval_12r_rhs, eval_15r_both, eval_e1_rhs, eval_e2_rhs, multisum_b1,
    multisum_u1, window_for_ratio_slots, window_for_reciprocal_slots, E2Phase,
};
use crate::pochhammer::{poch_finite, poch_infinite, poch_multi, PochIndex};
use crate::series::{
    eval_1psi1, eval_A, eval_B, eval_F, eval_f_swapped, psi11_product, qbinom1_series,
};

use super::params::{sample_annulus, sample_real_range, GridPoint, Params};
use super::IdentitySpec;

/// Shell-sum caps for the modulus-shift expansions; generous relative to the
/// q^(αs²)- and (b/a)^s-decay of every outer sweep at the sampled domains.
const UNILATERAL_SHELL_CAP: usize = 64;
const BILATERAL_SHELL_CAP: usize = 80;

pub(super) static REGISTRY: &[IdentitySpec] = &[
    IdentitySpec {
        id: "B1",
        description: "zeta_r-filtered bilateral multisum of (a;q)_k/(b;q)_k slots = product \
                      prefactor * (a^r;q^r)_m/(b^r;q^r)_m when n = r*m, else 0",
        param_names: &["a", "b", "n", "q", "r"],
        domain_summary: "|b| < |a|, a and b away from powers of q, r in 2..=3, n in -8..=12",
        tolerance_cap: 15,
        sample: sample_b1,
        lhs: b1_lhs,
        rhs: b1_rhs,
    },
    IdentitySpec {
        id: "C15R",
        description: "sum_n q^(r^2 n^2) x^(rn)/(1 - a^r q^(rn)) = squared eta-quotient \
                      prefactor * zeta_r-filtered r-fold theta multisum over 1/(1 - a q^k)",
        param_names: &["a", "q", "r", "x"],
        domain_summary: "a away from powers of q, x != 0, r in 2..=3",
        tolerance_cap: 15,
        sample: sample_c15r,
        lhs: c15r_lhs,
        rhs: c15r_rhs,
    },
    IdentitySpec {
        id: "E1",
        description: "A_{q^r}^{(r alpha)}(a^r; t^r) = shells of r-1 slot ratios \
                      (a;q)_k/(q;q)_k with phase zeta_r^(sum i k_i), weight q^(alpha s^2) t^s, \
                      inner A_q^{(alpha)}(a; q^(2 alpha s) t)",
        param_names: &["a", "alpha", "q", "r", "t"],
        domain_summary: "alpha in {1,2}, r in 2..=3, |t| <= 0.6",
        tolerance_cap: 20,
        sample: sample_e,
        lhs: e_lhs,
        rhs: e1_rhs,
    },
    IdentitySpec {
        id: "E2",
        description:
            "companion shell expansion of A_{q^r}^{(r alpha)}(a^r; t^r) over slots \
                      k_2..k_r with rotated inner argument A_q^{(alpha)}(a; zeta_r q^(2 alpha s) t)",
        param_names: &["a", "alpha", "phase", "q", "r", "t"],
        domain_summary: "alpha in {1,2}, r in 2..=3, |t| <= 0.6; phase 0 = slot labels (valid), \
                         1 = consecutive (the failing variant)",
        tolerance_cap: 20,
        sample: sample_e2,
        lhs: e_lhs,
        rhs: e2_rhs,
    },
    IdentitySpec {
        id: "F2",
        description: "F(a,c;z) = (z;q)_inf/(c;q)_inf * F(az/c, z; c)",
        param_names: &["a", "c", "q", "z"],
        domain_summary: "c away from 0 and q^(-m), z away from q^(-m)",
        tolerance_cap: 30,
        sample: sample_f2,
        lhs: f2_lhs,
        rhs: f2_rhs,
    },
    IdentitySpec {
        id: "F3",
        description: "F(q^alpha, q^(alpha+gamma); q^(gamma-n)) = \
                      (q^(gamma-n);q)_inf/(q^(alpha+gamma);q)_inf * \
                      F(q^(-n), q^(gamma-n); q^(alpha+gamma))",
        param_names: &["alpha", "gamma", "n", "q"],
        domain_summary: "q real in [0.1, 0.7]; gamma away from integers; alpha+gamma away from \
                         nonpositive integers; n in 0..=12",
        tolerance_cap: 30,
        sample: sample_f3,
        lhs: f3_lhs,
        rhs: f3_rhs,
    },
    IdentitySpec {
        id: "F4",
        description: "F(q^(-n), x; q^n x) = 1/(x;q)_n",
        param_names: &["n", "q", "x"],
        domain_summary: "n in 1..=12, |x| <= 0.8",
        tolerance_cap: 30,
        sample: sample_f4,
        lhs: f4_lhs,
        rhs: f4_rhs,
    },
    IdentitySpec {
        id: "F7",
        description: "S(m,n,x) = (x q^(-n);q)_inf/(x q^(-m);q)_inf * S(n,m,x) for \
                      S(m,n,x) = F(q^(-m), x q^(-m); x q^(-n))",
        param_names: &["m", "n", "q", "x"],
        domain_summary: "m, n in 0..=12, x away from positive powers of q",
        tolerance_cap: 30,
        sample: sample_f7,
        lhs: f7_lhs,
        rhs: f7_rhs,
    },
    IdentitySpec {
        id: "LEM1-1",
        description: "sum_{k=0}^n (a;q)_k (a;q)_{n-k} (-1)^k/((q;q)_k (q;q)_{n-k}) = \
                      (a^2;q^2)_m/(q^2;q^2)_m when n = 2m, else 0",
        param_names: &["a", "n", "q"],
        domain_summary: "n in 0..=16",
        tolerance_cap: 30,
        sample: sample_lem11,
        lhs: lem11_lhs,
        rhs: lem11_rhs,
    },
    IdentitySpec {
        id: "LEM1-2",
        description: "sum over j+k+l = n of (a;q) over (q;q) slot ratios times rho^(k+2l), \
                      rho = e^(2 pi i/3), = (a^3;q^3)_m/(q^3;q^3)_m when n = 3m, else 0",
        param_names: &["a", "n", "q"],
        domain_summary: "n in 0..=15",
        tolerance_cap: 30,
        sample: sample_lem12,
        lhs: lem12_lhs,
        rhs: lem12_rhs,
    },
    IdentitySpec {
        id: "LEM1-3",
        description: "sum_{k in Z} (a;q)_k (a;q)_{2m-k} (-1)^k/((b;q)_k (b;q)_{2m-k}) = \
                      (q, b/a, -b, -q/a;q)_inf/(-q, -b/a, b, q/a;q)_inf * (a^2;q^2)_m/(b^2;q^2)_m",
        param_names: &["a", "b", "m", "q"],
        domain_summary: "|b| < |a|, a and b away from +/- powers of q, m in -4..=6",
        tolerance_cap: 15,
        sample: sample_lem13,
        lhs: lem13_lhs,
        rhs: lem13_rhs,
    },
    IdentitySpec {
        id: "LEM1-4",
        description: "bilateral three-slot cube-root filter sum_{k,l in Z} \
                      h(n-k-l) h(k) h(l) rho^(k+2l) vanishes when 3 does not divide n",
        param_names: &["a", "b", "n", "q"],
        domain_summary: "|b| < |a|, a and b away from +/- powers of q, n not divisible by 3",
        tolerance_cap: 15,
        sample: sample_lem14,
        lhs: lem14_lhs,
        rhs: lem14_rhs,
    },
    IdentitySpec {
        id: "LEM1-5",
        description: "bilateral three-slot cube-root filter at n = 3m = product prefactor * \
                      (a^3;q^3)_m/(b^3;q^3)_m",
        param_names: &["a", "b", "m", "q"],
        domain_summary: "|b| < |a|, a and b away from +/- powers of q, m in -2..=4",
        tolerance_cap: 15,
        sample: sample_lem15,
        lhs: lem15_lhs,
        rhs: lem15_rhs,
    },
    IdentitySpec {
        id: "PRODMS",
        description: "prod_{i=0}^{r-1} (a zeta_r^i t;q)_inf/(zeta_r^i t;q)_inf = \
                      (a^r t^r;q^r)_inf/(t^r;q^r)_inf",
        param_names: &["a", "q", "r", "t"],
        domain_summary: "|t| <= 0.8, r in 2..=5",
        tolerance_cap: 30,
        sample: sample_prodms,
        lhs: prodms_lhs,
        rhs: prodms_rhs,
    },
    IdentitySpec {
        id: "PSI11",
        description: "sum_{n in Z} (a;q)_n z^n/(b;q)_n = \
                      (q, b/a, az, q/(az);q)_inf/((b, q/a, z, b/(az);q)_inf)",
        param_names: &["a", "b", "q", "z"],
        domain_summary: "|b| <= 0.25|a|, 1.6|b/a|+0.05 <= |z| <= 0.6 (keeps bilateral windows \
                         inside the default cap), a away from powers of q",
        tolerance_cap: 25,
        sample: sample_psi11,
        lhs: psi11_lhs,
        rhs: psi11_rhs,
    },
    IdentitySpec {
        id: "QBINOM",
        description: "sum_{n>=0} (a;q)_n t^n/(q;q)_n = (at;q)_inf/(t;q)_inf",
        param_names: &["a", "q", "t"],
        domain_summary: "|t| <= 0.8",
        tolerance_cap: 30,
        sample: sample_qbinom,
        lhs: qbinom_lhs,
        rhs: qbinom_rhs,
    },
    IdentitySpec {
        id: "QBINOM1",
        description: "1/(x;q)_n = sum_{k>=0} [n+k-1 choose k]_q x^k",
        param_names: &["n", "q", "x"],
        domain_summary: "n in 0..=12, |x| <= 0.85",
        tolerance_cap: 30,
        sample: sample_qbinom1,
        lhs: qbinom1_lhs,
        rhs: qbinom1_rhs,
    },
    IdentitySpec {
        id: "RR1",
        description: "sum_{n>=0} q^(n^2)/(q;q)_n = 1/((q;q^5)_inf (q^4;q^5)_inf)",
        param_names: &["q"],
        domain_summary: "0.1 <= |q| <= 0.7",
        tolerance_cap: 30,
        sample: sample_rr,
        lhs: rr1_lhs,
        rhs: rr1_rhs,
    },
    IdentitySpec {
        id: "RR2",
        description: "sum_{n>=0} q^(n^2+n)/(q;q)_n = 1/((q^2;q^5)_inf (q^3;q^5)_inf)",
        param_names: &["q"],
        domain_summary: "0.1 <= |q| <= 0.7",
        tolerance_cap: 30,
        sample: sample_rr,
        lhs: rr2_lhs,
        rhs: rr2_rhs,
    },
    IdentitySpec {
        id: "T12R",
        description: "B_{q^r}^{(r alpha)}(a^r, b^r; x^r) = product prefactor * bilateral shells \
                      of (a;q)_k/(b;q)_k slots with inner B_q^{(alpha)}(a, b; x q^(2 alpha s))",
        param_names: &["a", "alpha", "b", "q", "r", "x"],
        domain_summary: "alpha in {1,2}, |b| < |a|, a and b away from powers of q, x != 0, \
                         r in 2..=3",
        tolerance_cap: 15,
        sample: sample_t12r,
        lhs: t12r_lhs,
        rhs: t12r_rhs,
    },
    IdentitySpec {
        id: "U1",
        description: "zeta_r-filtered unilateral multisum of (a;q)_k/(q;q)_k slots = \
                      (a^r;q^r)_m/(q^r;q^r)_m when n = r*m, else 0",
        param_names: &["a", "n", "q", "r"],
        domain_summary: "n in 0..=20, r in 2..=5",
        tolerance_cap: 30,
        sample: sample_u1,
        lhs: u1_lhs,
        rhs: u1_rhs,
    },
];

// ---------------------------------------------------------------------------
// shared evaluator pieces

fn int_u32(p: &Params, name: &str) -> Result<u32, QError> {
    u32::try_from(p.int(name)?)
        .map_err(|_| QError::param(name, "must be a small nonnegative integer"))
}

fn exact_zero(ctx: &PrecisionContext) -> SeriesValue {
    SeriesValue::exact(HpComplex::zero(ctx.precision_bits), 0)
}

fn exact_one(ctx: &PrecisionContext) -> SeriesValue {
    SeriesValue::exact(HpComplex::one(ctx.precision_bits), 0)
}

fn guarded_div(
    num: SeriesValue,
    den: SeriesValue,
    what: &str,
    ctx: &PrecisionContext,
) -> Result<SeriesValue, QError> {
    if den.value.abs_below(&ctx.pole_guard()) {
        return Err(QError::pole(format!("{what} vanishes")));
    }
    Ok(num.div(&den))
}

/// The q → q^r base-shift prefactor of the bilateral filter identities:
///
/// > (q, b/a; q)_∞^r (b^r, q^r a^(−r); q^r)_∞ /
/// > ((b, q/a; q)_∞^r (q^r, b^r a^(−r); q^r)_∞)
fn modulus_shift_prefactor(
    a: &HpComplex,
    b: &HpComplex,
    q: &HpComplex,
    r: u32,
    ctx: &PrecisionContext,
) -> Result<SeriesValue, QError> {
    let guard = ctx.pole_guard();
    if a.abs_below(&guard) {
        return Err(QError::domain("prefactor requires a != 0"));
    }
    let ar = a.pow_i64(r as i64);
    let br = b.pow_i64(r as i64);
    let qr = q.pow_i64(r as i64);
    let num1 = poch_multi(&[q.clone(), b.div(a)], q, PochIndex::Infinite, ctx)?.powi(r);
    let num2 = poch_multi(&[br.clone(), qr.div(&ar)], &qr, PochIndex::Infinite, ctx)?;
    let den1 = poch_multi(&[b.clone(), q.div(a)], q, PochIndex::Infinite, ctx)?.powi(r);
    let den2 = poch_multi(&[qr.clone(), br.div(&ar)], &qr, PochIndex::Infinite, ctx)?;
    guarded_div(
        num1.mul(&num2),
        den1.mul(&den2),
        "base-shift prefactor denominator",
        ctx,
    )
}

/// (a^r;q^r)_m/(b^r;q^r)_m as an exact value (poles surface from inside
/// [`poch_finite`] or the guard).
fn shifted_base_ratio(
    a: &HpComplex,
    b: &HpComplex,
    q: &HpComplex,
    r: u32,
    m: i64,
    ctx: &PrecisionContext,
) -> Result<SeriesValue, QError> {
    let qr = q.pow_i64(r as i64);
    let num = poch_finite(&a.pow_i64(r as i64), &qr, m, ctx)?;
    let den = poch_finite(&b.pow_i64(r as i64), &qr, m, ctx)?;
    if den.abs_below(&ctx.pole_guard()) {
        return Err(QError::pole("(b^r;q^r)_m vanishes"));
    }
    Ok(SeriesValue::exact(
        num.div(&den),
        2 * m.unsigned_abs() as usize,
    ))
}

/// (a;q)_k and (q;q)_k for k = 0..=n, built once for the literal loops.
fn unilateral_tables(
    a: &HpComplex,
    q: &HpComplex,
    n: usize,
    ctx: &PrecisionContext,
) -> (Vec<HpComplex>, Vec<HpComplex>) {
    let bits = ctx.precision_bits;
    let one = HpComplex::one(bits);
    let mut pa = Vec::with_capacity(n + 1);
    let mut pq = Vec::with_capacity(n + 1);
    pa.push(one.clone());
    pq.push(one.clone());
    let mut aq = a.to_bits(bits);
    let mut qk = q.to_bits(bits);
    for k in 0..n {
        pa.push(pa[k].mul(&one.sub(&aq)));
        pq.push(pq[k].mul(&one.sub(&qk)));
        aq = aq.mul(q);
        qk = qk.mul(q);
    }
    (pa, pq)
}

/// Number of r-part nonnegative compositions of n, C(n+r−1, r−1).
fn composition_count(r: u32, n: i64) -> usize {
    if n < 0 {
        return 0;
    }
    let mut c: i128 = 1;
    for i in 1..r as i128 {
        c = c * (n as i128 + i) / i;
    }
    c as usize
}

/// The windowed literal bilateral three-slot filter Σ h(n−k−ℓ) h(k) h(ℓ)
/// ρ^(k+2ℓ) with the window-K vs window-(K−2) boundary difference as the
/// error estimate.
fn cube_filter_sum(
    a: &HpComplex,
    b: &HpComplex,
    q: &HpComplex,
    n: i64,
    ctx: &PrecisionContext,
) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    let kw = window_for_ratio_slots(a, b, q, 3, n, ctx)? as i64;
    let k_max = 2 * kw + n.abs();
    let h = bilateral_ratio_values(a, b, q, k_max, ctx)?;
    let roots = roots_table(3, bits)?;
    let idx = |k: i64| (k + k_max) as usize;
    let mut full = HpComplex::zero(bits);
    let mut trimmed = HpComplex::zero(bits);
    for k in -kw..=kw {
        for l in -kw..=kw {
            let term = h[idx(n - k - l)].mul(&h[idx(k)]).mul(&h[idx(l)]);
            let term = term.mul(&roots[(k + 2 * l).rem_euclid(3) as usize]);
            full = full.add(&term);
            if k.abs() <= kw - 2 && l.abs() <= kw - 2 {
                trimmed = trimmed.add(&term);
            }
        }
    }
    let err = full.sub(&trimmed).abs();
    let scale = HpReal::one(bits).add(&full.abs());
    let converged = err.le(&ctx.term_threshold().mul(&scale));
    Ok(SeriesValue {
        value: full,
        abs_error_estimate: err,
        terms_used: ((2 * kw + 1) * (2 * kw + 1)) as usize,
        converged,
    })
}

// ---------------------------------------------------------------------------
// per-identity evaluators

fn rr1_lhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    let q = p.complex("q", bits)?;
    eval_A(
        Rational64::from_integer(1),
        &HpComplex::zero(bits),
        &q,
        &HpComplex::one(bits),
        ctx,
    )
}

fn rr1_rhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let q = p.complex("q", ctx.precision_bits)?;
    let den = poch_multi(
        &[q.clone(), q.pow_i64(4)],
        &q.pow_i64(5),
        PochIndex::Infinite,
        ctx,
    )?;
    guarded_div(exact_one(ctx), den, "(q, q^4; q^5)_inf", ctx)
}

fn rr2_lhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    let q = p.complex("q", bits)?;
    eval_A(
        Rational64::from_integer(1),
        &HpComplex::zero(bits),
        &q,
        &q,
        ctx,
    )
}

fn rr2_rhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let q = p.complex("q", ctx.precision_bits)?;
    let den = poch_multi(
        &[q.pow_i64(2), q.pow_i64(3)],
        &q.pow_i64(5),
        PochIndex::Infinite,
        ctx,
    )?;
    guarded_div(exact_one(ctx), den, "(q^2, q^3; q^5)_inf", ctx)
}

fn qbinom_lhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    let (a, q, t) = (
        p.complex("a", bits)?,
        p.complex("q", bits)?,
        p.complex("t", bits)?,
    );
    eval_A(Rational64::from_integer(0), &a, &q, &t, ctx)
}

fn qbinom_rhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    let (a, q, t) = (
        p.complex("a", bits)?,
        p.complex("q", bits)?,
        p.complex("t", bits)?,
    );
    let num = poch_infinite(&a.mul(&t), &q, ctx)?;
    let den = poch_infinite(&t, &q, ctx)?;
    guarded_div(num, den, "(t;q)_inf", ctx)
}

fn psi11_lhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    let (a, b) = (p.complex("a", bits)?, p.complex("b", bits)?);
    let (q, z) = (p.complex("q", bits)?, p.complex("z", bits)?);
    eval_1psi1(&a, &b, &q, &z, ctx)
}

fn psi11_rhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    let (a, b) = (p.complex("a", bits)?, p.complex("b", bits)?);
    let (q, z) = (p.complex("q", bits)?, p.complex("z", bits)?);
    psi11_product(&a, &b, &q, &z, ctx)
}

fn u1_lhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    let (a, q) = (p.complex("a", bits)?, p.complex("q", bits)?);
    let (r, n) = (int_u32(p, "r")?, p.int("n")?);
    let v = multisum_u1(&a, &q, r, n, ctx)?;
    Ok(SeriesValue::exact(v, composition_count(r, n)))
}

fn u1_rhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    let (a, q) = (p.complex("a", bits)?, p.complex("q", bits)?);
    let (r, n) = (int_u32(p, "r")?, p.int("n")?);
    if n.rem_euclid(r as i64) != 0 {
        return Ok(exact_zero(ctx));
    }
    shifted_base_ratio(&a, &q, &q, r, n.div_euclid(r as i64), ctx)
}

fn b1_lhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    let (a, b) = (p.complex("a", bits)?, p.complex("b", bits)?);
    let q = p.complex("q", bits)?;
    let (r, n) = (int_u32(p, "r")?, p.int("n")?);
    let k = window_for_ratio_slots(&a, &b, &q, r, n, ctx)?;
    multisum_b1(&a, &b, &q, r, n, k, ctx)
}

fn b1_rhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    let (a, b) = (p.complex("a", bits)?, p.complex("b", bits)?);
    let q = p.complex("q", bits)?;
    let (r, n) = (int_u32(p, "r")?, p.int("n")?);
    if n.rem_euclid(r as i64) != 0 {
        return Ok(exact_zero(ctx));
    }
    let m = n.div_euclid(r as i64);
    let pre = modulus_shift_prefactor(&a, &b, &q, r, ctx)?;
    Ok(pre.mul(&shifted_base_ratio(&a, &b, &q, r, m, ctx)?))
}

fn prodms_lhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    let (a, q, t) = (
        p.complex("a", bits)?,
        p.complex("q", bits)?,
        p.complex("t", bits)?,
    );
    let r = int_u32(p, "r")?;
    let roots = roots_table(r, bits)?;
    let mut acc = exact_one(ctx);
    for root in &roots {
        let zt = root.mul(&t);
        let num = poch_infinite(&a.mul(&zt), &q, ctx)?;
        let den = poch_infinite(&zt, &q, ctx)?;
        acc = acc.mul(&guarded_div(num, den, "(zeta^i t;q)_inf", ctx)?);
    }
    Ok(acc)
}

fn prodms_rhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    let (a, q, t) = (
        p.complex("a", bits)?,
        p.complex("q", bits)?,
        p.complex("t", bits)?,
    );
    let r = int_u32(p, "r")? as i64;
    let (qr, tr) = (q.pow_i64(r), t.pow_i64(r));
    let num = poch_infinite(&a.pow_i64(r).mul(&tr), &qr, ctx)?;
    let den = poch_infinite(&tr, &qr, ctx)?;
    guarded_div(num, den, "(t^r;q^r)_inf", ctx)
}

/// Left side shared by E1 and E2: the base-q^r function at r-th-power
/// arguments.
fn e_lhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    let (a, q, t) = (
        p.complex("a", bits)?,
        p.complex("q", bits)?,
        p.complex("t", bits)?,
    );
    let (r, alpha) = (int_u32(p, "r")? as i64, p.int("alpha")?);
    eval_A(
        Rational64::from_integer(r * alpha),
        &a.pow_i64(r),
        &q.pow_i64(r),
        &t.pow_i64(r),
        ctx,
    )
}

fn e1_rhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    let (a, q, t) = (
        p.complex("a", bits)?,
        p.complex("q", bits)?,
        p.complex("t", bits)?,
    );
    let (r, alpha) = (int_u32(p, "r")?, p.int("alpha")?);
    eval_e1_rhs(
        Rational64::from_integer(alpha),
        &a,
        &q,
        &t,
        r,
        UNILATERAL_SHELL_CAP,
        ctx,
    )
}

fn e2_rhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    let (a, q, t) = (
        p.complex("a", bits)?,
        p.complex("q", bits)?,
        p.complex("t", bits)?,
    );
    let (r, alpha) = (int_u32(p, "r")?, p.int("alpha")?);
    let phase = match p.int_or("phase", 0)? {
        0 => E2Phase::SlotLabels,
        1 => E2Phase::Consecutive,
        _ => {
            return Err(QError::param(
                "phase",
                "must be 0 (slot labels) or 1 (consecutive)",
            ))
        }
    };
    eval_e2_rhs(
        Rational64::from_integer(alpha),
        &a,
        &q,
        &t,
        r,
        phase,
        UNILATERAL_SHELL_CAP,
        ctx,
    )
}

fn t12r_lhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    let (a, b) = (p.complex("a", bits)?, p.complex("b", bits)?);
    let (q, x) = (p.complex("q", bits)?, p.complex("x", bits)?);
    let (r, alpha) = (int_u32(p, "r")? as i64, p.int("alpha")?);
    eval_B(
        Rational64::from_integer(r * alpha),
        &a.pow_i64(r),
        &b.pow_i64(r),
        &q.pow_i64(r),
        &x.pow_i64(r),
        ctx,
    )
}

fn t12r_rhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    let (a, b) = (p.complex("a", bits)?, p.complex("b", bits)?);
    let (q, x) = (p.complex("q", bits)?, p.complex("x", bits)?);
    let (r, alpha) = (int_u32(p, "r")?, p.int("alpha")?);
    eval_12r_rhs(
        Rational64::from_integer(alpha),
        &a,
        &b,
        &q,
        &x,
        r,
        BILATERAL_SHELL_CAP,
        ctx,
    )
}

fn c15r_both(p: &Params, ctx: &PrecisionContext) -> Result<(SeriesValue, SeriesValue), QError> {
    let bits = ctx.precision_bits;
    let (a, q, x) = (
        p.complex("a", bits)?,
        p.complex("q", bits)?,
        p.complex("x", bits)?,
    );
    let r = int_u32(p, "r")?;
    let k = window_for_reciprocal_slots(&a, &q, r, 0, ctx)?;
    eval_15r_both(&a, &q, &x, r, k, BILATERAL_SHELL_CAP, ctx)
}

fn c15r_lhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    Ok(c15r_both(p, ctx)?.0)
}

fn c15r_rhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    Ok(c15r_both(p, ctx)?.1)
}

fn f2_lhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    let (a, c) = (p.complex("a", bits)?, p.complex("c", bits)?);
    let (q, z) = (p.complex("q", bits)?, p.complex("z", bits)?);
    eval_F(&a, &c, &q, &z, ctx)
}

fn f2_rhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    let (a, c) = (p.complex("a", bits)?, p.complex("c", bits)?);
    let (q, z) = (p.complex("q", bits)?, p.complex("z", bits)?);
    eval_f_swapped(&a, &c, &q, &z, ctx)
}

/// q^e for real e and real positive q, as exp(e·ln q).
fn real_q_power(q: &HpComplex, e: &HpReal, bits: usize) -> Result<HpComplex, QError> {
    if !q.is_real() {
        return Err(QError::domain(
            "fractional powers need a real positive base",
        ));
    }
    let ln_q = q.re().to_bits(bits).ln()?;
    Ok(HpComplex::from_real(e.to_bits(bits).mul(&ln_q).exp()))
}

fn f3_lhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    let q = p.complex("q", bits)?;
    let alpha = p.complex("alpha", bits)?.re().to_bits(bits);
    let gamma = p.complex("gamma", bits)?.re().to_bits(bits);
    let n = p.int("n")?;
    let a = real_q_power(&q, &alpha, bits)?;
    let c = real_q_power(&q, &alpha.add(&gamma), bits)?;
    let z = real_q_power(&q, &gamma.sub(&HpReal::from_i64(n, bits)), bits)?;
    eval_F(&a, &c, &q, &z, ctx)
}

fn f3_rhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    let q = p.complex("q", bits)?;
    let alpha = p.complex("alpha", bits)?.re().to_bits(bits);
    let gamma = p.complex("gamma", bits)?.re().to_bits(bits);
    let n = p.int("n")?;
    let zn = real_q_power(&q, &gamma.sub(&HpReal::from_i64(n, bits)), bits)?;
    let cz = real_q_power(&q, &alpha.add(&gamma), bits)?;
    let num = poch_infinite(&zn, &q, ctx)?;
    let den = poch_infinite(&cz, &q, ctx)?;
    let pre = guarded_div(num, den, "(q^(alpha+gamma);q)_inf", ctx)?;
    Ok(pre.mul(&eval_F(&q.pow_i64(-n), &zn, &q, &cz, ctx)?))
}

fn f4_lhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    let (q, x) = (p.complex("q", bits)?, p.complex("x", bits)?);
    let n = p.int("n")?;
    eval_F(&q.pow_i64(-n), &x, &q, &q.pow_i64(n).mul(&x), ctx)
}

fn f4_rhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    let (q, x) = (p.complex("q", bits)?, p.complex("x", bits)?);
    let n = p.int("n")?;
    let den = poch_finite(&x, &q, n, ctx)?;
    if den.abs_below(&ctx.pole_guard()) {
        return Err(QError::pole("(x;q)_n vanishes"));
    }
    Ok(SeriesValue::exact(
        HpComplex::one(bits).div(&den),
        n.unsigned_abs() as usize,
    ))
}

/// S(m,n,x) = F(q^(−m), x q^(−m); x q^(−n)).
fn f7_s(
    m: i64,
    n: i64,
    x: &HpComplex,
    q: &HpComplex,
    ctx: &PrecisionContext,
) -> Result<SeriesValue, QError> {
    eval_F(
        &q.pow_i64(-m),
        &x.mul(&q.pow_i64(-m)),
        q,
        &x.mul(&q.pow_i64(-n)),
        ctx,
    )
}

/// (x q^(−n);q)_∞/(x q^(−m);q)_∞, exactly 1 on the diagonal m = n so the
/// swapped identity degenerates to a bit-identical pair of sides there.
pub fn f7_prefactor(
    m: i64,
    n: i64,
    x: &HpComplex,
    q: &HpComplex,
    ctx: &PrecisionContext,
) -> Result<SeriesValue, QError> {
    if m == n {
        return Ok(SeriesValue::exact(HpComplex::one(ctx.precision_bits), 0));
    }
    let num = poch_infinite(&x.mul(&q.pow_i64(-n)), q, ctx)?;
    let den = poch_infinite(&x.mul(&q.pow_i64(-m)), q, ctx)?;
    guarded_div(num, den, "(x q^(-m);q)_inf", ctx)
}

fn f7_lhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    let (q, x) = (p.complex("q", bits)?, p.complex("x", bits)?);
    let (m, n) = (p.int("m")?, p.int("n")?);
    f7_s(m, n, &x, &q, ctx)
}

fn f7_rhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    let (q, x) = (p.complex("q", bits)?, p.complex("x", bits)?);
    let (m, n) = (p.int("m")?, p.int("n")?);
    Ok(f7_prefactor(m, n, &x, &q, ctx)?.mul(&f7_s(n, m, &x, &q, ctx)?))
}

fn qbinom1_lhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    let (q, x) = (p.complex("q", bits)?, p.complex("x", bits)?);
    let n = p.int("n")?;
    let den = poch_finite(&x, &q, n, ctx)?;
    if den.abs_below(&ctx.pole_guard()) {
        return Err(QError::pole("(x;q)_n vanishes"));
    }
    Ok(SeriesValue::exact(
        HpComplex::one(bits).div(&den),
        n.unsigned_abs() as usize,
    ))
}

fn qbinom1_rhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    let (q, x) = (p.complex("q", bits)?, p.complex("x", bits)?);
    let n = p.int("n")?;
    qbinom1_series(n, &x, &q, ctx)
}

fn lem11_lhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    let (a, q) = (p.complex("a", bits)?, p.complex("q", bits)?);
    let n = p.int("n")?;
    if n < 0 {
        return Err(QError::param("n", "must be nonnegative"));
    }
    let n = n as usize;
    let (pa, pq) = unilateral_tables(&a, &q, n, ctx);
    let mut s = HpComplex::zero(bits);
    for k in 0..=n {
        let term = pa[k].mul(&pa[n - k]).div(&pq[k].mul(&pq[n - k]));
        s = if k % 2 == 0 {
            s.add(&term)
        } else {
            s.sub(&term)
        };
    }
    Ok(SeriesValue::exact(s, n + 1))
}

fn lem11_rhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    let (a, q) = (p.complex("a", bits)?, p.complex("q", bits)?);
    let n = p.int("n")?;
    if n.rem_euclid(2) != 0 {
        return Ok(exact_zero(ctx));
    }
    shifted_base_ratio(&a, &q, &q, 2, n.div_euclid(2), ctx)
}

fn lem12_lhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    let (a, q) = (p.complex("a", bits)?, p.complex("q", bits)?);
    let n = p.int("n")?;
    if n < 0 {
        return Err(QError::param("n", "must be nonnegative"));
    }
    let n = n as usize;
    let (pa, pq) = unilateral_tables(&a, &q, n, ctx);
    let roots = roots_table(3, bits)?;
    let mut s = HpComplex::zero(bits);
    for k in 0..=n {
        for l in 0..=(n - k) {
            let j = n - k - l;
            let term = pa[j]
                .mul(&pa[k])
                .mul(&pa[l])
                .div(&pq[j].mul(&pq[k]).mul(&pq[l]));
            s = s.add(&term.mul(&roots[(k + 2 * l) % 3]));
        }
    }
    Ok(SeriesValue::exact(s, (n + 1) * (n + 2) / 2))
}

fn lem12_rhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    let (a, q) = (p.complex("a", bits)?, p.complex("q", bits)?);
    let n = p.int("n")?;
    if n.rem_euclid(3) != 0 {
        return Ok(exact_zero(ctx));
    }
    shifted_base_ratio(&a, &q, &q, 3, n.div_euclid(3), ctx)
}

fn lem13_lhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    let (a, b) = (p.complex("a", bits)?, p.complex("b", bits)?);
    let q = p.complex("q", bits)?;
    let n = 2 * p.int("m")?;
    let kw = window_for_ratio_slots(&a, &b, &q, 2, n, ctx)? as i64;
    let k_max = kw + n.abs();
    let h = bilateral_ratio_values(&a, &b, &q, k_max, ctx)?;
    let idx = |k: i64| (k + k_max) as usize;
    let mut full = HpComplex::zero(bits);
    let mut trimmed = HpComplex::zero(bits);
    for k in -kw..=kw {
        let term = h[idx(k)].mul(&h[idx(n - k)]);
        let term = if k.rem_euclid(2) == 0 {
            term
        } else {
            term.neg()
        };
        full = full.add(&term);
        if k.abs() <= kw - 2 {
            trimmed = trimmed.add(&term);
        }
    }
    let err = full.sub(&trimmed).abs();
    let scale = HpReal::one(bits).add(&full.abs());
    let converged = err.le(&ctx.term_threshold().mul(&scale));
    Ok(SeriesValue {
        value: full,
        abs_error_estimate: err,
        terms_used: (2 * kw + 1) as usize,
        converged,
    })
}

fn lem13_rhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    let (a, b) = (p.complex("a", bits)?, p.complex("b", bits)?);
    let q = p.complex("q", bits)?;
    let m = p.int("m")?;
    if a.abs_below(&ctx.pole_guard()) {
        return Err(QError::domain("product side requires a != 0"));
    }
    let qa = q.div(&a);
    let ba = b.div(&a);
    let num = poch_multi(
        &[q.clone(), ba.clone(), b.neg(), qa.neg()],
        &q,
        PochIndex::Infinite,
        ctx,
    )?;
    let den = poch_multi(
        &[q.neg(), ba.neg(), b.clone(), qa],
        &q,
        PochIndex::Infinite,
        ctx,
    )?;
    let pre = guarded_div(num, den, "(-q, -b/a, b, q/a;q)_inf", ctx)?;
    Ok(pre.mul(&shifted_base_ratio(&a, &b, &q, 2, m, ctx)?))
}

fn lem14_lhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    let (a, b) = (p.complex("a", bits)?, p.complex("b", bits)?);
    let q = p.complex("q", bits)?;
    cube_filter_sum(&a, &b, &q, p.int("n")?, ctx)
}

fn lem14_rhs(_p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    Ok(exact_zero(ctx))
}

fn lem15_lhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    let (a, b) = (p.complex("a", bits)?, p.complex("b", bits)?);
    let q = p.complex("q", bits)?;
    cube_filter_sum(&a, &b, &q, 3 * p.int("m")?, ctx)
}

fn lem15_rhs(p: &Params, ctx: &PrecisionContext) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    let (a, b) = (p.complex("a", bits)?, p.complex("b", bits)?);
    let q = p.complex("q", bits)?;
    let m = p.int("m")?;
    let pre = modulus_shift_prefactor(&a, &b, &q, 3, ctx)?;
    Ok(pre.mul(&shifted_base_ratio(&a, &b, &q, 3, m, ctx)?))
}

// ---------------------------------------------------------------------------
// samplers

fn put(p: &mut Params, name: &str, g: GridPoint) {
    let (re, im) = g.decimals();
    p.set_complex(name, &re, &im);
}

fn magnitude(g: GridPoint) -> f64 {
    (g.norm4_sqr() as f64).sqrt() / 1e4
}

/// |z − q^j| ≥ min_dist (and |z + q^j| when `signs`) for j = 1..=24, in plain
/// f64 arithmetic so the test is exactly reproducible.
fn away_from_power_ladder(z: (f64, f64), q: (f64, f64), signs: bool, min_dist: f64) -> bool {
    let d2 = min_dist * min_dist;
    let mut pj = q;
    for _ in 0..24 {
        let (dx, dy) = (z.0 - pj.0, z.1 - pj.1);
        if dx * dx + dy * dy < d2 {
            return false;
        }
        if signs {
            let (sx, sy) = (z.0 + pj.0, z.1 + pj.1);
            if sx * sx + sy * sy < d2 {
                return false;
            }
        }
        pj = (pj.0 * q.0 - pj.1 * q.1, pj.0 * q.1 + pj.1 * q.0);
    }
    true
}

/// |z − q^(−j)| ≥ min_dist for j = 0..=j_max.
fn away_from_inverse_powers(z: (f64, f64), q: (f64, f64), j_max: u32, min_dist: f64) -> bool {
    let d2 = min_dist * min_dist;
    let nq = q.0 * q.0 + q.1 * q.1;
    let inv = (q.0 / nq, -q.1 / nq);
    let mut pj = (1.0f64, 0.0f64);
    for _ in 0..=j_max {
        let (dx, dy) = (z.0 - pj.0, z.1 - pj.1);
        if dx * dx + dy * dy < d2 {
            return false;
        }
        pj = (pj.0 * inv.0 - pj.1 * inv.1, pj.0 * inv.1 + pj.1 * inv.0);
    }
    true
}

/// A (a, b, q) triple for the double-ratio identities: |b| < 0.4|a|, both
/// away from ± the power ladder of q.
fn sample_ratio_triple(rng: &mut ChaCha20Rng) -> (GridPoint, GridPoint, GridPoint) {
    loop {
        let q = sample_annulus(rng, 0.1, 0.6);
        let a = sample_annulus(rng, 0.4, 0.9);
        if !away_from_power_ladder(a.to_f64(), q.to_f64(), true, 0.04) {
            continue;
        }
        let b = sample_annulus(rng, 0.02, 0.4 * magnitude(a));
        if !away_from_power_ladder(b.to_f64(), q.to_f64(), true, 0.03) {
            continue;
        }
        return (a, b, q);
    }
}

fn sample_rr(rng: &mut ChaCha20Rng) -> Params {
    let mut p = Params::new();
    put(&mut p, "q", sample_annulus(rng, 0.1, 0.7));
    p
}

fn sample_qbinom(rng: &mut ChaCha20Rng) -> Params {
    let mut p = Params::new();
    put(&mut p, "a", sample_annulus(rng, 0.05, 0.95));
    put(&mut p, "q", sample_annulus(rng, 0.1, 0.7));
    put(&mut p, "t", sample_annulus(rng, 0.05, 0.8));
    p
}

fn sample_psi11(rng: &mut ChaCha20Rng) -> Params {
    loop {
        let q = sample_annulus(rng, 0.1, 0.7);
        let a = sample_annulus(rng, 0.4, 0.95);
        if !away_from_power_ladder(a.to_f64(), q.to_f64(), false, 0.03) {
            continue;
        }
        // Both geometric tail ratios (|z| outward, |b/(az)| inward) stay at
        // or below ~0.65, keeping the bilateral halves inside the default
        // index window.
        let b = sample_annulus(rng, 0.02, 0.25 * magnitude(a));
        let z = sample_annulus(rng, 1.6 * magnitude(b) / magnitude(a) + 0.05, 0.6);
        let mut p = Params::new();
        put(&mut p, "a", a);
        put(&mut p, "b", b);
        put(&mut p, "q", q);
        put(&mut p, "z", z);
        return p;
    }
}

fn sample_u1(rng: &mut ChaCha20Rng) -> Params {
    let mut p = Params::new();
    put(&mut p, "a", sample_annulus(rng, 0.05, 0.9));
    put(&mut p, "q", sample_annulus(rng, 0.1, 0.7));
    p.set_int("r", rng.gen_range(2..=5));
    p.set_int("n", rng.gen_range(0..=20));
    p
}

fn sample_b1(rng: &mut ChaCha20Rng) -> Params {
    let (a, b, q) = sample_ratio_triple(rng);
    let mut p = Params::new();
    put(&mut p, "a", a);
    put(&mut p, "b", b);
    put(&mut p, "q", q);
    p.set_int("r", rng.gen_range(2..=3));
    p.set_int("n", rng.gen_range(-8..=12));
    p
}

fn sample_prodms(rng: &mut ChaCha20Rng) -> Params {
    let mut p = Params::new();
    put(&mut p, "a", sample_annulus(rng, 0.05, 0.9));
    put(&mut p, "q", sample_annulus(rng, 0.1, 0.7));
    put(&mut p, "t", sample_annulus(rng, 0.05, 0.8));
    p.set_int("r", rng.gen_range(2..=5));
    p
}

fn sample_e(rng: &mut ChaCha20Rng) -> Params {
    let mut p = Params::new();
    put(&mut p, "a", sample_annulus(rng, 0.05, 0.9));
    put(&mut p, "q", sample_annulus(rng, 0.1, 0.7));
    put(&mut p, "t", sample_annulus(rng, 0.05, 0.6));
    p.set_int("r", rng.gen_range(2..=3));
    p.set_int("alpha", rng.gen_range(1..=2));
    p
}

fn sample_e2(rng: &mut ChaCha20Rng) -> Params {
    let mut p = sample_e(rng);
    p.set_int("phase", 0);
    p
}

fn sample_t12r(rng: &mut ChaCha20Rng) -> Params {
    let (a, b, q) = sample_ratio_triple(rng);
    let mut p = Params::new();
    put(&mut p, "a", a);
    put(&mut p, "b", b);
    put(&mut p, "q", q);
    put(&mut p, "x", sample_annulus(rng, 0.15, 0.85));
    p.set_int("r", rng.gen_range(2..=3));
    p.set_int("alpha", rng.gen_range(1..=2));
    p
}

fn sample_c15r(rng: &mut ChaCha20Rng) -> Params {
    loop {
        let q = sample_annulus(rng, 0.1, 0.6);
        let a = sample_annulus(rng, 0.15, 0.9);
        if !away_from_power_ladder(a.to_f64(), q.to_f64(), true, 0.04) {
            continue;
        }
        let mut p = Params::new();
        put(&mut p, "a", a);
        put(&mut p, "q", q);
        put(&mut p, "x", sample_annulus(rng, 0.15, 0.85));
        p.set_int("r", rng.gen_range(2..=3));
        return p;
    }
}

fn sample_f2(rng: &mut ChaCha20Rng) -> Params {
    loop {
        let q = sample_annulus(rng, 0.1, 0.7);
        let z = sample_annulus(rng, 0.15, 2.2);
        if !away_from_inverse_powers(z.to_f64(), q.to_f64(), 6, 0.05) {
            continue;
        }
        let mut p = Params::new();
        put(&mut p, "a", sample_annulus(rng, 0.05, 1.2));
        put(&mut p, "c", sample_annulus(rng, 0.15, 0.9));
        put(&mut p, "q", q);
        put(&mut p, "z", z);
        return p;
    }
}

fn sample_f3(rng: &mut ChaCha20Rng) -> Params {
    let q = sample_real_range(rng, 0.1, 0.7);
    let n = rng.gen_range(0..=12i64);
    let (alpha4, gamma4) = loop {
        let alpha4 = rng.gen_range(-35_000..=35_000i64);
        let gamma4 = rng.gen_range(-35_000..=35_000i64);
        if !(1_000..=9_000).contains(&gamma4.rem_euclid(10_000)) {
            continue;
        }
        let s4 = alpha4 + gamma4;
        if (-7..=0).any(|k| (s4 - k * 10_000).abs() < 1_000) {
            continue;
        }
        break (alpha4, gamma4);
    };
    let mut p = Params::new();
    put(&mut p, "q", q);
    put(
        &mut p,
        "alpha",
        GridPoint {
            re4: alpha4,
            im4: 0,
        },
    );
    put(
        &mut p,
        "gamma",
        GridPoint {
            re4: gamma4,
            im4: 0,
        },
    );
    p.set_int("n", n);
    p
}

fn sample_f4(rng: &mut ChaCha20Rng) -> Params {
    let mut p = Params::new();
    put(&mut p, "q", sample_annulus(rng, 0.1, 0.7));
    put(&mut p, "x", sample_annulus(rng, 0.05, 0.8));
    p.set_int("n", rng.gen_range(1..=12));
    p
}

fn sample_f7(rng: &mut ChaCha20Rng) -> Params {
    loop {
        let q = sample_annulus(rng, 0.1, 0.7);
        let x = sample_annulus(rng, 0.15, 0.9);
        if !away_from_power_ladder(x.to_f64(), q.to_f64(), false, 0.03) {
            continue;
        }
        let mut p = Params::new();
        put(&mut p, "q", q);
        put(&mut p, "x", x);
        p.set_int("m", rng.gen_range(0..=12));
        p.set_int("n", rng.gen_range(0..=12));
        return p;
    }
}

fn sample_qbinom1(rng: &mut ChaCha20Rng) -> Params {
    let mut p = Params::new();
    put(&mut p, "q", sample_annulus(rng, 0.1, 0.7));
    put(&mut p, "x", sample_annulus(rng, 0.05, 0.85));
    p.set_int("n", rng.gen_range(0..=12));
    p
}

fn sample_lem11(rng: &mut ChaCha20Rng) -> Params {
    let mut p = Params::new();
    put(&mut p, "a", sample_annulus(rng, 0.05, 0.9));
    put(&mut p, "q", sample_annulus(rng, 0.1, 0.7));
    p.set_int("n", rng.gen_range(0..=16));
    p
}

fn sample_lem12(rng: &mut ChaCha20Rng) -> Params {
    let mut p = Params::new();
    put(&mut p, "a", sample_annulus(rng, 0.05, 0.9));
    put(&mut p, "q", sample_annulus(rng, 0.1, 0.7));
    p.set_int("n", rng.gen_range(0..=15));
    p
}

fn sample_lem13(rng: &mut ChaCha20Rng) -> Params {
    let (a, b, q) = sample_ratio_triple(rng);
    let mut p = Params::new();
    put(&mut p, "a", a);
    put(&mut p, "b", b);
    put(&mut p, "q", q);
    p.set_int("m", rng.gen_range(-4..=6));
    p
}

fn sample_lem14(rng: &mut ChaCha20Rng) -> Params {
    let (a, b, q) = sample_ratio_triple(rng);
    let mut n = rng.gen_range(-8..=12i64);
    if n.rem_euclid(3) == 0 {
        n += 1;
    }
    let mut p = Params::new();
    put(&mut p, "a", a);
    put(&mut p, "b", b);
    put(&mut p, "q", q);
    p.set_int("n", n);
    p
}

fn sample_lem15(rng: &mut ChaCha20Rng) -> Params {
    let (a, b, q) = sample_ratio_triple(rng);
    let mut p = Params::new();
    put(&mut p, "a", a);
    put(&mut p, "b", b);
    put(&mut p, "q", q);
    p.set_int("m", rng.gen_range(-2..=4));
    p
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;

    use super::super::{check_case, find, sample_case, SuiteOptions};
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn assert_close(l: &SeriesValue, r: &SeriesValue, digits: i64, what: &str) {
        let bits = l.value.bits();
        let diff = l.value.sub(&r.value).abs();
        let scale = HpReal::one(bits).max(&r.value.abs());
        assert!(
            diff.div(&scale).lt(&HpReal::pow10(-digits, bits)),
            "{what}: |diff| = {}",
            diff
        );
    }

    #[test]
    fn composition_count_matches_enumeration() {
        use crate::multisection::compositions_nonneg;
        for r in 2..=5u32 {
            for n in 0..=8i64 {
                assert_eq!(
                    composition_count(r, n),
                    compositions_nonneg(r, n).len(),
                    "r={r} n={n}"
                );
            }
        }
        assert_eq!(composition_count(3, -2), 0);
    }

    #[test]
    fn literal_triple_slot_filter_matches_multisum() {
        let ctx = ctx();
        let bits = ctx.precision_bits;
        let mut p = Params::new();
        p.set_complex("a", "0.31", "0.22");
        p.set_complex("q", "0.35", "0.15");
        for n in [0i64, 4, 6, 7] {
            p.set_int("n", n);
            let literal = lem12_lhs(&p, &ctx).unwrap();
            let filtered = multisum_u1(
                &p.complex("a", bits).unwrap(),
                &p.complex("q", bits).unwrap(),
                3,
                n,
                &ctx,
            )
            .unwrap();
            let diff = literal.value.sub(&filtered).abs();
            assert!(diff.lt(&HpReal::pow10(-45, bits)), "n={n}");
        }
    }

    #[test]
    fn literal_bilateral_pair_filter_matches_multisum() {
        let ctx = ctx();
        let bits = ctx.precision_bits;
        let mut p = Params::new();
        p.set_complex("a", "0.8", "0.1");
        p.set_complex("b", "0.06", "-0.03");
        p.set_complex("q", "0.3", "0.12");
        p.set_int("m", 2);
        let literal = lem13_lhs(&p, &ctx).unwrap();
        let a = p.complex("a", bits).unwrap();
        let b = p.complex("b", bits).unwrap();
        let q = p.complex("q", bits).unwrap();
        let k = window_for_ratio_slots(&a, &b, &q, 2, 4, &ctx).unwrap();
        let filtered = multisum_b1(&a, &b, &q, 2, 4, k, &ctx).unwrap();
        assert!(literal.converged && filtered.converged);
        assert_close(&literal, &filtered, 25, "pair filter");
    }

    #[test]
    fn f7_prefactor_is_exactly_one_on_diagonal() {
        let ctx = ctx();
        let bits = ctx.precision_bits;
        let x = HpComplex::from_decimal("0.4", "0.2", bits).unwrap();
        let q = HpComplex::from_decimal("0.3", "0.1", bits).unwrap();
        let pre = f7_prefactor(5, 5, &x, &q, &ctx).unwrap();
        assert!(pre.value.sub(&HpComplex::one(bits)).is_zero());
        assert!(pre.abs_error_estimate.is_zero());
    }

    #[test]
    fn u1_rhs_vanishes_off_multiples() {
        let ctx = ctx();
        let mut p = Params::new();
        p.set_complex("a", "0.5", "0.1");
        p.set_complex("q", "0.3", "0.0");
        p.set_int("r", 3);
        p.set_int("n", 7);
        let rhs = u1_rhs(&p, &ctx).unwrap();
        assert!(rhs.value.is_zero());
    }

    #[test]
    fn samplers_stay_inside_their_domains() {
        let mut rng = ChaCha20Rng::seed_from_u64(99);
        for _ in 0..40 {
            let p = sample_psi11(&mut rng);
            let bits = 200;
            let a = p.complex("a", bits).unwrap();
            let b = p.complex("b", bits).unwrap();
            let z = p.complex("z", bits).unwrap();
            let ratio = b.abs().div(&a.abs());
            assert!(ratio.lt(&z.abs()), "psi11 annulus violated: {p}");
        }
        for _ in 0..40 {
            let p = sample_b1(&mut rng);
            let bits = 200;
            let a = p.complex("a", bits).unwrap();
            let b = p.complex("b", bits).unwrap();
            assert!(b.abs().lt(&a.abs()), "b1 modulus ratio violated: {p}");
            let r = p.int("r").unwrap();
            assert!((2..=3).contains(&r));
        }
        for _ in 0..40 {
            let p = sample_f3(&mut rng);
            let g = p.complex("gamma", 200).unwrap();
            let a = p.complex("alpha", 200).unwrap();
            let s = g.re().add(a.re());
            for k in -7..=0i64 {
                let d = s.sub(&HpReal::from_i64(k, 200)).abs();
                assert!(
                    d.ge(&HpReal::from_decimal("0.0999", 200).unwrap()),
                    "alpha+gamma near nonpositive integer: {p}"
                );
            }
        }
    }

    #[test]
    fn lem14_sampler_avoids_multiples_of_three() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        for _ in 0..60 {
            let p = sample_lem14(&mut rng);
            assert_ne!(p.int("n").unwrap().rem_euclid(3), 0, "{p}");
        }
    }

    #[test]
    fn e2_consecutive_phase_is_rejected_numerically() {
        let spec = find("E2").unwrap();
        let mut params = sample_case(spec, 31, 0);
        params.set_int("phase", 1);
        let rec = check_case(spec, 0, &params, &ctx(), &SuiteOptions::default());
        assert_eq!(
            rec.verdict,
            super::super::Verdict::Fail,
            "{:?}",
            rec.diagnostics
        );
    }
}
