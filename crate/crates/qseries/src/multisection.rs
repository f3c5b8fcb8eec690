//! Roots-of-unity multisection machinery: composition enumeration, the
//! r-fold unilateral/bilateral sums that filter every r-th coefficient of a
//! q-binomial (or ₁ψ₁) product, the (r−1)-fold shell expansions of the
//! weighted sums A and B over a smaller nome, the r-fold bilateral
//! Rogers-Ramanujan-type pair, and an independent coefficient-convolution
//! oracle.
//!
//! Conventions shared across this module:
//! - slot i of an r-fold sum carries the phase ζ_r^(i·kᵢ), i = 1..r (weight
//!   r acts trivially, so the printed i = 1..r−1 variants are the same sums);
//! - multi-sums are evaluated by total s = Σkᵢ shells: the shell weights come
//!   from one truncated Laurent-polynomial convolution per slot, and the
//!   outer s-sum stops after two consecutive negligible shells;
//! - bilateral slot windows default to the smallest K where the decaying
//!   (negative-index) factor magnitude, times the largest factor magnitude
//!   the other slots can contribute, falls below 10^(−tolerance_digits−10),
//!   hard-capped at `max_window`. Window adequacy is always re-checked by a
//!   boundary diagnostic (the value recomputed with the window shrunk by 2).

use num_rational::Rational64;

use crate::error::QError;
use crate::kernel::{roots_table, HpComplex, HpReal, PrecisionContext, SeriesValue};
use crate::pochhammer::{check_nome, poch_finite, poch_multi, PochIndex};
use crate::series::{check_alpha, eval_A, eval_B, q_power_rational, sum_bilateral};

/// An integer r-tuple with its total, an index point of an r-fold sum.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Composition {
    pub parts: Vec<i64>,
    pub total: i64,
}

/// All nonnegative r-tuples summing to n, in lexicographic order
/// ((n+r−1 choose r−1) of them); empty for n < 0.
pub fn compositions_nonneg(r: u32, n: i64) -> Vec<Composition> {
    let mut out = Vec::new();
    if n < 0 || r == 0 {
        return out;
    }
    let mut parts = vec![0i64; r as usize];
    fill_nonneg(&mut parts, 0, n, &mut out);
    out
}

fn fill_nonneg(parts: &mut Vec<i64>, slot: usize, remaining: i64, out: &mut Vec<Composition>) {
    if slot + 1 == parts.len() {
        parts[slot] = remaining;
        out.push(Composition {
            parts: parts.clone(),
            total: parts.iter().sum(),
        });
        return;
    }
    for k in 0..=remaining {
        parts[slot] = k;
        fill_nonneg(parts, slot + 1, remaining - k, out);
    }
}

/// All integer r-tuples with every |kᵢ| ≤ K summing to n, lexicographic;
/// empty when |n| > rK.
pub fn compositions_windowed(r: u32, n: i64, k: i64) -> Vec<Composition> {
    let mut out = Vec::new();
    if r == 0 || k < 0 || n.abs() > (r as i64) * k {
        return out;
    }
    let mut parts = vec![0i64; r as usize];
    fill_windowed(&mut parts, 0, n, k, &mut out);
    out
}

fn fill_windowed(
    parts: &mut Vec<i64>,
    slot: usize,
    remaining: i64,
    k: i64,
    out: &mut Vec<Composition>,
) {
    let slots_left = (parts.len() - slot - 1) as i64;
    if slots_left == 0 {
        if remaining.abs() <= k {
            parts[slot] = remaining;
            out.push(Composition {
                parts: parts.clone(),
                total: parts.iter().sum(),
            });
        }
        return;
    }
    let lo = (-k).max(remaining - slots_left * k);
    let hi = k.min(remaining + slots_left * k);
    for v in lo..=hi {
        parts[slot] = v;
        fill_windowed(parts, slot + 1, remaining - v, k, out);
    }
}

/// The r-fold unilateral filter sum
///
/// > Σ_{C_r⁺(n)} Π_{i=1}^r (a;q)_(kᵢ)/(q;q)_(kᵢ) · ζ_r^(Σ i·kᵢ)
///
/// computed exactly (finite enumeration, no truncation). Equals 0 when r∤n
/// and (a^r;q^r)_m/(q^r;q^r)_m when n = rm.
pub fn multisum_u1(
    a: &HpComplex,
    q: &HpComplex,
    r: u32,
    n: i64,
    ctx: &PrecisionContext,
) -> Result<HpComplex, QError> {
    check_nome(q)?;
    check_r(r)?;
    let bits = ctx.precision_bits;
    if n < 0 {
        return Ok(HpComplex::zero(bits));
    }
    let table = unilateral_ratio_table(a, q, n as usize, ctx)?;
    let roots = roots_table(r, bits)?;
    let mut total = HpComplex::zero(bits);
    for comp in compositions_nonneg(r, n) {
        let mut term = HpComplex::one(bits);
        let mut phase = 0i64;
        for (slot, &k) in comp.parts.iter().enumerate() {
            term = term.mul(&table[k as usize]);
            phase += (slot as i64 + 1) * k;
        }
        total = total.add(&term.mul(&roots[phase.rem_euclid(r as i64) as usize]));
    }
    Ok(total)
}

/// The r-fold bilateral filter sum
///
/// > Σ_{C_r(n), |kᵢ| ≤ K} Π_{i=1}^r (a;q)_(kᵢ)/(b;q)_(kᵢ) · ζ_r^(Σ i·kᵢ)
///
/// evaluated as one Laurent-convolution coefficient. The reported error
/// estimate is the boundary diagnostic |S_K − S_(K−2)|; the value converged
/// when that difference is negligible against the value.
pub fn multisum_b1(
    a: &HpComplex,
    b: &HpComplex,
    q: &HpComplex,
    r: u32,
    n: i64,
    k_window: usize,
    ctx: &PrecisionContext,
) -> Result<SeriesValue, QError> {
    check_nome(q)?;
    check_r(r)?;
    if k_window > ctx.max_window {
        return Err(QError::param("k_window", "exceeds the context max_window"));
    }
    if k_window < 8 {
        return Err(QError::param("k_window", "must be at least 8"));
    }
    check_modulus_ratio(a, b, ctx)?;
    let bits = ctx.precision_bits;
    let table = bilateral_ratio_table(a, b, q, k_window as i64, ctx)?;
    let roots = roots_table(r, bits)?;
    let value = filter_coefficient(&table, &roots, r, n, bits);
    let inner = filter_coefficient(&table.truncated(k_window as i64 - 2), &roots, r, n, bits);
    let diff = value.sub(&inner).abs();
    let scale = HpReal::one(bits).add(&value.abs());
    let converged = diff.le(&ctx.term_threshold().mul(&scale));
    Ok(SeriesValue {
        value,
        abs_error_estimate: diff,
        terms_used: (2 * k_window + 1) * r as usize,
        converged,
    })
}

/// The (r−1)-fold shell expansion of A over the larger nome:
///
/// > Σ_{k_1..k_(r−1) ≥ 0} Π (a;q)_(kᵢ)/(q;q)_(kᵢ) · ζ_r^(Σ i·kᵢ) ·
/// >   q^(αs²) t^s · A_q^(α)(a; q^(2αs) t),    s = Σ kᵢ,
///
/// which the caller compares against A_(q^r)^((rα))(a^r; t^r). Shells are
/// summed in increasing s with the two-consecutive-small stop; `outer_cap`
/// bounds s.
pub fn eval_e1_rhs(
    alpha: Rational64,
    a: &HpComplex,
    q: &HpComplex,
    t: &HpComplex,
    r: u32,
    outer_cap: usize,
    ctx: &PrecisionContext,
) -> Result<SeriesValue, QError> {
    let weights: Vec<i64> = (1..r as i64).collect();
    shell_sum_unilateral(alpha, a, q, t, r, &weights, false, outer_cap, ctx)
}

/// Phase convention for the companion expansion over slots k₂..k_r.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum E2Phase {
    /// ζ_r-weights are the slot labels 2..r — the form as printed (the label
    /// r acts trivially, so stopping the printed exponent at r−1 is the same
    /// sum). Validated numerically against the left side.
    SlotLabels,
    /// ζ_r-weights are consecutive positions 1..r−1 across the slots, the
    /// plausible misreading that treats this expansion as the first one with
    /// renamed variables. Fails numerically; kept evaluable so the variant
    /// experiment can demonstrate which reading holds.
    Consecutive,
}

/// The companion (r−1)-fold shell expansion with slots k₂..k_r, phase per
/// [`E2Phase`], and the rotated inner argument:
///
/// > Σ Π (a;q)_(kᵢ)/(q;q)_(kᵢ) · ζ_r^(phase) · q^(αs²) t^s ·
/// >   A_q^(α)(a; ζ_r q^(2αs) t),    s = Σ kᵢ.
#[allow(clippy::too_many_arguments)]
pub fn eval_e2_rhs(
    alpha: Rational64,
    a: &HpComplex,
    q: &HpComplex,
    t: &HpComplex,
    r: u32,
    phase: E2Phase,
    outer_cap: usize,
    ctx: &PrecisionContext,
) -> Result<SeriesValue, QError> {
    let weights: Vec<i64> = match phase {
        E2Phase::SlotLabels => (2..=r as i64).collect(),
        E2Phase::Consecutive => (1..r as i64).collect(),
    };
    shell_sum_unilateral(alpha, a, q, t, r, &weights, true, outer_cap, ctx)
}

#[allow(clippy::too_many_arguments)]
fn shell_sum_unilateral(
    alpha: Rational64,
    a: &HpComplex,
    q: &HpComplex,
    t: &HpComplex,
    r: u32,
    weights: &[i64],
    rotate_inner: bool,
    outer_cap: usize,
    ctx: &PrecisionContext,
) -> Result<SeriesValue, QError> {
    check_nome(q)?;
    check_r(r)?;
    check_alpha(alpha, q)?;
    let bits = ctx.precision_bits;
    if alpha.numer() == &0 {
        let edge = HpReal::from_decimal("0.8", bits).expect("edge literal");
        if t.abs().gt(&edge) {
            return Err(QError::domain(
                "shell expansion with alpha = 0 requires |t| <= 0.8",
            ));
        }
    }
    let roots = roots_table(r, bits)?;
    let table = unilateral_ratio_table(a, q, outer_cap, ctx)?;
    let zeta = roots[1].clone();

    // W[s]: convolution of the r−1 phased slot polynomials, degrees ≤ outer_cap
    let mut shell_weights = Laurent::one(bits);
    for &w in weights {
        let coef = (0..=outer_cap)
            .map(|k| table[k].mul(&roots[(w * k as i64).rem_euclid(r as i64) as usize]))
            .collect();
        shell_weights = shell_weights.conv(&Laurent { off: 0, coef }, 0, outer_cap as i64, bits);
    }

    let threshold = ctx.term_threshold();
    let one_r = HpReal::one(bits);
    let q2a = q_power_rational(alpha * 2, q, bits)?;
    let mut qs2 = HpComplex::one(bits); // q^(αs²)
    let mut odd = q_power_rational(alpha, q, bits)?; // q^(α(2s+1))
    let mut ts = HpComplex::one(bits); // t^s
    let mut shift = HpComplex::one(bits); // q^(2αs)
    let mut sum = HpComplex::zero(bits);
    let mut err = HpReal::zero(bits);
    let mut terms = 0usize;
    let mut small_run = 0usize;
    let mut converged = false;
    let mut inner_ok = true;
    for s in 0..=outer_cap as i64 {
        let ws = shell_weights
            .get(s)
            .cloned()
            .unwrap_or_else(|| HpComplex::zero(bits));
        let mut arg = shift.mul(t);
        if rotate_inner {
            arg = arg.mul(&zeta);
        }
        let inner = eval_A(alpha, a, q, &arg, ctx)?;
        inner_ok &= inner.converged;
        terms += inner.terms_used + 1;
        let coef = ws.mul(&qs2).mul(&ts);
        let term = coef.mul(&inner.value);
        sum = sum.add(&term);
        err = err.add(&coef.abs().mul(&inner.abs_error_estimate));
        if term.abs().lt(&threshold.mul(&one_r.add(&sum.abs()))) {
            small_run += 1;
            if small_run >= 2 {
                converged = true;
                err = err.add(&term.abs());
                break;
            }
        } else {
            small_run = 0;
        }
        qs2 = qs2.mul(&odd);
        odd = odd.mul(&q2a);
        ts = ts.mul(t);
        shift = shift.mul(&q2a);
    }
    Ok(SeriesValue {
        value: sum,
        abs_error_estimate: err,
        terms_used: terms,
        converged: converged && inner_ok,
    })
}

/// Full right-hand side of the bilateral shell expansion over the larger
/// nome: the infinite-product prefactor
///
/// > (b, q/a; q)_∞^r/((q, b/a; q)_∞^r) ·
/// >   (q^r, b^r a^(−r); q^r)_∞/((b^r, q^r a^(−r); q^r)_∞)
///
/// times the (r−1)-fold bilateral sum with summand
/// Π (a;q)_(kᵢ)/(b;q)_(kᵢ) · ζ_r^(Σ i·kᵢ) · q^(αs²) x^s · B_q^(α)(a,b; x q^(2αs)).
/// The caller compares against B_(q^r)^((rα))(a^r, b^r; x^r).
#[allow(clippy::too_many_arguments)]
pub fn eval_12r_rhs(
    alpha: Rational64,
    a: &HpComplex,
    b: &HpComplex,
    q: &HpComplex,
    x: &HpComplex,
    r: u32,
    outer_cap: usize,
    ctx: &PrecisionContext,
) -> Result<SeriesValue, QError> {
    check_nome(q)?;
    check_r(r)?;
    check_alpha(alpha, q)?;
    if alpha.numer() <= &0 {
        return Err(QError::param(
            "alpha",
            "must be positive for the bilateral shell expansion",
        ));
    }
    let bits = ctx.precision_bits;
    let guard = ctx.pole_guard();
    if x.is_zero() {
        return Err(QError::domain("bilateral shell expansion requires x != 0"));
    }
    check_modulus_ratio(a, b, ctx)?;

    let qr = q.pow_i64(r as i64);
    let ar = a.pow_i64(r as i64);
    let br = b.pow_i64(r as i64);
    let num = poch_multi(&[b.clone(), q.div(a)], q, PochIndex::Infinite, ctx)?
        .powi(r)
        .mul(&poch_multi(
            &[qr.clone(), br.div(&ar)],
            &qr,
            PochIndex::Infinite,
            ctx,
        )?);
    let den = poch_multi(&[q.clone(), b.div(a)], q, PochIndex::Infinite, ctx)?
        .powi(r)
        .mul(&poch_multi(
            &[br.clone(), qr.div(&ar)],
            &qr,
            PochIndex::Infinite,
            ctx,
        )?);
    if den.value.abs_below(&guard) {
        return Err(QError::pole(
            "shell-expansion prefactor denominator vanishes",
        ));
    }
    let prefactor = num.div(&den);

    let table_full = bilateral_ratio_table(a, b, q, ctx.max_window as i64, ctx)?;
    let k_window = pick_window(&table_full, r, 0, ctx) as i64;
    let table = table_full.truncated(k_window);
    let roots = roots_table(r, bits)?;
    let s_max = (outer_cap as i64).min((r as i64 - 1) * k_window);
    let mut shell_weights = Laurent::one(bits);
    for w in 1..r as i64 {
        let coef = (-k_window..=k_window)
            .map(|k| {
                table
                    .get(k)
                    .expect("inside window")
                    .mul(&roots[(w * k).rem_euclid(r as i64) as usize])
            })
            .collect();
        shell_weights = shell_weights.conv(
            &Laurent {
                off: -k_window,
                coef,
            },
            -s_max,
            s_max,
            bits,
        );
    }

    let q2a = q_power_rational(alpha * 2, q, bits)?;
    let q2a_inv = q2a.recip();
    let threshold = ctx.term_threshold();
    let one_r = HpReal::one(bits);
    let mut sum = HpComplex::zero(bits);
    let mut err = HpReal::zero(bits);
    let mut terms = (2 * k_window + 1) as usize * (r as usize - 1);
    let mut converged = true;
    let mut inner_ok = true;
    for direction in [1i64, -1] {
        let mut qs2 = HpComplex::one(bits);
        let mut odd = q_power_rational(alpha, q, bits)?;
        let mut xs = HpComplex::one(bits);
        let mut shift = HpComplex::one(bits);
        let (step_x, step_shift) = if direction > 0 {
            (x.clone(), q2a.clone())
        } else {
            (x.recip(), q2a_inv.clone())
        };
        let mut small_run = 0usize;
        let mut finished = false;
        let mut s = if direction > 0 { 0i64 } else { -1 };
        if direction < 0 {
            qs2 = odd.clone(); // q^(α·1)
            odd = odd.mul(&q2a);
            xs = step_x.clone();
            shift = step_shift.clone();
        }
        while s.abs() <= s_max {
            let ws = shell_weights
                .get(s)
                .cloned()
                .unwrap_or_else(|| HpComplex::zero(bits));
            let coef = ws.mul(&qs2).mul(&xs);
            let term = if ws.is_zero() {
                HpComplex::zero(bits)
            } else {
                let inner = eval_B(alpha, a, b, q, &x.mul(&shift), ctx)?;
                inner_ok &= inner.converged;
                terms += inner.terms_used + 1;
                err = err.add(&coef.abs().mul(&inner.abs_error_estimate));
                coef.mul(&inner.value)
            };
            sum = sum.add(&term);
            if term.abs().lt(&threshold.mul(&one_r.add(&sum.abs()))) {
                small_run += 1;
                if small_run >= 2 {
                    err = err.add(&term.abs());
                    finished = true;
                    break;
                }
            } else {
                small_run = 0;
            }
            qs2 = qs2.mul(&odd);
            odd = odd.mul(&q2a);
            xs = xs.mul(&step_x);
            shift = shift.mul(&step_shift);
            s += direction;
        }
        converged &= finished;
    }
    let sum_sv = SeriesValue {
        value: sum,
        abs_error_estimate: err,
        terms_used: terms,
        converged: converged && inner_ok,
    };
    Ok(prefactor.mul(&sum_sv))
}

/// Both sides of the r-fold bilateral Rogers-Ramanujan-type identity:
///
/// > LHS = Σ_(n∈ℤ) q^(r²n²) x^(rn) / (1 − a^r q^(rn))
/// > RHS = [(q^r;q^r)_∞/(q;q)_∞^r]² · (a, q/a; q)_∞^r /
/// >       ((a^r;q^r)_∞ (q^r a^(−r); q^r)_∞) ·
/// >       Σ_(k_1..k_r ∈ ℤ) ζ_r^(Σ i·kᵢ) q^(s²) x^s / Π(1 − a q^(kᵢ))
///
/// with s = Σkᵢ, slot windows |kᵢ| ≤ K, |s| ≤ outer_cap. The first prefactor
/// factor is squared; the single-power form fails numerically by O(1) and
/// the squared form follows from the bilateral shell expansion at b = aq.
pub fn eval_15r_both(
    a: &HpComplex,
    q: &HpComplex,
    x: &HpComplex,
    r: u32,
    k_window: usize,
    outer_cap: usize,
    ctx: &PrecisionContext,
) -> Result<(SeriesValue, SeriesValue), QError> {
    check_nome(q)?;
    check_r(r)?;
    if k_window > ctx.max_window {
        return Err(QError::param("k_window", "exceeds the context max_window"));
    }
    if k_window < 8 {
        return Err(QError::param("k_window", "must be at least 8"));
    }
    let bits = ctx.precision_bits;
    let guard = ctx.pole_guard();
    if x.is_zero() {
        return Err(QError::domain("bilateral sum requires x != 0"));
    }
    if q.abs_below(&guard) {
        return Err(QError::domain("bilateral sum requires q != 0"));
    }
    // a = q^j anywhere inside the window is a pole of a slot factor
    let mut qj = q.pow_i64(-(k_window as i64) - 2);
    for j in -(k_window as i64) - 1..=(k_window as i64) + 1 {
        qj = qj.mul(q);
        if a.sub(&qj).abs_below(&guard) {
            return Err(QError::pole(format!("a within pole guard of q^{j}")));
        }
    }

    let r_i = r as i64;
    let ar = a.pow_i64(r_i);
    let qr = q.pow_i64(r_i);
    let xr = x.pow_i64(r_i);
    let one = HpComplex::one(bits);

    // left side, by the generic bilateral engine
    let lhs = sum_bilateral(
        |n| {
            let den = one.sub(&ar.mul(&qr.pow_i64(n)));
            q.pow_i64(r_i * r_i * n * n).mul(&xr.pow_i64(n)).div(&den)
        },
        ctx,
    )?;

    // prefactor, with the squared eta-quotient factor
    let eta = poch_multi(std::slice::from_ref(&qr), &qr, PochIndex::Infinite, ctx)?
        .div(&poch_multi(std::slice::from_ref(q), q, PochIndex::Infinite, ctx)?.powi(r));
    let num = eta
        .powi(2)
        .mul(&poch_multi(&[a.clone(), q.div(a)], q, PochIndex::Infinite, ctx)?.powi(r));
    let den = poch_multi(&[ar.clone(), qr.div(&ar)], &qr, PochIndex::Infinite, ctx)?;
    if den.value.abs_below(&guard) {
        return Err(QError::pole(
            "prefactor denominator (a^r, q^r a^(-r); q^r)_inf vanishes",
        ));
    }
    let prefactor = num.div(&den);

    let table = reciprocal_table(a, q, k_window as i64, ctx)?;
    let roots = roots_table(r, bits)?;
    let rhs_sum = theta_filter_sum(&table, &roots, r, q, x, outer_cap, ctx);
    let rhs_inner = theta_filter_sum(
        &table.truncated(k_window as i64 - 2),
        &roots,
        r,
        q,
        x,
        outer_cap,
        ctx,
    );
    let diff = rhs_sum.sub(&rhs_inner).abs();
    let scale = HpReal::one(bits).add(&rhs_sum.abs());
    let converged = diff.le(&ctx.term_threshold().mul(&scale));
    let rhs_sv = SeriesValue {
        value: rhs_sum,
        abs_error_estimate: diff,
        terms_used: (2 * k_window + 1) * r as usize,
        converged,
    };
    Ok((lhs, prefactor.mul(&rhs_sv)))
}

/// Σ_s W[s] q^(s²) x^s over the support of the convolved slot weights.
fn theta_filter_sum(
    table: &Laurent,
    roots: &[HpComplex],
    r: u32,
    q: &HpComplex,
    x: &HpComplex,
    outer_cap: usize,
    ctx: &PrecisionContext,
) -> HpComplex {
    let bits = ctx.precision_bits;
    let k_window = table.coef.len() as i64 / 2;
    let s_max = (outer_cap as i64).min(r as i64 * k_window);
    let mut weights = Laurent::one(bits);
    for w in 1..=r as i64 {
        let coef = (-k_window..=k_window)
            .map(|k| {
                table
                    .get(k)
                    .expect("inside window")
                    .mul(&roots[(w * k).rem_euclid(r as i64) as usize])
            })
            .collect();
        weights = weights.conv(
            &Laurent {
                off: -k_window,
                coef,
            },
            -s_max,
            s_max,
            bits,
        );
    }
    let mut sum = HpComplex::zero(bits);
    for s in -s_max..=s_max {
        if let Some(ws) = weights.get(s) {
            if !ws.is_zero() {
                sum = sum.add(&ws.mul(&q.pow_i64(s * s)).mul(&x.pow_i64(s)));
            }
        }
    }
    sum
}

/// Coefficientwise oracle for the unilateral filter sum: expands
/// Π_(i=0)^(r−1) Σ_k (a;q)_k/(q;q)_k (ζ_r^i x)^k by truncated polynomial
/// convolution and pairs each x^n coefficient (n = 0..n_max) with the claimed
/// value — 0 for r∤n, (a^r;q^r)_m/(q^r;q^r)_m for n = rm.
///
/// Only the unilateral product is supported; the bilateral analogue is
/// validated by window stability instead, so a denominator base is rejected.
pub fn coefficient_oracle(
    a: &HpComplex,
    b: Option<&HpComplex>,
    q: &HpComplex,
    r: u32,
    n_max: usize,
    ctx: &PrecisionContext,
) -> Result<Vec<(HpComplex, HpComplex)>, QError> {
    check_nome(q)?;
    check_r(r)?;
    if b.is_some() {
        return Err(QError::param(
            "b",
            "the coefficient oracle covers the unilateral product only; bilateral window \
             stability is checked by the windowed filter sum",
        ));
    }
    if n_max > 64 {
        return Err(QError::param("n_max", "capped at 64"));
    }
    let bits = ctx.precision_bits;
    let table = unilateral_ratio_table(a, q, n_max, ctx)?;
    let roots = roots_table(r, bits)?;
    let mut product = Laurent::one(bits);
    for i in 0..r as i64 {
        let coef = (0..=n_max)
            .map(|k| table[k].mul(&roots[(i * k as i64).rem_euclid(r as i64) as usize]))
            .collect();
        product = product.conv(&Laurent { off: 0, coef }, 0, n_max as i64, bits);
    }
    let ar = a.pow_i64(r as i64);
    let qr = q.pow_i64(r as i64);
    let mut out = Vec::with_capacity(n_max + 1);
    for n in 0..=n_max as i64 {
        let computed = product
            .get(n)
            .cloned()
            .unwrap_or_else(|| HpComplex::zero(bits));
        let claimed = if n % r as i64 == 0 {
            poch_finite(&ar, &qr, n / r as i64, ctx)?.div(&poch_finite(
                &qr,
                &qr,
                n / r as i64,
                ctx,
            )?)
        } else {
            HpComplex::zero(bits)
        };
        out.push((computed, claimed));
    }
    Ok(out)
}

/// Default bilateral slot window for (a;q)_k/(b;q)_k factors: smallest K
/// (capped at max_window) with |h(−K)|·M^(r−1) below 10^(−tolerance−10),
/// where M bounds the factor magnitudes over the window.
pub fn window_for_ratio_slots(
    a: &HpComplex,
    b: &HpComplex,
    q: &HpComplex,
    r: u32,
    n: i64,
    ctx: &PrecisionContext,
) -> Result<usize, QError> {
    check_modulus_ratio(a, b, ctx)?;
    let table = bilateral_ratio_table(a, b, q, ctx.max_window as i64, ctx)?;
    Ok(pick_window(&table, r, n, ctx))
}

/// Default bilateral slot window for 1/(1 − a q^k) factors.
pub fn window_for_reciprocal_slots(
    a: &HpComplex,
    q: &HpComplex,
    r: u32,
    n: i64,
    ctx: &PrecisionContext,
) -> Result<usize, QError> {
    let table = reciprocal_table(a, q, ctx.max_window as i64, ctx)?;
    Ok(pick_window(&table, r, n, ctx))
}

/// The slot-ratio values h(k) = (a;q)_k/(b;q)_k for k = −k_max..=k_max, in
/// ascending index order. Shares the pole diagnostics of the filtered
/// multisums with the literal small-r loops in the catalog.
pub(crate) fn bilateral_ratio_values(
    a: &HpComplex,
    b: &HpComplex,
    q: &HpComplex,
    k_max: i64,
    ctx: &PrecisionContext,
) -> Result<Vec<HpComplex>, QError> {
    Ok(bilateral_ratio_table(a, b, q, k_max, ctx)?.coef)
}

fn check_r(r: u32) -> Result<(), QError> {
    if !(2..=6).contains(&r) {
        return Err(QError::param("r", "supported range is 2..=6"));
    }
    Ok(())
}

/// |b| < |a| required wherever negative slot indices appear: the negative
/// tail decays like |b/a|^K, so |b/a| ≥ 1 never converges.
fn check_modulus_ratio(a: &HpComplex, b: &HpComplex, ctx: &PrecisionContext) -> Result<(), QError> {
    if a.abs_below(&ctx.pole_guard()) {
        return Err(QError::domain("bilateral slot factors require a != 0"));
    }
    if !b.abs().lt(&a.abs()) {
        return Err(QError::domain("bilateral slot factors require |b/a| < 1"));
    }
    Ok(())
}

/// h(k) = (a;q)_k/(q;q)_k for k = 0..=k_max, by the ratio recurrence.
fn unilateral_ratio_table(
    a: &HpComplex,
    q: &HpComplex,
    k_max: usize,
    ctx: &PrecisionContext,
) -> Result<Vec<HpComplex>, QError> {
    let bits = ctx.precision_bits;
    let one = HpComplex::one(bits);
    let mut table = Vec::with_capacity(k_max + 1);
    table.push(one.clone());
    let mut aq = a.to_bits(bits);
    let mut qk = q.to_bits(bits);
    for _ in 0..k_max {
        let prev = table.last().expect("nonempty").clone();
        table.push(prev.mul(&one.sub(&aq)).div(&one.sub(&qk)));
        aq = aq.mul(q);
        qk = qk.mul(q);
    }
    Ok(table)
}

/// h(k) = (a;q)_k/(b;q)_k for |k| ≤ k_max as a Laurent table, pole-guarded in
/// both directions (b = q^(−k) forward, a = q^m backward).
fn bilateral_ratio_table(
    a: &HpComplex,
    b: &HpComplex,
    q: &HpComplex,
    k_max: i64,
    ctx: &PrecisionContext,
) -> Result<Laurent, QError> {
    let bits = ctx.precision_bits;
    let guard = ctx.pole_guard();
    let one = HpComplex::one(bits);
    if q.abs_below(&guard) {
        return Err(QError::domain("bilateral slot factors require q != 0"));
    }
    let len = (2 * k_max + 1) as usize;
    let mut coef = vec![HpComplex::zero(bits); len];
    let center = k_max as usize;
    coef[center] = one.clone();
    let mut aq = a.to_bits(bits);
    let mut bq = b.to_bits(bits);
    for k in 0..k_max {
        let bfac = one.sub(&bq);
        if bfac.abs_below(&guard) {
            return Err(QError::pole(format!(
                "slot factor: b within pole guard of q^(-{k})"
            )));
        }
        coef[center + k as usize + 1] = coef[center + k as usize].mul(&one.sub(&aq)).div(&bfac);
        aq = aq.mul(q);
        bq = bq.mul(q);
    }
    let q_inv = q.recip();
    let mut aqm = a.mul(&q_inv);
    let mut bqm = b.mul(&q_inv);
    for m in 0..k_max {
        let afac = one.sub(&aqm);
        if afac.abs_below(&guard) {
            return Err(QError::pole(format!(
                "slot factor: a within pole guard of q^{}",
                m + 1
            )));
        }
        coef[center - m as usize - 1] = coef[center - m as usize].mul(&one.sub(&bqm)).div(&afac);
        aqm = aqm.mul(&q_inv);
        bqm = bqm.mul(&q_inv);
    }
    Ok(Laurent { off: -k_max, coef })
}

/// f(k) = 1/(1 − a q^k) for |k| ≤ k_max, pole-guarded.
fn reciprocal_table(
    a: &HpComplex,
    q: &HpComplex,
    k_max: i64,
    ctx: &PrecisionContext,
) -> Result<Laurent, QError> {
    let bits = ctx.precision_bits;
    let guard = ctx.pole_guard();
    let one = HpComplex::one(bits);
    if q.abs_below(&guard) {
        return Err(QError::domain("slot factors require q != 0"));
    }
    let len = (2 * k_max + 1) as usize;
    let mut coef = vec![HpComplex::zero(bits); len];
    let mut aqk = a.mul(&q.pow_i64(-k_max));
    for (idx, slot) in coef.iter_mut().enumerate() {
        let fac = one.sub(&aqk);
        if fac.abs_below(&guard) {
            return Err(QError::pole(format!(
                "slot factor: a within pole guard of q^({})",
                k_max - idx as i64
            )));
        }
        *slot = fac.recip();
        aqk = aqk.mul(q);
    }
    Ok(Laurent { off: -k_max, coef })
}

/// Shared window rule: smallest K with |h(−K)| · max(1, sup|h|)^(r−1) below
/// 10^(−tolerance_digits−10), shifted by |n| and capped at max_window.
fn pick_window(table: &Laurent, r: u32, n: i64, ctx: &PrecisionContext) -> usize {
    let bits = ctx.precision_bits;
    let eps = HpReal::pow10(-(ctx.tolerance_digits as i64 + 10), bits);
    let mut sup = HpReal::one(bits);
    for c in &table.coef {
        sup = sup.max(&c.abs());
    }
    let amplify = sup.pow_i64(r as i64 - 1);
    let k_max = -table.off;
    for j in 8..=k_max {
        let mag = table.get(-j).expect("inside table").abs();
        if mag.mul(&amplify).lt(&eps) {
            return ((j + n.abs()) as usize).min(ctx.max_window).max(8);
        }
    }
    ctx.max_window
}

/// Extracts the x^n coefficient of Π slots via clipped convolution — the
/// windowed filter-sum value.
fn filter_coefficient(
    table: &Laurent,
    roots: &[HpComplex],
    r: u32,
    n: i64,
    bits: usize,
) -> HpComplex {
    let k_window = -table.off;
    let mut acc = Laurent::one(bits);
    for w in 1..=r as i64 {
        let coef = (-k_window..=k_window)
            .map(|k| {
                table
                    .get(k)
                    .expect("inside window")
                    .mul(&roots[(w * k).rem_euclid(r as i64) as usize])
            })
            .collect();
        let remaining = (r as i64 - w) * k_window;
        acc = acc.conv(
            &Laurent {
                off: -k_window,
                coef,
            },
            n - remaining,
            n + remaining,
            bits,
        );
    }
    acc.get(n).cloned().unwrap_or_else(|| HpComplex::zero(bits))
}

/// Laurent polynomial with coefficient `coef[i]` attached to power `off + i`.
#[derive(Clone, Debug)]
struct Laurent {
    off: i64,
    coef: Vec<HpComplex>,
}

impl Laurent {
    fn one(bits: usize) -> Self {
        Laurent {
            off: 0,
            coef: vec![HpComplex::one(bits)],
        }
    }

    fn get(&self, k: i64) -> Option<&HpComplex> {
        if k < self.off {
            return None;
        }
        self.coef.get((k - self.off) as usize)
    }

    /// Keeps powers within [−k, k].
    fn truncated(&self, k: i64) -> Laurent {
        let lo = self.off.max(-k);
        let hi = (self.off + self.coef.len() as i64 - 1).min(k);
        let coef = (lo..=hi)
            .map(|p| self.get(p).expect("inside range").clone())
            .collect();
        Laurent { off: lo, coef }
    }

    /// Product clipped to output powers in [lo, hi].
    fn conv(&self, rhs: &Laurent, lo: i64, hi: i64, bits: usize) -> Laurent {
        let full_lo = (self.off + rhs.off).max(lo);
        let full_hi =
            (self.off + self.coef.len() as i64 - 1 + rhs.off + rhs.coef.len() as i64 - 1).min(hi);
        if full_hi < full_lo {
            return Laurent {
                off: 0,
                coef: vec![HpComplex::zero(bits)],
            };
        }
        let mut coef = Vec::with_capacity((full_hi - full_lo + 1) as usize);
        for p in full_lo..=full_hi {
            let mut acc = HpComplex::zero(bits);
            for (i, c) in self.coef.iter().enumerate() {
                let other = p - (self.off + i as i64);
                if let Some(d) = rhs.get(other) {
                    if !c.is_zero() && !d.is_zero() {
                        acc = acc.add(&c.mul(d));
                    }
                }
            }
            coef.push(acc);
        }
        Laurent { off: full_lo, coef }
    }
}
