//! Adaptive summation of the unilateral and bilateral basic hypergeometric
//! series handled by this crate: the generic term-stream engines, ₂φ₁, the
//! bilateral ₁ψ₁, the weighted sums A_q^(α) and B_q^(α), and the entire
//! function F(a,c;z), together with their classical product sides and
//! transforms.
//!
//! Every evaluator generates terms by ratio recurrences (O(1) work per term,
//! no cancellation growth from rebuilding Pochhammer products), checks
//! denominator factors against the context pole guard *before* dividing, and
//! applies one shared stopping rule: three consecutive terms below
//! 10^(−tolerance_digits−5)·(1 + |partial|) with the last term no larger than
//! its predecessor. Weighted series such as Σ q^(αn²) x^n pass through an
//! interior maximum before decaying, which is why a single small term is
//! never trusted.

use num_rational::Rational64;

use crate::error::QError;
use crate::kernel::{HpComplex, HpReal, PrecisionContext, SeriesValue};
use crate::pochhammer::{check_nome, poch_infinite, poch_multi, PochIndex};

/// Sums Σ_{k=0}^∞ term_at(k) under the shared stopping rule.
///
/// `term_at` is called once per index, in increasing order, so it may carry
/// recurrence state. The error estimate is the geometric tail extrapolated
/// from the magnitudes of the last two terms; exhausting `max_terms` clears
/// `converged` and reports the partial sum.
pub fn sum_unilateral<F>(mut term_at: F, ctx: &PrecisionContext) -> SeriesValue
where
    F: FnMut(usize) -> HpComplex,
{
    sum_stream(|k| Ok(term_at(k)), ctx.max_terms, ctx).expect("term source is infallible")
}

/// Sums Σ_{n=−∞}^∞ term_at(n) as two unilateral halves (n ≥ 0 and n ≤ −1),
/// each capped at `max_window`; their values and error estimates add.
///
/// A half that fails the decay test within the window is a structured
/// non-convergence error naming the failing direction.
pub fn sum_bilateral<F>(mut term_at: F, ctx: &PrecisionContext) -> Result<SeriesValue, QError>
where
    F: FnMut(i64) -> HpComplex,
{
    let pos = sum_stream(|k| Ok(term_at(k as i64)), ctx.max_window, ctx)?;
    let pos = require_half(pos, "nonnegative-index", ctx)?;
    let neg = sum_stream(|j| Ok(term_at(-(j as i64) - 1)), ctx.max_window, ctx)?;
    let neg = require_half(neg, "negative-index", ctx)?;
    Ok(pos.add(&neg))
}

/// ₂φ₁(a,b;c | q,z) = Σ_{k≥0} (a;q)_k (b;q)_k / ((c;q)_k (q;q)_k) · z^k
/// for |z| < 1, via the term ratio
/// (1−aq^k)(1−bq^k) / ((1−cq^k)(1−q^(k+1))) · z.
pub fn eval_2phi1(
    a: &HpComplex,
    b: &HpComplex,
    c: &HpComplex,
    q: &HpComplex,
    z: &HpComplex,
    ctx: &PrecisionContext,
) -> Result<SeriesValue, QError> {
    check_nome(q)?;
    let bits = ctx.precision_bits;
    if !z.abs().lt(&HpReal::one(bits)) {
        return Err(QError::domain("2phi1 requires |z| < 1"));
    }
    let guard = ctx.pole_guard();
    let one = HpComplex::one(bits);
    let mut term = one.clone();
    let mut aq = a.to_bits(bits);
    let mut bq = b.to_bits(bits);
    let mut cq = c.to_bits(bits);
    let mut qk = q.to_bits(bits); // q^k at the k-th call
    sum_stream(
        |k| {
            if k > 0 {
                let cfac = one.sub(&cq);
                if cfac.abs_below(&guard) {
                    return Err(QError::pole(format!(
                        "2phi1 denominator (c;q)_k: c within pole guard of q^(-{})",
                        k - 1
                    )));
                }
                let num = one.sub(&aq).mul(&one.sub(&bq)).mul(z);
                let den = cfac.mul(&one.sub(&qk));
                term = term.mul(&num).div(&den);
                aq = aq.mul(q);
                bq = bq.mul(q);
                cq = cq.mul(q);
                qk = qk.mul(q);
            }
            Ok(term.clone())
        },
        ctx.max_terms,
        ctx,
    )
}

/// A_q^(α)(a;t) = Σ_{n≥0} (a;q)_n q^(αn²) t^n / (q;q)_n.
///
/// α must be a nonnegative rational with denominator ≤ 12. Integral α keeps
/// q complex and steps the weight q^(α(2n+1)) through exact integer powers;
/// fractional α requires real q ∈ (0,1) and steps through exp(α·(2n+1)·ln q)
/// (a complex nome would make the fractional power branch-ambiguous). α = 0
/// needs |t| ≤ 0.95, the convergence disk with the enforcement margin.
#[allow(non_snake_case)]
pub fn eval_A(
    alpha: Rational64,
    a: &HpComplex,
    q: &HpComplex,
    t: &HpComplex,
    ctx: &PrecisionContext,
) -> Result<SeriesValue, QError> {
    check_nome(q)?;
    check_alpha(alpha, q)?;
    let bits = ctx.precision_bits;
    if alpha.numer() == &0 && !inside_disk_with_margin(t, bits) {
        return Err(QError::domain("A with alpha = 0 requires |t| <= 0.95"));
    }
    let one = HpComplex::one(bits);
    let mut term = one.clone();
    let mut aq = a.to_bits(bits);
    let mut qn1 = q.to_bits(bits); // q^(n+1) at the n-th→(n+1)-th step
    let mut weight = QPowers::odd_powers(alpha, q, bits)?;
    sum_stream(
        |k| {
            if k > 0 {
                let num = one.sub(&aq).mul(&weight.current()).mul(t);
                term = term.mul(&num).div(&one.sub(&qn1));
                weight.advance();
                aq = aq.mul(q);
                qn1 = qn1.mul(q);
            }
            Ok(term.clone())
        },
        ctx.max_terms,
        ctx,
    )
}

/// B_q^(α)(a,b;x) = Σ_{n=−∞}^∞ (a;q)_n / (b;q)_n · q^(αn²) x^n.
///
/// For α > 0 any x ≠ 0 is admitted (the q^(αn²) weight dominates both tails);
/// α = 0 is the bilateral ₁ψ₁ situation and requires the annulus
/// |b/a| + 0.05 ≤ |x| ≤ 0.95. The two index directions step through
///
/// > t(n+1)/t(n) = (1−aq^n)/(1−bq^n) · q^(α(2n+1)) · x          (n ≥ 0)
/// > t(n−1)/t(n) = (1−bq^(n−1))/(1−aq^(n−1)) · q^(α(1−2n)) / x  (n ≤ 0)
///
/// with b = q^(−n) a pole of the first ratio and a = q^m (m ≥ 1) a pole of
/// the second.
#[allow(non_snake_case)]
pub fn eval_B(
    alpha: Rational64,
    a: &HpComplex,
    b: &HpComplex,
    q: &HpComplex,
    x: &HpComplex,
    ctx: &PrecisionContext,
) -> Result<SeriesValue, QError> {
    check_nome(q)?;
    check_alpha(alpha, q)?;
    let bits = ctx.precision_bits;
    let guard = ctx.pole_guard();
    if x.is_zero() {
        return Err(QError::domain("bilateral sum requires x != 0"));
    }
    if q.abs_below(&guard) {
        return Err(QError::domain("bilateral sum requires q != 0"));
    }
    if alpha.numer() == &0 {
        if a.abs_below(&guard) {
            return Err(QError::domain(
                "alpha = 0 requires a != 0 (the annulus |b/a| < |x|)",
            ));
        }
        let margin = HpReal::from_decimal("0.05", bits).expect("margin literal");
        let inner = b.abs().div(&a.abs()).add(&margin);
        if x.abs().lt(&inner) || !inside_disk_with_margin(x, bits) {
            return Err(QError::domain(
                "alpha = 0 requires the annulus |b/a| + 0.05 <= |x| <= 0.95",
            ));
        }
    }

    let one = HpComplex::one(bits);
    let pos = {
        let mut term = one.clone();
        let mut aq = a.to_bits(bits);
        let mut bq = b.to_bits(bits);
        let mut weight = QPowers::odd_powers(alpha, q, bits)?;
        sum_stream(
            |k| {
                if k > 0 {
                    let bfac = one.sub(&bq);
                    if bfac.abs_below(&guard) {
                        return Err(QError::pole(format!(
                            "B denominator (b;q)_n: b within pole guard of q^(-{})",
                            k - 1
                        )));
                    }
                    let num = one.sub(&aq).mul(&weight.current()).mul(x);
                    term = term.mul(&num).div(&bfac);
                    weight.advance();
                    aq = aq.mul(q);
                    bq = bq.mul(q);
                }
                Ok(term.clone())
            },
            ctx.max_window,
            ctx,
        )?
    };
    let pos = require_half(pos, "nonnegative-index", ctx)?;

    let neg = {
        let q_inv = q.to_bits(bits).recip();
        let x_inv = x.to_bits(bits).recip();
        let mut term = one.clone();
        let mut aq = a.mul(&q_inv); // a·q^(−j−1) at the j-th call
        let mut bq = b.mul(&q_inv);
        let mut weight = QPowers::odd_powers(alpha, q, bits)?;
        sum_stream(
            |j| {
                let afac = one.sub(&aq);
                if afac.abs_below(&guard) {
                    return Err(QError::pole(format!(
                        "B numerator (a;q)_n at negative n: a within pole guard of q^{}",
                        j + 1
                    )));
                }
                let num = one.sub(&bq).mul(&weight.current()).mul(&x_inv);
                term = term.mul(&num).div(&afac);
                weight.advance();
                aq = aq.mul(&q_inv);
                bq = bq.mul(&q_inv);
                Ok(term.clone())
            },
            ctx.max_window,
            ctx,
        )?
    };
    let neg = require_half(neg, "negative-index", ctx)?;
    Ok(pos.add(&neg))
}

/// F(a,c;z) = Σ_{k≥0} (a;q)_k (−1)^k q^(k(k−1)/2) z^k / ((q;q)_k (c;q)_k),
/// entire in z thanks to the triangular weight; the term ratio is
/// −(1−aq^k) q^k z / ((1−q^(k+1))(1−cq^k)).
#[allow(non_snake_case)]
pub fn eval_F(
    a: &HpComplex,
    c: &HpComplex,
    q: &HpComplex,
    z: &HpComplex,
    ctx: &PrecisionContext,
) -> Result<SeriesValue, QError> {
    check_nome(q)?;
    let bits = ctx.precision_bits;
    let guard = ctx.pole_guard();
    let one = HpComplex::one(bits);
    let mut term = one.clone();
    let mut aq = a.to_bits(bits);
    let mut cq = c.to_bits(bits);
    let mut qk = HpComplex::one(bits); // q^(k−1) at the k-th call
    let mut qk1 = q.to_bits(bits); // q^k at the k-th call
    sum_stream(
        |k| {
            if k > 0 {
                let cfac = one.sub(&cq);
                if cfac.abs_below(&guard) {
                    return Err(QError::pole(format!(
                        "F denominator (c;q)_k: c within pole guard of q^(-{})",
                        k - 1
                    )));
                }
                let num = one.sub(&aq).mul(&qk).mul(z).neg();
                let den = cfac.mul(&one.sub(&qk1));
                term = term.mul(&num).div(&den);
                aq = aq.mul(q);
                cq = cq.mul(q);
                qk = qk.mul(q);
                qk1 = qk1.mul(q);
            }
            Ok(term.clone())
        },
        ctx.max_terms,
        ctx,
    )
}

/// The bilateral ₁ψ₁(a,b;q,z) = Σ_{n∈ℤ} (a;q)_n/(b;q)_n · z^n — the α = 0
/// case of [`eval_B`], convergent on the annulus |b/a| < |z| < 1 (enforced
/// with the 0.05 margins).
pub fn eval_1psi1(
    a: &HpComplex,
    b: &HpComplex,
    q: &HpComplex,
    z: &HpComplex,
    ctx: &PrecisionContext,
) -> Result<SeriesValue, QError> {
    eval_B(Rational64::from_integer(0), a, b, q, z, ctx)
}

/// The product side paired with [`eval_1psi1`]:
///
/// > (q, b/a, az, q/(az); q)_∞ / ((b, q/a, z, b/(az); q)_∞)
pub fn psi11_product(
    a: &HpComplex,
    b: &HpComplex,
    q: &HpComplex,
    z: &HpComplex,
    ctx: &PrecisionContext,
) -> Result<SeriesValue, QError> {
    check_nome(q)?;
    let guard = ctx.pole_guard();
    if a.abs_below(&guard) || z.abs_below(&guard) {
        return Err(QError::domain("product side requires a != 0 and z != 0"));
    }
    let az = a.mul(z);
    let num = poch_multi(
        &[q.clone(), b.div(a), az.clone(), q.div(&az)],
        q,
        PochIndex::Infinite,
        ctx,
    )?;
    let den = poch_multi(
        &[b.clone(), q.div(a), z.clone(), b.div(&az)],
        q,
        PochIndex::Infinite,
        ctx,
    )?;
    if den.value.abs_below(&guard) {
        return Err(QError::pole(
            "product denominator (b, q/a, z, b/(az); q)_inf vanishes",
        ));
    }
    Ok(num.div(&den))
}

/// Σ_{k≥0} (q;q)_(n+k−1) / ((q;q)_k (q;q)_(n−1)) · x^k for |x| < 1 — the
/// power-series expansion of 1/(x;q)_n, via the ratio (1−q^(n+k)) x / (1−q^(k+1)).
///
/// n = 0 returns 1 exactly (empty-product convention on both sides).
pub fn qbinom1_series(
    n: i64,
    x: &HpComplex,
    q: &HpComplex,
    ctx: &PrecisionContext,
) -> Result<SeriesValue, QError> {
    check_nome(q)?;
    if n < 0 {
        return Err(QError::param("n", "must be nonnegative"));
    }
    let bits = ctx.precision_bits;
    if n == 0 {
        return Ok(SeriesValue::exact(HpComplex::one(bits), 0));
    }
    if !x.abs().lt(&HpReal::one(bits)) {
        return Err(QError::domain("expansion of 1/(x;q)_n requires |x| < 1"));
    }
    let one = HpComplex::one(bits);
    let mut term = one.clone();
    let mut qnk = q.pow_i64(n); // q^(n+k) at the k-th call
    let mut qk1 = q.to_bits(bits); // q^(k+1) at the k-th call
    sum_stream(
        |k| {
            if k > 0 {
                let num = one.sub(&qnk).mul(x);
                term = term.mul(&num).div(&one.sub(&qk1));
                qnk = qnk.mul(q);
                qk1 = qk1.mul(q);
            }
            Ok(term.clone())
        },
        ctx.max_terms,
        ctx,
    )
}

/// Right-hand side of the Heine transformation
///
/// > ₂φ₁(a,b;c | q,z) = (c/b, bz; q)_∞ / ((c, z; q)_∞) ·
/// >                    ₂φ₁(abz/c, b; bz | q, c/b)
///
/// evaluated as written (prefactor times transformed series), for
/// cross-checking a direct [`eval_2phi1`] of the left side.
pub fn heine_transform(
    a: &HpComplex,
    b: &HpComplex,
    c: &HpComplex,
    q: &HpComplex,
    z: &HpComplex,
    ctx: &PrecisionContext,
) -> Result<SeriesValue, QError> {
    check_nome(q)?;
    let guard = ctx.pole_guard();
    if b.abs_below(&guard) || c.abs_below(&guard) {
        return Err(QError::domain("transform requires b != 0 and c != 0"));
    }
    let bz = b.mul(z);
    let num = poch_multi(&[c.div(b), bz.clone()], q, PochIndex::Infinite, ctx)?;
    let den = poch_multi(&[c.clone(), z.clone()], q, PochIndex::Infinite, ctx)?;
    if den.value.abs_below(&guard) {
        return Err(QError::pole(
            "transform prefactor denominator (c, z; q)_inf vanishes",
        ));
    }
    let inner = eval_2phi1(&a.mul(&bz).div(c), b, &bz, q, &c.div(b), ctx)?;
    Ok(num.div(&den).mul(&inner))
}

/// The representation of F(a,c;z) with the roles of c and z interchanged:
///
/// > F(a,c;z) = (z;q)_∞ / (c;q)_∞ · Σ_{k≥0} (az/c;q)_k (−1)^k q^(k(k−1)/2) c^k
/// >            / ((q;q)_k (z;q)_k)
///
/// i.e. (z;q)_∞/(c;q)_∞ · F(az/c, z; c), requiring neither c nor z of the
/// form q^(−m).
pub fn eval_f_swapped(
    a: &HpComplex,
    c: &HpComplex,
    q: &HpComplex,
    z: &HpComplex,
    ctx: &PrecisionContext,
) -> Result<SeriesValue, QError> {
    check_nome(q)?;
    let guard = ctx.pole_guard();
    if c.abs_below(&guard) {
        return Err(QError::domain("interchanging c and z requires c != 0"));
    }
    let num = poch_infinite(z, q, ctx)?;
    let den = poch_infinite(c, q, ctx)?;
    if den.value.abs_below(&guard) {
        return Err(QError::pole(
            "prefactor denominator (c;q)_inf vanishes (c = q^(-m))",
        ));
    }
    let inner = eval_F(&a.mul(z).div(c), z, q, c, ctx)?;
    Ok(num.div(&den).mul(&inner))
}

/// Ramanujan's entire function A_q(z) = Σ_{n≥0} q^(n²) (−z)^n / (q;q)_n,
/// evaluated as A_q^(1)(0; −z).
pub fn ramanujan_a(
    q: &HpComplex,
    z: &HpComplex,
    ctx: &PrecisionContext,
) -> Result<SeriesValue, QError> {
    let bits = ctx.precision_bits;
    eval_A(
        Rational64::from_integer(1),
        &HpComplex::zero(bits),
        q,
        &z.neg(),
        ctx,
    )
}

/// The linear-exponent variant Σ_{n≥0} q^n (−z)^n / (q;q)_n, which is *not*
/// the same function as [`ramanujan_a`]; both are kept evaluable so the two
/// can be compared numerically. Converges for |qz| < 1 (enforced as ≤ 0.95).
pub fn ramanujan_a_linear(
    q: &HpComplex,
    z: &HpComplex,
    ctx: &PrecisionContext,
) -> Result<SeriesValue, QError> {
    check_nome(q)?;
    let bits = ctx.precision_bits;
    if !inside_disk_with_margin(&q.mul(z), bits) {
        return Err(QError::domain(
            "linear-exponent variant requires |q·z| <= 0.95",
        ));
    }
    let one = HpComplex::one(bits);
    let mut term = one.clone();
    let mut qk1 = q.to_bits(bits);
    let qz = q.mul(z).neg();
    Ok(sum_stream(
        |k| {
            if k > 0 {
                term = term.mul(&qz).div(&one.sub(&qk1));
                qk1 = qk1.mul(q);
            }
            Ok(term.clone())
        },
        ctx.max_terms,
        ctx,
    )
    .expect("term source is infallible"))
}

/// Core summation loop shared by every unilateral engine and each bilateral
/// half: accumulates terms until three consecutive ones fall below the
/// threshold 10^(−tolerance_digits−5)·(1+|partial|) with decay established
/// (|t_N| ≤ |t_(N−1)|), or `cap` terms have been consumed (converged = false).
fn sum_stream<F>(mut next: F, cap: usize, ctx: &PrecisionContext) -> Result<SeriesValue, QError>
where
    F: FnMut(usize) -> Result<HpComplex, QError>,
{
    let bits = ctx.precision_bits;
    let threshold0 = ctx.term_threshold();
    let one = HpReal::one(bits);
    let mut partial = HpComplex::zero(bits);
    let mut small_run = 0usize;
    let mut mag_prev2: Option<HpReal> = None;
    let mut mag_prev: Option<HpReal> = None;
    let mut terms = 0usize;
    while terms < cap {
        let t = next(terms)?;
        partial = partial.add(&t);
        terms += 1;
        let mag = t.abs();
        if mag.lt(&threshold0.mul(&one.add(&partial.abs()))) {
            small_run += 1;
        } else {
            small_run = 0;
        }
        let decayed = mag_prev.as_ref().is_some_and(|p| mag.le(p));
        if small_run >= 3 && decayed {
            let tail = geometric_tail(&mag, mag_prev.as_ref().expect("decay checked"), bits);
            return Ok(SeriesValue {
                value: partial,
                abs_error_estimate: tail,
                terms_used: terms,
                converged: true,
            });
        }
        mag_prev2 = mag_prev.replace(mag);
    }
    let tail = match (&mag_prev2, &mag_prev) {
        (Some(p2), Some(p1)) => geometric_tail(p1, p2, bits),
        (None, Some(p1)) => p1.clone(),
        _ => HpReal::zero(bits),
    };
    Ok(SeriesValue {
        value: partial,
        abs_error_estimate: tail,
        terms_used: terms,
        converged: false,
    })
}

/// Tail of a geometric series fitted to the last two term magnitudes:
/// Σ_{j≥1} cur·ρ^j with ρ = cur/prev. Falls back to `cur` itself when no
/// decay ratio is available.
fn geometric_tail(cur: &HpReal, prev: &HpReal, bits: usize) -> HpReal {
    if cur.is_zero() {
        return HpReal::zero(bits);
    }
    if prev.is_zero() || cur.ge(prev) {
        return cur.clone();
    }
    let rho = cur.div(prev);
    cur.mul(&rho).div(&HpReal::one(bits).sub(&rho))
}

/// Turns a non-converged bilateral half into a structured error naming the
/// failing direction.
fn require_half(
    half: SeriesValue,
    direction: &str,
    ctx: &PrecisionContext,
) -> Result<SeriesValue, QError> {
    if half.converged {
        Ok(half)
    } else {
        Err(QError::NonConvergence {
            what: format!(
                "bilateral sum: {direction} half failed the decay test within max_window = {}",
                ctx.max_window
            ),
        })
    }
}

/// Validates a series weight exponent: nonnegative, denominator ≤ 12, and —
/// when fractional — a real nome in (0,1), since fractional powers of a
/// complex q are branch-ambiguous.
pub(crate) fn check_alpha(alpha: Rational64, q: &HpComplex) -> Result<(), QError> {
    if alpha.numer() < &0 {
        return Err(QError::param("alpha", "must be nonnegative"));
    }
    if alpha.denom() > &12 {
        return Err(QError::param("alpha", "denominator must not exceed 12"));
    }
    if !alpha.is_integer() {
        let real_unit = q.is_real() && q.re().is_positive() && q.re().lt(&HpReal::one(q.bits()));
        if !real_unit {
            return Err(QError::domain("fractional alpha requires real q in (0,1)"));
        }
    }
    Ok(())
}

/// q^e for a rational exponent: exact integer powers when e is integral,
/// exp(e·ln q) otherwise (real q only — callers gate via [`check_alpha`]).
pub(crate) fn q_power_rational(
    e: Rational64,
    q: &HpComplex,
    bits: usize,
) -> Result<HpComplex, QError> {
    if e.is_integer() {
        return Ok(q.to_bits(bits).pow_i64(e.to_integer()));
    }
    let ln_q = q.re().to_bits(bits).ln()?;
    let e_r = HpReal::from_i64(*e.numer(), bits).div(&HpReal::from_i64(*e.denom(), bits));
    Ok(HpComplex::from_real(e_r.mul(&ln_q).exp()))
}

/// |v| ≤ 0.95, the unit disk shrunk by the enforcement margin.
fn inside_disk_with_margin(v: &HpComplex, bits: usize) -> bool {
    let edge = HpReal::from_decimal("0.95", bits).expect("edge literal");
    v.abs().le(&edge)
}

/// Successive weights q^(α(2m+1)) for m = 0, 1, 2, … — the factor by which a
/// q^(αn²) term ratio advances one step outward in either index direction.
///
/// Integral α steps through exact integer powers of a possibly complex q;
/// fractional α (real q only, checked by [`check_alpha`]) steps through
/// exp(α(2m+1)·ln q).
enum QPowers {
    Exact { cur: HpComplex, step: HpComplex },
    RealLog { cur: HpReal, step: HpReal },
}

impl QPowers {
    fn odd_powers(alpha: Rational64, q: &HpComplex, bits: usize) -> Result<Self, QError> {
        if alpha.is_integer() {
            let p = alpha.to_integer();
            Ok(QPowers::Exact {
                cur: q.pow_i64(p),
                step: q.pow_i64(2 * p),
            })
        } else {
            let ln_q = q.re().to_bits(bits).ln()?;
            let alpha_r =
                HpReal::from_i64(*alpha.numer(), bits).div(&HpReal::from_i64(*alpha.denom(), bits));
            let cur = alpha_r.mul(&ln_q).exp();
            let step = alpha_r.mul(&ln_q).mul(&HpReal::from_i64(2, bits)).exp();
            Ok(QPowers::RealLog { cur, step })
        }
    }

    fn current(&self) -> HpComplex {
        match self {
            QPowers::Exact { cur, .. } => cur.clone(),
            QPowers::RealLog { cur, .. } => HpComplex::from_real(cur.clone()),
        }
    }

    fn advance(&mut self) {
        match self {
            QPowers::Exact { cur, step } => *cur = cur.mul(step),
            QPowers::RealLog { cur, step } => *cur = cur.mul(step),
        }
    }
}
