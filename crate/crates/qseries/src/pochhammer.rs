//! q-shifted factorials (a;q)_n: finite with either sign of index, infinite,
//! and multi-base products, all with explicit truncation-error control.
//!
//! The negative-index symbol follows the convention consistent with bilateral
//! summation:
//!
//! > (a;q)_{−m} = 1 / ((a q^{−m}; q)_m)
//!
//! so that (a;q)_{n+1} = (a;q)_n·(1 − a q^n) holds for every integer n.

use crate::error::QError;
use crate::kernel::{HpComplex, HpReal, PrecisionContext, SeriesValue};

/// Index of a q-shifted factorial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PochIndex {
    Finite(i64),
    Infinite,
}

/// Rejects nomes outside |q| ≤ 0.999 (the strict |q| < 1 requirement with an
/// enforcement margin).
pub(crate) fn check_nome(q: &HpComplex) -> Result<(), QError> {
    let limit = HpReal::from_decimal("0.999", q.bits()).expect("limit literal");
    if q.norm_sqr().gt(&limit.mul(&limit)) {
        return Err(QError::domain("|q| must be below 0.999"));
    }
    Ok(())
}

/// (a;q)_n for any integer n.
///
/// For n ≥ 0 this is the exact product Π_{j=0}^{n−1}(1 − a q^j). For n < 0 it
/// is 1 / Π_{j=1}^{|n|}(1 − a q^{−j}), which requires a to stay away from
/// q^1..q^{|n|}; a denominator factor with magnitude below the pole guard is
/// reported as a pole naming the offending j.
pub fn poch_finite(
    a: &HpComplex,
    q: &HpComplex,
    n: i64,
    ctx: &PrecisionContext,
) -> Result<HpComplex, QError> {
    check_nome(q)?;
    let bits = ctx.precision_bits;
    let one = HpComplex::one(bits);
    if n >= 0 {
        let mut prod = one.clone();
        let mut aq = a.to_bits(bits);
        let q = q.to_bits(bits);
        for _ in 0..n {
            prod = prod.mul(&one.sub(&aq));
            aq = aq.mul(&q);
        }
        return Ok(prod);
    }
    let guard = ctx.pole_guard();
    if q.abs_below(&guard) {
        return Err(QError::pole("negative-index symbol needs q != 0"));
    }
    let q_inv = q.to_bits(bits).recip();
    let mut denom = one.clone();
    let mut aq = a.to_bits(bits).mul(&q_inv);
    for j in 1..=(-n) {
        let factor = one.sub(&aq);
        if factor.abs_below(&guard) {
            return Err(QError::pole(format!(
                "(a;q)_{n}: factor 1 - a*q^(-{j}) vanishes (a within pole guard of q^{j})"
            )));
        }
        denom = denom.mul(&factor);
        aq = aq.mul(&q_inv);
    }
    Ok(one.div(&denom))
}

/// (a;q)_∞ as an adaptively truncated partial product.
///
/// Truncation stops at the smallest N with |a|·|q|^N ≤ 1/2 and
/// |a|·|q|^N/(1−|q|) ≤ ½·10^−tolerance; the reported error estimate is the
/// analytic tail bound 2·|a|·|q|^N/(1−|q|)·|partial|, valid because
/// |log Π_{j≥N}(1−aq^j)| ≤ Σ_{j≥N} 2|a||q|^j once each |aq^j| ≤ 1/2.
/// Exhausting `max_terms` (possible only with |q| near 1) clears `converged`.
pub fn poch_infinite(
    a: &HpComplex,
    q: &HpComplex,
    ctx: &PrecisionContext,
) -> Result<SeriesValue, QError> {
    check_nome(q)?;
    let bits = ctx.precision_bits;
    let one = HpComplex::one(bits);
    let half = HpReal::from_decimal("0.5", bits).expect("half literal");
    let q_abs = q.abs().to_bits(bits);
    let one_minus_q = HpReal::one(bits).sub(&q_abs);
    let half_tol = ctx.tolerance().mul(&half);

    let mut partial = one.clone();
    let mut aq = a.to_bits(bits);
    let mut t = a.abs().to_bits(bits); // |a|·|q|^j
    let mut terms = 0usize;
    let mut converged = false;
    loop {
        if t.le(&half) && t.div(&one_minus_q).le(&half_tol) {
            converged = true;
            break;
        }
        if terms >= ctx.max_terms {
            break;
        }
        partial = partial.mul(&one.sub(&aq));
        aq = aq.mul(q);
        t = t.mul(&q_abs);
        terms += 1;
    }
    let tail = HpReal::from_i64(2, bits)
        .mul(&t)
        .div(&one_minus_q)
        .mul(&partial.abs());
    Ok(SeriesValue {
        value: partial,
        abs_error_estimate: tail,
        terms_used: terms,
        converged,
    })
}

/// Product of several symbols sharing one nome: (a₁, a₂, …; q)_n.
///
/// Finite indices multiply exact products; the infinite index multiplies
/// truncated products and adds their error estimates (to first order).
pub fn poch_multi(
    bases: &[HpComplex],
    q: &HpComplex,
    n: PochIndex,
    ctx: &PrecisionContext,
) -> Result<SeriesValue, QError> {
    check_nome(q)?;
    let mut acc = SeriesValue::exact(HpComplex::one(ctx.precision_bits), 0);
    for a in bases {
        let factor = match n {
            PochIndex::Finite(n) => {
                SeriesValue::exact(poch_finite(a, q, n, ctx)?, n.unsigned_abs() as usize)
            }
            PochIndex::Infinite => poch_infinite(a, q, ctx)?,
        };
        acc = acc.mul(&factor);
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn c(re: &str) -> HpComplex {
        HpComplex::from_decimal(re, "0", 200).unwrap()
    }

    fn cc(re: &str, im: &str) -> HpComplex {
        HpComplex::from_decimal(re, im, 200).unwrap()
    }

    fn tol(d: i64) -> HpReal {
        HpReal::pow10(d, 200)
    }

    #[test]
    fn finite_empty_product() {
        let v = poch_finite(&c("0.3"), &c("0.5"), 0, &ctx()).unwrap();
        assert!(v.sub(&HpComplex::one(200)).abs().is_zero());
    }

    #[test]
    fn finite_single_factor() {
        let v = poch_finite(&c("0.3"), &c("0.5"), 1, &ctx()).unwrap();
        assert!(v.sub(&c("0.7")).abs().lt(&tol(-55)));
    }

    #[test]
    fn negative_index_inverts_shifted_product() {
        // (a;q)_{-2} · (a·q^{-2};q)_2 = 1, both factors evaluated independently
        let ctx = ctx();
        let a = c("0.3");
        let q = c("0.5");
        let lhs = poch_finite(&a, &q, -2, &ctx).unwrap();
        let shifted = a.div(&q.mul(&q));
        let rhs = poch_finite(&shifted, &q, 2, &ctx).unwrap();
        let prod = lhs.mul(&rhs);
        assert!(prod.sub(&HpComplex::one(200)).abs().lt(&tol(-50)));
    }

    #[test]
    fn recurrence_holds_for_both_signs() {
        // (a;q)_{n+1} = (a;q)_n · (1 - a q^n) across the negative/positive seam
        let ctx = ctx();
        let a = cc("0.37", "0.11");
        let q = cc("0.42", "-0.18");
        for n in -50..=50i64 {
            let lhs = poch_finite(&a, &q, n + 1, &ctx).unwrap();
            let qn = q.pow_i64(n);
            let factor = HpComplex::one(200).sub(&a.mul(&qn));
            let rhs = poch_finite(&a, &q, n, &ctx).unwrap().mul(&factor);
            let scale = lhs.abs().max(&HpReal::one(200));
            assert!(lhs.sub(&rhs).abs().div(&scale).lt(&tol(-45)), "n={n}");
        }
    }

    #[test]
    fn negative_index_pole_names_offender() {
        // a = q^2 exactly: factor 1 - a q^{-2} vanishes
        let ctx = ctx();
        let q = c("0.5");
        let a = c("0.25");
        let err = poch_finite(&a, &q, -3, &ctx).unwrap_err();
        match err {
            QError::Pole { location } => assert!(location.contains("2"), "{location}"),
            other => panic!("expected pole, got {other:?}"),
        }
    }

    #[test]
    fn infinite_zero_base_is_one() {
        let v = poch_infinite(&HpComplex::zero(200), &c("0.5"), &ctx()).unwrap();
        assert!(v.converged);
        assert!(v.value.sub(&HpComplex::one(200)).abs().is_zero());
    }

    #[test]
    fn infinite_at_half_half_matches_independent_value() {
        // (0.5;0.5)_∞ against an independently computed 45-digit value, plus a
        // second run at higher precision
        let ctx45 = PrecisionContext::new(256, 45, 10000, 200).unwrap();
        let v = poch_infinite(&c("0.5"), &c("0.5"), &ctx45).unwrap();
        let expect = c("0.288788095086602421278899721929230780088911905");
        assert!(v.converged);
        assert!(v.value.sub(&expect).abs().lt(&tol(-40)));
        assert!(v.abs_error_estimate.lt(&tol(-40)));

        let ctx_hi = PrecisionContext::new(384, 45, 10000, 200).unwrap();
        let hi = poch_infinite(&c("0.5"), &c("0.5"), &ctx_hi).unwrap();
        assert!(v.value.sub(&hi.value.to_bits(256)).abs().lt(&tol(-40)));
    }

    #[test]
    fn infinite_unit_base_vanishes() {
        let v = poch_infinite(&HpComplex::one(200), &c("0.5"), &ctx()).unwrap();
        assert!(v.converged);
        assert!(v.value.abs().is_zero());
        assert!(v.abs_error_estimate.is_zero());
    }

    #[test]
    fn infinite_rejects_nome_near_one() {
        let err = poch_infinite(&c("0.5"), &c("0.9999"), &ctx());
        assert!(matches!(err, Err(QError::Domain { .. })));
    }

    #[test]
    fn splitting_property() {
        // (a;q)_∞ = (a;q)_n · (a q^n; q)_∞
        let ctx = ctx();
        let a = cc("0.62", "0.21");
        let q = cc("0.39", "0.12");
        let full = poch_infinite(&a, &q, &ctx).unwrap();
        for n in 0..=30i64 {
            let head = poch_finite(&a, &q, n, &ctx).unwrap();
            let tail = poch_infinite(&a.mul(&q.pow_i64(n)), &q, &ctx).unwrap();
            let prod = head.mul(&tail.value);
            let scale = full.value.abs().max(&HpReal::one(200));
            assert!(
                full.value.sub(&prod).abs().div(&scale).lt(&tol(-30)),
                "n={n}"
            );
        }
    }

    #[test]
    fn inversion_property() {
        let ctx = ctx();
        let a = cc("0.55", "-0.13");
        let q = cc("0.47", "0.08");
        for m in 1..=20i64 {
            let lhs = poch_finite(&a, &q, -m, &ctx).unwrap();
            let rhs = poch_finite(&a.mul(&q.pow_i64(-m)), &q, m, &ctx).unwrap();
            let prod = lhs.mul(&rhs);
            assert!(prod.sub(&HpComplex::one(200)).abs().lt(&tol(-30)), "m={m}");
        }
    }

    #[test]
    fn reciprocal_of_shifted_tail() {
        // (x;q)_∞ / (x q^{-n}; q)_∞ = 1 / ((x q^{-n}; q)_n)
        let ctx = ctx();
        let x = c("0.6");
        let q = c("0.3");
        for n in 1..=8i64 {
            let shifted = x.mul(&q.pow_i64(-n));
            let num = poch_infinite(&x, &q, &ctx).unwrap();
            let den = poch_infinite(&shifted, &q, &ctx).unwrap();
            let lhs = num.value.div(&den.value);
            let rhs = poch_finite(&shifted, &q, n, &ctx).unwrap().recip();
            let scale = rhs.abs().max(&HpReal::one(200));
            assert!(lhs.sub(&rhs).abs().div(&scale).lt(&tol(-30)), "n={n}");
        }
    }

    #[test]
    fn multi_empty_is_one() {
        let v = poch_multi(&[], &c("0.5"), PochIndex::Finite(3), &ctx()).unwrap();
        assert!(v.value.sub(&HpComplex::one(200)).abs().is_zero());
        let v = poch_multi(&[], &c("0.5"), PochIndex::Infinite, &ctx()).unwrap();
        assert!(v.value.sub(&HpComplex::one(200)).abs().is_zero());
    }

    #[test]
    fn multi_finite_direct_expansion() {
        // (0.2, 0.4; 0.5)_2 = (1-0.2)(1-0.1)(1-0.4)(1-0.2)
        let v = poch_multi(
            &[c("0.2"), c("0.4")],
            &c("0.5"),
            PochIndex::Finite(2),
            &ctx(),
        )
        .unwrap();
        let expect = c("0.8").mul(&c("0.9")).mul(&c("0.6")).mul(&c("0.8"));
        assert!(v.value.sub(&expect).abs().lt(&tol(-55)));
    }

    #[test]
    fn multi_infinite_is_product_of_parts() {
        // (q, q^4; q^5)_∞ at q = 0.3 against two independent single products
        let ctx = ctx();
        let q = c("0.3");
        let q4 = q.pow_i64(4);
        let q5 = q.pow_i64(5);
        let joint = poch_multi(&[q.clone(), q4.clone()], &q5, PochIndex::Infinite, &ctx).unwrap();
        let p1 = poch_infinite(&q, &q5, &ctx).unwrap();
        let p2 = poch_infinite(&q4, &q5, &ctx).unwrap();
        let prod = p1.value.mul(&p2.value);
        assert!(joint.value.sub(&prod).abs().lt(&tol(-50)));
        assert!(joint.converged);
    }
}
