//! Numeric substrate: precision context, arbitrary-precision real and complex
//! scalars, roots of unity, and integer-exponent powers.
//!
//! Everything downstream computes on these types. Values are immutable after
//! construction and carry their working precision with them; the context is
//! read-only shared state, so all of this is safe to use from concurrently
//! executing evaluations.

mod complex;
mod context;
mod real;
mod roots;
mod value;

pub use complex::HpComplex;
pub use context::PrecisionContext;
pub use real::HpReal;
pub use roots::{root_of_unity, roots_table, RootOfUnity};
pub use value::SeriesValue;

use num_bigint::BigInt;

/// q^(k(k−1)/2) with the exponent carried as an unbounded integer.
///
/// The triangular exponent k(k−1)/2 overflows fixed 32-bit arithmetic near
/// k ≈ 93000, so it is formed in a big integer and the power is taken by
/// repeated squaring.
pub fn q_triangular_power(q: &HpComplex, k: u64) -> HpComplex {
    let k = BigInt::from(k);
    let e = &k * (&k - 1) / 2;
    q.pow_bigint(&e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    #[test]
    fn context_defaults_are_valid() {
        let c = ctx();
        assert_eq!(c.precision_bits, 200);
        assert_eq!(c.tolerance_digits, 30);
        assert_eq!(c.max_terms, 10000);
        assert_eq!(c.max_window, 200);
        assert!(c.pole_guard().is_positive());
    }

    #[test]
    fn context_accepts_documented_examples() {
        assert!(PrecisionContext::new(200, 30, 10000, 200).is_ok());
        assert!(PrecisionContext::new(64, 5, 100, 50).is_ok());
    }

    #[test]
    fn context_rejects_tolerance_too_close_to_precision() {
        assert!(PrecisionContext::new(64, 60, 100, 50).is_err());
    }

    #[test]
    fn context_rejects_small_precision_and_caps() {
        assert!(PrecisionContext::new(32, 5, 100, 50).is_err());
        assert!(PrecisionContext::new(200, 30, 8, 200).is_err());
        assert!(PrecisionContext::new(200, 30, 10000, 4).is_err());
    }

    #[test]
    fn real_decimal_round_trip() {
        let x = HpReal::from_decimal("0.4173", 200).unwrap();
        let s = x.to_string();
        let y = HpReal::from_decimal(&s, 200).unwrap();
        assert!(x.sub(&y).is_zero());
    }

    #[test]
    fn real_pow10_matches_parse() {
        let a = HpReal::pow10(-25, 200);
        let b = HpReal::from_decimal("1e-25", 200).unwrap();
        let rel = a.sub(&b).abs().div(&b);
        assert!(rel.lt(&HpReal::pow10(-55, 200)));
    }

    #[test]
    fn complex_field_ops() {
        let p = 200;
        let a = HpComplex::from_decimal("0.3", "0.4", p).unwrap();
        let b = HpComplex::from_decimal("-0.7", "0.2", p).unwrap();
        let prod = a.mul(&b).div(&b);
        let diff = prod.sub(&a).abs();
        assert!(diff.lt(&HpReal::pow10(-55, p)));
    }

    #[test]
    fn triangular_power_examples() {
        let p = 200;
        let q = HpComplex::from_real(HpReal::from_decimal("0.5", p).unwrap());
        let one = q_triangular_power(&q, 0);
        assert!(one.sub(&HpComplex::one(p)).abs().is_zero());
        let k3 = q_triangular_power(&q, 3);
        let expect = HpComplex::from_real(HpReal::from_decimal("0.125", p).unwrap());
        assert!(k3.sub(&expect).abs().lt(&HpReal::pow10(-55, p)));
        let k4 = q_triangular_power(&q, 4);
        let expect = HpComplex::from_real(HpReal::from_decimal("0.015625", p).unwrap());
        assert!(k4.sub(&expect).abs().lt(&HpReal::pow10(-55, p)));
    }

    #[test]
    fn triangular_power_recurrence() {
        // q^(k(k-1)/2) * q^k = q^((k+1)k/2)
        let p = 200;
        let q = HpComplex::from_decimal("0.31", "0.27", p).unwrap();
        for k in 0..40u64 {
            let lhs = q_triangular_power(&q, k).mul(&q.pow_i64(k as i64));
            let rhs = q_triangular_power(&q, k + 1);
            let diff = lhs.sub(&rhs).abs();
            assert!(diff.lt(&HpReal::pow10(-50, p)), "k={k}");
        }
    }

    #[test]
    fn root_of_unity_analytic_values() {
        let p = 200;
        let tol = HpReal::pow10(-55, p);
        let m1 = root_of_unity(2, 1, p).unwrap();
        assert!(m1.value.add(&HpComplex::one(p)).abs().lt(&tol));
        let m2 = root_of_unity(4, 2, p).unwrap();
        assert!(m2.value.add(&HpComplex::one(p)).abs().lt(&tol));
        // e^(2πi/3) = (-1/2, √3/2)
        let w = root_of_unity(3, 1, p).unwrap();
        let re = HpReal::from_decimal("-0.5", p).unwrap();
        assert!(w.value.re().sub(&re).abs().lt(&tol));
        let three = HpReal::from_i64(3, p);
        let half_sqrt3 = three.sqrt().div(&HpReal::from_i64(2, p));
        assert!(w.value.im().sub(&half_sqrt3).abs().lt(&tol));
    }

    #[test]
    fn root_of_unity_inverse_pairs() {
        let p = 200;
        let tol = HpReal::pow10(-55, p);
        for r in 1..=7u32 {
            for i in 0..r as i64 {
                let a = root_of_unity(r, i, p).unwrap();
                let b = root_of_unity(r, r as i64 - i, p).unwrap();
                let prod = a.value.mul(&b.value);
                assert!(prod.sub(&HpComplex::one(p)).abs().lt(&tol), "r={r} i={i}");
            }
        }
    }

    #[test]
    fn root_of_unity_power_is_one() {
        let p = 200;
        let tol = HpReal::pow10(-55, p);
        for r in 1..=9u32 {
            let w = root_of_unity(r, 1, p).unwrap();
            let pw = w.value.pow_i64(r as i64);
            assert!(pw.sub(&HpComplex::one(p)).abs().lt(&tol), "r={r}");
        }
    }

    #[test]
    fn root_orthogonality() {
        // Σ_{i=0}^{r-1} ζ_r^(i·j) = r when r | j, else ~0.
        let p = 200;
        let tol = HpReal::pow10(-30, p);
        for r in 2..=6u32 {
            for j in 0..=(2 * r as i64) {
                let mut s = HpComplex::zero(p);
                for i in 0..r as i64 {
                    s = s.add(&root_of_unity(r, i * j, p).unwrap().value);
                }
                if j % r as i64 == 0 {
                    let expect = HpComplex::from_real(HpReal::from_i64(r as i64, p));
                    assert!(s.sub(&expect).abs().lt(&tol), "r={r} j={j}");
                } else {
                    assert!(s.abs().lt(&tol), "r={r} j={j}");
                }
            }
        }
    }

    #[test]
    fn root_rejects_zero_order() {
        assert!(root_of_unity(0, 1, 200).is_err());
    }

    #[test]
    fn complex_pow_bigint_negative() {
        let p = 200;
        let z = HpComplex::from_decimal("0.6", "0.1", p).unwrap();
        let e = BigInt::from(-7);
        let direct = HpComplex::one(p).div(&z.pow_i64(7));
        let viapow = z.pow_bigint(&e);
        assert!(direct.sub(&viapow).abs().lt(&HpReal::pow10(-50, p)));
    }
}
