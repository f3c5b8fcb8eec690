use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::QError;
use crate::kernel::real::HpReal;

/// Arbitrary-precision complex number built from two [`HpReal`] parts.
#[derive(Clone, Debug, PartialEq)]
pub struct HpComplex {
    re: HpReal,
    im: HpReal,
}

impl HpComplex {
    pub fn new(re: HpReal, im: HpReal) -> Self {
        HpComplex { re, im }
    }

    pub fn zero(bits: usize) -> Self {
        HpComplex::new(HpReal::zero(bits), HpReal::zero(bits))
    }

    pub fn one(bits: usize) -> Self {
        HpComplex::new(HpReal::one(bits), HpReal::zero(bits))
    }

    pub fn from_real(re: HpReal) -> Self {
        let bits = re.bits();
        HpComplex::new(re, HpReal::zero(bits))
    }

    pub fn from_i64(v: i64, bits: usize) -> Self {
        HpComplex::from_real(HpReal::from_i64(v, bits))
    }

    /// Parses a pair of decimal literals as real and imaginary parts.
    pub fn from_decimal(re: &str, im: &str, bits: usize) -> Result<Self, QError> {
        Ok(HpComplex::new(
            HpReal::from_decimal(re, bits)?,
            HpReal::from_decimal(im, bits)?,
        ))
    }

    pub fn re(&self) -> &HpReal {
        &self.re
    }

    pub fn im(&self) -> &HpReal {
        &self.im
    }

    pub fn bits(&self) -> usize {
        self.re.bits()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        HpComplex::new(self.re.add(&rhs.re), self.im.add(&rhs.im))
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        HpComplex::new(self.re.sub(&rhs.re), self.im.sub(&rhs.im))
    }

    pub fn neg(&self) -> Self {
        HpComplex::new(self.re.neg(), self.im.neg())
    }

    pub fn conj(&self) -> Self {
        HpComplex::new(self.re.clone(), self.im.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let re = self.re.mul(&rhs.re).sub(&self.im.mul(&rhs.im));
        let im = self.re.mul(&rhs.im).add(&self.im.mul(&rhs.re));
        HpComplex::new(re, im)
    }

    pub fn mul_real(&self, rhs: &HpReal) -> Self {
        HpComplex::new(self.re.mul(rhs), self.im.mul(rhs))
    }

    pub fn div(&self, rhs: &Self) -> Self {
        let d = rhs.norm_sqr();
        debug_assert!(!d.is_zero(), "division by zero complex");
        let num = self.mul(&rhs.conj());
        HpComplex::new(num.re.div(&d), num.im.div(&d))
    }

    pub fn div_real(&self, rhs: &HpReal) -> Self {
        HpComplex::new(self.re.div(rhs), self.im.div(rhs))
    }

    pub fn recip(&self) -> Self {
        HpComplex::one(self.bits()).div(self)
    }

    /// |z|² — cheaper than [`HpComplex::abs`]; preferred for threshold tests.
    pub fn norm_sqr(&self) -> HpReal {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    pub fn abs(&self) -> HpReal {
        if self.im.is_zero() {
            return self.re.abs();
        }
        self.norm_sqr().sqrt()
    }

    /// True when |z| < threshold, computed without a square root.
    pub fn abs_below(&self, threshold: &HpReal) -> bool {
        self.norm_sqr().lt(&threshold.mul(threshold))
    }

    /// Integer power by repeated squaring; negative exponents invert once at
    /// the end.
    pub fn pow_i64(&self, k: i64) -> Self {
        self.pow_bigint(&BigInt::from(k))
    }

    /// Power with an unbounded integer exponent, by repeated squaring.
    pub fn pow_bigint(&self, e: &BigInt) -> Self {
        let bits = self.bits();
        if e.is_zero() {
            return HpComplex::one(bits);
        }
        let mag = e.magnitude();
        let mut acc = HpComplex::one(bits);
        let mut base = self.clone();
        let nbits = mag.bits();
        for i in 0..nbits {
            if mag.bit(i) {
                acc = acc.mul(&base);
            }
            if i + 1 < nbits {
                base = base.mul(&base);
            }
        }
        if e.sign() == num_bigint::Sign::Minus {
            acc = acc.recip();
        }
        acc
    }

    /// Same value re-rounded to a different precision.
    pub fn to_bits(&self, bits: usize) -> Self {
        HpComplex::new(self.re.to_bits(bits), self.im.to_bits(bits))
    }
}

impl fmt::Display for HpComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.im.is_negative() {
            write!(f, "{} - {}i", self.re, self.im.abs())
        } else {
            write!(f, "{} + {}i", self.re, self.im)
        }
    }
}
