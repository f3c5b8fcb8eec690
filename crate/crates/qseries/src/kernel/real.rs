use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};

use crate::error::QError;

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(
        Consts::new().expect("constants cache allocation"),
    );
}

/// Runs `f` with the thread-local cache of mathematical constants used by
/// transcendental functions (π, ln 2, …).
pub(crate) fn with_consts<R>(f: impl FnOnce(&mut Consts) -> R) -> R {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// Arbitrary-precision real number carrying its working precision.
///
/// Every operation rounds faithfully to the precision of the left operand;
/// mixed-precision operands are permitted (the result keeps the left
/// precision). Values never hold NaN or infinity: constructors reject
/// unparsable input, and the evaluation layers guard divisions.
#[derive(Clone, Debug)]
pub struct HpReal {
    x: BigFloat,
    bits: usize,
}

impl HpReal {
    fn wrap(x: BigFloat, bits: usize) -> Self {
        debug_assert!(!x.is_nan() && !x.is_inf(), "non-finite real produced");
        HpReal { x, bits }
    }

    pub fn zero(bits: usize) -> Self {
        HpReal::wrap(BigFloat::new(bits), bits)
    }

    pub fn one(bits: usize) -> Self {
        HpReal::from_i64(1, bits)
    }

    pub fn from_i64(v: i64, bits: usize) -> Self {
        HpReal::wrap(BigFloat::from_i64(v, bits), bits)
    }

    /// Parses a decimal literal ("0.4173", "-2", "1e-25") exactly, then
    /// rounds once to `bits`. The same literal re-parsed at a higher
    /// precision therefore denotes the same mathematical value.
    pub fn from_decimal(s: &str, bits: usize) -> Result<Self, QError> {
        let x = with_consts(|cc| BigFloat::parse(s, Radix::Dec, bits, RM, cc));
        if x.is_nan() || x.is_inf() {
            return Err(QError::param(
                "decimal literal",
                format!("cannot parse `{s}`"),
            ));
        }
        Ok(HpReal::wrap(x, bits))
    }

    /// 10^k at the given precision.
    pub fn pow10(k: i64, bits: usize) -> Self {
        let ten = BigFloat::from_i64(10, bits);
        let mag = ten.powi(k.unsigned_abs() as usize, bits, RM);
        let x = if k >= 0 {
            mag
        } else {
            BigFloat::from_i64(1, bits).div(&mag, bits, RM)
        };
        HpReal::wrap(x, bits)
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn add(&self, rhs: &Self) -> Self {
        HpReal::wrap(self.x.add(&rhs.x, self.bits, RM), self.bits)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        HpReal::wrap(self.x.sub(&rhs.x, self.bits, RM), self.bits)
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        HpReal::wrap(self.x.mul(&rhs.x, self.bits, RM), self.bits)
    }

    pub fn div(&self, rhs: &Self) -> Self {
        debug_assert!(!rhs.x.is_zero(), "division by zero real");
        HpReal::wrap(self.x.div(&rhs.x, self.bits, RM), self.bits)
    }

    pub fn neg(&self) -> Self {
        HpReal::wrap(self.x.neg(), self.bits)
    }

    pub fn abs(&self) -> Self {
        HpReal::wrap(self.x.abs(), self.bits)
    }

    pub fn sqrt(&self) -> Self {
        HpReal::wrap(self.x.sqrt(self.bits, RM), self.bits)
    }

    pub fn exp(&self) -> Self {
        HpReal::wrap(with_consts(|cc| self.x.exp(self.bits, RM, cc)), self.bits)
    }

    /// Natural logarithm; requires a positive value.
    pub fn ln(&self) -> Result<Self, QError> {
        if !self.is_positive() {
            return Err(QError::domain("logarithm of a non-positive value"));
        }
        Ok(HpReal::wrap(
            with_consts(|cc| self.x.ln(self.bits, RM, cc)),
            self.bits,
        ))
    }

    pub fn sin(&self) -> Self {
        HpReal::wrap(with_consts(|cc| self.x.sin(self.bits, RM, cc)), self.bits)
    }

    pub fn cos(&self) -> Self {
        HpReal::wrap(with_consts(|cc| self.x.cos(self.bits, RM, cc)), self.bits)
    }

    /// π at the given precision.
    pub fn pi(bits: usize) -> Self {
        HpReal::wrap(with_consts(|cc| cc.pi(bits, RM)), bits)
    }

    /// Integer power by repeated squaring.
    pub fn pow_i64(&self, k: i64) -> Self {
        let mag = self.x.powi(k.unsigned_abs() as usize, self.bits, RM);
        let x = if k >= 0 {
            mag
        } else {
            debug_assert!(!self.x.is_zero(), "inverse power of zero");
            BigFloat::from_i64(1, self.bits).div(&mag, self.bits, RM)
        };
        HpReal::wrap(x, self.bits)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        !self.x.is_zero() && self.x.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.x.is_negative()
    }

    fn order(&self, rhs: &Self) -> Ordering {
        match self.x.cmp(&rhs.x) {
            Some(v) if v < 0 => Ordering::Less,
            Some(v) if v > 0 => Ordering::Greater,
            _ => Ordering::Equal,
        }
    }

    pub fn lt(&self, rhs: &Self) -> bool {
        self.order(rhs) == Ordering::Less
    }

    pub fn le(&self, rhs: &Self) -> bool {
        self.order(rhs) != Ordering::Greater
    }

    pub fn gt(&self, rhs: &Self) -> bool {
        self.order(rhs) == Ordering::Greater
    }

    pub fn ge(&self, rhs: &Self) -> bool {
        self.order(rhs) != Ordering::Less
    }

    pub fn max(&self, rhs: &Self) -> Self {
        if self.ge(rhs) {
            self.clone()
        } else {
            rhs.clone()
        }
    }

    /// Same value re-rounded to a different precision.
    pub fn to_bits(&self, bits: usize) -> Self {
        let mut x = self.x.clone();
        x.set_precision(bits, RM).expect("precision change");
        HpReal::wrap(x, bits)
    }

    /// Approximate decimal order of magnitude: ⌊log₁₀|x|⌋, or `None` for 0.
    /// Used only for sizing windows and caps, never for values.
    pub fn log10_floor(&self) -> Option<i64> {
        let e = self.x.exponent()?;
        if self.x.is_zero() {
            return None;
        }
        // binary exponent e means |x| ∈ [2^(e-1), 2^e)
        Some(((e as f64 - 0.5) * std::f64::consts::LOG10_2).floor() as i64)
    }
}

impl fmt::Display for HpReal {
    /// Full-precision decimal in scientific form; round-trips via
    /// [`HpReal::from_decimal`] at the same precision.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.x)
    }
}

impl PartialEq for HpReal {
    fn eq(&self, other: &Self) -> bool {
        self.order(other) == Ordering::Equal
    }
}
