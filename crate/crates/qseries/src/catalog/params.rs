//! Parameter bags for catalog cases.
//!
//! Values are stored exactly — integers as `i64`, complex numbers as decimal
//! strings — so a case can be re-evaluated at any precision without the bag
//! itself contributing rounding error. Samplers draw coordinates on the
//! ten-thousandths grid (four decimal digits), which keeps every sampled
//! value exactly representable in the string form and makes region tests
//! pure integer arithmetic.

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha20Rng;

use crate::error::QError;
use crate::kernel::HpComplex;

/// One named parameter: an integer or an exact decimal complex number.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParamValue {
    Int(i64),
    Complex { re: String, im: String },
}

/// Named parameters of one catalog case, ordered by name.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Params {
    values: BTreeMap<String, ParamValue>,
}

impl Params {
    pub fn new() -> Self {
        Params::default()
    }

    pub fn set_int(&mut self, name: &str, value: i64) {
        self.values.insert(name.to_string(), ParamValue::Int(value));
    }

    pub fn set_complex(&mut self, name: &str, re: &str, im: &str) {
        self.values.insert(
            name.to_string(),
            ParamValue::Complex {
                re: re.to_string(),
                im: im.to_string(),
            },
        );
    }

    /// The integer parameter `name`, or a parameter error.
    pub fn int(&self, name: &str) -> Result<i64, QError> {
        match self.values.get(name) {
            Some(ParamValue::Int(n)) => Ok(*n),
            Some(ParamValue::Complex { .. }) => Err(QError::param(name, "expected an integer")),
            None => Err(QError::param(name, "missing")),
        }
    }

    /// The integer parameter `name`, or `default` when absent.
    pub fn int_or(&self, name: &str, default: i64) -> Result<i64, QError> {
        match self.values.get(name) {
            Some(ParamValue::Int(n)) => Ok(*n),
            Some(ParamValue::Complex { .. }) => Err(QError::param(name, "expected an integer")),
            None => Ok(default),
        }
    }

    /// The complex parameter `name` lifted to `bits` of precision.
    pub fn complex(&self, name: &str, bits: usize) -> Result<HpComplex, QError> {
        match self.values.get(name) {
            Some(ParamValue::Complex { re, im }) => HpComplex::from_decimal(re, im, bits),
            Some(ParamValue::Int(n)) => Ok(HpComplex::from_i64(*n, bits)),
            None => Err(QError::param(name, "missing")),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &ParamValue)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (name, value) in &self.values {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            match value {
                ParamValue::Int(n) => write!(f, "{name}={n}")?,
                ParamValue::Complex { re, im } => {
                    if im_is_zero(im) {
                        write!(f, "{name}={re}")?;
                    } else if im.starts_with('-') {
                        write!(f, "{name}={re}{im}i")?;
                    } else {
                        write!(f, "{name}={re}+{im}i")?;
                    }
                }
            }
        }
        Ok(())
    }
}

fn im_is_zero(im: &str) -> bool {
    im.chars().all(|c| matches!(c, '0' | '.' | '-' | '+'))
}

/// A complex coordinate on the ten-thousandths grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridPoint {
    pub re4: i64,
    pub im4: i64,
}

impl GridPoint {
    /// The exact decimal strings "d.dddd" for the two coordinates.
    pub fn decimals(&self) -> (String, String) {
        (grid_decimal(self.re4), grid_decimal(self.im4))
    }

    /// Squared magnitude in grid units (exact integer).
    pub fn norm4_sqr(&self) -> i64 {
        self.re4 * self.re4 + self.im4 * self.im4
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re4 as f64 / 1e4, self.im4 as f64 / 1e4)
    }
}

fn grid_decimal(units: i64) -> String {
    let sign = if units < 0 { "-" } else { "" };
    let m = units.unsigned_abs();
    format!("{sign}{}.{:04}", m / 10_000, m % 10_000)
}

/// A grid point drawn uniformly from the annulus lo ≤ |z| ≤ hi (f64 radii,
/// resolved on the grid), by rejection from the enclosing square. Both bounds
/// are compared exactly in grid units, so the draw is reproducible across
/// platforms.
pub fn sample_annulus(rng: &mut ChaCha20Rng, lo: f64, hi: f64) -> GridPoint {
    let lo4 = (lo * 1e4).round() as i64;
    let hi4 = (hi * 1e4).round() as i64;
    assert!(0 <= lo4 && lo4 < hi4, "annulus bounds out of order");
    loop {
        let re4 = rng.gen_range(-hi4..=hi4);
        let im4 = rng.gen_range(-hi4..=hi4);
        let n = re4 * re4 + im4 * im4;
        if lo4 * lo4 <= n && n <= hi4 * hi4 {
            return GridPoint { re4, im4 };
        }
    }
}

/// A positive real grid point drawn uniformly from [lo, hi].
pub fn sample_real_range(rng: &mut ChaCha20Rng, lo: f64, hi: f64) -> GridPoint {
    let lo4 = (lo * 1e4).round() as i64;
    let hi4 = (hi * 1e4).round() as i64;
    assert!(lo4 <= hi4, "range bounds out of order");
    GridPoint {
        re4: rng.gen_range(lo4..=hi4),
        im4: 0,
    }
}
