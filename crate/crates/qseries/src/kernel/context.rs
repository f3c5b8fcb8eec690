use std::f64::consts::LOG2_10;

use crate::error::QError;
use crate::kernel::real::HpReal;

/// Shared evaluation configuration: working precision, demanded agreement,
/// and truncation caps.
///
/// The pole guard — the minimum magnitude a denominator factor may have
/// before evaluation refuses to divide — is derived from the precision:
/// 10^−(precision_bits/8) in decimal, so 10⁻²⁵ at the default 200 bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrecisionContext {
    /// Working mantissa size in bits.
    pub precision_bits: usize,
    /// Decimal digits of agreement demanded when comparing two sides.
    pub tolerance_digits: u32,
    /// Per-sum truncation cap for unilateral series.
    pub max_terms: usize,
    /// Cap on the index window of bilateral sums (each half).
    pub max_window: usize,
}

impl PrecisionContext {
    /// Validates and builds a context.
    ///
    /// Requirements: `precision_bits ≥ 64`, `tolerance_digits·log₂10 ≤
    /// precision_bits − 32` (so the demanded agreement leaves a 32-bit guard
    /// margin below the working precision), `max_terms ≥ 16`, `max_window ≥ 8`.
    pub fn new(
        precision_bits: usize,
        tolerance_digits: u32,
        max_terms: usize,
        max_window: usize,
    ) -> Result<Self, QError> {
        if precision_bits < 64 {
            return Err(QError::Context {
                reason: format!("precision_bits = {precision_bits} is below the minimum of 64"),
            });
        }
        if tolerance_digits == 0 {
            return Err(QError::Context {
                reason: "tolerance_digits must be positive".into(),
            });
        }
        let needed = tolerance_digits as f64 * LOG2_10;
        if needed > (precision_bits as f64) - 32.0 {
            return Err(QError::Context {
                reason: format!(
                    "tolerance of {tolerance_digits} digits needs {needed:.0} bits plus a 32-bit \
                     guard margin, exceeding precision_bits = {precision_bits}"
                ),
            });
        }
        if max_terms < 16 {
            return Err(QError::Context {
                reason: format!("max_terms = {max_terms} is below the minimum of 16"),
            });
        }
        if max_window < 8 {
            return Err(QError::Context {
                reason: format!("max_window = {max_window} is below the minimum of 8"),
            });
        }
        Ok(PrecisionContext {
            precision_bits,
            tolerance_digits,
            max_terms,
            max_window,
        })
    }

    /// Minimum allowed denominator magnitude: 10^−(precision_bits/8).
    pub fn pole_guard(&self) -> HpReal {
        HpReal::pow10(-((self.precision_bits / 8) as i64), self.precision_bits)
    }

    /// 10^−tolerance_digits, the relative agreement demanded of identities.
    pub fn tolerance(&self) -> HpReal {
        HpReal::pow10(-(self.tolerance_digits as i64), self.precision_bits)
    }

    /// 10^−(tolerance_digits+5), the smallness threshold used by the
    /// summation stopping rules (five digits tighter than the tolerance).
    pub fn term_threshold(&self) -> HpReal {
        HpReal::pow10(-(self.tolerance_digits as i64 + 5), self.precision_bits)
    }

    /// Same caps and tolerance at a different working precision. Used for the
    /// confirmation pass that re-checks a passing verdict at +64 bits.
    pub fn with_precision_bits(&self, precision_bits: usize) -> Self {
        PrecisionContext {
            precision_bits,
            ..self.clone()
        }
    }
}

impl Default for PrecisionContext {
    /// 200 bits, 30 digits, 10000 terms, window 200.
    fn default() -> Self {
        PrecisionContext {
            precision_bits: 200,
            tolerance_digits: 30,
            max_terms: 10000,
            max_window: 200,
        }
    }
}
