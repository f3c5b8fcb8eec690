use crate::kernel::complex::HpComplex;
use crate::kernel::real::HpReal;

/// A computed sum or product together with its truncation-error estimate.
///
/// `abs_error_estimate` is a heuristic bound, not a certificate: geometric
/// tail extrapolation for adaptive sums, the analytic tail bound for infinite
/// products, and a boundary-shell difference for windowed bilateral sums.
/// When `converged` is false the caps were exhausted before the stopping rule
/// was met and the value is the partial result.
#[derive(Clone, Debug)]
pub struct SeriesValue {
    pub value: HpComplex,
    pub abs_error_estimate: HpReal,
    pub terms_used: usize,
    pub converged: bool,
}

impl SeriesValue {
    /// Wraps an exactly-summed value (finite sums have no truncation error).
    pub fn exact(value: HpComplex, terms_used: usize) -> Self {
        let bits = value.bits();
        SeriesValue {
            value,
            abs_error_estimate: HpReal::zero(bits),
            terms_used,
            converged: true,
        }
    }

    /// Combines two values multiplicatively: errors propagate first order,
    /// |Δ(ab)| ≲ |Δa|·|b| + |a|·|Δb|.
    pub fn mul(&self, rhs: &SeriesValue) -> Self {
        let value = self.value.mul(&rhs.value);
        let err = self
            .abs_error_estimate
            .mul(&rhs.value.abs())
            .add(&rhs.abs_error_estimate.mul(&self.value.abs()));
        SeriesValue {
            value,
            abs_error_estimate: err,
            terms_used: self.terms_used + rhs.terms_used,
            converged: self.converged && rhs.converged,
        }
    }

    /// Combines two values additively: errors add.
    pub fn add(&self, rhs: &SeriesValue) -> Self {
        SeriesValue {
            value: self.value.add(&rhs.value),
            abs_error_estimate: self.abs_error_estimate.add(&rhs.abs_error_estimate),
            terms_used: self.terms_used + rhs.terms_used,
            converged: self.converged && rhs.converged,
        }
    }

    /// Divides by another value: |Δ(a/b)| ≲ (|Δa| + |a/b|·|Δb|)/|b|.
    ///
    /// The caller is responsible for pole-guarding the divisor first.
    pub fn div(&self, rhs: &SeriesValue) -> Self {
        let value = self.value.div(&rhs.value);
        let err = self
            .abs_error_estimate
            .add(&value.abs().mul(&rhs.abs_error_estimate))
            .div(&rhs.value.abs());
        SeriesValue {
            value,
            abs_error_estimate: err,
            terms_used: self.terms_used + rhs.terms_used,
            converged: self.converged && rhs.converged,
        }
    }

    /// Small positive integer power, by repeated multiplication so the error
    /// propagation of [`SeriesValue::mul`] applies at every step.
    pub fn powi(&self, exp: u32) -> Self {
        let mut acc = SeriesValue::exact(HpComplex::one(self.value.bits()), 0);
        for _ in 0..exp {
            acc = acc.mul(self);
        }
        acc
    }

    /// Scales by an exactly-known complex factor.
    pub fn scale(&self, factor: &HpComplex) -> Self {
        SeriesValue {
            value: self.value.mul(factor),
            abs_error_estimate: self.abs_error_estimate.mul(&factor.abs()),
            terms_used: self.terms_used,
            converged: self.converged,
        }
    }
}
