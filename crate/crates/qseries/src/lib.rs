//! Configurable-precision evaluation and verification of q-series identities.
//!
//! The crate is organised in layers:
//!
//! - [`kernel`] — precision context, arbitrary-precision real/complex scalars,
//!   roots of unity, and safe integer-exponent powers.
//! - [`pochhammer`] — finite (including negative index), infinite, and
//!   multi-base q-shifted factorials with explicit truncation-error control.
//! - [`series`] — adaptive summation engines and the concrete series built on
//!   them: ₂φ₁, ₁ψ₁, the theta-weighted sums A and B, and the entire series F.
//! - [`multisection`] — composition enumeration, roots-of-unity multi-fold
//!   sums, their closed-form counterparts, and an independent coefficient
//!   convolution oracle.
//! - [`catalog`] — every identity as an executable left/right pair with a
//!   validity domain, a deterministic parameter sampler, a residual checker,
//!   and a report builder.

pub mod catalog;
pub mod kernel;
pub mod multisection;
pub mod pochhammer;
pub mod series;

mod error;

pub use error::QError;
pub use kernel::{HpComplex, HpReal, PrecisionContext, RootOfUnity, SeriesValue};
