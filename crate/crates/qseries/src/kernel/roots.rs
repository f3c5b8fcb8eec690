use crate::error::QError;
use crate::kernel::complex::HpComplex;
use crate::kernel::real::HpReal;

/// A root of unity ζ_r^i = e^(2πi·i/r), with the exponent reduced mod r.
#[derive(Clone, Debug)]
pub struct RootOfUnity {
    pub r: u32,
    pub i: u32,
    pub value: HpComplex,
}

/// ζ_r^i computed directly from high-precision π (never by repeated
/// multiplication, which would drift over long multisection sums).
///
/// The exponent may be any integer; it is reduced modulo r. Requires r ≥ 1.
pub fn root_of_unity(r: u32, i: i64, bits: usize) -> Result<RootOfUnity, QError> {
    if r == 0 {
        return Err(QError::param("r", "root order must be at least 1"));
    }
    let ir = i.rem_euclid(r as i64) as u32;
    let value = unit_circle_point(r, ir, bits);
    Ok(RootOfUnity { r, i: ir, value })
}

/// All r-th roots of unity ζ_r^0 … ζ_r^(r−1), each computed independently.
pub fn roots_table(r: u32, bits: usize) -> Result<Vec<HpComplex>, QError> {
    (0..r as i64)
        .map(|i| Ok(root_of_unity(r, i, bits)?.value))
        .collect()
}

fn unit_circle_point(r: u32, i: u32, bits: usize) -> HpComplex {
    // Angles with exact rational coordinates are built directly so that the
    // r = 2 and r = 4 multisections cancel exactly.
    let quarter = 4 * i;
    if quarter % r == 0 {
        let one = HpReal::one(bits);
        let zero = HpReal::zero(bits);
        return match (quarter / r) % 4 {
            0 => HpComplex::new(one, zero),
            1 => HpComplex::new(zero, one),
            2 => HpComplex::new(one.neg(), zero),
            _ => HpComplex::new(zero, one.neg()),
        };
    }
    let two_pi = HpReal::pi(bits).mul(&HpReal::from_i64(2, bits));
    let theta = two_pi
        .mul(&HpReal::from_i64(i as i64, bits))
        .div(&HpReal::from_i64(r as i64, bits));
    HpComplex::new(theta.cos(), theta.sin())
}
