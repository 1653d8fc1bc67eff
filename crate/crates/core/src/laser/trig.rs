//! Branch-free cosine for the beat-signal hot loop.
//!
//! `f64::cos` goes through libm's data-dependent branches, which mispredict on
//! the random phase differences fed to it. Arguments are reduced to
//! `[−π/4, π/4]` by quadrant (two-term Cody–Waite) and evaluated with
//! Taylor polynomials truncated below 1 ulp. Plain multiply-add is used since
//! `mul_add` lowers to a libm call on targets without FMA.

use std::f64::consts::FRAC_2_PI;

const PIO2_HI: f64 = 1.570_796_326_734_125_614_17e0;
const PIO2_LO: f64 = 6.077_100_506_506_192_249_32e-11;

/// Beyond this the two-term reduction loses accuracy.
const REDUCTION_LIMIT: f64 = 1.0e6;

/// Adding and subtracting 1.5·2^52 rounds to the nearest integer without
/// `f64::round`, which is a libm call on baseline x86-64.
const ROUNDING_SHIFT: f64 = 6_755_399_441_055_744.0;

#[inline(always)]
fn sin_poly(r: f64) -> f64 {
    let r2 = r * r;
    let p: f64 = -1.0 / 1_307_674_368_000.0;
    let p = p * r2 + 1.0 / 6_227_020_800.0;
    let p = p * r2 + -1.0 / 39_916_800.0;
    let p = p * r2 + 1.0 / 362_880.0;
    let p = p * r2 + -1.0 / 5_040.0;
    let p = p * r2 + 1.0 / 120.0;
    let p = p * r2 + -1.0 / 6.0;
    p * r2 * r + r
}

#[inline(always)]
fn cos_poly(r: f64) -> f64 {
    let r2 = r * r;
    let p: f64 = 1.0 / 20_922_789_888_000.0;
    let p = p * r2 + -1.0 / 87_178_291_200.0;
    let p = p * r2 + 1.0 / 479_001_600.0;
    let p = p * r2 + -1.0 / 3_628_800.0;
    let p = p * r2 + 1.0 / 40_320.0;
    let p = p * r2 + -1.0 / 720.0;
    let p = p * r2 + 1.0 / 24.0;
    let p = p * r2 + -0.5;
    p * r2 + 1.0
}

/// Valid for `|x| < 1e6`; beat arguments are phase differences over one
/// delay and stay many orders of magnitude below that.
#[inline(always)]
pub(crate) fn cos(x: f64) -> f64 {
    debug_assert!(!(x.abs() >= REDUCTION_LIMIT), "cos argument {x} out of range");
    let shifted = x * FRAC_2_PI + ROUNDING_SHIFT;
    let q = shifted - ROUNDING_SHIFT;
    // The low mantissa bits of `shifted` hold q mod 2^51, so q mod 4 comes
    // out without a float-to-int conversion (keeps the loop vectorizable).
    let quadrant = shifted.to_bits();
    let r = (x - q * PIO2_HI) - q * PIO2_LO;
    let s = sin_poly(r);
    let c = cos_poly(r);
    // cos(r + qπ/2) for q mod 4 = 0, 1, 2, 3 is c, −s, −c, s; selected with
    // bit masks since the quadrant is random.
    let pick_sin = 0u64.wrapping_sub(quadrant & 1);
    let negate = ((quadrant + 1) & 2) << 62;
    f64::from_bits(((s.to_bits() & pick_sin) | (c.to_bits() & !pick_sin)) ^ negate)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn agrees_with_libm() {
        let mut worst = 0.0f64;
        let mut x = -200.0;
        while x < 200.0 {
            worst = worst.max((cos(x) - x.cos()).abs());
            x += 0.000_731;
        }
        assert!(worst < 4e-16, "max error {worst}");
    }

    #[test]
    fn quadrant_points() {
        use std::f64::consts::PI;
        assert_eq!(cos(0.0), 1.0);
        assert!((cos(PI) + 1.0).abs() < 1e-16);
        assert!(cos(PI / 2.0).abs() < 1e-16);
        assert!(cos(-PI / 2.0).abs() < 1e-16);
        assert!((cos(9e5) - 9e5f64.cos()).abs() < 1e-15);
        assert!(cos(f64::NAN).is_nan());
    }
}
