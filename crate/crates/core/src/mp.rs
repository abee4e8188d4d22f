//! Extended-precision complex scalars.
//!
//! Polynomials produced by the construction have condition numbers far beyond
//! what `f64` can carry, so coefficients and evaluations use MPFR values at a
//! fixed working precision. Sample points stay in `f64` and convert exactly.

use num_complex::Complex64;
use rug::float::Constant;
use rug::{Complex, Float};

/// Working precision in bits (about 96 decimal digits).
pub const PREC: u32 = 320;

/// Extended-precision complex number.
pub type Mpc = Complex;

pub fn zero() -> Mpc {
    Complex::new(PREC)
}

pub fn one() -> Mpc {
    Complex::with_val(PREC, 1)
}

pub fn real(x: f64) -> Mpc {
    Complex::with_val(PREC, (x, 0.0))
}

pub fn from_c64(z: Complex64) -> Mpc {
    Complex::with_val(PREC, (z.re, z.im))
}

pub fn to_c64(z: &Mpc) -> Complex64 {
    Complex64::new(z.real().to_f64(), z.imag().to_f64())
}

/// `|z|` as an `f64`; saturates to infinity past the `f64` range.
pub fn abs(z: &Mpc) -> f64 {
    Float::with_val(PREC, z.abs_ref()).to_f64()
}

/// `|z|` at working precision.
pub fn abs_mp(z: &Mpc) -> Float {
    Float::with_val(PREC, z.abs_ref())
}

/// `log |z|`, finite for any nonzero `z` regardless of magnitude.
pub fn ln_abs(z: &Mpc) -> f64 {
    abs_mp(z).ln().to_f64()
}

pub fn is_zero(z: &Mpc) -> bool {
    z.real().is_zero() && z.imag().is_zero()
}

pub fn pi() -> Float {
    Float::with_val(PREC, Constant::Pi)
}

/// `exp(2 pi i j / n)` at working precision.
pub fn root_of_unity(j: usize, n: usize) -> Mpc {
    let angle = pi() * 2u32 * Float::with_val(PREC, j) / Float::with_val(PREC, n);
    let (s, c) = angle.sin_cos(Float::new(PREC));
    Complex::with_val(PREC, (c, s))
}

/// Parses a decimal literal at working precision.
pub fn parse_float(text: &str) -> Option<Float> {
    Float::parse(text.trim()).ok().map(|p| Float::with_val(PREC, p))
}

/// Decimal rendering with enough digits to round-trip the working precision.
pub fn float_text(x: &Float) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    x.to_string_radix(10, Some(100))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::ops::PowAssign;

    #[test]
    fn roots_of_unity_are_unimodular() {
        for j in 0..7 {
            let w = root_of_unity(j, 7);
            assert!((abs(&w) - 1.0).abs() < 1e-15);
        }
        let w = root_of_unity(1, 4);
        assert!(to_c64(&w).re.abs() < 1e-90);
        assert!((to_c64(&w).im - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ln_abs_survives_huge_values() {
        let mut z = real(10.0);
        z.pow_assign(400);
        assert!((ln_abs(&z) - 400.0 * 10f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn decimal_round_trip() {
        let x = Float::with_val(PREC, 2).sqrt();
        let back = parse_float(&float_text(&x)).unwrap();
        let diff = Float::with_val(PREC, &x - &back).abs();
        assert!(diff.to_f64() < 1e-95);
    }
}
