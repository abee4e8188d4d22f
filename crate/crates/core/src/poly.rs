//! Complex polynomials expanded about a center, with the Taylor partial-sum
//! operator and exact recentering.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_complex::Complex64;
use rug::{Complex, Float};
use thiserror::Error;

use crate::mp::{self, Mpc, PREC};

/// Coefficients whose magnitude falls below `2^-TRIM_BITS` times the largest
/// one are treated as zero when trimming the top of a polynomial.
pub const TRIM_BITS: i32 = 300;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("recentering degree {0} exceeds the supported maximum of {1}")]
    DegreeTooLarge(usize, usize),
}

/// Degree of a polynomial; the zero polynomial has degree minus infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(usize),
}

impl Degree {
    pub fn finite(self) -> Option<usize> {
        match self {
            Degree::NegInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

/// Smallest and largest index carrying a significant coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DegreeBand {
    Empty,
    Band { lo: usize, hi: usize },
}

impl DegreeBand {
    /// True when the band is empty or lies inside `[lo, hi]`.
    pub fn within(&self, lo: usize, hi: usize) -> bool {
        match *self {
            DegreeBand::Empty => true,
            DegreeBand::Band { lo: a, hi: b } => lo <= a && b <= hi,
        }
    }
}

/// `sum a_k (z - center)^k` with extended-precision coefficients.
///
/// The coefficient vector never ends in a negligible entry, so the zero
/// polynomial is the empty vector.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexPolynomial {
    center: Mpc,
    coeffs: Vec<Mpc>,
}

impl ComplexPolynomial {
    pub fn new(center: Mpc, coeffs: Vec<Mpc>) -> Self {
        let mut p = Self { center, coeffs };
        p.normalize();
        p
    }

    pub fn from_c64(center: Complex64, coeffs: &[Complex64]) -> Self {
        Self::new(mp::from_c64(center), coeffs.iter().map(|&c| mp::from_c64(c)).collect())
    }

    pub fn zero(center: Mpc) -> Self {
        Self { center, coeffs: Vec::new() }
    }

    /// `c (z - center)^k`.
    pub fn monomial(center: Mpc, k: usize, c: Mpc) -> Self {
        let mut coeffs = vec![mp::zero(); k];
        coeffs.push(c);
        Self::new(center, coeffs)
    }

    fn normalize(&mut self) {
        let max = self
            .coeffs
            .iter()
            .map(mp::abs_mp)
            .max_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
        let Some(max) = max else { return };
        if max.is_zero() {
            self.coeffs.clear();
            return;
        }
        let threshold = max >> TRIM_BITS;
        while let Some(last) = self.coeffs.last() {
            if mp::abs_mp(last) <= threshold {
                self.coeffs.pop();
            } else {
                break;
            }
        }
    }

    pub fn center(&self) -> &Mpc {
        &self.center
    }

    pub fn center_c64(&self) -> Complex64 {
        mp::to_c64(&self.center)
    }

    pub fn coeffs(&self) -> &[Mpc] {
        &self.coeffs
    }

    /// Coefficient of `(z - center)^k`, zero past the degree.
    pub fn coeff(&self, k: usize) -> Mpc {
        self.coeffs.get(k).cloned().unwrap_or_else(mp::zero)
    }

    pub fn degree(&self) -> Degree {
        match self.coeffs.len() {
            0 => Degree::NegInfinity,
            n => Degree::Finite(n - 1),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The same coefficients read about another center.
    pub fn with_center(&self, center: Mpc) -> Self {
        Self { center, coeffs: self.coeffs.clone() }
    }

    pub fn eval(&self, z: &Mpc) -> Mpc {
        let u = Complex::with_val(PREC, z - &self.center);
        let mut acc = mp::zero();
        for c in self.coeffs.iter().rev() {
            acc *= &u;
            acc += c;
        }
        acc
    }

    pub fn eval_c64(&self, z: Complex64) -> Mpc {
        self.eval(&mp::from_c64(z))
    }

    /// Largest modulus over a point set, as `f64`.
    pub fn sup_norm(&self, points: &[Complex64]) -> f64 {
        points.iter().map(|&z| mp::abs(&self.eval_c64(z))).fold(0.0, f64::max)
    }

    /// Taylor partial sum `sum_{k=0}^{lambda} a_k (z - center)^k`.
    pub fn partial_sum(&self, lambda: usize) -> Self {
        let keep = self.coeffs.len().min(lambda + 1);
        Self::new(self.center.clone(), self.coeffs[..keep].to_vec())
    }

    /// Re-expands the polynomial about `new_center` by repeated synthetic
    /// division, `O(d^2)` operations.
    pub fn recenter(&self, new_center: &Mpc) -> Self {
        let h = Complex::with_val(PREC, new_center - &self.center);
        let mut a = self.coeffs.clone();
        let n = a.len();
        for i in 0..n.saturating_sub(1) {
            for j in (i..n - 1).rev() {
                let t = Complex::with_val(PREC, &h * &a[j + 1]);
                a[j] += t;
            }
        }
        Self::new(new_center.clone(), a)
    }

    /// As [`recenter`](Self::recenter), refusing degrees above `max_degree`.
    pub fn recenter_checked(&self, new_center: &Mpc, max_degree: usize) -> Result<Self, PolyError> {
        match self.degree() {
            Degree::Finite(d) if d > max_degree => Err(PolyError::DegreeTooLarge(d, max_degree)),
            _ => Ok(self.recenter(new_center)),
        }
    }

    /// Indices of the lowest and highest coefficient with modulus above `tol`.
    pub fn degree_band(&self, tol: f64) -> DegreeBand {
        let tol = Float::with_val(PREC, tol);
        let big: Vec<usize> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| mp::abs_mp(c) > tol)
            .map(|(k, _)| k)
            .collect();
        match (big.first(), big.last()) {
            (Some(&lo), Some(&hi)) => DegreeBand::Band { lo, hi },
            _ => DegreeBand::Empty,
        }
    }

    /// Multiplies by `(z - center)^k`.
    pub fn shift_degree(&self, k: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![mp::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        Self { center: self.center.clone(), coeffs }
    }

    pub fn scale(&self, c: &Mpc) -> Self {
        let coeffs = self.coeffs.iter().map(|a| Complex::with_val(PREC, a * c)).collect();
        Self::new(self.center.clone(), coeffs)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same_center(other);
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.center.clone());
        }
        let mut out = vec![mp::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                let t = Complex::with_val(PREC, a * b);
                out[i + j] += t;
            }
        }
        Self::new(self.center.clone(), out)
    }

    fn assert_same_center(&self, other: &Self) {
        assert!(
            self.center == other.center,
            "polynomial arithmetic requires a common center; recenter first"
        );
    }

    fn combine(&self, other: &Self, sign: i32) -> Self {
        self.assert_same_center(other);
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|k| {
                let a = self.coeff(k);
                let b = other.coeff(k);
                if sign > 0 {
                    Complex::with_val(PREC, &a + &b)
                } else {
                    Complex::with_val(PREC, &a - &b)
                }
            })
            .collect();
        Self::new(self.center.clone(), coeffs)
    }

    /// Renders the polynomial in the text format read by [`parse_text`](Self::parse_text).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "center {} {}\n",
            mp::float_text(self.center.real()),
            mp::float_text(self.center.imag())
        ));
        for (k, c) in self.coeffs.iter().enumerate() {
            if mp::is_zero(c) {
                continue;
            }
            out.push_str(&format!("{k} {} {}\n", mp::float_text(c.real()), mp::float_text(c.imag())));
        }
        out
    }

    /// Reads `index re im` lines, an optional `center re im` line, blank
    /// lines and `#` comments. Repeated indices accumulate.
    pub fn parse_text(text: &str) -> Result<Self, PolyError> {
        let mut center = mp::zero();
        let mut coeffs: Vec<Mpc> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: &str| PolyError::Parse { line: i + 1, msg: msg.to_string() };
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(err("expected three fields"));
            }
            let re = mp::parse_float(fields[1]).ok_or_else(|| err("bad real part"))?;
            let im = mp::parse_float(fields[2]).ok_or_else(|| err("bad imaginary part"))?;
            let value = Complex::with_val(PREC, (re, im));
            if fields[0] == "center" {
                center = value;
                continue;
            }
            let k: usize = fields[0].parse().map_err(|_| err("bad index"))?;
            if coeffs.len() <= k {
                coeffs.resize(k + 1, mp::zero());
            }
            coeffs[k] += value;
        }
        Ok(Self::new(center, coeffs))
    }
}

impl Add for &ComplexPolynomial {
    type Output = ComplexPolynomial;
    fn add(self, rhs: Self) -> ComplexPolynomial {
        self.combine(rhs, 1)
    }
}

impl Sub for &ComplexPolynomial {
    type Output = ComplexPolynomial;
    fn sub(self, rhs: Self) -> ComplexPolynomial {
        self.combine(rhs, -1)
    }
}

impl Neg for &ComplexPolynomial {
    type Output = ComplexPolynomial;
    fn neg(self) -> ComplexPolynomial {
        let coeffs = self.coeffs.iter().map(|c| Complex::with_val(PREC, -c)).collect();
        ComplexPolynomial { center: self.center.clone(), coeffs }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn poly(center: Complex64, coeffs: &[(f64, f64)]) -> ComplexPolynomial {
        let cs: Vec<Complex64> = coeffs.iter().map(|&(a, b)| c(a, b)).collect();
        ComplexPolynomial::from_c64(center, &cs)
    }

    fn max_coeff_diff(p: &ComplexPolynomial, q: &ComplexPolynomial) -> f64 {
        let n = p.coeffs().len().max(q.coeffs().len());
        (0..n)
            .map(|k| mp::abs(&Complex::with_val(PREC, &p.coeff(k) - &q.coeff(k))))
            .fold(0.0, f64::max)
    }

    /// Independent route: `b_j = sum_k a_k C(k, j) h^(k-j)` with exact
    /// binomials at doubled precision.
    fn recenter_binomial(p: &ComplexPolynomial, new_center: &Mpc) -> Vec<Mpc> {
        let prec = 2 * PREC;
        let h = Complex::with_val(prec, new_center - p.center());
        let n = p.coeffs().len();
        let mut out = vec![Complex::new(prec); n];
        for (k, a) in p.coeffs().iter().enumerate() {
            let mut binom = Float::with_val(prec, 1);
            for j in (0..=k).rev() {
                let mut hp = Complex::with_val(prec, 1);
                for _ in 0..(k - j) {
                    hp *= &h;
                }
                let term = Complex::with_val(prec, a * &hp) * &binom;
                out[j] += term;
                // C(k, j-1) = C(k, j) * j / (k - j + 1)
                if j > 0 {
                    binom *= j as u32;
                    binom /= (k - j + 1) as u32;
                }
            }
        }
        out
    }

    #[test]
    fn zero_polynomial_has_neg_infinite_degree() {
        let p = ComplexPolynomial::from_c64(c(0.0, 0.0), &[c(0.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(p.degree(), Degree::NegInfinity);
        assert!(Degree::NegInfinity < Degree::Finite(0));
        assert_eq!(p.degree_band(1e-14), DegreeBand::Empty);
    }

    #[test]
    fn negligible_top_coefficients_are_trimmed() {
        let tiny = Float::with_val(PREC, 1) >> 310;
        let coeffs = vec![mp::one(), mp::one(), Complex::with_val(PREC, (tiny, 0))];
        let p = ComplexPolynomial::new(mp::zero(), coeffs);
        assert_eq!(p.degree(), Degree::Finite(1));
    }

    #[test]
    fn partial_sum_truncates() {
        let p = poly(c(0.0, 0.0), &[(1.0, 0.0), (2.0, 0.0), (3.0, 0.0)]);
        let t = p.partial_sum(1);
        assert_eq!(t, poly(c(0.0, 0.0), &[(1.0, 0.0), (2.0, 0.0)]));
        assert_eq!(p.partial_sum(0).degree(), Degree::Finite(0));
        assert_eq!(p.partial_sum(7), p);
    }

    #[test]
    fn recenter_shifts_square() {
        // z^2 about 0 is 1 + 2(z-1) + (z-1)^2 about 1.
        let p = poly(c(0.0, 0.0), &[(0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
        let q = p.recenter(&mp::real(1.0));
        assert_eq!(q, poly(c(1.0, 0.0), &[(1.0, 0.0), (2.0, 0.0), (1.0, 0.0)]));
        let t = q.partial_sum(1);
        assert_eq!(t, poly(c(1.0, 0.0), &[(1.0, 0.0), (2.0, 0.0)]));
    }

    #[test]
    fn degree_band_reports_support() {
        let p = poly(c(0.0, 0.0), &[(0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (1.0, 0.0), (0.0, 0.0), (2.0, 1.0)]);
        assert_eq!(p.degree_band(1e-14), DegreeBand::Band { lo: 3, hi: 5 });
        assert!(p.degree_band(1e-14).within(3, 5));
        assert!(!p.degree_band(1e-14).within(4, 5));
    }

    #[test]
    fn recenter_matches_binomial_oracle() {
        let p = poly(
            c(0.5, -0.25),
            &[(1.0, 2.0), (-3.0, 0.5), (0.25, 0.0), (7.0, -1.0), (0.0, 2.0), (-1.5, 1.5)],
        );
        let target = mp::from_c64(c(-1.75, 2.5));
        let fast = p.recenter(&target);
        let slow = recenter_binomial(&p, &target);
        for (k, b) in slow.iter().enumerate() {
            let d = Complex::with_val(PREC, &fast.coeff(k) - b);
            assert!(mp::abs(&d) < 1e-80, "coefficient {k}");
        }
    }

    #[test]
    fn recenter_rejects_oversized_degree() {
        let p = ComplexPolynomial::monomial(mp::zero(), 1030, mp::one());
        assert_eq!(p.recenter_checked(&mp::one(), 1024), Err(PolyError::DegreeTooLarge(1030, 1024)));
    }

    #[test]
    fn text_round_trip_is_exact() {
        let p = poly(c(0.1, -0.3), &[(1.0 / 3.0, 0.2), (0.0, 0.0), (-7.5, 1e-20)]);
        let q = ComplexPolynomial::parse_text(&p.to_text()).unwrap();
        assert!(max_coeff_diff(&p, &q) < 1e-90);
        assert_eq!(q.degree(), Degree::Finite(2));
        assert!(ComplexPolynomial::parse_text("0 1").is_err());
        let err = ComplexPolynomial::parse_text("# c\n0 1 x\n").unwrap_err();
        assert_eq!(err, PolyError::Parse { line: 2, msg: "bad imaginary part".into() });
    }

    fn arb_poly(max_deg: usize) -> impl Strategy<Value = ComplexPolynomial> {
        (
            (-2.0f64..2.0, -2.0f64..2.0),
            prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..=max_deg + 1),
        )
            .prop_map(|((cr, ci), cs)| poly(c(cr, ci), &cs))
    }

    proptest! {
        #[test]
        fn partial_sum_is_linear(
            p in arb_poly(12),
            q in arb_poly(12),
            lambda in 0usize..15,
            alpha in (-2.0f64..2.0, -2.0f64..2.0),
        ) {
            let q = q.with_center(p.center().clone());
            let a = mp::from_c64(c(alpha.0, alpha.1));
            let lhs = (&p.scale(&a) + &q).partial_sum(lambda);
            let rhs = &p.partial_sum(lambda).scale(&a) + &q.partial_sum(lambda);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn partial_sum_is_identity_past_degree(p in arb_poly(10), extra in 0usize..5) {
            let d = p.degree().finite().unwrap_or(0);
            prop_assert_eq!(p.partial_sum(d + extra), p);
        }

        #[test]
        fn recenter_round_trip(p in arb_poly(64), s in (-4.0f64..4.0, -4.0f64..4.0)) {
            let zeta = mp::from_c64(c(s.0, s.1));
            let back = p.recenter(&zeta).recenter(p.center());
            let scale = p.coeffs().iter().map(mp::abs).fold(0.0, f64::max);
            prop_assert!(max_coeff_diff(&p, &back) <= 1e-10 * scale);
        }

        #[test]
        fn recenter_preserves_values(p in arb_poly(20), s in (-3.0f64..3.0, -3.0f64..3.0), z in (-2.0f64..2.0, -2.0f64..2.0)) {
            let q = p.recenter(&mp::from_c64(c(s.0, s.1)));
            let z = c(z.0, z.1);
            let d = Complex::with_val(PREC, &p.eval_c64(z) - &q.eval_c64(z));
            prop_assert!(mp::abs(&d) < 1e-60);
        }
    }
}
