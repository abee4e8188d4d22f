//! Closed-form holomorphic functions and piecewise definitions over
//! disjoint open regions.

use num_complex::Complex64 as C64;
use rug::Complex;
use thiserror::Error;

use crate::geometry::Region;
use crate::mp::{self, Mpc, PREC};
use crate::poly::ComplexPolynomial;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FuncError {
    #[error("no branch contains {0}")]
    NoBranch(C64),
    #[error("several branches contain {0}")]
    Overlap(C64),
    #[error("division by zero at {0}")]
    DivisionByZero(C64),
    #[error("expression syntax error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

/// Expression tree in the variable `z`.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(C64),
    Z,
    Poly(ComplexPolynomial),
    /// `(z - center)^(-power)`.
    RecipPower { center: C64, power: u32 },
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Neg(Box<Expr>),
    Quotient(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    /// `inner(a z + b)`.
    Affine { a: C64, b: C64, inner: Box<Expr> },
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::Const(C64::new(0.0, 0.0))
    }

    pub fn eval(&self, z: &Mpc) -> Result<Mpc, FuncError> {
        Ok(match self {
            Expr::Const(c) => mp::from_c64(*c),
            Expr::Z => z.clone(),
            Expr::Poly(p) => p.eval(z),
            Expr::RecipPower { center, power } => {
                let d = Complex::with_val(PREC, z - mp::from_c64(*center));
                if mp::is_zero(&d) {
                    return Err(FuncError::DivisionByZero(mp::to_c64(z)));
                }
                let mut acc = mp::one();
                for _ in 0..*power {
                    acc /= &d;
                }
                acc
            }
            Expr::Sum(terms) => {
                let mut acc = mp::zero();
                for t in terms {
                    acc += t.eval(z)?;
                }
                acc
            }
            Expr::Product(terms) => {
                let mut acc = mp::one();
                for t in terms {
                    acc *= t.eval(z)?;
                }
                acc
            }
            Expr::Neg(e) => -e.eval(z)?,
            Expr::Quotient(n, d) => {
                let den = d.eval(z)?;
                if mp::is_zero(&den) {
                    return Err(FuncError::DivisionByZero(mp::to_c64(z)));
                }
                n.eval(z)? / den
            }
            Expr::Pow(e, k) => {
                let base = e.eval(z)?;
                let mut acc = mp::one();
                for _ in 0..*k {
                    acc *= &base;
                }
                acc
            }
            Expr::Affine { a, b, inner } => {
                let w = Complex::with_val(PREC, z * mp::from_c64(*a)) + mp::from_c64(*b);
                inner.eval(&w)?
            }
        })
    }

    pub fn eval_c64(&self, z: C64) -> Result<Mpc, FuncError> {
        self.eval(&mp::from_c64(z))
    }

    /// Parses `+ - * / ^`, parentheses, `z`, `i`, decimal literals and
    /// imaginary literals such as `2.5i`.
    pub fn parse(text: &str) -> Result<Expr, FuncError> {
        let mut p = Parser { src: text.as_bytes(), pos: 0 };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("unexpected trailing input"));
        }
        Ok(e)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> FuncError {
        FuncError::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Expr, FuncError> {
        let mut terms = vec![self.term()?];
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let t = self.term()?;
            terms.push(if op == b'-' { Expr::Neg(Box::new(t)) } else { t });
        }
        Ok(if terms.len() == 1 { terms.pop().unwrap() } else { Expr::Sum(terms) })
    }

    fn term(&mut self) -> Result<Expr, FuncError> {
        let mut acc = self.unary()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if op == b'*' { Expr::Product(vec![acc, rhs]) } else { Expr::Quotient(Box::new(acc), Box::new(rhs)) };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Expr, FuncError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, FuncError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let k: u32 = std::str::from_utf8(&self.src[start..self.pos])
                .ok()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| self.error("exponent must be a non-negative integer"))?;
            return Ok(Expr::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, FuncError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b'z') => {
                self.pos += 1;
                Ok(Expr::Z)
            }
            Some(b'i') => {
                self.pos += 1;
                Ok(Expr::Const(C64::new(0.0, 1.0)))
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self.pos < self.src.len() {
                    let c = self.src[self.pos];
                    let exp_sign = (c == b'-' || c == b'+') && matches!(self.src[self.pos - 1], b'e' | b'E');
                    if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exp_sign {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
                let v: f64 = std::str::from_utf8(&self.src[start..self.pos])
                    .ok()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| self.error("bad number"))?;
                if self.src.get(self.pos) == Some(&b'i') {
                    self.pos += 1;
                    return Ok(Expr::Const(C64::new(0.0, v)));
                }
                Ok(Expr::Const(C64::new(v, 0.0)))
            }
            _ => Err(self.error("expected a number, 'z', 'i' or '('")),
        }
    }
}

/// A function that can be evaluated at working precision.
pub trait Analytic {
    fn eval(&self, z: &Mpc) -> Result<Mpc, FuncError>;

    fn eval_c64(&self, z: C64) -> Result<Mpc, FuncError> {
        self.eval(&mp::from_c64(z))
    }
}

impl Analytic for Expr {
    fn eval(&self, z: &Mpc) -> Result<Mpc, FuncError> {
        Expr::eval(self, z)
    }
}

impl Analytic for ComplexPolynomial {
    fn eval(&self, z: &Mpc) -> Result<Mpc, FuncError> {
        Ok(ComplexPolynomial::eval(self, z))
    }
}

/// A function defined branch by branch on disjoint open regions.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseFunction {
    branches: Vec<(Region, Expr)>,
}

impl PiecewiseFunction {
    pub fn new(branches: Vec<(Region, Expr)>) -> Self {
        Self { branches }
    }

    /// One expression on the whole plane.
    pub fn global(e: Expr) -> Self {
        Self { branches: vec![(Region::Plane, e)] }
    }

    pub fn branches(&self) -> &[(Region, Expr)] {
        &self.branches
    }

    pub fn eval(&self, z: &Mpc) -> Result<Mpc, FuncError> {
        let zc = mp::to_c64(z);
        let mut hit = self.branches.iter().filter(|(r, _)| r.contains(zc));
        let (_, e) = hit.next().ok_or(FuncError::NoBranch(zc))?;
        if hit.next().is_some() {
            return Err(FuncError::Overlap(zc));
        }
        e.eval(z)
    }

    pub fn eval_c64(&self, z: C64) -> Result<Mpc, FuncError> {
        self.eval(&mp::from_c64(z))
    }

}

impl Analytic for PiecewiseFunction {
    fn eval(&self, z: &Mpc) -> Result<Mpc, FuncError> {
        PiecewiseFunction::eval(self, z)
    }
}

/// `sup |f|` over a point set.
pub fn sup_norm(f: &dyn Analytic, points: &[C64]) -> Result<f64, FuncError> {
    let mut best = 0.0f64;
    for &z in points {
        best = best.max(mp::abs(&f.eval_c64(z)?));
    }
    Ok(best)
}

/// `sup |p - f|` over a point set.
pub fn sup_distance(p: &ComplexPolynomial, f: &dyn Analytic, points: &[C64]) -> Result<f64, FuncError> {
    let mut best = 0.0f64;
    for &z in points {
        let d = Complex::with_val(PREC, p.eval_c64(z) - f.eval_c64(z)?);
        best = best.max(mp::abs(&d));
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn val(text: &str, z: C64) -> C64 {
        mp::to_c64(&Expr::parse(text).unwrap().eval_c64(z).unwrap())
    }

    #[test]
    fn parses_and_evaluates() {
        assert_eq!(val("1", c(3.0, 1.0)), c(1.0, 0.0));
        assert_eq!(val("z", c(3.0, 1.0)), c(3.0, 1.0));
        assert_eq!(val("z^2 - 2*z + 1", c(3.0, 0.0)), c(4.0, 0.0));
        assert_eq!(val("-(z + 2i)", c(1.0, 0.0)), c(-1.0, -2.0));
        assert!((val("1/(z-2)", c(0.0, 0.0)) - c(-0.5, 0.0)).norm() < 1e-15);
        assert_eq!(val("1.5e1 - z/2", c(2.0, 0.0)), c(14.0, 0.0));
    }

    #[test]
    fn parse_errors_carry_position() {
        assert_eq!(Expr::parse("z +").unwrap_err(), FuncError::Parse { pos: 3, msg: "expected a number, 'z', 'i' or '('".into() });
        assert!(matches!(Expr::parse("(z"), Err(FuncError::Parse { .. })));
        assert!(matches!(Expr::parse("z^x"), Err(FuncError::Parse { .. })));
    }

    #[test]
    fn division_by_zero_is_reported() {
        let e = Expr::parse("1/(z-2)").unwrap();
        assert!(matches!(e.eval_c64(c(2.0, 0.0)), Err(FuncError::DivisionByZero(_))));
        let r = Expr::RecipPower { center: c(1.0, 0.0), power: 3 };
        assert!(matches!(r.eval_c64(c(1.0, 0.0)), Err(FuncError::DivisionByZero(_))));
        assert!((mp::to_c64(&r.eval_c64(c(3.0, 0.0)).unwrap()) - c(0.125, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn affine_composition() {
        let e = Expr::Affine { a: c(1.0, 0.0), b: c(2.0, 0.0), inner: Box::new(Expr::parse("z^2").unwrap()) };
        assert_eq!(mp::to_c64(&e.eval_c64(c(1.0, 0.0)).unwrap()), c(9.0, 0.0));
    }

    #[test]
    fn piecewise_branch_selection() {
        let f = PiecewiseFunction::new(vec![
            (Region::Disk { center: c(0.0, 0.0), radius: 1.0 }, Expr::zero()),
            (Region::Disk { center: c(3.0, 0.0), radius: 1.0 }, Expr::Z),
        ]);
        assert_eq!(mp::to_c64(&f.eval_c64(c(3.5, 0.0)).unwrap()), c(3.5, 0.0));
        assert_eq!(mp::to_c64(&f.eval_c64(c(0.5, 0.0)).unwrap()), c(0.0, 0.0));
        assert_eq!(f.eval_c64(c(2.0, 0.0)).unwrap_err(), FuncError::NoBranch(c(2.0, 0.0)));
        let g = PiecewiseFunction::new(vec![(Region::Plane, Expr::Z), (Region::Plane, Expr::zero())]);
        assert_eq!(g.eval_c64(c(0.0, 0.0)).unwrap_err(), FuncError::Overlap(c(0.0, 0.0)));
    }
}
