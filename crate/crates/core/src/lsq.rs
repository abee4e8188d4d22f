//! Weighted discrete least squares in an Arnoldi-orthogonalised polynomial
//! basis, at a caller-chosen binary precision.
//!
//! Columns `q_k` are orthonormal for `<u, v> = sum w_i conj(u_i) v_i` and span
//! the polynomials of degree at most `k` restricted to the sample points, so
//! fits of increasing degree reuse one growing basis.

use num_complex::Complex64 as C64;
use rug::{Assign, Complex, Float};

use crate::mp::{self, Mpc};
use crate::poly::ComplexPolynomial;

pub struct ArnoldiBasis {
    prec: u32,
    center: C64,
    u: Vec<Complex>,
    w: Vec<Float>,
    q: Vec<Vec<Complex>>,
    /// `h[k][j]` for `j <= k + 1`: recurrence coefficients of column `k + 1`.
    h: Vec<Vec<Complex>>,
}

impl ArnoldiBasis {
    /// Starts the basis with the constant column. Weights are normalised to
    /// sum to one.
    pub fn new(points: &[C64], weights: &[f64], center: C64, prec: u32) -> Self {
        assert_eq!(points.len(), weights.len());
        let u = points.iter().map(|z| Complex::with_val(prec, (z.re - center.re, z.im - center.im))).collect();
        let mut w: Vec<Float> = weights.iter().map(|&x| Float::with_val(prec, x)).collect();
        let total = Float::with_val(prec, Float::sum(w.iter()));
        for x in w.iter_mut() {
            *x /= &total;
        }
        let q0 = vec![Complex::with_val(prec, 1); points.len()];
        Self { prec, center, u, w, q: vec![q0], h: Vec::new() }
    }

    /// Highest degree spanned so far.
    pub fn degree(&self) -> usize {
        self.q.len() - 1
    }

    fn inner(&self, a: &[Complex], b: &[Complex]) -> Complex {
        let mut acc = Complex::new(self.prec);
        let mut t = Complex::new(self.prec);
        for ((x, y), w) in a.iter().zip(b).zip(&self.w) {
            t.assign(x.conj_ref());
            t *= y;
            t *= w;
            acc += &t;
        }
        acc
    }

    /// Appends the column of degree `degree() + 1`.
    pub fn extend(&mut self) {
        let last = self.q.last().expect("basis is never empty");
        let mut v: Vec<Complex> = last.iter().zip(&self.u).map(|(a, b)| Complex::with_val(self.prec, a * b)).collect();
        let mut hk = vec![Complex::new(self.prec); self.q.len() + 1];
        let mut t = Complex::new(self.prec);
        for _ in 0..2 {
            for (j, qj) in self.q.iter().enumerate() {
                let c = self.inner(qj, &v);
                for (vi, qi) in v.iter_mut().zip(qj) {
                    t.assign(&c * qi);
                    *vi -= &t;
                }
                hk[j] += c;
            }
        }
        let norm2 = self.inner(&v, &v);
        let norm = Float::with_val(self.prec, norm2.real()).sqrt();
        for vi in v.iter_mut() {
            *vi /= &norm;
        }
        hk[self.q.len()] = Complex::with_val(self.prec, (norm, 0));
        self.h.push(hk);
        self.q.push(v);
    }

    pub fn extend_to(&mut self, degree: usize) {
        while self.degree() < degree {
            self.extend();
        }
    }

    /// Basis coordinates of the best weighted fit of degree at most `degree`,
    /// by successive projection of the residual.
    pub fn fit(&self, values: &[Complex], degree: usize) -> Vec<Complex> {
        let mut r: Vec<Complex> = values.iter().map(|v| Complex::with_val(self.prec, v)).collect();
        let mut coords = Vec::with_capacity(degree + 1);
        let mut t = Complex::new(self.prec);
        for qk in &self.q[..=degree] {
            let c = self.inner(qk, &r);
            for (ri, qi) in r.iter_mut().zip(qk) {
                t.assign(&c * qi);
                *ri -= &t;
            }
            coords.push(c);
        }
        coords
    }

    /// Values of the fit at the sample points.
    pub fn values(&self, coords: &[Complex]) -> Vec<Complex> {
        let mut out = vec![Complex::new(self.prec); self.u.len()];
        for (k, c) in coords.iter().enumerate() {
            self.add_column(&mut out, k, c);
        }
        out
    }

    /// Adds `c q_k` to `out`.
    pub fn add_column(&self, out: &mut [Complex], k: usize, c: &Complex) {
        let mut t = Complex::new(self.prec);
        for (o, qi) in out.iter_mut().zip(&self.q[k]) {
            t.assign(c * qi);
            *o += &t;
        }
    }

    /// Converts basis coordinates to a polynomial about the basis center,
    /// at working precision.
    pub fn to_polynomial(&self, coords: &[Complex]) -> ComplexPolynomial {
        let prec = self.prec.max(mp::PREC);
        let up = |c: &Complex| Complex::with_val(prec, c);
        // Monomial coefficients of each basis polynomial.
        let mut basis: Vec<Vec<Complex>> = vec![vec![Complex::with_val(prec, 1)]];
        for k in 0..coords.len().saturating_sub(1) {
            let hk = &self.h[k];
            let mut next = vec![Complex::new(prec); k + 2];
            for (i, a) in basis[k].iter().enumerate() {
                next[i + 1] += a;
            }
            for (j, pj) in basis.iter().enumerate() {
                let hj = up(&hk[j]);
                for (i, a) in pj.iter().enumerate() {
                    next[i] -= Complex::with_val(prec, &hj * a);
                }
            }
            let hn = up(&hk[k + 1]);
            for x in next.iter_mut() {
                *x /= &hn;
            }
            basis.push(next);
        }
        let mut out = vec![Complex::new(prec); coords.len()];
        for (c, pk) in coords.iter().zip(&basis) {
            let c = up(c);
            for (o, a) in out.iter_mut().zip(pk) {
                *o += Complex::with_val(prec, &c * a);
            }
        }
        let out = out.into_iter().map(|x| Complex::with_val(mp::PREC, x)).collect();
        ComplexPolynomial::new(mp::from_c64(self.center), out)
    }
}

/// `max |a_i - b_i|` as `f64`.
pub fn max_abs_diff(a: &[Complex], b: &[Complex]) -> f64 {
    a.iter().zip(b).map(|(x, y)| mp::abs(&Complex::with_val(x.prec().0, x - y))).fold(0.0, f64::max)
}

/// Values of `f` at working precision converted to `prec`.
pub fn at_prec(values: &[Mpc], prec: u32) -> Vec<Complex> {
    values.iter().map(|v| Complex::with_val(prec, v)).collect()
}
