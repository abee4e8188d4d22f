//! Discrete potential theory on sampled compact sets: Fekete points,
//! logarithmic capacity, Green's function estimates and the Bernstein-Walsh
//! rate constant.

use num_complex::Complex64 as C64;
use serde::Serialize;
use thiserror::Error;

use crate::geometry::CompactSetSample;
use crate::mp;
use crate::poly::{ComplexPolynomial, Degree};

/// Default number of extremal points used by the estimators.
pub const DEFAULT_POINTS: usize = 32;
/// Subset counts up to this size are searched exhaustively.
const EXHAUSTIVE_LIMIT: f64 = 2.0e4;
const MAX_SWEEPS: usize = 60;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PotentialError {
    #[error("need at least {needed} distinct sample points, have {have}")]
    TooFewPoints { needed: usize, have: usize },
    #[error("at least one point is required")]
    ZeroPoints,
    #[error("point {0} lies in the compact set")]
    PointInSet(C64),
    #[error("the set is polar; its Green's function is infinite")]
    PolarSet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremalMethod {
    Leja,
    Exchange,
    Exhaustive,
}

/// Approximate Fekete points of a compact set.
#[derive(Clone, Debug, Serialize)]
pub struct ExtremalPoints {
    pub points: Vec<C64>,
    /// `sum_{i<j} log |t_i - t_j|`.
    pub log_vandermonde: f64,
    pub method: ExtremalMethod,
}

impl ExtremalPoints {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Discrete transfinite diameter `delta_n`.
    pub fn delta(&self) -> f64 {
        let n = self.points.len() as f64;
        if n < 2.0 {
            return 0.0;
        }
        (2.0 * self.log_vandermonde / (n * (n - 1.0))).exp()
    }

    /// `log |q(z)|` for the monic polynomial with these roots.
    pub fn log_abs_q(&self, z: C64) -> f64 {
        self.points.iter().map(|t| (z - t).norm().ln()).sum()
    }

    /// `max log |q|` over a point set.
    pub fn log_norm(&self, samples: &[C64]) -> f64 {
        samples.iter().map(|&z| self.log_abs_q(z)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// The monic polynomial with these roots, expanded about `center`.
    pub fn polynomial(&self, center: C64) -> ComplexPolynomial {
        let c = mp::from_c64(center);
        let mut q = ComplexPolynomial::new(c.clone(), vec![mp::one()]);
        for &t in &self.points {
            let root = ComplexPolynomial::new(c.clone(), vec![mp::from_c64(center - t), mp::one()]);
            q = q.mul(&root);
        }
        q
    }
}

fn log_vandermonde(points: &[C64]) -> f64 {
    let mut s = 0.0;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            s += (a - b).norm().ln();
        }
    }
    s
}

fn candidates(k: &CompactSetSample) -> Vec<C64> {
    let mut pts = k.boundary().to_vec();
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    pts.dedup_by(|a, b| (*a - *b).norm() <= 1e-14 * (1.0 + a.norm()));
    pts
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Greedy Leja indices into `cands`, starting from the point farthest from
/// the centroid.
fn leja_indices(cands: &[C64], n: usize) -> Vec<usize> {
    let centroid: C64 = cands.iter().sum::<C64>() / cands.len() as f64;
    let first = argmax(&cands.iter().map(|z| (z - centroid).norm()).collect::<Vec<_>>());
    let mut chosen = vec![first];
    let mut score: Vec<f64> = cands.iter().map(|z| (z - cands[first]).norm().ln()).collect();
    while chosen.len() < n {
        let next = argmax(&score);
        chosen.push(next);
        for (s, z) in score.iter_mut().zip(cands) {
            *s += (z - cands[next]).norm().ln();
        }
    }
    chosen
}

fn check_count(cands: &[C64], n: usize) -> Result<(), PotentialError> {
    if n == 0 {
        return Err(PotentialError::ZeroPoints);
    }
    if cands.len() < n {
        return Err(PotentialError::TooFewPoints { needed: n, have: cands.len() });
    }
    Ok(())
}

/// Greedy Leja points drawn from the boundary samples.
pub fn leja_points(k: &CompactSetSample, n: usize) -> Result<ExtremalPoints, PotentialError> {
    let cands = candidates(k);
    check_count(&cands, n)?;
    let points: Vec<C64> = leja_indices(&cands, n).into_iter().map(|i| cands[i]).collect();
    Ok(ExtremalPoints { log_vandermonde: log_vandermonde(&points), points, method: ExtremalMethod::Leja })
}

/// Approximate Fekete points: Leja start followed by single-point exchanges
/// that increase the Vandermonde product, or an exhaustive search when the
/// number of subsets is small.
pub fn fekete_points(k: &CompactSetSample, n: usize) -> Result<ExtremalPoints, PotentialError> {
    let cands = candidates(k);
    check_count(&cands, n)?;
    if binomial(cands.len(), n) <= EXHAUSTIVE_LIMIT {
        return Ok(exhaustive(&cands, n));
    }
    let mut idx = leja_indices(&cands, n);
    // score[c] = sum_j log |c - t_j| over the current points.
    let mut score = vec![0.0; cands.len()];
    for &i in &idx {
        for (s, z) in score.iter_mut().zip(&cands) {
            *s += (z - cands[i]).norm().ln();
        }
    }
    for _ in 0..MAX_SWEEPS {
        let mut moved = false;
        for slot in 0..n {
            let old = cands[idx[slot]];
            let mut without: Vec<f64> = score.iter().zip(&cands).map(|(s, z)| s - (z - old).norm().ln()).collect();
            without[idx[slot]] =
                idx.iter().enumerate().filter(|&(j, _)| j != slot).map(|(_, &i)| (old - cands[i]).norm().ln()).sum();
            let best = argmax(&without);
            if without[best] > without[idx[slot]] + 1e-12 {
                let new = cands[best];
                for ((s, w), z) in score.iter_mut().zip(&without).zip(&cands) {
                    *s = w + (z - new).norm().ln();
                }
                idx[slot] = best;
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    let points: Vec<C64> = idx.into_iter().map(|i| cands[i]).collect();
    Ok(ExtremalPoints { log_vandermonde: log_vandermonde(&points), points, method: ExtremalMethod::Exchange })
}

fn binomial(m: usize, n: usize) -> f64 {
    let n = n.min(m - n);
    (0..n).fold(1.0, |acc, i| acc * (m - i) as f64 / (i + 1) as f64)
}

fn exhaustive(cands: &[C64], n: usize) -> ExtremalPoints {
    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut idx: Vec<usize> = (0..n).collect();
    loop {
        let pts: Vec<C64> = idx.iter().map(|&i| cands[i]).collect();
        let v = log_vandermonde(&pts);
        if best.as_ref().map_or(true, |(b, _)| v > *b) {
            best = Some((v, idx.clone()));
        }
        // Advance to the next combination in lexicographic order.
        let mut i = n;
        while i > 0 && idx[i - 1] == cands.len() - n + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        idx[i - 1] += 1;
        for j in i..n {
            idx[j] = idx[j - 1] + 1;
        }
    }
    let (v, idx) = best.expect("at least one subset");
    ExtremalPoints { points: idx.into_iter().map(|i| cands[i]).collect(), log_vandermonde: v, method: ExtremalMethod::Exhaustive }
}

/// Capacity estimates at one point count.
#[derive(Clone, Debug, Serialize)]
pub struct CapacityEstimate {
    /// Richardson-extrapolated Chebyshev constant; the reported capacity.
    pub value: f64,
    /// `||q_n||_K^(1/n)` for the Fekete polynomial `q_n`.
    pub chebyshev: f64,
    /// Discrete transfinite diameter `delta_n`.
    pub delta: f64,
    pub n: usize,
}

/// Logarithmic capacity from the Chebyshev constants at `n` and `n / 2`,
/// combined to cancel the leading `O(1/n)` error.
pub fn capacity(k: &CompactSetSample, n: usize) -> Result<CapacityEstimate, PotentialError> {
    let full = fekete_points(k, n)?;
    let ln = full.log_norm(k.boundary()) / n as f64;
    let value = if n >= 4 {
        let half = fekete_points(k, n / 2)?;
        let lh = half.log_norm(k.boundary()) / (n / 2) as f64;
        // Errors scale like 1/n, and n/2 need not be exact for odd n.
        let (a, b) = (n as f64, (n / 2) as f64);
        ((a * ln - b * lh) / (a - b)).exp()
    } else {
        ln.exp()
    };
    Ok(CapacityEstimate { value, chebyshev: ln.exp(), delta: full.delta(), n })
}

/// Green's function estimator `(1/n) (log |q(z)| - log ||q||_K)` built once
/// from Fekete points and reused across evaluation points.
#[derive(Clone, Debug)]
pub struct GreenEstimator {
    points: ExtremalPoints,
    log_norm: f64,
    set: CompactSetSample,
}

impl GreenEstimator {
    pub fn new(k: &CompactSetSample, n: usize) -> Result<Self, PotentialError> {
        let points = fekete_points(k, n)?;
        let log_norm = points.log_norm(k.boundary());
        if !(log_norm / n as f64).exp().is_normal() {
            return Err(PotentialError::PolarSet);
        }
        Ok(Self { points, log_norm, set: k.clone() })
    }

    pub fn points(&self) -> &ExtremalPoints {
        &self.points
    }

    pub fn eval(&self, z: C64) -> Result<f64, PotentialError> {
        if self.set.contains(z) {
            return Err(PotentialError::PointInSet(z));
        }
        let n = self.points.len() as f64;
        Ok(((self.points.log_abs_q(z) - self.log_norm) / n).max(0.0))
    }
}

/// Green's function of the complement of `k` with pole at infinity.
pub fn green_eval(k: &CompactSetSample, z: C64, n: usize) -> Result<f64, PotentialError> {
    GreenEstimator::new(k, n)?.eval(z)
}

/// `sup exp(-g_K)` over samples of the complement of a neighbourhood,
/// normally its boundary. Zero for polar sets.
pub fn theta(k: &CompactSetSample, outside: &[C64], n: usize) -> Result<f64, PotentialError> {
    let est = match GreenEstimator::new(k, n) {
        Ok(e) => e,
        Err(PotentialError::PolarSet) => return Ok(0.0),
        Err(e) => return Err(e),
    };
    let mut worst = 0.0f64;
    for &z in outside {
        worst = worst.max((-est.eval(z)?).exp());
    }
    Ok(worst)
}

/// Both sides of `|p(z)|^(1/d) <= exp(g_L(z)) ||p||_L^(1/d)`.
#[derive(Clone, Debug, Serialize)]
pub struct BernsteinCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// Holds with 5% slack for estimator error.
    pub ok: bool,
}

pub fn bernstein_check(p: &ComplexPolynomial, l: &CompactSetSample, z: C64, n: usize) -> Result<BernsteinCheck, PotentialError> {
    let d = match p.degree() {
        Degree::Finite(d) if d > 0 => d as f64,
        _ => return Ok(BernsteinCheck { lhs: 0.0, rhs: 0.0, ok: true }),
    };
    let g = green_eval(l, z, n)?;
    let lhs = (mp::ln_abs(&p.eval_c64(z)) / d).exp();
    let log_norm = l.boundary().iter().map(|&w| mp::ln_abs(&p.eval_c64(w))).fold(f64::NEG_INFINITY, f64::max);
    let rhs = (g + log_norm / d).exp();
    Ok(BernsteinCheck { lhs, rhs, ok: lhs <= rhs * 1.05 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Primitive;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn disk(r: f64) -> CompactSetSample {
        CompactSetSample::new(vec![Primitive::Disk { center: c(0.0, 0.0), radius: r }], None).unwrap()
    }

    fn interval(a: f64, b: f64) -> CompactSetSample {
        CompactSetSample::new(vec![Primitive::Segment { a: c(a, 0.0), b: c(b, 0.0) }], None).unwrap()
    }

    #[test]
    fn disk_fekete_points_are_equally_spaced() {
        let p = fekete_points(&disk(1.0), 8).unwrap();
        for t in &p.points {
            assert!((t.norm() - 1.0).abs() < 1e-12);
        }
        // Equally spaced roots of unity maximise the Vandermonde product: n^(n/2).
        let exact = 4.0 * 8f64.ln();
        assert!((p.log_vandermonde - exact).abs() < 1e-3);
    }

    #[test]
    fn exchange_never_lowers_the_leja_product() {
        let k = interval(-1.0, 1.0);
        for n in [5, 12, 24] {
            assert!(fekete_points(&k, n).unwrap().log_vandermonde >= leja_points(&k, n).unwrap().log_vandermonde - 1e-12);
        }
    }

    #[test]
    fn exhaustive_search_for_tiny_sets() {
        let k = CompactSetSample::new(vec![Primitive::Segment { a: c(0.0, 0.0), b: c(1.0, 0.0) }], Some(0.5)).unwrap();
        let p = fekete_points(&k, 2).unwrap();
        assert_eq!(p.method, ExtremalMethod::Exhaustive);
        let mut xs: Vec<f64> = p.points.iter().map(|z| z.re).collect();
        xs.sort_by(f64::total_cmp);
        assert_eq!(xs, vec![0.0, 1.0]);
    }

    #[test]
    fn too_many_points_is_an_error() {
        let k = CompactSetSample::new(vec![Primitive::Segment { a: c(0.0, 0.0), b: c(1.0, 0.0) }], Some(0.5)).unwrap();
        assert!(matches!(fekete_points(&k, 50), Err(PotentialError::TooFewPoints { .. })));
        assert_eq!(fekete_points(&k, 0).unwrap_err(), PotentialError::ZeroPoints);
    }

    #[test]
    fn golden_capacities() {
        let d = capacity(&disk(1.0), 32).unwrap();
        assert!((d.value - 1.0).abs() < 0.02, "{d:?}");
        let s = capacity(&interval(-2.0, 2.0), 32).unwrap();
        assert!((s.value - 1.0).abs() < 0.05, "{s:?}");
    }

    #[test]
    fn golden_green_values() {
        let g = green_eval(&disk(1.0), c(2.0, 0.0), 32).unwrap();
        assert!((g - 2f64.ln()).abs() < 0.05, "{g}");
        let g = green_eval(&interval(-1.0, 1.0), c(2.0, 0.0), 32).unwrap();
        assert!((g - (2.0 + 3f64.sqrt()).ln()).abs() < 0.08, "{g}");
        assert!(matches!(green_eval(&disk(1.0), c(0.5, 0.0), 32), Err(PotentialError::PointInSet(_))));
    }

    #[test]
    fn theta_of_disk_in_double_disk() {
        let circle: Vec<C64> = (0..256).map(|k| C64::from_polar(2.0, k as f64 * 0.0245436926)).collect();
        let t = theta(&disk(1.0), &circle, 32).unwrap();
        assert!((t - 0.5).abs() < 0.03, "{t}");
    }

    #[test]
    fn bernstein_inequality_for_powers() {
        let p = ComplexPolynomial::monomial(mp::zero(), 6, mp::one());
        let b = bernstein_check(&p, &disk(1.0), c(2.0, 0.0), 32).unwrap();
        assert!(b.ok, "{b:?}");
        assert!((b.lhs - 2.0).abs() < 1e-12);
    }

    #[test]
    fn fekete_polynomial_matches_log_form() {
        let p = fekete_points(&interval(-1.0, 1.0), 10).unwrap();
        let q = p.polynomial(c(0.0, 0.0));
        let z = c(0.3, 0.7);
        assert!((mp::ln_abs(&q.eval_c64(z)) - p.log_abs_q(z)).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn green_is_nonnegative_and_grows(r in 1.2f64..4.0, t in 0.0f64..6.28) {
            let est = GreenEstimator::new(&interval(-1.0, 1.0), 16).unwrap();
            let z = C64::from_polar(r, t);
            let g1 = est.eval(z).unwrap();
            let g2 = est.eval(z * 2.0).unwrap();
            prop_assert!(g1 >= 0.0 && g2 >= g1);
        }

        #[test]
        fn bernstein_holds_for_random_polynomials(coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 2..8), r in 1.5f64..3.0) {
            let cs: Vec<C64> = coeffs.iter().map(|&(a, b)| c(a, b)).collect();
            let p = ComplexPolynomial::from_c64(c(0.0, 0.0), &cs);
            let b = bernstein_check(&p, &disk(1.0), c(r, 0.0), 32).unwrap();
            prop_assert!(b.ok);
        }
    }
}
