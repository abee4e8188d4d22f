//! Ostrowski gaps in coefficient sequences, the logarithmic gap selector,
//! collapse of partial-sum differences across gaps, and independence of
//! truncations from the expansion center.

use num_complex::Complex64 as C64;
use rug::ops::Pow;
use rug::{Complex, Float};
use serde::Serialize;
use thiserror::Error;

use crate::geometry::CompactSetSample;
use crate::mp::{self, Mpc, PREC};
use crate::poly::{ComplexPolynomial, Degree, PolyError};

/// Largest degree accepted by [`center_invariance_check`].
pub const MAX_RECENTER_DEGREE: usize = 1024;
pub const DEFAULT_RATIO_TARGET: f64 = 8.0;
pub const DEFAULT_DECAY_TARGET: f64 = 0.2;
/// Expansion centers sampled from `L`.
pub const ZETA_SAMPLES: usize = 64;
/// Points of `K` used per sup.
pub const K_SAMPLES: usize = 512;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GapError {
    #[error("gap pairs must satisfy 1 <= p_1 < q_1 <= p_2 < q_2 <= ...; violated at pair {0}")]
    Ordering(usize),
    #[error("coefficients needed up to index {needed}, only {available} given")]
    ShortCoefficients { needed: usize, available: usize },
    #[error("the selector needs log k > 0; k = {0} rejected")]
    IndexTooSmall(u64),
    #[error("n_k must be strictly increasing (at k = {0})")]
    NotIncreasing(u64),
    #[error("{got} values of n_k for {expected} indices")]
    Length { expected: usize, got: usize },
    #[error("sigma0 must be at least 1")]
    Sigma0,
    #[error("p_k^sigma or n_k^sigma overflows at k = {0}")]
    Overflow(u64),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Clone, Debug, Serialize)]
pub struct GapStructure {
    pub pairs: Vec<(usize, usize)>,
    /// `max |a_ν|^(1/ν)` over `p_m < ν <= q_m`.
    pub decay: Vec<f64>,
    pub ratio_floor: f64,
}

/// Finite-horizon verdict: the trend is certified against explicit
/// targets, not the limits themselves.
#[derive(Clone, Debug, Serialize)]
pub struct GapReport {
    pub structure: GapStructure,
    pub last_ratio: f64,
    pub decay_nonincreasing: bool,
    pub verdict: bool,
}

fn check_pairs(pairs: &[(usize, usize)]) -> Result<(), GapError> {
    for (i, &(p, q)) in pairs.iter().enumerate() {
        if p < 1 || q <= p || (i > 0 && pairs[i - 1].1 > p) {
            return Err(GapError::Ordering(i + 1));
        }
    }
    Ok(())
}

fn root_abs(a: &Mpc, nu: usize) -> f64 {
    if mp::is_zero(a) {
        0.0
    } else {
        (mp::ln_abs(a) / nu as f64).exp()
    }
}

pub fn detect_gaps(a: &[Mpc], pairs: &[(usize, usize)], ratio_target: f64, decay_target: f64) -> Result<GapReport, GapError> {
    check_pairs(pairs)?;
    if let Some(&(_, q)) = pairs.last() {
        if a.len() <= q {
            return Err(GapError::ShortCoefficients { needed: q, available: a.len().saturating_sub(1) });
        }
    }
    let decay: Vec<f64> = pairs.iter().map(|&(p, q)| (p + 1..=q).map(|nu| root_abs(&a[nu], nu)).fold(0.0, f64::max)).collect();
    let ratio_floor = pairs.iter().map(|&(p, q)| q as f64 / p as f64).fold(f64::INFINITY, f64::min);
    let last_ratio = pairs.last().map_or(f64::INFINITY, |&(p, q)| q as f64 / p as f64);
    let decay_nonincreasing = decay.windows(2).all(|w| w[1] <= w[0]);
    let verdict = last_ratio >= ratio_target && decay.last().map_or(true, |&d| d <= decay_target) && decay_nonincreasing;
    Ok(GapReport { structure: GapStructure { pairs: pairs.to_vec(), decay, ratio_floor }, last_ratio, decay_nonincreasing, verdict })
}

#[derive(Clone, Debug, Serialize)]
pub struct SelectorRow {
    pub k: u64,
    pub n: u64,
    pub p: u64,
    /// `(n_k / p_k)^σ` for `σ = 1..=σ0`.
    pub lhs: Vec<f64>,
    pub log_k: f64,
    pub holds: bool,
}

const SELECTOR_PREC: u32 = 256;

/// `p_k = floor(n_k / (log k)^(1/σ0)) + 1` with the table of
/// `(n_k / p_k)^σ <= log k`.
///
/// For `σ0 >= 2` the inequality can fail at `k = 2`, where `log k < 1`, so
/// only `k >= 3` is accepted there.
pub fn gap_selector(n: &[u64], sigma0: u32, ks: std::ops::RangeInclusive<u64>) -> Result<Vec<SelectorRow>, GapError> {
    if sigma0 == 0 {
        return Err(GapError::Sigma0);
    }
    let ks: Vec<u64> = ks.collect();
    if ks.len() != n.len() {
        return Err(GapError::Length { expected: ks.len(), got: n.len() });
    }
    let min_k = if sigma0 >= 2 { 3 } else { 2 };
    let mut rows = Vec::with_capacity(ks.len());
    for (i, (&k, &nk)) in ks.iter().zip(n).enumerate() {
        if k < min_k {
            return Err(GapError::IndexTooSmall(k));
        }
        if i > 0 && nk <= n[i - 1] {
            return Err(GapError::NotIncreasing(k));
        }
        let log_k = Float::with_val(SELECTOR_PREC, k).ln();
        let root = Float::with_val(SELECTOR_PREC, log_k.ln_ref()) / sigma0;
        let root = root.exp();
        let q = Float::with_val(SELECTOR_PREC, nk) / &root;
        // The quotient is at most n_k < 2^53 once log k >= 1, and below
        // 1.21 n_k at k = 2, so the floor converts exactly.
        let p = q.floor().to_f64() as u64 + 1;
        let mut lhs = Vec::with_capacity(sigma0 as usize);
        let mut holds = true;
        for s in 1..=sigma0 {
            let ratio = Float::with_val(SELECTOR_PREC, nk) / p;
            let pow = ratio.pow(s);
            holds &= pow <= log_k;
            lhs.push(pow.to_f64());
        }
        rows.push(SelectorRow { k, n: nk, p, lhs, log_k: log_k.to_f64(), holds });
    }
    Ok(rows)
}

/// Gap pairs `(p_k^σ, n_k^σ)` from selector rows.
pub fn selector_pairs(rows: &[SelectorRow], sigma: u32) -> Result<Vec<(usize, usize)>, GapError> {
    rows.iter()
        .map(|r| {
            let p = r.p.checked_pow(sigma).ok_or(GapError::Overflow(r.k))?;
            let q = r.n.checked_pow(sigma).ok_or(GapError::Overflow(r.k))?;
            Ok((p as usize, q as usize))
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct TailRow {
    pub p: usize,
    pub q: usize,
    /// `sup_{|z - ζ0| = R} |T_p(f) - T_q(f)|` per radius.
    pub values: Vec<f64>,
    /// `Σ_{p < ν <= q} |a_ν| R^ν` per radius.
    pub bounds: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TailTable {
    pub radii: Vec<f64>,
    pub rows: Vec<TailRow>,
    /// Per radius: entries non-increasing down the rows and the last one
    /// strictly below the first.
    pub decreasing: Vec<bool>,
}

/// Partial sums past the degree of `f` are `f` itself.
pub fn tail_collapse_check(f: &ComplexPolynomial, pairs: &[(usize, usize)], radii: &[f64]) -> TailTable {
    let coeffs = f.coeffs();
    let center = f.center_c64();
    let mut rows = Vec::with_capacity(pairs.len());
    for &(p, q) in pairs {
        let (lo, hi) = (p.min(q), p.max(q));
        let band: Vec<Mpc> = (0..=hi.min(coeffs.len().saturating_sub(1)))
            .map(|nu| if nu > lo { coeffs[nu].clone() } else { mp::zero() })
            .collect();
        let diff = ComplexPolynomial::new(mp::from_c64(center), band);
        let mut values = Vec::with_capacity(radii.len());
        let mut bounds = Vec::with_capacity(radii.len());
        for &r in radii {
            let bound = (lo + 1..=hi.min(coeffs.len().saturating_sub(1))).map(|nu| mp::abs(&coeffs[nu]) * r.powi(nu as i32)).fold(0.0, |acc, x| acc + x);
            bounds.push(bound);
            if r == 0.0 || diff.is_zero() {
                values.push(0.0);
                continue;
            }
            let m = (4 * (hi + 1)).max(64);
            let pts: Vec<C64> = (0..m).map(|j| center + C64::from_polar(r, std::f64::consts::TAU * j as f64 / m as f64)).collect();
            values.push(diff.sup_norm(&pts));
        }
        rows.push(TailRow { p, q, values, bounds });
    }
    let decreasing = (0..radii.len()).map(|i| trend(rows.iter().map(|r| r.values[i]))).collect();
    TailTable { radii: radii.to_vec(), rows, decreasing }
}

fn trend(values: impl Iterator<Item = f64>) -> bool {
    let v: Vec<f64> = values.collect();
    v.len() >= 2 && v.windows(2).all(|w| w[1] <= w[0]) && v[v.len() - 1] < v[0]
}

#[derive(Clone, Debug, Serialize)]
pub struct InvarianceRow {
    pub p: usize,
    pub value: f64,
    /// Exactly zero because `p >= deg f`.
    pub identity: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvarianceTable {
    pub rows: Vec<InvarianceRow>,
    pub decreasing: bool,
    pub zeta_samples: usize,
    pub k_samples: usize,
}

fn spread(points: &[C64], max: usize) -> Vec<C64> {
    if points.len() <= max {
        return points.to_vec();
    }
    (0..max).map(|i| points[i * points.len() / max]).collect()
}

/// `sup_{ζ ∈ L} sup_{z ∈ K} |T^(ζ0)_p(f)(z) - T^(ζ)_p(f)(z)|` for each `p`.
///
/// Both differences are polynomials in `ζ` and in `z`, so the sups are taken
/// over boundary samples of `L` and `K`.
pub fn center_invariance_check(f: &ComplexPolynomial, l: &CompactSetSample, k: &CompactSetSample, ps: &[usize]) -> Result<InvarianceTable, GapError> {
    let deg = match f.degree() {
        Degree::Finite(d) => d,
        Degree::NegInfinity => 0,
    };
    if deg > MAX_RECENTER_DEGREE {
        return Err(PolyError::DegreeTooLarge(deg, MAX_RECENTER_DEGREE).into());
    }
    let zetas = spread(l.boundary(), ZETA_SAMPLES);
    let zs = spread(k.boundary(), K_SAMPLES);
    let shifted: Vec<ComplexPolynomial> = if ps.iter().any(|&p| p < deg) {
        zetas.iter().map(|&z| f.recenter(&mp::from_c64(z))).collect()
    } else {
        Vec::new()
    };
    let mut rows = Vec::with_capacity(ps.len());
    for &p in ps {
        if p >= deg {
            rows.push(InvarianceRow { p, value: 0.0, identity: true });
            continue;
        }
        let base = f.partial_sum(p);
        let base_vals: Vec<Mpc> = zs.iter().map(|&z| base.eval_c64(z)).collect();
        let mut best = 0.0f64;
        for g in &shifted {
            let t = g.partial_sum(p);
            for (z, b) in zs.iter().zip(&base_vals) {
                let d = Complex::with_val(PREC, b - t.eval_c64(*z));
                best = best.max(mp::abs(&d));
            }
        }
        rows.push(InvarianceRow { p, value: best, identity: false });
    }
    let decreasing = trend(rows.iter().map(|r| r.value));
    Ok(InvarianceTable { rows, decreasing, zeta_samples: zetas.len(), k_samples: zs.len() })
}

#[derive(Clone, Debug, Serialize)]
pub struct FilterRow {
    pub k: u64,
    /// `||T_{n_k^σ}(f)||_{|z - ζ0| = k}^(1 / n_k^σ)` per `σ`.
    pub values: Vec<f64>,
    pub keep: bool,
}

/// Indices `k` at which every partial sum obeys the growth bound on the
/// circle of radius `k`; the measured form of passing to a subsequence.
pub fn growth_filter(f: &ComplexPolynomial, rows: &[(u64, Vec<u64>)], bound: f64) -> Vec<FilterRow> {
    let center = f.center_c64();
    rows.iter()
        .map(|(k, ns)| {
            let values: Vec<f64> = ns
                .iter()
                .map(|&n| {
                    let t = f.partial_sum(n as usize);
                    let m = (4 * (n as usize + 1)).max(64);
                    let pts: Vec<C64> = (0..m).map(|j| center + C64::from_polar(*k as f64, std::f64::consts::TAU * j as f64 / m as f64)).collect();
                    let log_sup = pts.iter().map(|&z| mp::ln_abs(&t.eval_c64(z))).fold(f64::NEG_INFINITY, f64::max);
                    (log_sup / n.max(1) as f64).exp()
                })
                .collect();
            let keep = values.iter().all(|&v| v <= bound);
            FilterRow { k: *k, values, keep }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Primitive;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn coeffs(n: usize, f: impl Fn(usize) -> f64) -> Vec<Mpc> {
        (0..n).map(|k| mp::real(f(k))).collect()
    }

    #[test]
    fn exact_gaps_have_zero_decay() {
        let a = coeffs(200, |k| if (2..=20).contains(&k) || (30..=180).contains(&k) { 0.0 } else { 1.0 });
        let r = detect_gaps(&a, &[(1, 20), (29, 180)], 6.0, 0.2).unwrap();
        assert_eq!(r.structure.decay, vec![0.0, 0.0]);
        assert!(r.verdict);
    }

    #[test]
    fn gaussian_coefficients_decay_per_band() {
        let a: Vec<Mpc> = (0..122).map(|k| Complex::with_val(PREC, (Float::with_val(PREC, -((k * k) as f64)).exp(), 0))).collect();
        let pairs: Vec<(usize, usize)> = (1..=10).map(|m| (m * m, (m + 1) * (m + 1) - 1)).collect();
        let r = detect_gaps(&a, &pairs, 1.0, 0.2).unwrap();
        for (d, m) in r.structure.decay.iter().zip(1..) {
            assert!((d / (-((m * m + 1) as f64)).exp() - 1.0).abs() < 1e-10);
        }
        assert!(r.decay_nonincreasing && r.verdict);
    }

    #[test]
    fn fixed_ratio_fails_ratio_target() {
        let a = coeffs(100, |_| 0.0);
        let r = detect_gaps(&a, &[(2, 4), (5, 10), (12, 24)], 4.0, 0.2).unwrap();
        assert_eq!(r.structure.ratio_floor, 2.0);
        assert!(!r.verdict);
        assert_eq!(detect_gaps(&a, &[(3, 5), (4, 8)], 4.0, 0.2).unwrap_err(), GapError::Ordering(2));
        assert_eq!(detect_gaps(&a, &[(0, 5)], 4.0, 0.2).unwrap_err(), GapError::Ordering(1));
        assert!(matches!(detect_gaps(&a, &[(3, 500)], 4.0, 0.2), Err(GapError::ShortCoefficients { .. })));
    }

    #[test]
    fn selector_values() {
        let r = gap_selector(&[100], 1, 100..=100).unwrap();
        assert_eq!(r[0].p, 22);
        let r = gap_selector(&[100], 2, 100..=100).unwrap();
        assert_eq!(r[0].p, 47);
        assert!(r[0].holds);
        assert_eq!(gap_selector(&[5], 1, 1..=1).unwrap_err(), GapError::IndexTooSmall(1));
        assert_eq!(gap_selector(&[5], 2, 2..=2).unwrap_err(), GapError::IndexTooSmall(2));
        assert!(gap_selector(&[5], 1, 2..=2).unwrap()[0].holds);
        assert_eq!(gap_selector(&[5, 5], 1, 2..=3).unwrap_err(), GapError::NotIncreasing(3));
    }

    #[test]
    fn selector_pairs_are_powers() {
        let r = gap_selector(&[100, 200], 2, 100..=101).unwrap();
        assert_eq!(selector_pairs(&r, 1).unwrap(), vec![(47, 100), (r[1].p as usize, 200)]);
        assert_eq!(selector_pairs(&r, 2).unwrap()[0], (2209, 10_000));
        let big = gap_selector(&[u64::MAX / 2], 1, 3..=3).unwrap();
        assert_eq!(selector_pairs(&big, 3).unwrap_err(), GapError::Overflow(3));
    }

    #[test]
    fn tail_entries_for_geometric_bands() {
        let f = ComplexPolynomial::new(mp::zero(), coeffs(80, |k| 3f64.powi(-(k as i32))));
        let pairs = [(4, 12), (16, 30), (34, 60)];
        let t = tail_collapse_check(&f, &pairs, &[0.0, 2.0]);
        for row in &t.rows {
            assert_eq!(row.values[0], 0.0);
            let geometric: f64 = (row.p + 1..=row.q).map(|nu| (2.0f64 / 3.0).powi(nu as i32)).sum();
            assert!(row.values[1] <= geometric * (1.0 + 1e-12));
            assert!((row.values[1] / geometric - 1.0).abs() < 1e-9, "sup at z = 2 is the full sum");
        }
        assert!(t.decreasing[1]);
        let zero = ComplexPolynomial::new(mp::zero(), coeffs(40, |k| if k <= 3 { 1.0 } else { 0.0 }));
        assert!(tail_collapse_check(&zero, &[(3, 10), (12, 30)], &[1.5]).rows.iter().all(|r| r.values[0] == 0.0));
    }

    #[test]
    fn invariance_vanishes_for_singletons_and_low_degree() {
        let f = ComplexPolynomial::from_c64(c(0.0, 0.0), &[c(1.0, 0.0), c(0.5, 1.0), c(-2.0, 0.0), c(0.0, 0.3)]);
        let k = CompactSetSample::new(vec![Primitive::Disk { center: c(0.0, 0.0), radius: 1.5 }], None).unwrap();
        let point = CompactSetSample::new(vec![Primitive::Disk { center: c(0.0, 0.0), radius: 0.0 }], None);
        if let Ok(point) = point {
            let t = center_invariance_check(&f, &point, &k, &[1, 2]).unwrap();
            assert!(t.rows.iter().all(|r| r.value < 1e-80));
        }
        let l = CompactSetSample::new(vec![Primitive::Disk { center: c(0.0, 0.0), radius: 0.2 }], None).unwrap();
        let t = center_invariance_check(&f, &l, &k, &[3, 5, 9]).unwrap();
        assert!(t.rows.iter().all(|r| r.value == 0.0 && r.identity));
        let t = center_invariance_check(&f, &l, &k, &[1, 2]).unwrap();
        assert!(t.rows[0].value > 0.1);
        let big = ComplexPolynomial::monomial(mp::zero(), 1100, mp::one());
        assert!(center_invariance_check(&big, &l, &k, &[3]).is_err());
    }

    #[test]
    fn growth_filter_keeps_tame_indices() {
        let f = ComplexPolynomial::new(mp::zero(), coeffs(30, |k| 0.5f64.powi(k as i32)));
        let rows = growth_filter(&f, &[(1, vec![10, 20]), (2, vec![10, 20])], 2.0);
        assert!(rows.iter().all(|r| r.keep));
        let wild = ComplexPolynomial::new(mp::zero(), coeffs(30, |k| 10f64.powi(k as i32)));
        assert!(!growth_filter(&wild, &[(3, vec![10])], 2.0)[0].keep);
    }

    proptest! {
        #[test]
        fn selector_inequality_always_holds(start in 100u64..10_000, steps in proptest::collection::vec(1u64..5000, 1..30), k0 in 3u64..50, sigma0 in 1u32..5) {
            let mut n = vec![start];
            for s in steps { let last = *n.last().unwrap(); n.push(last + s); }
            let ks = k0..=k0 + n.len() as u64 - 1;
            for row in gap_selector(&n, sigma0, ks).unwrap() {
                prop_assert!(row.holds, "{:?}", row);
            }
        }

        #[test]
        fn relaxing_targets_keeps_verdict(r1 in 1.0f64..10.0, d1 in 0.01f64..1.0, dr in 0.0f64..5.0, dd in 0.0f64..1.0) {
            let a = coeffs(400, |k| 0.9f64.powi((k * k / 8) as i32));
            let pairs = [(2, 10), (12, 60), (64, 390)];
            let strict = detect_gaps(&a, &pairs, r1 + dr, d1).unwrap().verdict;
            let loose = detect_gaps(&a, &pairs, r1, d1 + dd).unwrap().verdict;
            prop_assert!(!strict || loose);
        }

        #[test]
        fn tail_entries_obey_triangle_bound(seed in proptest::collection::vec(-1.0f64..1.0, 40)) {
            let f = ComplexPolynomial::new(mp::zero(), seed.iter().map(|&x| mp::real(x)).collect());
            let t = tail_collapse_check(&f, &[(2, 8), (10, 25), (26, 39)], &[0.5, 1.0, 1.7]);
            for row in &t.rows {
                for (v, b) in row.values.iter().zip(&row.bounds) {
                    prop_assert!(*v <= b * (1.0 + 1e-12));
                }
            }
        }
    }
}
