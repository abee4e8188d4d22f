//! Polynomial approximation of functions holomorphic near a compact set:
//! best-approximation estimates, the interpolating contour-integral
//! construction with its error bound, and local growth certificates.

use num_complex::Complex64 as C64;
use rug::{Complex, Float};
use serde::Serialize;
use thiserror::Error;

use crate::func::{sup_distance, Analytic, FuncError, PiecewiseFunction};
use crate::geometry::{CompactSetSample, Contour, Node};
use crate::lsq::{self, ArnoldiBasis};
use crate::mp::{self, Mpc, PREC};
use crate::poly::ComplexPolynomial;
use crate::potential::ExtremalPoints;

/// Largest degree accepted by [`best_approx_error`].
pub const MAX_FIT_DEGREE: usize = 60;
/// Binary precision of the least-squares fits.
pub const FIT_PREC: u32 = 192;
const LAWSON_STEPS: usize = 6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BwError {
    #[error("degree {0} exceeds {MAX_FIT_DEGREE}; use the contour construction for higher degrees")]
    DegreeTooHigh(usize),
    #[error("{expected} extremal points required, got {got}")]
    PointCount { expected: usize, got: usize },
    #[error("a root of the node polynomial lies on the contour at {0}")]
    RootOnContour(C64),
    #[error("quadrature did not settle: node-doubling residual {residual:.3e} at {nodes} nodes")]
    QuadratureNotConverged { residual: f64, nodes: usize },
    #[error("empty compact set")]
    EmptySet,
    #[error(transparent)]
    Func(#[from] FuncError),
}

/// Estimate of `d_tau(f, K) = min_{deg p <= tau} ||f - p||_K`.
#[derive(Clone, Debug, Serialize)]
pub struct BestApprox {
    pub tau: usize,
    /// Smallest sup error found; an upper bound for the discrete minimax error.
    pub error: f64,
    /// Sup error of the plain least-squares fit of degree `tau`.
    pub least_squares: f64,
    /// `error^(1/tau)`.
    pub rate: f64,
}

/// Least squares on the boundary samples, then Lawson reweighting. Because
/// every lower-degree fit is admissible, the reported error is the smallest
/// over all degrees up to `tau`, which makes it non-increasing in `tau`.
pub fn best_approx_error(f: &dyn Analytic, k: &CompactSetSample, tau: usize) -> Result<BestApprox, BwError> {
    if tau > MAX_FIT_DEGREE {
        return Err(BwError::DegreeTooHigh(tau));
    }
    let pts = k.boundary();
    if pts.is_empty() {
        return Err(BwError::EmptySet);
    }
    let values: Vec<Complex> = pts.iter().map(|&z| f.eval_c64(z)).collect::<Result<Vec<_>, _>>()?;
    let values = lsq::at_prec(&values, FIT_PREC);
    let (lo, hi) = bounds(pts);
    let center = (lo + hi) / 2.0;

    let mut basis = ArnoldiBasis::new(pts, &vec![1.0; pts.len()], center, FIT_PREC);
    basis.extend_to(tau);
    let coords = basis.fit(&values, tau);
    let mut best = f64::INFINITY;
    let mut fitted = vec![Complex::new(FIT_PREC); pts.len()];
    let mut ls = f64::INFINITY;
    for d in 0..=tau {
        basis.add_column(&mut fitted, d, &coords[d]);
        ls = lsq::max_abs_diff(&fitted, &values);
        best = best.min(ls);
    }

    let mut residual: Vec<f64> = fitted.iter().zip(&values).map(|(a, b)| mp::abs(&Complex::with_val(FIT_PREC, a - b))).collect();
    let mut weights = vec![1.0; pts.len()];
    for _ in 0..LAWSON_STEPS {
        let scale = residual.iter().cloned().fold(0.0, f64::max);
        if !(scale > 0.0) {
            break;
        }
        for (w, r) in weights.iter_mut().zip(&residual) {
            *w *= (r / scale).max(1e-12);
        }
        let mut b = ArnoldiBasis::new(pts, &weights, center, FIT_PREC);
        b.extend_to(tau);
        let c = b.fit(&values, tau);
        let v = b.values(&c);
        residual = v.iter().zip(&values).map(|(a, b)| mp::abs(&Complex::with_val(FIT_PREC, a - b))).collect();
        best = best.min(residual.iter().cloned().fold(0.0, f64::max));
    }
    Ok(BestApprox { tau, error: best, least_squares: ls, rate: best.powf(1.0 / tau as f64) })
}

fn bounds(pts: &[C64]) -> (C64, C64) {
    let mut lo = pts[0];
    let mut hi = pts[0];
    for p in pts {
        lo = C64::new(lo.re.min(p.re), lo.im.min(p.im));
        hi = C64::new(hi.re.max(p.re), hi.im.max(p.im));
    }
    (lo, hi)
}

/// Settings for [`bw_construct`].
#[derive(Clone, Debug)]
pub struct BwOptions {
    /// Expansion center of the output polynomial.
    pub center: C64,
    /// Radius of the interpolation circle about `center`; by default the
    /// largest distance from `center` to the extremal points.
    pub radius: Option<f64>,
    /// Accept once doubling the nodes changes the coefficients by at most
    /// this much relative to the largest one.
    pub residual_tol: f64,
    pub max_nodes: usize,
}

impl Default for BwOptions {
    fn default() -> Self {
        Self { center: C64::new(0.0, 0.0), radius: None, residual_tol: 1e-8, max_nodes: 1 << 16 }
    }
}

/// Output of [`bw_construct`].
#[derive(Clone, Debug)]
pub struct BwResult {
    pub p: ComplexPolynomial,
    /// Nodes per loop in the accepted quadrature.
    pub nodes: usize,
    /// Relative coefficient change between the last two node counts.
    pub residual: f64,
}

/// `p(w) = (1 / 2 pi i) ∮ f(z) / (w - z) (q(w) / q(z) - 1) dz`, the
/// polynomial of degree below `tau` interpolating `f` at the roots of `q`.
///
/// The trapezoidal sum is itself a polynomial in `w`; it is sampled at `tau`
/// equispaced points of a circle and its coefficients recovered by a
/// discrete Fourier transform. Node counts double until the coefficients
/// settle.
pub fn bw_construct(
    f: &dyn Analytic,
    gamma: &Contour,
    q: &ExtremalPoints,
    tau: usize,
    opts: &BwOptions,
) -> Result<BwResult, BwError> {
    if q.len() != tau || tau == 0 {
        return Err(BwError::PointCount { expected: tau, got: q.len() });
    }
    let radius = opts.radius.unwrap_or_else(|| q.points.iter().map(|t| (t - opts.center).norm()).fold(0.0, f64::max).max(1e-3));
    let roots: Vec<Mpc> = q.points.iter().map(|&t| mp::from_c64(t)).collect();
    let center = mp::from_c64(opts.center);
    let interp: Vec<Mpc> = (0..tau)
        .map(|j| Complex::with_val(PREC, mp::root_of_unity(j, tau) * Float::with_val(PREC, radius)) + &center)
        .collect();
    let q_interp: Vec<Mpc> = interp.iter().map(|w| eval_q(&roots, w)).collect();

    let solve = |g: &Contour| -> Result<Vec<Mpc>, BwError> {
        let nodes = g.nodes();
        let values = sample_at_interp(f, &nodes, &roots, &interp, &q_interp)?;
        Ok(dft_coefficients(&values, radius))
    };

    let (mut coarse, mut n) = if gamma.refinable() {
        (solve(gamma)?, gamma.node_count())
    } else {
        let half = gamma.with_nodes(gamma.node_count() / 2);
        (solve(&half)?, gamma.node_count() / 2)
    };
    loop {
        let fine_contour = gamma.with_nodes(2 * n);
        let fine = solve(&fine_contour)?;
        let residual = relative_change(&coarse, &fine);
        n *= 2;
        if residual <= opts.residual_tol {
            let p = ComplexPolynomial::new(center.clone(), fine);
            return Ok(BwResult { p, nodes: n, residual });
        }
        if !gamma.refinable() || 2 * n > opts.max_nodes {
            return Err(BwError::QuadratureNotConverged { residual, nodes: n });
        }
        coarse = fine;
    }
}

fn eval_q(roots: &[Mpc], z: &Mpc) -> Mpc {
    let mut acc = mp::one();
    for t in roots {
        acc *= Complex::with_val(PREC, z - t);
    }
    acc
}

/// Values of the trapezoidal interpolant at the circle points, as
/// `q(w) A(w) - B(w)` with `A = sum c_k / (w - z_k)` and
/// `B = sum c_k q(z_k) / (w - z_k)`.
fn sample_at_interp(f: &dyn Analytic, nodes: &[Node], roots: &[Mpc], interp: &[Mpc], q_interp: &[Mpc]) -> Result<Vec<Mpc>, BwError> {
    let two_pi_i = Complex::with_val(PREC, (0, mp::pi() * 2u32));
    let mut zs = Vec::with_capacity(nodes.len());
    let mut cs = Vec::with_capacity(nodes.len());
    let mut ds = Vec::with_capacity(nodes.len());
    for node in nodes {
        let z = mp::from_c64(node.z);
        let fz = f.eval(&z)?;
        if mp::is_zero(&fz) {
            continue;
        }
        let qz = eval_q(roots, &z);
        if mp::is_zero(&qz) {
            return Err(BwError::RootOnContour(node.z));
        }
        let d = Complex::with_val(PREC, &fz * mp::from_c64(node.dz)) / &two_pi_i;
        cs.push(Complex::with_val(PREC, &d / &qz));
        ds.push(d);
        zs.push(z);
    }
    let mut out = Vec::with_capacity(interp.len());
    let mut inv = mp::zero();
    for (w, qw) in interp.iter().zip(q_interp) {
        let mut a = mp::zero();
        let mut b = mp::zero();
        for ((z, c), d) in zs.iter().zip(&cs).zip(&ds) {
            inv.assign_sub_recip(w, z);
            a += Complex::with_val(PREC, c * &inv);
            b += Complex::with_val(PREC, d * &inv);
        }
        out.push(Complex::with_val(PREC, qw * &a) - b);
    }
    Ok(out)
}

trait RecipDiff {
    fn assign_sub_recip(&mut self, w: &Mpc, z: &Mpc);
}

impl RecipDiff for Mpc {
    /// `self = 1 / (w - z)`.
    fn assign_sub_recip(&mut self, w: &Mpc, z: &Mpc) {
        use rug::Assign;
        self.assign(w - z);
        self.recip_mut();
    }
}

/// Coefficients about the circle center from values at `center + r w^j`.
fn dft_coefficients(values: &[Mpc], radius: f64) -> Vec<Mpc> {
    let n = values.len();
    let roots: Vec<Mpc> = (0..n).map(|j| mp::root_of_unity((n - j) % n, n)).collect();
    let r = Float::with_val(PREC, radius);
    let mut rpow = Float::with_val(PREC, 1);
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let mut acc = mp::zero();
        for (m, v) in values.iter().enumerate() {
            acc += Complex::with_val(PREC, v * &roots[(j * m) % n]);
        }
        acc /= Float::with_val(PREC, n) * &rpow;
        out.push(acc);
        rpow *= &r;
    }
    out
}

fn relative_change(a: &[Mpc], b: &[Mpc]) -> f64 {
    let scale = b.iter().map(mp::abs).fold(0.0, f64::max);
    let diff = a.iter().zip(b).map(|(x, y)| mp::abs(&Complex::with_val(PREC, x - y))).fold(0.0, f64::max);
    if scale == 0.0 {
        if diff == 0.0 { 0.0 } else { f64::INFINITY }
    } else {
        diff / scale
    }
}

/// Measured terms of
/// `||f - p||_K <= (1 / 2 pi) l(Γ) / dist(Γ, K) * ||q||_K / min_Γ |q| * ||f||_Γ`.
#[derive(Clone, Debug, Serialize)]
pub struct ContourBound {
    pub lhs: f64,
    pub rhs: f64,
    pub length: f64,
    pub distance: f64,
    pub log_q_norm_k: f64,
    pub log_q_min_gamma: f64,
    pub f_norm_gamma: f64,
    pub holds: bool,
}

pub fn contour_bound_check(
    f: &dyn Analytic,
    p: &ComplexPolynomial,
    gamma: &Contour,
    q: &ExtremalPoints,
    k: &CompactSetSample,
) -> Result<ContourBound, BwError> {
    let lhs = sup_distance(p, f, k.boundary())?;
    let nodes = gamma.nodes();
    let length = gamma.length();
    let distance = gamma.distance_to(k);
    let log_q_norm_k = q.log_norm(k.boundary());
    let log_q_min_gamma = nodes.iter().map(|n| q.log_abs_q(n.z)).fold(f64::INFINITY, f64::min);
    let mut f_norm_gamma = 0.0f64;
    for n in &nodes {
        f_norm_gamma = f_norm_gamma.max(mp::abs(&f.eval_c64(n.z)?));
    }
    let rhs = length / (std::f64::consts::TAU * distance) * (log_q_norm_k - log_q_min_gamma).exp() * f_norm_gamma;
    Ok(ContourBound { lhs, rhs, length, distance, log_q_norm_k, log_q_min_gamma, f_norm_gamma, holds: lhs <= rhs })
}

/// Uniform bound `||f_n||_K^(1 / sigma_n) <= A` over a finite range of `n`.
#[derive(Clone, Debug, Serialize)]
pub struct LocalBoundCertificate {
    pub a: f64,
    pub values: Vec<(u64, f64)>,
    /// False when the measured values grow steadily over the second half of
    /// the range; a finite-range verdict only.
    pub bounded: bool,
}

pub fn local_bound_check(
    family: &dyn Fn(u64) -> PiecewiseFunction,
    sigma: &dyn Fn(u64) -> f64,
    k: &CompactSetSample,
    n_range: std::ops::RangeInclusive<u64>,
) -> Result<LocalBoundCertificate, BwError> {
    let mut values = Vec::new();
    for n in n_range {
        let f = family(n);
        let mut log_norm = f64::NEG_INFINITY;
        for &z in k.boundary() {
            log_norm = log_norm.max(mp::ln_abs(&f.eval_c64(z)?));
        }
        values.push((n, (log_norm / sigma(n)).exp()));
    }
    let max = values.iter().map(|v| v.1).fold(0.0, f64::max);
    let a = max.max(1.0) * 1.1;
    let half = values.len() / 2;
    let (first, second) = values.split_at(half);
    let increasing = second.windows(2).all(|w| w[1].1 > w[0].1);
    let first_max = first.iter().map(|v| v.1).fold(0.0, f64::max);
    let second_max = second.iter().map(|v| v.1).fold(0.0, f64::max);
    let bounded = !(second.len() >= 2 && increasing && second_max > 2.0 * first_max.max(1.0));
    Ok(LocalBoundCertificate { a, values, bounded })
}
