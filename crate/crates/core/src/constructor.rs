//! Inductive construction of a polynomial whose partial sums along several
//! index sequences approximate several targets at one common index.

use num_complex::Complex64 as C64;
use rug::Complex;
use serde::Serialize;
use thiserror::Error;

use crate::bw::{bw_construct, contour_bound_check, BwError, BwOptions, ContourBound};
use crate::func::{sup_distance, Analytic, FuncError};
use crate::geometry::{make_contour, CompactSetSample, Contour, DomainSpec, GeometryError, Primitive, Region};
use crate::lsq::{self, ArnoldiBasis};
use crate::mp::{self, Mpc, PREC};
use crate::poly::{ComplexPolynomial, Degree, DegreeBand};
use crate::potential::{self, fekete_points, PotentialError};
use crate::seq::{SeqError, SequenceFamily};

pub const SEED_MAX_DEGREE: usize = 80;
pub const DEFAULT_TRIALS: u64 = 16;
/// Extremal points behind the Green estimate used for `θ`.
pub const THETA_POINTS: usize = 128;
/// Coefficients below this modulus are ignored when reading degree bands.
pub const BAND_TOL: f64 = 0.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstructError {
    #[error("invalid scenario: {0}")]
    Scenario(String),
    #[error("no seed polynomial up to degree {max_degree}: best errors {best_l:.3e} on L and {best_k:.3e} on K (targets {eps_half:.3e}, {inv_s:.3e})")]
    SeedNotFound { max_degree: usize, best_l: f64, best_k: f64, eps_half: f64, inv_s: f64 },
    #[error("L and K intersect")]
    SetsIntersect,
    #[error("degree band empty at n = {n}: tau = {tau}")]
    EmptyBand { n: u64, tau: i128 },
    #[error("stage {sigma} at n = {n} needs stages 2..{sigma} at the same n")]
    MissingPrior { sigma: usize, n: u64 },
    #[error(transparent)]
    Bw(#[from] BwError),
    #[error(transparent)]
    Func(#[from] FuncError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Seq(#[from] SeqError),
}

/// A target function on a compact set.
#[derive(Clone, Debug)]
pub struct Target {
    pub k: CompactSetSample,
    pub f: std::sync::Arc<dyn Analytic + Send + Sync>,
}

#[derive(Clone, Debug)]
pub struct ConstructionScenario {
    pub omega: DomainSpec,
    pub l: CompactSetSample,
    pub g: std::sync::Arc<dyn Analytic + Send + Sync>,
    /// One target per member of `family`.
    pub targets: Vec<Target>,
    pub family: SequenceFamily,
    pub eps: f64,
    pub s: u32,
    pub u1: Region,
    pub u2: Region,
    pub theta0: Option<f64>,
}

impl std::fmt::Debug for dyn Analytic + Send + Sync {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("<function>")
    }
}

impl ConstructionScenario {
    /// Checks the scenario, padding `L` with a disk about `ζ0` when `ζ0` is
    /// not interior to it.
    pub fn validated(mut self) -> Result<Self, ConstructError> {
        let bad = |m: String| Err(ConstructError::Scenario(m));
        if self.targets.len() != self.family.sigma0() {
            return bad(format!("{} targets for {} sequences", self.targets.len(), self.family.sigma0()));
        }
        if !(self.eps > 0.0) || self.s == 0 {
            return bad("need eps > 0 and s >= 1".into());
        }
        if let Some(t) = self.theta0 {
            if !(t > 0.0 && t < 1.0) {
                return bad(format!("theta0 = {t} outside (0, 1)"));
            }
        }
        let zeta0 = self.omega.zeta0();
        if !is_interior(&self.l, zeta0) {
            let r = self.omega.shape().distance(zeta0) / 4.0;
            let mut prims = self.l.primitives().to_vec();
            prims.push(Primitive::Disk { center: zeta0, radius: r });
            self.l = CompactSetSample::new(prims, None)?;
        }
        if let Some(z) = self.l.samples().iter().find(|&&z| !self.omega.shape().contains(z)) {
            return bad(format!("L leaves the domain at {z}"));
        }
        if !self.l.in_m() {
            return bad("L must have connected complement".into());
        }
        for (i, t) in self.targets.iter().enumerate() {
            if !t.k.in_m() {
                return bad(format!("K_{} must have connected complement", i + 1));
            }
            if !t.k.separation_from(self.omega.shape()).1 {
                return bad(format!("K_{} must lie outside the domain", i + 1));
            }
            if let Some(z) = t.k.samples().iter().find(|&&z| !self.u2.contains(z) || self.u1.contains(z)) {
                return bad(format!("K_{} is not inside U2 \\ U1 (at {z})", i + 1));
            }
        }
        if let Some(z) = self.l.samples().iter().find(|&&z| !self.u1.contains(z) || self.u2.contains(z)) {
            return bad(format!("L is not inside U1 \\ U2 (at {z})"));
        }
        let window = 4.0 * (self.targets.iter().map(|t| t.k.max_modulus_about(zeta0)).fold(self.l.max_modulus_about(zeta0), f64::max) + 1.0);
        let h = self.l.mesh();
        if let Some(z) = self.u1.boundary_points(h, window).into_iter().chain(self.u2.boundary_points(h, window)).find(|&z| self.u1.contains(z) && self.u2.contains(z)) {
            return bad(format!("U1 and U2 overlap near {z}"));
        }
        Ok(self)
    }

    pub fn sigma0(&self) -> usize {
        self.family.sigma0()
    }
}

/// True when a ring of samples around `z` at the mesh radius lies in `k`.
fn is_interior(k: &CompactSetSample, z: C64) -> bool {
    let r = k.mesh();
    k.contains(z) && (0..16).all(|j| k.contains(z + C64::from_polar(r, j as f64 * std::f64::consts::TAU / 16.0)))
}

/// Seed polynomial about `ζ0` with its measured errors.
#[derive(Clone, Debug, Serialize)]
pub struct Seed {
    #[serde(skip)]
    pub p: ComplexPolynomial,
    pub degree: usize,
    pub error_l: f64,
    pub error_k: f64,
}

/// Joint weighted least squares on `L` and `K` of increasing degree until
/// `||g - p||_L < eps / 2` and `||p - f||_K < 1 / s` on the boundary samples.
pub fn runge_seed(
    g: &dyn Analytic,
    l: &CompactSetSample,
    f: &dyn Analytic,
    k: &CompactSetSample,
    eps: f64,
    s: u32,
    center: C64,
) -> Result<Seed, ConstructError> {
    if l.samples().iter().any(|&z| k.contains(z)) || k.samples().iter().any(|&z| l.contains(z)) {
        return Err(ConstructError::SetsIntersect);
    }
    let (lb, kb) = (l.boundary(), k.boundary());
    let pts: Vec<C64> = lb.iter().chain(kb).copied().collect();
    let wl = (2.0 / eps).powi(2) / lb.len() as f64;
    let wk = (s as f64).powi(2) / kb.len() as f64;
    let weights: Vec<f64> = lb.iter().map(|_| wl).chain(kb.iter().map(|_| wk)).collect();
    let mut values = Vec::with_capacity(pts.len());
    for &z in lb {
        values.push(g.eval_c64(z)?);
    }
    for &z in kb {
        values.push(f.eval_c64(z)?);
    }
    let values = lsq::at_prec(&values, crate::bw::FIT_PREC);
    let mut basis = ArnoldiBasis::new(&pts, &weights, center, crate::bw::FIT_PREC);
    let (eps_half, inv_s) = (eps / 2.0, 1.0 / s as f64);
    let (mut best_l, mut best_k) = (f64::INFINITY, f64::INFINITY);
    for d in 0..=SEED_MAX_DEGREE {
        basis.extend_to(d);
        let coords = basis.fit(&values, d);
        let p = basis.to_polynomial(&coords);
        let el = sup_distance(&p, g, lb)?;
        let ek = sup_distance(&p, f, kb)?;
        if el.max(ek / inv_s * eps_half) < best_l.max(best_k / inv_s * eps_half) {
            (best_l, best_k) = (el, ek);
        }
        if el < eps_half && ek < inv_s {
            let degree = p.degree().finite().unwrap_or(0);
            return Ok(Seed { p, degree, error_l: el, error_k: ek });
        }
    }
    Err(ConstructError::SeedNotFound { max_degree: SEED_MAX_DEGREE, best_l, best_k, eps_half, inv_s })
}

/// `f_n` on the shifted neighbourhoods: zero on `U1 - ζ0` and
/// `z^(-shift) (F(z + ζ0) - h(z))` on `U2 - ζ0`.
struct StageFunction<'a> {
    u1: Region,
    u2: Region,
    target: &'a dyn Analytic,
    zeta0: Mpc,
    h: ComplexPolynomial,
    shift: u32,
}

impl Analytic for StageFunction<'_> {
    fn eval(&self, z: &Mpc) -> Result<Mpc, FuncError> {
        let zc = mp::to_c64(z);
        match (self.u1.contains(zc), self.u2.contains(zc)) {
            (true, true) => Err(FuncError::Overlap(zc)),
            (false, false) => Err(FuncError::NoBranch(zc)),
            (true, false) => Ok(mp::zero()),
            (false, true) => {
                if mp::is_zero(z) {
                    return Err(FuncError::DivisionByZero(zc));
                }
                let g = Complex::with_val(PREC, self.target.eval(&Complex::with_val(PREC, z + &self.zeta0))? - self.h.eval(z));
                let zp = Complex::with_val(PREC, rug::ops::Pow::pow(z, self.shift));
                Ok(g / zp)
            }
        }
    }
}

/// Per-`σ` data shared by all trial indices.
pub struct StageSetup {
    pub sigma: usize,
    /// `(L - ζ0) ∪ (K_σ - ζ0)`.
    pub k: CompactSetSample,
    pub contour: Contour,
    pub theta: f64,
    pub theta0: f64,
    pub m: f64,
    u1: Region,
    u2: Region,
}

impl StageSetup {
    pub fn new(scn: &ConstructionScenario, sigma: usize) -> Result<Self, ConstructError> {
        let zeta0 = scn.omega.zeta0();
        let shift = -zeta0;
        let k = scn.l.union(&scn.targets[sigma - 1].k).translate(shift);
        let u1 = scn.u1.translate(shift);
        let u2 = scn.u2.translate(shift);
        let u = Region::Union(vec![u1.clone(), u2.clone()]);
        let contour = make_contour(&k, &u, k.mesh())?;
        let window = 4.0 * (k.max_modulus_about(C64::new(0.0, 0.0)) + 1.0);
        let wall = u.boundary_points(k.mesh() / 4.0, window);
        let theta = potential::theta(&k, &wall, THETA_POINTS)?;
        let theta0 = scn.theta0.unwrap_or((theta + 1.0) / 2.0);
        let m = k.max_modulus_about(C64::new(0.0, 0.0)) + 1.0;
        Ok(Self { sigma, k, contour, theta, theta0, m, u1, u2 })
    }
}

/// One correction stage at one trial index.
#[derive(Clone, Debug, Serialize)]
pub struct StageRecord {
    pub sigma: usize,
    pub n: u64,
    /// `Q_n^(σ)` about 0 in the shifted frame.
    #[serde(skip)]
    pub q: ComplexPolynomial,
    pub band: DegreeBand,
    pub lambda_prev: u128,
    pub lambda: u128,
    pub tau: usize,
    /// `||Q(z - ζ0)||_L`.
    pub bound_l: f64,
    /// `||p + Σ_{k<=σ} Q_k(z - ζ0) - f_σ||_{K_σ}`.
    pub bound_k: f64,
    /// `||f_n - p_n||_K`.
    pub fit_error: f64,
    pub m: f64,
    pub theta0: f64,
    /// `M^(λ^(σ-1) + 1) θ0^(λ^(σ))`.
    pub predicted: f64,
    pub nodes: usize,
    pub quadrature_residual: f64,
    pub bound: ContourBound,
}

/// Builds `Q_n^(σ) = z^(λ^(σ-1)_n + 1) p_n(z)`, where `p_n` interpolates `f_n`
/// at `τ_n + 1` extremal points of `K`, so `deg p_n <= τ_n`.
pub fn build_stage(
    scn: &ConstructionScenario,
    setup: &StageSetup,
    seed: &ComplexPolynomial,
    prior: &[StageRecord],
    n: u64,
) -> Result<StageRecord, ConstructError> {
    let sigma = setup.sigma;
    if prior.len() != sigma - 2 || prior.iter().enumerate().any(|(i, r)| r.n != n || r.sigma != i + 2) {
        return Err(ConstructError::MissingPrior { sigma, n });
    }
    let lambda_prev = scn.family.eval(sigma - 1, n)?;
    let lambda = scn.family.eval(sigma, n)?;
    let tau = lambda as i128 - lambda_prev as i128 - 1;
    if tau < 1 {
        return Err(ConstructError::EmptyBand { n, tau });
    }
    let tau = tau as usize;
    let zeta0 = mp::from_c64(scn.omega.zeta0());
    let origin = mp::zero();
    let mut h = seed.with_center(origin.clone());
    for r in prior {
        h = &h + &r.q;
    }
    let shift = u32::try_from(lambda_prev + 1).map_err(|_| SeqError::Overflow(n))?;
    let target = scn.targets[sigma - 1].f.as_ref();
    let fun = StageFunction { u1: setup.u1.clone(), u2: setup.u2.clone(), target, zeta0: zeta0.clone(), h, shift };

    let pts = fekete_points(&setup.k, tau + 1)?;
    let bw = bw_construct(&fun, &setup.contour, &pts, tau + 1, &BwOptions::default())?;
    let fit_error = sup_distance(&bw.p, &fun, setup.k.boundary())?;
    let bound = contour_bound_check(&fun, &bw.p, &setup.contour, &pts, &setup.k)?;
    let q = bw.p.shift_degree(shift as usize);
    let q_orig = q.with_center(zeta0.clone());
    let bound_l = q_orig.sup_norm(scn.l.boundary());
    let mut partial = seed.clone();
    for r in prior {
        partial = &partial + &r.q.with_center(zeta0.clone());
    }
    partial = &partial + &q_orig;
    let bound_k = sup_distance(&partial, target, scn.targets[sigma - 1].k.boundary())?;
    let predicted = ((lambda_prev + 1) as f64 * setup.m.ln() + lambda as f64 * setup.theta0.ln()).exp();
    Ok(StageRecord {
        sigma,
        n,
        band: q.degree_band(BAND_TOL),
        q,
        lambda_prev,
        lambda,
        tau,
        bound_l,
        bound_k,
        fit_error,
        m: setup.m,
        theta0: setup.theta0,
        predicted,
        nodes: bw.nodes,
        quadrature_residual: bw.residual,
        bound,
    })
}

/// All stages at one trial index, or the reason they could not be built.
#[derive(Clone, Debug, Serialize)]
pub struct TrialRecord {
    pub n: u64,
    pub stages: Vec<StageRecord>,
    pub failure: Option<String>,
    pub lambda1: u128,
    /// `||f - g||_L` for `f = p + Σ Q_n`.
    pub error_l: f64,
    /// Per-`σ` errors of the partial sums, starting with `σ = 1`.
    pub errors_k: Vec<f64>,
    pub qualifies: bool,
    /// First violated requirement, if any.
    pub binding: Option<String>,
}

/// Runs every stage at trial index `n`.
pub fn build_trial(scn: &ConstructionScenario, setups: &[StageSetup], seed: &Seed, n: u64) -> Result<TrialRecord, ConstructError> {
    let lambda1 = scn.family.eval(1, n)?;
    let mut stages: Vec<StageRecord> = Vec::new();
    let mut failure = None;
    for setup in setups {
        match build_stage(scn, setup, &seed.p, &stages, n) {
            Ok(r) => stages.push(r),
            Err(e @ (ConstructError::Bw(_) | ConstructError::EmptyBand { .. } | ConstructError::Potential(_) | ConstructError::Seq(_))) => {
                failure = Some(e.to_string());
                break;
            }
            Err(e) => return Err(e),
        }
    }
    let mut rec = TrialRecord { n, stages, failure, lambda1, error_l: f64::NAN, errors_k: Vec::new(), qualifies: false, binding: None };
    if let Some(f) = &rec.failure {
        rec.binding = Some(format!("stage failed: {f}"));
        return Ok(rec);
    }
    let f = assemble_polynomial(scn, &seed.p, &rec.stages);
    rec.error_l = sup_distance(&f, scn.g.as_ref(), scn.l.boundary())?;
    rec.errors_k.push(seed.error_k);
    rec.errors_k.extend(rec.stages.iter().map(|s| s.bound_k));
    let inv_s = 1.0 / scn.s as f64;
    let deg_p = seed.degree as u128;
    rec.binding = if lambda1 <= deg_p {
        Some(format!("lambda1 = {lambda1} does not exceed deg p = {deg_p}"))
    } else if !(rec.error_l < scn.eps) {
        Some(format!("||f - g||_L = {:.3e} not below eps = {:.3e}", rec.error_l, scn.eps))
    } else {
        rec.errors_k.iter().position(|&e| !(e < inv_s)).map(|i| format!("sigma = {}: error {:.3e} not below 1/s = {inv_s:.3e}", i + 1, rec.errors_k[i]))
    };
    rec.qualifies = rec.binding.is_none();
    Ok(rec)
}

/// `p + Σ_σ Q^(σ)(z - ζ0)` about `ζ0`.
pub fn assemble_polynomial(scn: &ConstructionScenario, seed: &ComplexPolynomial, stages: &[StageRecord]) -> ComplexPolynomial {
    let zeta0 = mp::from_c64(scn.omega.zeta0());
    stages.iter().fold(seed.clone(), |acc, s| &acc + &s.q.with_center(zeta0.clone()))
}

#[derive(Clone, Debug, Serialize)]
pub struct StageSummary {
    pub sigma: usize,
    pub theta: f64,
    pub theta0: f64,
    pub m: f64,
    pub contour_length: f64,
    pub contour_distance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstructionReport {
    pub seed: Seed,
    pub setups: Vec<StageSummary>,
    pub trials: Vec<TrialRecord>,
    pub n1: Option<u64>,
    #[serde(skip)]
    pub f: Option<ComplexPolynomial>,
    /// `[||f - g||_L, σ = 1 error, σ = 2 error, ...]` measured on `f` itself.
    pub final_errors: Vec<f64>,
    pub pass: bool,
    pub binding: Option<String>,
}

/// Picks the smallest qualifying trial and measures the assembled polynomial
/// through its own partial sums.
pub fn assemble(scn: &ConstructionScenario, seed: Seed, setups: &[StageSetup], trials: Vec<TrialRecord>) -> Result<ConstructionReport, ConstructError> {
    let summaries = setups
        .iter()
        .map(|s| StageSummary {
            sigma: s.sigma,
            theta: s.theta,
            theta0: s.theta0,
            m: s.m,
            contour_length: s.contour.length(),
            contour_distance: s.contour.distance_to(&s.k),
        })
        .collect();
    let chosen = trials.iter().filter(|t| t.qualifies).min_by_key(|t| t.n);
    let Some(t) = chosen else {
        let binding = trials.iter().max_by_key(|t| t.n).and_then(|t| t.binding.clone()).or(Some("no trials".into()));
        let pass = false;
        return Ok(ConstructionReport { seed, setups: summaries, trials, n1: None, f: None, final_errors: Vec::new(), pass, binding });
    };
    let n1 = t.n;
    let f = assemble_polynomial(scn, &seed.p, &t.stages);
    let mut final_errors = vec![sup_distance(&f, scn.g.as_ref(), scn.l.boundary())?];
    for (i, target) in scn.targets.iter().enumerate() {
        let lambda = scn.family.eval(i + 1, n1)?;
        let part = f.partial_sum(usize::try_from(lambda).unwrap_or(usize::MAX));
        final_errors.push(sup_distance(&part, target.f.as_ref(), target.k.boundary())?);
    }
    let inv_s = 1.0 / scn.s as f64;
    let pass = final_errors[0] < scn.eps && final_errors[1..].iter().all(|&e| e < inv_s);
    let binding = if pass { None } else { Some("assembled polynomial misses a bound".into()) };
    Ok(ConstructionReport { seed, setups: summaries, trials, n1: Some(n1), f: Some(f), final_errors, pass, binding })
}

/// Seed, per-`σ` setup, and trials `n = 1, 2, ...` up to `max_trials`,
/// stopping at the first qualifying one.
pub fn construct(scn: &ConstructionScenario, max_trials: u64) -> Result<ConstructionReport, ConstructError> {
    let t1 = &scn.targets[0];
    let seed = runge_seed(scn.g.as_ref(), &scn.l, t1.f.as_ref(), &t1.k, scn.eps, scn.s, scn.omega.zeta0())?;
    let setups = (2..=scn.sigma0()).map(|s| StageSetup::new(scn, s)).collect::<Result<Vec<_>, _>>()?;
    // Without correction stages only the first index condition can bind, so
    // a single trial at the first index passing it suffices.
    let (first, limit) = if scn.sigma0() == 1 {
        let deg = seed.degree as u128;
        let mut n = 1;
        while n < 1 << 16 && scn.family.eval(1, n)? <= deg {
            n += 1;
        }
        (n, n)
    } else {
        (1, max_trials)
    };
    let mut trials = Vec::new();
    for n in first..=limit {
        let rec = build_trial(scn, &setups, &seed, n)?;
        let done = rec.qualifies;
        trials.push(rec);
        if done {
            break;
        }
    }
    assemble(scn, seed, &setups, trials)
}

/// Error curves `||T_{λ^(σ)_n}(f) - f_σ||_{K_σ}` over a range of `n`.
#[derive(Clone, Debug, Serialize)]
pub struct UmultReport {
    pub ns: Vec<u64>,
    /// `curves[σ - 1][i]` is the error at `ns[i]`.
    pub curves: Vec<Vec<f64>>,
    pub threshold: f64,
    /// Indices at which every `σ` meets the threshold simultaneously.
    pub common: Vec<u64>,
    pub pass: bool,
}

/// Partial sums are taken about the center of `f`.
pub fn verify_umult(
    f: &ComplexPolynomial,
    targets: &[Target],
    family: &SequenceFamily,
    n_range: std::ops::RangeInclusive<u64>,
    s: u32,
) -> Result<UmultReport, ConstructError> {
    if targets.len() != family.sigma0() {
        return Err(ConstructError::Scenario(format!("{} targets for {} sequences", targets.len(), family.sigma0())));
    }
    let threshold = 1.0 / s as f64;
    let ns: Vec<u64> = n_range.collect();
    let mut curves = vec![Vec::with_capacity(ns.len()); targets.len()];
    for &n in &ns {
        for (i, t) in targets.iter().enumerate() {
            let lambda = family.eval(i + 1, n)?;
            let part = match f.degree() {
                Degree::Finite(d) if (lambda as u128) < d as u128 => f.partial_sum(lambda as usize),
                _ => f.clone(),
            };
            curves[i].push(sup_distance(&part, t.f.as_ref(), t.k.boundary())?);
        }
    }
    let common: Vec<u64> = ns.iter().enumerate().filter(|(j, _)| curves.iter().all(|c| c[*j] < threshold)).map(|(_, &n)| n).collect();
    Ok(UmultReport { pass: !common.is_empty(), ns, curves, threshold, common })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::{Expr, PiecewiseFunction};
    use std::sync::Arc;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn seg(a: C64, b: C64) -> CompactSetSample {
        CompactSetSample::new(vec![Primitive::Segment { a, b }], None).unwrap()
    }

    fn fun(text: &str) -> Arc<dyn Analytic + Send + Sync> {
        Arc::new(PiecewiseFunction::global(Expr::parse(text).unwrap()))
    }

    fn disk(r: f64) -> CompactSetSample {
        CompactSetSample::new(vec![Primitive::Disk { center: c(0.0, 0.0), radius: r }], None).unwrap()
    }

    #[test]
    fn seed_reproduces_a_common_polynomial_target() {
        let g = fun("1 + 2*z - z^2");
        let s = runge_seed(g.as_ref(), &disk(0.4), g.as_ref(), &seg(c(1.5, 0.0), c(2.5, 0.0)), 0.1, 10, c(0.0, 0.0)).unwrap();
        assert_eq!(s.degree, 2);
        assert!(s.error_l < 1e-40 && s.error_k < 1e-40);
    }

    #[test]
    fn seed_separates_zero_and_one() {
        let s = runge_seed(fun("0").as_ref(), &disk(0.4), fun("1").as_ref(), &seg(c(1.5, 0.0), c(2.5, 0.0)), 0.1, 10, c(0.0, 0.0)).unwrap();
        assert!(s.error_l < 0.05 && s.error_k < 0.1);
        assert!(s.degree >= 1 && s.degree <= 20, "degree {}", s.degree);
    }

    #[test]
    fn seed_rejects_overlapping_sets() {
        let e = runge_seed(fun("0").as_ref(), &disk(0.4), fun("1").as_ref(), &seg(c(0.0, 0.0), c(1.0, 0.0)), 0.1, 10, c(0.0, 0.0));
        assert_eq!(e.unwrap_err(), ConstructError::SetsIntersect);
    }

    #[test]
    fn common_index_is_required() {
        // f = 1 + z^3; λ1 = (1, 5), λ2 = (2, 4) alternating: target 1 is met
        // only at even n and target z^3 + 1 only at odd n.
        let f = ComplexPolynomial::from_c64(c(0.0, 0.0), &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let k = seg(c(1.5, 0.0), c(2.5, 0.0));
        let targets = vec![Target { k: k.clone(), f: fun("1") }, Target { k, f: fun("1 + z^3") }];
        let family = SequenceFamily::new(vec![
            "explicit [5,1,5,1,5,1,5,1]".parse().unwrap(),
            "explicit [4,2,4,2,4,2,4,2]".parse().unwrap(),
        ])
        .unwrap();
        let r = verify_umult(&f, &targets, &family, 1..=8, 10).unwrap();
        for (j, n) in r.ns.iter().enumerate() {
            assert_eq!(r.curves[0][j] < 0.1, n % 2 == 0);
            assert_eq!(r.curves[1][j] < 0.1, n % 2 == 1);
        }
        assert!(!r.pass && r.common.is_empty());
    }

    #[test]
    fn zero_polynomial_misses_constant_target() {
        let f = ComplexPolynomial::zero(mp::zero());
        let targets = vec![Target { k: seg(c(1.5, 0.0), c(2.5, 0.0)), f: fun("1") }];
        let family = SequenceFamily::new(vec!["poly [0,1]".parse().unwrap()]).unwrap();
        let r = verify_umult(&f, &targets, &family, 1..=4, 10).unwrap();
        assert!(r.curves[0].iter().all(|&e| (e - 1.0).abs() < 1e-15));
        assert!(!r.pass);
    }
}
