//! One function per subcommand. Each returns a serialisable result that
//! knows its pass criterion and its tables; [`run`] writes them out.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use num_complex::Complex64 as C64;
use serde::Serialize;
use utaylor::bw::{best_approx_error, bw_construct, contour_bound_check, BestApprox, BwOptions, ContourBound};
use utaylor::constructor::{construct as run_construction, verify_umult, ConstructionReport, UmultReport, DEFAULT_TRIALS};
use utaylor::gaps::{
    center_invariance_check, detect_gaps, gap_selector, selector_pairs, tail_collapse_check, GapReport, InvarianceTable,
    SelectorRow, TailTable, DEFAULT_DECAY_TARGET, DEFAULT_RATIO_TARGET,
};
use utaylor::geometry::{make_contour, BOUNDARY_OVERSAMPLING};
use utaylor::poly::{ComplexPolynomial, DegreeBand};
use utaylor::potential::{capacity as capacity_estimate, fekete_points, green_eval, theta, CapacityEstimate, ExtremalMethod};
use utaylor::seq::{
    criterion_subsequence, is_well_ordered, rearrange_well_ordered, CertificateSearch, CriterionOutcome, Rearrangement,
    SequenceFamily, WellOrderReport, DEFAULT_LEVELS,
};

use crate::output::{self, cplx, num, Artifacts, Table};
use crate::scenario::{Overrides, Scenario};

pub const COMMANDS: [&str; 9] = ["classify", "construct", "verify", "bw", "fekete", "capacity", "green", "gaps", "invariance"];

fn flag(b: bool) -> String {
    b.to_string()
}

// classify

#[derive(Debug, Serialize)]
pub struct Classified {
    pub horizon: u64,
    pub levels: Vec<u64>,
    pub order: WellOrderReport,
    pub rearrangement: Rearrangement,
    pub rearranged: SequenceFamily,
    /// Absent when no rearrangement is well ordered.
    pub criterion: Option<CriterionOutcome>,
}

impl Artifacts for Classified {
    fn pass(&self) -> bool {
        matches!(self.criterion, Some(CriterionOutcome { search: CertificateSearch::Found(_), .. }))
    }

    fn tables(&self) -> Result<Vec<Table>> {
        let mut order = Table::new("order", &["sigma", "forward", "forward_exact", "backward", "backward_exact", "ok"]);
        for s in &self.order.steps {
            order.push(vec![
                s.sigma.to_string(),
                s.forward.value.to_string(),
                flag(s.forward.exact),
                s.backward.value.to_string(),
                flag(s.backward.exact),
                flag(s.ok),
            ]);
        }
        let s0 = self.rearranged.sigma0();
        let mut header = vec!["level".to_string(), "mu".to_string()];
        header.extend((1..=s0).map(|s| format!("lambda_{s}")));
        header.extend((1..s0).map(|s| format!("ratio_{s}")));
        let mut cert = Table::with_header("certificate", header);
        let rows = match &self.criterion {
            Some(CriterionOutcome { search: CertificateSearch::Found(c), .. }) => &c.rows[..],
            Some(CriterionOutcome { search: CertificateSearch::NotFound { partial, .. }, .. }) => &partial.rows[..],
            None => &[],
        };
        for r in rows {
            let mut row = vec![r.level.to_string(), r.mu.to_string()];
            row.extend(r.values.iter().map(|v| v.to_string()));
            row.extend(r.ratios.iter().map(|&x| num(x)));
            cert.push(row);
        }
        Ok(vec![order, cert])
    }
}

pub fn classify(scn: &Scenario, o: &Overrides) -> Result<Classified> {
    let family = scn.family()?;
    let horizon = scn.horizon(o);
    let levels = scn.classify.as_ref().and_then(|c| c.levels.clone()).unwrap_or_else(|| DEFAULT_LEVELS.to_vec());
    let order = is_well_ordered(family, horizon)?;
    let rearrangement = rearrange_well_ordered(family, horizon)?;
    let rearranged = family.permuted(&rearrangement.perm);
    let criterion = if rearrangement.well_ordered { Some(criterion_subsequence(&rearranged, &levels, horizon)?) } else { None };
    Ok(Classified { horizon, levels, order, rearrangement, rearranged, criterion })
}

// construct

#[derive(Debug, Serialize)]
pub struct Constructed {
    pub max_trials: u64,
    pub report: ConstructionReport,
}

fn band_cells(b: &DegreeBand) -> [String; 2] {
    match b {
        DegreeBand::Empty => [String::new(), String::new()],
        DegreeBand::Band { lo, hi } => [lo.to_string(), hi.to_string()],
    }
}

impl Artifacts for Constructed {
    fn pass(&self) -> bool {
        self.report.pass
    }

    fn tables(&self) -> Result<Vec<Table>> {
        let r = &self.report;
        let s0 = r.setups.len() + 1;
        let mut header: Vec<String> = ["n", "lambda1", "error_l"].iter().map(|s| s.to_string()).collect();
        header.extend((1..=s0).map(|s| format!("error_k{s}")));
        header.extend(["qualifies", "failure", "binding"].iter().map(|s| s.to_string()));
        let mut trials = Table::with_header("trials", header);
        for t in &r.trials {
            let mut row = vec![t.n.to_string(), t.lambda1.to_string(), num(t.error_l)];
            row.extend((0..s0).map(|i| t.errors_k.get(i).map_or(String::new(), |&e| num(e))));
            row.push(flag(t.qualifies));
            row.push(t.failure.clone().unwrap_or_default());
            row.push(t.binding.clone().unwrap_or_default());
            trials.push(row);
        }
        let mut stages = Table::new(
            "stages",
            &[
                "n", "sigma", "lambda_prev", "lambda", "tau", "band_lo", "band_hi", "bound_l", "bound_k", "fit_error", "m", "theta0",
                "predicted", "nodes", "quadrature_residual", "contour_lhs", "contour_rhs", "contour_holds",
            ],
        );
        for t in &r.trials {
            for s in &t.stages {
                let [lo, hi] = band_cells(&s.band);
                stages.push(vec![
                    s.n.to_string(),
                    s.sigma.to_string(),
                    s.lambda_prev.to_string(),
                    s.lambda.to_string(),
                    s.tau.to_string(),
                    lo,
                    hi,
                    num(s.bound_l),
                    num(s.bound_k),
                    num(s.fit_error),
                    num(s.m),
                    num(s.theta0),
                    num(s.predicted),
                    s.nodes.to_string(),
                    num(s.quadrature_residual),
                    num(s.bound.lhs),
                    num(s.bound.rhs),
                    flag(s.bound.holds),
                ]);
            }
        }
        let mut setups = Table::new("setups", &["sigma", "theta", "theta0", "m", "contour_length", "contour_distance"]);
        for s in &r.setups {
            setups.push(vec![s.sigma.to_string(), num(s.theta), num(s.theta0), num(s.m), num(s.contour_length), num(s.contour_distance)]);
        }
        let mut header = vec!["n1".to_string(), "error_l".to_string()];
        header.extend((1..=s0).map(|s| format!("error_k{s}")));
        header.push("pass".into());
        let mut fin = Table::with_header("final", header);
        if let Some(n1) = r.n1 {
            let mut row = vec![n1.to_string()];
            row.extend(r.final_errors.iter().map(|&e| num(e)));
            row.push(flag(r.pass));
            fin.push(row);
        }
        Ok(vec![trials, stages, setups, fin])
    }

    fn texts(&self) -> Vec<(String, String)> {
        let mut out = vec![("seed.txt".to_string(), self.report.seed.p.to_text())];
        if let Some(f) = &self.report.f {
            out.push(("f.txt".to_string(), f.to_text()));
        }
        out
    }
}

pub fn construct(scn: &Scenario, o: &Overrides) -> Result<Constructed> {
    let c = scn.construction(o)?;
    let max_trials = o.trials.or(scn.construction.as_ref().and_then(|c| c.trials)).unwrap_or(DEFAULT_TRIALS);
    let report = run_construction(&c, max_trials)?;
    Ok(Constructed { max_trials, report })
}

// verify

#[derive(Debug, Serialize)]
pub struct Verified {
    pub report: UmultReport,
}

impl Artifacts for Verified {
    fn pass(&self) -> bool {
        self.report.pass
    }

    fn tables(&self) -> Result<Vec<Table>> {
        let r = &self.report;
        let mut header = vec!["n".to_string()];
        header.extend((1..=r.curves.len()).map(|s| format!("error_k{s}")));
        header.push("common".into());
        let mut t = Table::with_header("curves", header);
        for (j, n) in r.ns.iter().enumerate() {
            let mut row = vec![n.to_string()];
            row.extend(r.curves.iter().map(|c| num(c[j])));
            row.push(flag(r.common.contains(n)));
            t.push(row);
        }
        Ok(vec![t])
    }
}

pub fn verify(scn: &Scenario, o: &Overrides, f: &ComplexPolynomial) -> Result<Verified> {
    let v = scn.verify.as_ref().ok_or_else(|| anyhow!("missing section [verify]"))?;
    let targets = scn.targets(o)?;
    let report = verify_umult(f, &targets, scn.family()?, v.n.0..=v.n.1, scn.s())?;
    Ok(Verified { report })
}

// bw

#[derive(Debug, Serialize)]
pub struct BwConstruction {
    pub tau: usize,
    pub nodes: usize,
    pub residual: f64,
    pub bound: ContourBound,
}

#[derive(Debug, Serialize)]
pub struct BwRun {
    pub curve: Vec<BestApprox>,
    /// `exp(-g_K(singularity))`.
    pub reference_rate: Option<f64>,
    pub constructions: Vec<BwConstruction>,
}

impl Artifacts for BwRun {
    fn pass(&self) -> bool {
        self.constructions.iter().all(|c| c.bound.holds)
    }

    fn tables(&self) -> Result<Vec<Table>> {
        let mut rates = Table::new("rates", &["tau", "error", "least_squares", "rate", "reference_rate"]);
        let reference = self.reference_rate.map(num).unwrap_or_default();
        for b in &self.curve {
            rates.push(vec![b.tau.to_string(), num(b.error), num(b.least_squares), num(b.rate), reference.clone()]);
        }
        let mut bound = Table::new(
            "contour_bound",
            &["tau", "nodes", "residual", "lhs", "rhs", "length", "distance", "log_q_norm_k", "log_q_min_gamma", "f_norm_gamma", "holds"],
        );
        for c in &self.constructions {
            let e = &c.bound;
            bound.push(vec![
                c.tau.to_string(),
                c.nodes.to_string(),
                num(c.residual),
                num(e.lhs),
                num(e.rhs),
                num(e.length),
                num(e.distance),
                num(e.log_q_norm_k),
                num(e.log_q_min_gamma),
                num(e.f_norm_gamma),
                flag(e.holds),
            ]);
        }
        Ok(vec![rates, bound])
    }
}

pub fn bw(scn: &Scenario, o: &Overrides) -> Result<BwRun> {
    let b = scn.bw.as_ref().ok_or_else(|| anyhow!("missing section [bw]"))?;
    let k = scn.set(&b.set, o)?;
    let f = crate::scenario::FunctionSpec::Expr { expr: b.f.clone() }.build()?;
    let curve = b.taus.iter().map(|&tau| best_approx_error(&f, &k, tau).with_context(|| format!("tau = {tau}"))).collect::<Result<Vec<_>>>()?;
    let reference_rate = match b.singularity {
        Some(z) => Some(theta(&k, &[z], b.points)?),
        None => None,
    };
    let mut constructions = Vec::new();
    if !b.construct_taus.is_empty() {
        let u = b.neighborhood.as_ref().ok_or_else(|| anyhow!("bw.neighborhood is required for construct_taus"))?;
        let gamma = make_contour(&k, u, b.clearance.unwrap_or(k.mesh()))?;
        for &tau in &b.construct_taus {
            let q = fekete_points(&k, tau)?;
            let r = bw_construct(&f, &gamma, &q, tau, &BwOptions::default()).with_context(|| format!("tau = {tau}"))?;
            let bound = contour_bound_check(&f, &r.p, &gamma, &q, &k)?;
            constructions.push(BwConstruction { tau, nodes: r.nodes, residual: r.residual, bound });
        }
    }
    Ok(BwRun { curve, reference_rate, constructions })
}

// fekete, capacity, green

#[derive(Debug, Serialize)]
pub struct FeketeCase {
    pub name: String,
    pub set: String,
    pub n: usize,
    pub delta: f64,
    pub log_vandermonde: f64,
    pub method: ExtremalMethod,
    pub points: Vec<C64>,
}

#[derive(Debug, Serialize)]
pub struct FeketeRun {
    pub cases: Vec<FeketeCase>,
}

impl Artifacts for FeketeRun {
    fn pass(&self) -> bool {
        true
    }

    fn tables(&self) -> Result<Vec<Table>> {
        let mut pts = Table::new("points", &["case", "index", "re", "im"]);
        let mut summary = Table::new("fekete", &["case", "set", "n", "delta", "log_vandermonde"]);
        for c in &self.cases {
            summary.push(vec![c.name.clone(), c.set.clone(), c.n.to_string(), num(c.delta), num(c.log_vandermonde)]);
            for (i, &z) in c.points.iter().enumerate() {
                let [re, im] = cplx(z);
                pts.push(vec![c.name.clone(), i.to_string(), re, im]);
            }
        }
        Ok(vec![summary, pts])
    }
}

fn cases(scn: &Scenario) -> Result<&[crate::scenario::PotentialCase]> {
    Ok(&scn.potential.as_ref().ok_or_else(|| anyhow!("missing section [potential]"))?.cases)
}

pub fn fekete(scn: &Scenario, o: &Overrides) -> Result<FeketeRun> {
    let mut out = Vec::new();
    for c in cases(scn)? {
        let k = scn.set(&c.set, o)?;
        let e = fekete_points(&k, c.n).with_context(|| format!("case {}", c.name))?;
        out.push(FeketeCase {
            name: c.name.clone(),
            set: c.set.clone(),
            n: c.n,
            delta: e.delta(),
            log_vandermonde: e.log_vandermonde,
            method: e.method,
            points: e.points,
        });
    }
    Ok(FeketeRun { cases: out })
}

#[derive(Debug, Serialize)]
pub struct CapacityCase {
    pub name: String,
    pub set: String,
    pub estimate: CapacityEstimate,
}

#[derive(Debug, Serialize)]
pub struct CapacityRun {
    pub cases: Vec<CapacityCase>,
}

impl Artifacts for CapacityRun {
    fn pass(&self) -> bool {
        true
    }

    fn tables(&self) -> Result<Vec<Table>> {
        let mut t = Table::new("capacity", &["case", "set", "n", "capacity", "chebyshev", "delta"]);
        for c in &self.cases {
            let e = &c.estimate;
            t.push(vec![c.name.clone(), c.set.clone(), e.n.to_string(), num(e.value), num(e.chebyshev), num(e.delta)]);
        }
        Ok(vec![t])
    }
}

pub fn capacity(scn: &Scenario, o: &Overrides) -> Result<CapacityRun> {
    let mut out = Vec::new();
    for c in cases(scn)? {
        let k = scn.set(&c.set, o)?;
        let estimate = capacity_estimate(&k, c.n).with_context(|| format!("case {}", c.name))?;
        out.push(CapacityCase { name: c.name.clone(), set: c.set.clone(), estimate });
    }
    Ok(CapacityRun { cases: out })
}

#[derive(Debug, Serialize)]
pub struct GreenValue {
    pub z: C64,
    pub g: f64,
}

#[derive(Debug, Serialize)]
pub struct GreenCase {
    pub name: String,
    pub set: String,
    pub n: usize,
    pub values: Vec<GreenValue>,
    /// `sup exp(-g)` over the boundary of the case's neighbourhood.
    pub theta: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct GreenRun {
    pub cases: Vec<GreenCase>,
}

impl Artifacts for GreenRun {
    fn pass(&self) -> bool {
        true
    }

    fn tables(&self) -> Result<Vec<Table>> {
        let mut g = Table::new("green", &["case", "set", "n", "re", "im", "green"]);
        let mut th = Table::new("theta", &["case", "set", "n", "theta"]);
        for c in &self.cases {
            for v in &c.values {
                let [re, im] = cplx(v.z);
                g.push(vec![c.name.clone(), c.set.clone(), c.n.to_string(), re, im, num(v.g)]);
            }
            if let Some(t) = c.theta {
                th.push(vec![c.name.clone(), c.set.clone(), c.n.to_string(), num(t)]);
            }
        }
        Ok(vec![g, th])
    }
}

pub fn green(scn: &Scenario, o: &Overrides) -> Result<GreenRun> {
    let mut out = Vec::new();
    for c in cases(scn)? {
        let k = scn.set(&c.set, o)?;
        let values = c
            .points
            .iter()
            .map(|&z| Ok(GreenValue { z, g: green_eval(&k, z, c.n).with_context(|| format!("case {}", c.name))? }))
            .collect::<Result<Vec<_>>>()?;
        let theta = match &c.neighborhood {
            Some(u) => {
                let window = 4.0 * (k.max_modulus_about(C64::new(0.0, 0.0)) + 1.0);
                let wall = u.boundary_points(k.mesh() / BOUNDARY_OVERSAMPLING, window);
                Some(theta(&k, &wall, c.n)?)
            }
            None => None,
        };
        out.push(GreenCase { name: c.name.clone(), set: c.set.clone(), n: c.n, values, theta });
    }
    Ok(GreenRun { cases: out })
}

// gaps, invariance

#[derive(Debug, Serialize)]
pub struct SigmaTail {
    pub sigma: u32,
    pub table: TailTable,
}

#[derive(Debug, Serialize)]
pub struct GapsRun {
    pub selector: Vec<SelectorRow>,
    pub tails: Vec<SigmaTail>,
    pub detection: Option<GapReport>,
}

impl Artifacts for GapsRun {
    fn pass(&self) -> bool {
        self.selector.iter().all(|r| r.holds)
            && self.tails.iter().all(|t| t.table.decreasing.iter().all(|&d| d))
            && self.detection.as_ref().map_or(true, |d| d.verdict)
    }

    fn tables(&self) -> Result<Vec<Table>> {
        let s0 = self.selector.first().map_or(0, |r| r.lhs.len());
        let mut header: Vec<String> = ["k", "n", "p"].iter().map(|s| s.to_string()).collect();
        header.extend((1..=s0).map(|s| format!("ratio_pow_{s}")));
        header.extend(["log_k", "holds"].iter().map(|s| s.to_string()));
        let mut sel = Table::with_header("selector", header);
        for r in &self.selector {
            let mut row = vec![r.k.to_string(), r.n.to_string(), r.p.to_string()];
            row.extend(r.lhs.iter().map(|&x| num(x)));
            row.push(num(r.log_k));
            row.push(flag(r.holds));
            sel.push(row);
        }
        let mut tail = Table::new("tail", &["sigma", "k", "p", "q", "radius", "value", "bound"]);
        for t in &self.tails {
            for (row, sel_row) in t.table.rows.iter().zip(&self.selector) {
                for (i, &r) in t.table.radii.iter().enumerate() {
                    tail.push(vec![
                        t.sigma.to_string(),
                        sel_row.k.to_string(),
                        row.p.to_string(),
                        row.q.to_string(),
                        num(r),
                        num(row.values[i]),
                        num(row.bounds[i]),
                    ]);
                }
            }
        }
        let mut out = vec![sel, tail];
        if let Some(d) = &self.detection {
            let mut det = Table::new("detection", &["p", "q", "decay"]);
            for (&(p, q), &x) in d.structure.pairs.iter().zip(&d.structure.decay) {
                det.push(vec![p.to_string(), q.to_string(), num(x)]);
            }
            out.push(det);
        }
        Ok(out)
    }
}

fn selector(scn: &Scenario) -> Result<(&crate::scenario::GapsSection, Vec<SelectorRow>)> {
    let g = scn.gaps.as_ref().ok_or_else(|| anyhow!("missing section [gaps]"))?;
    Ok((g, gap_selector(&g.n, g.sigma0, g.k.0..=g.k.1)?))
}

pub fn gaps(scn: &Scenario, f: &ComplexPolynomial) -> Result<GapsRun> {
    let (g, rows) = selector(scn)?;
    let mut tails = Vec::new();
    for sigma in 1..=g.sigma0 {
        let pairs = selector_pairs(&rows, sigma)?;
        tails.push(SigmaTail { sigma, table: tail_collapse_check(f, &pairs, &g.radii) });
    }
    let detection = match &g.pairs {
        Some(pairs) => Some(detect_gaps(
            f.coeffs(),
            pairs,
            g.ratio_target.unwrap_or(DEFAULT_RATIO_TARGET),
            g.decay_target.unwrap_or(DEFAULT_DECAY_TARGET),
        )?),
        None => None,
    };
    Ok(GapsRun { selector: rows, tails, detection })
}

#[derive(Debug, Serialize)]
pub struct SigmaInvariance {
    /// Absent for an explicit list of orders.
    pub sigma: Option<u32>,
    pub table: InvarianceTable,
    pub final_value: Option<f64>,
    pub final_within: bool,
}

#[derive(Debug, Serialize)]
pub struct InvarianceRun {
    pub tolerance: f64,
    pub tables: Vec<SigmaInvariance>,
}

impl Artifacts for InvarianceRun {
    fn pass(&self) -> bool {
        !self.tables.is_empty() && self.tables.iter().all(|t| t.table.decreasing && t.final_within)
    }

    fn tables(&self) -> Result<Vec<Table>> {
        let mut t = Table::new("invariance", &["sigma", "p", "value", "identity"]);
        for s in &self.tables {
            let sigma = s.sigma.map(|x| x.to_string()).unwrap_or_default();
            for r in &s.table.rows {
                t.push(vec![sigma.clone(), r.p.to_string(), num(r.value), flag(r.identity)]);
            }
        }
        Ok(vec![t])
    }
}

pub fn invariance(scn: &Scenario, o: &Overrides, f: &ComplexPolynomial) -> Result<InvarianceRun> {
    let inv = scn.invariance.as_ref().ok_or_else(|| anyhow!("missing section [invariance]"))?;
    let l = scn.set(&inv.l, o)?;
    let k = scn.set(&inv.k, o)?;
    let orders: Vec<(Option<u32>, Vec<usize>)> = match &inv.p {
        Some(ps) => vec![(None, ps.clone())],
        None => {
            let (g, rows) = selector(scn)?;
            (1..=g.sigma0)
                .map(|s| Ok((Some(s), selector_pairs(&rows, s)?.into_iter().map(|(p, _)| p).collect())))
                .collect::<Result<_>>()?
        }
    };
    let mut tables = Vec::new();
    for (sigma, ps) in orders {
        let table = center_invariance_check(f, &l, &k, &ps)?;
        let final_value = table.rows.last().map(|r| r.value);
        let final_within = final_value.is_some_and(|v| v <= inv.tolerance);
        tables.push(SigmaInvariance { sigma, table, final_value, final_within });
    }
    Ok(InvarianceRun { tolerance: inv.tolerance, tables })
}

// dispatch

pub fn load_polynomial(path: &Path) -> Result<ComplexPolynomial> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    ComplexPolynomial::parse_text(&text).with_context(|| format!("parsing {}", path.display()))
}

/// The polynomial for `verify`, `gaps` and `invariance`: the flag wins over
/// the section's `polynomial` entry.
fn polynomial_for(scn: &Scenario, flag: Option<&Path>, section: Option<&Path>, command: &str) -> Result<ComplexPolynomial> {
    match (flag, section) {
        (Some(p), _) => load_polynomial(p),
        (None, Some(p)) => load_polynomial(&scn.resolve(p)),
        (None, None) => bail!("{command} needs a polynomial: pass --poly or set `polynomial` in its section"),
    }
}

fn emit<T: Artifacts>(out: &Path, command: &str, echo: &serde_json::Value, a: T) -> Result<bool> {
    output::write(out, command, echo, &a)?;
    Ok(a.pass())
}

/// Runs `command` on the scenario at `path`, writes the artifacts into `out`
/// and returns the pass flag.
pub fn run(command: &str, path: &Path, out: &Path, o: &Overrides, poly: Option<&Path>) -> Result<bool> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let scn = Scenario::load(path)?;
    let echo = serde_json::to_value(toml::from_str::<toml::Value>(&text)?)?;
    match command {
        "classify" => emit(out, command, &echo, classify(&scn, o)?),
        "construct" => emit(out, command, &echo, construct(&scn, o)?),
        "verify" => {
            let section = scn.verify.as_ref().and_then(|v| v.polynomial.as_deref());
            let f = polynomial_for(&scn, poly, section, command)?;
            emit(out, command, &echo, verify(&scn, o, &f)?)
        }
        "bw" => emit(out, command, &echo, bw(&scn, o)?),
        "fekete" => emit(out, command, &echo, fekete(&scn, o)?),
        "capacity" => emit(out, command, &echo, capacity(&scn, o)?),
        "green" => emit(out, command, &echo, green(&scn, o)?),
        "gaps" => {
            let section = scn.gaps.as_ref().and_then(|g| g.polynomial.as_deref());
            let f = polynomial_for(&scn, poly, section, command)?;
            emit(out, command, &echo, gaps(&scn, &f)?)
        }
        "invariance" => {
            let section = scn.invariance.as_ref().and_then(|i| i.polynomial.as_deref());
            let f = polynomial_for(&scn, poly, section, command)?;
            emit(out, command, &echo, invariance(&scn, o, &f)?)
        }
        other => Err(anyhow!("unknown command `{other}`; expected one of {}", COMMANDS.join(", "))),
    }
}
