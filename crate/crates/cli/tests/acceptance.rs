//! Acceptance suite. Prints one PASS/FAIL line per criterion with the
//! measured values behind it, then a summary.
//!
//! The process exits 0 even when a criterion fails so that the rest of the
//! workspace tests still run; set `ACCEPTANCE_STRICT=1` to turn any FAIL
//! into a nonzero exit.

use std::f64::consts::LN_2;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{ensure, Context, Result};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::Complex;
use utaylor::gaps::gap_selector;
use utaylor::mp::{self, PREC};
use utaylor::poly::{ComplexPolynomial, DegreeBand};
use utaylor::seq::{replay_certificate, CertificateSearch, ExactVerdict, IndexSequence};
use utaylor_cli::commands::{self, Constructed};
use utaylor_cli::output::{self, Artifacts};
use utaylor_cli::{Overrides, Scenario};

const SUITE_CASES: usize = 200;
const SUITE_MAX_DEGREE: usize = 64;
const SUITE_MAX_SHIFT: f64 = 4.0;
const RECENTER_TOL: f64 = 1e-10;

const CAP_DISK_TOL: f64 = 0.02;
const CAP_INTERVAL_TOL: f64 = 0.05;
const GREEN_DISK_TOL: f64 = 0.05;
const GREEN_INTERVAL_TOL: f64 = 0.08;
const THETA_TOL: f64 = 0.03;
const RATE_TOL: f64 = 0.10;
const INVARIANCE_FINAL_MAX: f64 = 1e-3;

struct Check {
    pass: bool,
    detail: String,
}

fn scenario_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn load(name: &str) -> Result<Scenario> {
    Scenario::load(&scenario_dir().join(name))
}

fn within(value: f64, expected: f64, tol: f64) -> bool {
    (value - expected).abs() <= tol
}

fn rel_within(value: f64, expected: f64, tol: f64) -> bool {
    (value / expected - 1.0).abs() <= tol
}

fn random_mpc(rng: &mut ChaCha8Rng, radius: f64) -> C64 {
    let r = radius * rng.gen::<f64>().sqrt();
    C64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// Partial-sum identity, projection law and recentering round trip.
fn truncation_algebra() -> Result<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a71);
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for case in 0..SUITE_CASES {
        let deg = rng.gen_range(0..=SUITE_MAX_DEGREE);
        let center = random_mpc(&mut rng, 1.0);
        let coeffs: Vec<C64> = (0..=deg).map(|_| random_mpc(&mut rng, 1.0)).collect();
        let p = ComplexPolynomial::from_c64(center, &coeffs);
        let lambda = deg + rng.gen_range(0..8);
        if p.partial_sum(lambda) != p {
            failures.push(format!("case {case}: identity"));
        }
        let (a, b) = (rng.gen_range(0..=deg + 2), rng.gen_range(0..=deg + 2));
        if p.partial_sum(a).partial_sum(b) != p.partial_sum(a.min(b)) {
            failures.push(format!("case {case}: projection"));
        }
        let shift = random_mpc(&mut rng, SUITE_MAX_SHIFT);
        let back = p.recenter(&mp::from_c64(center + shift)).recenter(&mp::from_c64(center));
        let scale = p.coeffs().iter().map(mp::abs).fold(0.0, f64::max);
        let err = (0..=deg)
            .map(|k| mp::abs(&Complex::with_val(PREC, &back.coeff(k) - &p.coeff(k))))
            .fold(0.0, f64::max)
            / scale;
        worst = worst.max(err);
        if !(err <= RECENTER_TOL) {
            failures.push(format!("case {case}: round trip {err:.2e}"));
        }
    }
    Ok(Check {
        pass: failures.is_empty(),
        detail: format!("{SUITE_CASES} cases, worst relative round trip {worst:.2e}; {}", failures.join(", ")),
    })
}

fn potential_values(o: &Overrides) -> Result<(Check, Vec<Box<dyn Emit>>)> {
    let scn = load("potential.toml")?;
    let cap = commands::capacity(&scn, o)?;
    let green = commands::green(&scn, o)?;
    let fekete = commands::fekete(&scn, o)?;
    let cap_of = |name: &str| cap.cases.iter().find(|c| c.name == name).map(|c| c.estimate.value).context(name.to_string());
    let green_case = |name: &str| green.cases.iter().find(|c| c.name == name).context(name.to_string());
    let c_disk = cap_of("disk")?;
    let c_int = cap_of("interval_2")?;
    let g_disk = green_case("disk")?.values[0].g;
    let g_int = green_case("interval_1")?.values[0].g;
    let th = green_case("disk")?.theta.context("theta")?;
    let g_int_exact = (2.0 + 3f64.sqrt()).ln();
    let pass = rel_within(c_disk, 1.0, CAP_DISK_TOL)
        && rel_within(c_int, 1.0, CAP_INTERVAL_TOL)
        && within(g_disk, LN_2, GREEN_DISK_TOL)
        && within(g_int, g_int_exact, GREEN_INTERVAL_TOL)
        && within(th, 0.5, THETA_TOL);
    let detail = format!(
        "cap(disk) {c_disk:.4}, cap([-2,2]) {c_int:.4}, g_disk(2) {g_disk:.4} vs {LN_2:.4}, g_[-1,1](2) {g_int:.4} vs {g_int_exact:.4}, theta {th:.4}"
    );
    Ok((Check { pass, detail }, vec![emit("capacity", cap), emit("green", green), emit("fekete", fekete)]))
}

fn bernstein_walsh(o: &Overrides) -> Result<(Check, Vec<Box<dyn Emit>>)> {
    let scn = load("bw.toml")?;
    let run = commands::bw(&scn, o)?;
    let target = 1.0 / (2.0 + 3f64.sqrt());
    let taus: Vec<usize> = run.curve.iter().map(|b| b.tau).collect();
    ensure!(taus == (24..=40).collect::<Vec<_>>(), "bw.toml must list tau = 24..=40, got {taus:?}");
    let worst = run.curve.iter().map(|b| (b.rate / target - 1.0).abs()).fold(0.0, f64::max);
    let bound_ok = !run.constructions.is_empty() && run.constructions.iter().all(|c| c.bound.holds);
    let margin = run.constructions.iter().map(|c| c.bound.lhs / c.bound.rhs).fold(0.0, f64::max);
    let reference = run.reference_rate.unwrap_or(f64::NAN);
    let pass = worst <= RATE_TOL && bound_ok;
    let detail = format!(
        "rates {:.4}..{:.4} vs {target:.4} (worst {:.1}%), green cross-check {reference:.4}; contour bound held in {}/{} runs, max lhs/rhs {margin:.1e}",
        run.curve.iter().map(|b| b.rate).fold(f64::INFINITY, f64::min),
        run.curve.iter().map(|b| b.rate).fold(0.0, f64::max),
        100.0 * worst,
        run.constructions.iter().filter(|c| c.bound.holds).count(),
        run.constructions.len(),
    );
    Ok((Check { pass, detail }, vec![emit("bw", run)]))
}

fn classification(o: &Overrides) -> Result<(Check, Vec<Box<dyn Emit>>)> {
    let powers = commands::classify(&load("classify_powers.toml")?, o)?;
    let linear = commands::classify(&load("classify_linear.toml")?, o)?;
    let expected: Vec<IndexSequence> = ["poly [0,1]", "poly [0,0,1]", "poly [0,0,0,1]"].iter().map(|s| s.parse().unwrap()).collect();
    let order_ok = powers.rearranged.members() == expected.as_slice() && powers.rearrangement.perm == [2, 1, 3];
    let cert_ok = match &powers.criterion {
        Some(c) => match &c.search {
            CertificateSearch::Found(cert) => {
                cert.rows.last().map(|r| r.level) == Some(32) && replay_certificate(&powers.rearranged, cert)?
            }
            _ => false,
        },
        None => false,
    };
    let exact = linear.criterion.as_ref().and_then(|c| c.exact.clone());
    let empty_ok = matches!(exact, Some(ExactVerdict::ClassEmptyBoundedRatio { sigma: 1, limit }) if limit == 2.0);
    let detail = format!("perm {:?}, certificate replayed {cert_ok}, ({{n}},{{2n}}) verdict {exact:?}", powers.rearrangement.perm);
    let pass = order_ok && cert_ok && empty_ok;
    Ok((Check { pass, detail }, vec![emit_named("classify", "classify_powers", powers), emit_named("classify", "classify_linear", linear)]))
}

fn construction(o: &Overrides) -> Result<(Check, Constructed)> {
    let scn = load("desk.toml")?;
    let out = commands::construct(&scn, o)?;
    let r = &out.report;
    let Some(n1) = r.n1 else {
        return Ok((Check { pass: false, detail: format!("no qualifying trial; binding {:?}", r.binding) }, out));
    };
    let f = r.f.as_ref().context("assembled polynomial")?;
    let lambda1 = scn.family()?.eval(1, n1)? as usize;
    let seed = r.seed.p.with_center(f.center().clone());
    let head_exact = f.partial_sum(lambda1).coeffs() == seed.coeffs();
    let trial = r.trials.iter().find(|t| t.n == n1).context("chosen trial")?;
    let bands_exact = trial.stages.iter().all(|s| match s.band {
        DegreeBand::Empty => true,
        DegreeBand::Band { lo, hi } => lo as u128 > s.lambda_prev && hi as u128 <= s.lambda,
    });
    let pass = r.pass && n1 <= 16 && head_exact && bands_exact;
    let bands: Vec<String> = trial.stages.iter().map(|s| format!("{:?} in ({}, {}]", s.band, s.lambda_prev, s.lambda)).collect();
    let detail = format!(
        "n1 = {n1}, errors {:?} (eps {}, 1/s {}), T_{lambda1}(f) = p exactly: {head_exact}, bands {}",
        r.final_errors.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>(),
        scn.tolerances.eps.unwrap_or(f64::NAN),
        1.0 / scn.s() as f64,
        bands.join("; ")
    );
    Ok((Check { pass, detail }, out))
}

fn negative_control(o: &Overrides) -> Result<(Check, Vec<Box<dyn Emit>>)> {
    let scn = load("negative.toml")?;
    let f = commands::load_polynomial(&scn.resolve(Path::new("negative_f.txt")))?;
    let v = commands::verify(&scn, o, &f)?;
    let r = &v.report;
    let thr = r.threshold;
    let crafted = r.ns.iter().enumerate().all(|(j, n)| (r.curves[0][j] < thr) == (n % 2 == 0) && (r.curves[1][j] < thr) == (n % 2 == 1));
    let pass = crafted && !r.pass && r.common.is_empty();
    let detail = format!("stage 1 only at even n and stage 2 only at odd n: {crafted}; common indices {:?}; pass = {}", r.common, r.pass);
    Ok((Check { pass, detail }, vec![emit("verify_negative", v)]))
}

fn ostrowski_gaps(o: &Overrides, f: Option<&ComplexPolynomial>) -> Result<(Check, Vec<Box<dyn Emit>>)> {
    let hand = gap_selector(&[100], 1, 100..=100)?[0].p == 22 && gap_selector(&[100], 2, 100..=100)?[0].p == 47;
    let mut sweep_ok = true;
    for sigma0 in 1..=4u32 {
        let n: Vec<u64> = (3..=200u64).map(|k| k * k).collect();
        sweep_ok &= gap_selector(&n, sigma0, 3..=200)?.iter().all(|r| r.holds);
    }
    let Some(f) = f else {
        return Ok((Check { pass: false, detail: "no constructed f from the end-to-end construction".into() }, Vec::new()));
    };
    let scn = load("desk.toml")?;
    let gaps = commands::gaps(&scn, f)?;
    let inv = commands::invariance(&scn, o, f)?;
    let selector_ok = gaps.selector.iter().all(|r| r.holds);
    let tails_ok = gaps.tails.iter().all(|t| t.table.decreasing.iter().all(|&d| d));
    let inv_ok = inv.tables.iter().all(|t| t.table.decreasing && t.final_value.is_some_and(|v| v <= INVARIANCE_FINAL_MAX));
    let tail_trend: Vec<String> = gaps
        .tails
        .iter()
        .map(|t| {
            let v: Vec<f64> = t.table.rows.iter().map(|r| r.values[0]).collect();
            format!("sigma {}: first {:.2e} last {:.2e} decreasing {}", t.sigma, v[0], v[v.len() - 1], t.table.decreasing[0])
        })
        .collect();
    let inv_trend: Vec<String> = inv
        .tables
        .iter()
        .map(|t| format!("sigma {:?}: final {:.2e} decreasing {}", t.sigma.unwrap_or(0), t.final_value.unwrap_or(f64::NAN), t.table.decreasing))
        .collect();
    let pass = hand && sweep_ok && selector_ok && tails_ok && inv_ok;
    let detail = format!(
        "selector p_k hand values {hand}, inequality on all rows {}; tail on |z|=1.5 [{}]; invariance [{}]",
        sweep_ok && selector_ok,
        tail_trend.join("; "),
        inv_trend.join("; ")
    );
    Ok((Check { pass, detail }, vec![emit("gaps", gaps), emit("invariance", inv)]))
}

/// Type-erased artifact writer for the determinism comparison.
trait Emit {
    fn write(&self, root: &Path, echo: &serde_json::Value) -> Result<()>;
    fn dir(&self) -> &str;
    fn command(&self) -> &str;
}

struct Named<T> {
    command: &'static str,
    dir: &'static str,
    value: T,
}

impl<T: Artifacts> Emit for Named<T> {
    fn write(&self, root: &Path, echo: &serde_json::Value) -> Result<()> {
        output::write(&root.join(self.dir), self.command, echo, &self.value)
    }

    fn dir(&self) -> &str {
        self.dir
    }

    fn command(&self) -> &str {
        self.command
    }
}

fn emit<T: Artifacts + 'static>(command: &'static str, value: T) -> Box<dyn Emit> {
    let name = match command {
        "verify_negative" => "verify",
        c => c,
    };
    Box::new(Named { command: name, dir: command, value })
}

fn emit_named<T: Artifacts + 'static>(command: &'static str, dir: &'static str, value: T) -> Box<dyn Emit> {
    Box::new(Named { command, dir, value })
}

fn scenario_for(dir: &str) -> &'static str {
    match dir {
        "capacity" | "green" | "fekete" => "potential.toml",
        "bw" => "bw.toml",
        "classify_powers" => "classify_powers.toml",
        "classify_linear" => "classify_linear.toml",
        "verify_negative" => "negative.toml",
        _ => "desk.toml",
    }
}

fn echo(name: &str) -> Result<serde_json::Value> {
    let text = fs::read_to_string(scenario_dir().join(name))?;
    Ok(serde_json::to_value(toml::from_str::<toml::Value>(&text)?)?)
}

fn files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir)? {
        let p = entry?.path();
        if p.is_dir() {
            out.extend(files(&p)?);
        } else {
            out.push(p);
        }
    }
    out.sort();
    Ok(out)
}

/// Writes the first pass's artifacts, reruns every command through the CLI
/// entry point and compares the two trees byte for byte.
fn determinism(first: &[Box<dyn Emit>], o: &Overrides) -> Result<Check> {
    let tmp = tempfile::tempdir()?;
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for e in first {
        e.write(&a, &echo(scenario_for(e.dir()))?)?;
    }
    for e in first {
        let scn = scenario_dir().join(scenario_for(e.dir()));
        let out = b.join(e.dir());
        let poly = match e.dir() {
            "gaps" | "invariance" => Some(b.join("construct").join("f.txt")),
            "verify_negative" => Some(scenario_dir().join("negative_f.txt")),
            _ => None,
        };
        commands::run(e.command(), &scn, &out, o, poly.as_deref()).with_context(|| format!("rerun {}", e.dir()))?;
    }
    let fa = files(&a)?;
    let fb = files(&b)?;
    let rel = |root: &Path, v: &[PathBuf]| v.iter().map(|p| p.strip_prefix(root).unwrap().to_path_buf()).collect::<Vec<_>>();
    ensure!(rel(&a, &fa) == rel(&b, &fb), "file sets differ: {:?} vs {:?}", rel(&a, &fa), rel(&b, &fb));
    let mut differing = Vec::new();
    let mut csvs = 0;
    for (x, y) in fa.iter().zip(&fb) {
        if x.extension().is_some_and(|e| e == "csv") {
            csvs += 1;
        }
        if fs::read(x)? != fs::read(y)? {
            differing.push(x.strip_prefix(&a).unwrap().display().to_string());
        }
    }
    Ok(Check { pass: differing.is_empty(), detail: format!("{} files ({csvs} CSV) compared; differing: {differing:?}", fa.len()) })
}

fn report(id: usize, name: &str, limit: Option<Duration>, start: Instant, r: Result<Check>, tally: &mut Vec<bool>) {
    let elapsed = start.elapsed();
    let (mut pass, mut detail) = match r {
        Ok(c) => (c.pass, c.detail),
        Err(e) => (false, format!("error: {e:#}")),
    };
    if let Some(l) = limit {
        if elapsed > l {
            pass = false;
            detail.push_str(&format!("; runtime over {} s", l.as_secs()));
        }
    }
    println!("{} criterion {id} {name} ({:.1} s): {detail}", if pass { "PASS" } else { "FAIL" }, elapsed.as_secs_f64());
    tally.push(pass);
}

fn with_emits<T>(r: Result<(Check, T)>, sink: &mut Vec<T>) -> Result<Check> {
    r.map(|(c, e)| {
        sink.push(e);
        c
    })
}

fn main() -> ExitCode {
    let o = Overrides::default();
    let mut tally = Vec::new();
    let mut emits: Vec<Vec<Box<dyn Emit>>> = Vec::new();

    let t = Instant::now();
    report(1, "truncation algebra", Some(Duration::from_secs(5)), t, truncation_algebra(), &mut tally);

    let t = Instant::now();
    report(2, "potential golden values", Some(Duration::from_secs(30)), t, with_emits(potential_values(&o), &mut emits), &mut tally);

    let t = Instant::now();
    report(3, "Bernstein-Walsh rate", Some(Duration::from_secs(60)), t, with_emits(bernstein_walsh(&o), &mut emits), &mut tally);

    let t = Instant::now();
    report(4, "sequence classification", Some(Duration::from_secs(1)), t, with_emits(classification(&o), &mut emits), &mut tally);

    let t = Instant::now();
    let mut constructed = None;
    let r = construction(&o).map(|(c, out)| {
        constructed = Some(out);
        c
    });
    report(5, "end-to-end construction", Some(Duration::from_secs(300)), t, r, &mut tally);

    let t = Instant::now();
    report(6, "disjointness negative control", None, t, with_emits(negative_control(&o), &mut emits), &mut tally);

    let t = Instant::now();
    let f = constructed.as_ref().and_then(|c| c.report.f.clone());
    report(7, "Ostrowski-gap suite", Some(Duration::from_secs(120)), t, with_emits(ostrowski_gaps(&o, f.as_ref()), &mut emits), &mut tally);

    let t = Instant::now();
    let mut first: Vec<Box<dyn Emit>> = emits.into_iter().flatten().collect();
    if let Some(c) = constructed {
        first.insert(0, Box::new(Named { command: "construct", dir: "construct", value: c }));
    }
    report(8, "determinism", None, t, determinism(&first, &o), &mut tally);

    let passed = tally.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", tally.len());
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if strict && passed < tally.len() {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
