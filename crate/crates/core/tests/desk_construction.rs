use std::sync::Arc;

use num_complex::Complex64 as C64;
use utaylor::constructor::{build_stage, construct, runge_seed, ConstructionScenario, StageSetup, Target};
use utaylor::func::{Expr, PiecewiseFunction};
use utaylor::geometry::{CompactSetSample, DomainSpec, Primitive, Region};
use utaylor::poly::DegreeBand;
use utaylor::seq::SequenceFamily;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn fun(text: &str) -> Arc<PiecewiseFunction> {
    Arc::new(PiecewiseFunction::global(Expr::parse(text).unwrap()))
}

fn desk() -> ConstructionScenario {
    let k1 = vec![Primitive::Segment { a: c(1.5, 0.0), b: c(2.5, 0.0) }];
    let k2 = vec![Primitive::Segment { a: c(2.0, -1.5), b: c(2.0, 1.5) }];
    let both: Vec<Primitive> = k1.iter().chain(&k2).cloned().collect();
    ConstructionScenario {
        omega: DomainSpec::new(Region::Disk { center: c(0.0, 0.0), radius: 1.0 }, c(0.0, 0.0)).unwrap(),
        l: CompactSetSample::new(vec![Primitive::Disk { center: c(0.0, 0.0), radius: 0.4 }], None).unwrap(),
        g: fun("0"),
        targets: vec![
            Target { k: CompactSetSample::new(k1, None).unwrap(), f: fun("1") },
            Target { k: CompactSetSample::new(k2, None).unwrap(), f: fun("z") },
        ],
        family: SequenceFamily::new(vec!["poly [0,1]".parse().unwrap(), "poly [0,0,1]".parse().unwrap()]).unwrap(),
        eps: 0.1,
        s: 10,
        u1: Region::Disk { center: c(0.0, 0.0), radius: 0.7 },
        u2: Region::Neighborhood { primitives: both, radius: 0.35 },
        theta0: None,
    }
    .validated()
    .unwrap()
}

#[test]
fn desk_scenario_passes() {
    let t0 = std::time::Instant::now();
    let scn = desk();
    let report = construct(&scn, 16).unwrap();
    eprintln!("seed {:?}", report.seed);
    eprintln!("setups {:?}", report.setups);
    for t in &report.trials {
        eprintln!("n={} q={} binding={:?} err_l={:.3e} errs={:?}", t.n, t.qualifies, t.binding, t.error_l, t.errors_k);
        for s in &t.stages {
            eprintln!("   tau={} band={:?} bl={:.3e} bk={:.3e} fit={:.3e} pred={:.3e} nodes={} res={:.1e} bound {:.3e}<={:.3e}", s.tau, s.band, s.bound_l, s.bound_k, s.fit_error, s.predicted, s.nodes, s.quadrature_residual, s.bound.lhs, s.bound.rhs);
        }
    }
    eprintln!("n1 {:?} final {:?} time {:?}", report.n1, report.final_errors, t0.elapsed());
    assert!(report.pass);
    let n1 = report.n1.unwrap();
    assert!(n1 <= 16);
    let f = report.f.as_ref().unwrap();
    let p = &report.seed.p;
    let head = f.partial_sum(n1 as usize);
    assert_eq!(head.coeffs(), p.coeffs());
    let last = report.trials.last().unwrap();
    for s in &last.stages {
        assert!(matches!(s.band, DegreeBand::Band { lo, hi } if lo as u128 >= s.lambda_prev + 1 && hi as u128 <= s.lambda));
    }
}

#[test]
fn single_trial_reports_the_binding_bound() {
    let report = construct(&desk(), 1).unwrap();
    assert!(!report.pass);
    assert_eq!(report.trials.len(), 1);
    assert!(report.binding.is_some());
}

#[test]
fn single_sequence_needs_only_the_seed() {
    let mut scn = desk();
    scn.targets.truncate(1);
    scn.family = SequenceFamily::new(vec!["poly [0,1]".parse().unwrap()]).unwrap();
    let report = construct(&scn, 16).unwrap();
    assert!(report.pass);
    assert_eq!(report.f.as_ref().unwrap(), &report.seed.p);
}

#[test]
fn zero_stage_target_gives_zero_correction() {
    let scn = desk();
    let t1 = &scn.targets[0];
    let seed = runge_seed(scn.g.as_ref(), &scn.l, t1.f.as_ref(), &t1.k, scn.eps, scn.s, C64::new(0.0, 0.0)).unwrap();
    let mut scn = scn.clone();
    scn.targets[1].f = Arc::new(seed.p.clone());
    let setup = StageSetup::new(&scn, 2).unwrap();
    let rec = build_stage(&scn, &setup, &seed.p, &[], 3).unwrap();
    assert!(rec.q.is_zero());
    assert_eq!(rec.band, DegreeBand::Empty);
    assert!(build_stage(&scn, &setup, &seed.p, &[], 1).is_err());
}

#[test]
fn overlapping_neighbourhoods_are_rejected() {
    let mut scn = desk();
    scn.u1 = Region::Disk { center: c(0.0, 0.0), radius: 1.4 };
    let err = scn.validated().unwrap_err().to_string();
    assert!(err.contains("overlap"), "{err}");
}
