//! Scenario files.
//!
//! One TOML document describes a whole experiment; each subcommand reads the
//! sections it needs. Sets are named once under `[sets]` and referred to by
//! name elsewhere. The names `E1`, `E2`, ... denote the exhausting compact
//! sets of the complement of the domain.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use num_complex::Complex64 as C64;
use serde::Deserialize;
use utaylor::constructor::{ConstructionScenario, Target};
use utaylor::func::{Analytic, Expr, PiecewiseFunction};
use utaylor::geometry::{make_exhaustion, CompactSetSample, DomainSpec, Primitive, Region};
use utaylor::seq::SequenceFamily;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub domain: Option<DomainSection>,
    #[serde(default)]
    pub sets: BTreeMap<String, Vec<Primitive>>,
    pub sequences: Option<SequencesSection>,
    pub targets: Option<TargetsSection>,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub construction: Option<ConstructionSection>,
    pub classify: Option<ClassifySection>,
    pub verify: Option<VerifySection>,
    pub bw: Option<BwSection>,
    pub potential: Option<PotentialSection>,
    pub gaps: Option<GapsSection>,
    pub invariance: Option<InvarianceSection>,
    /// Directory of the scenario file; relative paths resolve against it.
    #[serde(skip)]
    pub base: PathBuf,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    pub shape: Region,
    pub zeta0: C64,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequencesSection {
    pub family: SequenceFamily,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetsSection {
    /// Target on `L`; zero when absent.
    pub g: Option<FunctionSpec>,
    /// One entry per sequence, in family order.
    pub f: Vec<TargetSpec>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct TargetSpec {
    pub set: String,
    #[serde(flatten)]
    pub function: FunctionSpec,
}

/// Either one expression or expressions per region.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum FunctionSpec {
    Expr { expr: String },
    Branches { branches: Vec<BranchSpec> },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchSpec {
    pub region: Region,
    pub expr: String,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub eps: Option<f64>,
    pub s: Option<u32>,
    pub theta0: Option<f64>,
    pub horizon: Option<u64>,
    pub mesh: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructionSection {
    #[serde(default = "default_l")]
    pub l: String,
    pub u1: Region,
    pub u2: Region,
    pub trials: Option<u64>,
}

fn default_l() -> String {
    "L".into()
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifySection {
    pub levels: Option<Vec<u64>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    /// Inclusive range of `n`.
    pub n: (u64, u64),
    pub polynomial: Option<PathBuf>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BwSection {
    pub set: String,
    pub f: String,
    /// Degrees for the best-approximation curve.
    pub taus: Vec<usize>,
    /// Degrees for the contour-integral construction.
    #[serde(default)]
    pub construct_taus: Vec<usize>,
    /// Neighbourhood holding the contour.
    pub neighborhood: Option<Region>,
    pub clearance: Option<f64>,
    /// Singularity of `f` nearest the set; its rate is reported alongside.
    pub singularity: Option<C64>,
    #[serde(default = "default_points")]
    pub points: usize,
}

fn default_points() -> usize {
    utaylor::potential::DEFAULT_POINTS
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSection {
    pub cases: Vec<PotentialCase>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialCase {
    pub name: String,
    pub set: String,
    #[serde(default = "default_points")]
    pub n: usize,
    /// Points where the Green's function is evaluated.
    #[serde(default)]
    pub points: Vec<C64>,
    /// Neighbourhood whose boundary gives `theta`.
    pub neighborhood: Option<Region>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapsSection {
    pub sigma0: u32,
    /// Inclusive range of `k`.
    pub k: (u64, u64),
    /// `n_k` for each `k` in the range.
    pub n: Vec<u64>,
    #[serde(default)]
    pub radii: Vec<f64>,
    /// Explicit gap pairs for detection; skipped when absent.
    pub pairs: Option<Vec<(usize, usize)>>,
    pub ratio_target: Option<f64>,
    pub decay_target: Option<f64>,
    pub polynomial: Option<PathBuf>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvarianceSection {
    pub l: String,
    pub k: String,
    /// Truncation orders; by default `p_k^σ` from the gap selector for every `σ`.
    pub p: Option<Vec<usize>>,
    #[serde(default = "default_invariance_tolerance")]
    pub tolerance: f64,
    pub polynomial: Option<PathBuf>,
}

fn default_invariance_tolerance() -> f64 {
    1e-3
}

/// Command-line overrides.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub horizon: Option<u64>,
    pub mesh: Option<f64>,
    pub trials: Option<u64>,
}

pub const DEFAULT_HORIZON: u64 = 64;

impl FunctionSpec {
    pub fn build(&self) -> Result<PiecewiseFunction> {
        match self {
            FunctionSpec::Expr { expr } => Ok(PiecewiseFunction::global(parse_expr(expr)?)),
            FunctionSpec::Branches { branches } => {
                let parts = branches.iter().map(|b| Ok((b.region.clone(), parse_expr(&b.expr)?))).collect::<Result<Vec<_>>>()?;
                Ok(PiecewiseFunction::new(parts))
            }
        }
    }
}

pub fn parse_expr(text: &str) -> Result<Expr> {
    Expr::parse(text).with_context(|| format!("expression `{text}`"))
}

fn need<'a, T>(section: &'a Option<T>, name: &str) -> Result<&'a T> {
    section.as_ref().ok_or_else(|| anyhow!("missing section [{name}]"))
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self> {
        let scn: Scenario = toml::from_str(text).map_err(|e| anyhow!("scenario: {e}"))?;
        scn.validate()?;
        Ok(scn)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let mut scn = Self::parse(&text).with_context(|| format!("in {}", path.display()))?;
        scn.base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(scn)
    }

    /// Cross-reference checks that do not need any numerics.
    fn validate(&self) -> Result<()> {
        let known = |name: &str, field: &str| -> Result<()> {
            if self.sets.contains_key(name) || exhaustion_index(name).is_some() {
                Ok(())
            } else {
                bail!("{field}: unknown set `{name}`")
            }
        };
        if let Some(t) = &self.targets {
            for (i, spec) in t.f.iter().enumerate() {
                known(&spec.set, &format!("targets.f[{i}].set"))?;
                spec.function.build().with_context(|| format!("targets.f[{i}]"))?;
            }
            if let Some(g) = &t.g {
                g.build().context("targets.g")?;
            }
            if let Some(seq) = &self.sequences {
                if seq.family.sigma0() != t.f.len() {
                    bail!("targets.f has {} entries but sequences.family has {}", t.f.len(), seq.family.sigma0());
                }
            }
        }
        if let (Some(g), Some(seq)) = (&self.gaps, &self.sequences) {
            if g.sigma0 as usize != seq.family.sigma0() {
                bail!("gaps.sigma0 = {} but sequences.family has {} members", g.sigma0, seq.family.sigma0());
            }
        }
        if let Some(c) = &self.construction {
            known(&c.l, "construction.l")?;
            need(&self.domain, "domain")?;
            need(&self.targets, "targets")?;
            need(&self.sequences, "sequences")?;
        }
        if let Some(b) = &self.bw {
            known(&b.set, "bw.set")?;
            parse_expr(&b.f).context("bw.f")?;
        }
        if let Some(p) = &self.potential {
            for (i, c) in p.cases.iter().enumerate() {
                known(&c.set, &format!("potential.cases[{i}].set"))?;
            }
        }
        if let Some(g) = &self.gaps {
            if g.k.0 > g.k.1 || (g.k.1 - g.k.0 + 1) as usize != g.n.len() {
                bail!("gaps.n must give one value for each k in {}..={}", g.k.0, g.k.1);
            }
        }
        if let Some(inv) = &self.invariance {
            known(&inv.l, "invariance.l")?;
            known(&inv.k, "invariance.k")?;
            if inv.p.is_none() && self.gaps.is_none() {
                bail!("invariance.p is required without a [gaps] section");
            }
        }
        if self.sets.keys().any(|k| exhaustion_index(k).is_some()) {
            bail!("set names E1, E2, ... are reserved");
        }
        Ok(())
    }

    pub fn domain(&self) -> Result<DomainSpec> {
        let d = need(&self.domain, "domain")?;
        DomainSpec::new(d.shape.clone(), d.zeta0).context("domain")
    }

    pub fn family(&self) -> Result<&SequenceFamily> {
        Ok(&need(&self.sequences, "sequences")?.family)
    }

    pub fn mesh(&self, o: &Overrides) -> Option<f64> {
        o.mesh.or(self.tolerances.mesh)
    }

    pub fn horizon(&self, o: &Overrides) -> u64 {
        o.horizon.or(self.tolerances.horizon).unwrap_or(DEFAULT_HORIZON)
    }

    pub fn s(&self) -> u32 {
        self.tolerances.s.unwrap_or(10)
    }

    pub fn set(&self, name: &str, o: &Overrides) -> Result<CompactSetSample> {
        let mesh = self.mesh(o);
        if let Some(k) = exhaustion_index(name) {
            return make_exhaustion(&self.domain()?, k, None, mesh).with_context(|| format!("set {name}"));
        }
        let prims = self.sets.get(name).ok_or_else(|| anyhow!("unknown set `{name}`"))?;
        CompactSetSample::new(prims.clone(), mesh).with_context(|| format!("set {name}"))
    }

    pub fn targets(&self, o: &Overrides) -> Result<Vec<Target>> {
        need(&self.targets, "targets")?
            .f
            .iter()
            .map(|t| Ok(Target { k: self.set(&t.set, o)?, f: Arc::new(t.function.build()?) }))
            .collect()
    }

    pub fn construction(&self, o: &Overrides) -> Result<ConstructionScenario> {
        let c = need(&self.construction, "construction")?;
        let t = need(&self.targets, "targets")?;
        let g: Arc<dyn Analytic + Send + Sync> = match &t.g {
            Some(g) => Arc::new(g.build()?),
            None => Arc::new(PiecewiseFunction::global(Expr::zero())),
        };
        let eps = self.tolerances.eps.ok_or_else(|| anyhow!("tolerances.eps is required for construction"))?;
        let scn = ConstructionScenario {
            omega: self.domain()?,
            l: self.set(&c.l, o)?,
            g,
            targets: self.targets(o)?,
            family: self.family()?.clone(),
            eps,
            s: self.s(),
            u1: c.u1.clone(),
            u2: c.u2.clone(),
            theta0: self.tolerances.theta0,
        };
        Ok(scn.validated()?)
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base.join(path)
        }
    }
}

fn exhaustion_index(name: &str) -> Option<u32> {
    name.strip_prefix('E')?.parse().ok().filter(|&k| k > 0)
}
