//! Truncation-index sequences: growth comparison, well ordering, the
//! adjacent-interchange rearrangement, and certificates for the
//! divergence criterion.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeqError {
    #[error("cannot parse sequence `{text}`: {msg}")]
    Parse { text: String, msg: String },
    #[error("invalid sequence: {0}")]
    Invalid(String),
    #[error("value at n = {0} overflows 128 bits")]
    Overflow(u64),
    #[error("explicit sequence has no value at n = {0}")]
    OutOfRange(u64),
    #[error("horizon {0} is below the minimum of 16")]
    HorizonTooSmall(u64),
    #[error("family must have at least one member")]
    EmptyFamily,
    #[error("family is not well ordered; rearrange it first")]
    NotWellOrdered,
}

/// A positive integer sequence indexed from `n = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum IndexSequence {
    /// `c0 + c1 n + c2 n^2 + ...` with positive leading coefficient.
    Poly(Vec<i64>),
    /// `scale * base^n`.
    Geom { base: u64, scale: u64 },
    /// Tabulated values for `n = 1..=len`, optionally continued by a closed form.
    Explicit { values: Vec<u64>, tail: Option<Box<IndexSequence>> },
}

/// Asymptotic shape of a closed-form sequence.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Growth {
    Poly { degree: usize, lead: f64 },
    Geom { base: u64, scale: f64 },
}

impl IndexSequence {
    pub fn poly(coeffs: &[i64]) -> Result<Self, SeqError> {
        let s = IndexSequence::Poly(coeffs.to_vec());
        s.validate()?;
        Ok(s)
    }

    pub fn geom(base: u64, scale: u64) -> Result<Self, SeqError> {
        let s = IndexSequence::Geom { base, scale };
        s.validate()?;
        Ok(s)
    }

    pub fn explicit(values: Vec<u64>, tail: Option<IndexSequence>) -> Result<Self, SeqError> {
        let s = IndexSequence::Explicit { values, tail: tail.map(Box::new) };
        s.validate()?;
        Ok(s)
    }

    /// Checks that every value is at least one.
    pub fn validate(&self) -> Result<(), SeqError> {
        match self {
            IndexSequence::Poly(c) => {
                let lead = c.iter().rposition(|&x| x != 0).ok_or_else(|| SeqError::Invalid("zero polynomial".into()))?;
                if c[lead] < 0 {
                    return Err(SeqError::Invalid("leading coefficient must be positive".into()));
                }
                // Beyond the Cauchy root bound the polynomial exceeds any value it
                // takes at the bound, so checking up to it suffices.
                let bound = 2 + c[..lead].iter().map(|&x| (x.unsigned_abs() / c[lead] as u64) as u64).max().unwrap_or(0);
                for n in 1..=bound.min(1 << 20) {
                    match self.eval(n) {
                        Ok(_) => {}
                        Err(SeqError::Invalid(_)) => return Err(SeqError::Invalid(format!("value at n = {n} is below 1"))),
                        Err(e) => return Err(e),
                    }
                }
                Ok(())
            }
            IndexSequence::Geom { base, scale } => {
                if *base < 2 || *scale < 1 {
                    Err(SeqError::Invalid("geometric sequences need base >= 2 and scale >= 1".into()))
                } else {
                    Ok(())
                }
            }
            IndexSequence::Explicit { values, tail } => {
                if values.is_empty() {
                    return Err(SeqError::Invalid("explicit values must be nonempty".into()));
                }
                if values.contains(&0) {
                    return Err(SeqError::Invalid("explicit values must be at least 1".into()));
                }
                match tail {
                    Some(t) if matches!(**t, IndexSequence::Explicit { .. }) => Err(SeqError::Invalid("tail must be a closed form".into())),
                    Some(t) => t.validate(),
                    None => Ok(()),
                }
            }
        }
    }

    pub fn eval(&self, n: u64) -> Result<u128, SeqError> {
        match self {
            IndexSequence::Poly(c) => {
                let x = n as i128;
                let mut acc: i128 = 0;
                for &a in c.iter().rev() {
                    acc = acc.checked_mul(x).and_then(|v| v.checked_add(a as i128)).ok_or(SeqError::Overflow(n))?;
                }
                if acc < 1 {
                    Err(SeqError::Invalid(format!("value at n = {n} is below 1")))
                } else {
                    Ok(acc as u128)
                }
            }
            IndexSequence::Geom { base, scale } => {
                let e = u32::try_from(n).map_err(|_| SeqError::Overflow(n))?;
                (*base as u128).checked_pow(e).and_then(|v| v.checked_mul(*scale as u128)).ok_or(SeqError::Overflow(n))
            }
            IndexSequence::Explicit { values, tail } => {
                if n >= 1 && (n as usize) <= values.len() {
                    Ok(values[n as usize - 1] as u128)
                } else {
                    match tail {
                        Some(t) => t.eval(n),
                        None => Err(SeqError::OutOfRange(n)),
                    }
                }
            }
        }
    }

    /// Natural logarithm of the value at `n`, finite even when `eval` overflows.
    pub fn ln_eval(&self, n: u64) -> Result<f64, SeqError> {
        match self {
            IndexSequence::Geom { base, scale } => Ok((*scale as f64).ln() + n as f64 * (*base as f64).ln()),
            IndexSequence::Poly(c) => match self.eval(n) {
                Ok(v) => Ok((v as f64).ln()),
                Err(SeqError::Overflow(_)) => {
                    let x = n as f64;
                    let v = c.iter().rev().fold(0.0, |acc, &a| acc * x + a as f64);
                    Ok(v.ln())
                }
                Err(e) => Err(e),
            },
            IndexSequence::Explicit { values, tail } => {
                if n >= 1 && (n as usize) <= values.len() {
                    Ok((values[n as usize - 1] as f64).ln())
                } else {
                    match tail {
                        Some(t) => t.ln_eval(n),
                        None => Err(SeqError::OutOfRange(n)),
                    }
                }
            }
        }
    }

    fn growth(&self) -> Option<Growth> {
        match self {
            IndexSequence::Poly(c) => {
                let degree = c.iter().rposition(|&x| x != 0)?;
                Some(Growth::Poly { degree, lead: c[degree] as f64 })
            }
            IndexSequence::Geom { base, scale } => Some(Growth::Geom { base: *base, scale: *scale as f64 }),
            IndexSequence::Explicit { tail, .. } => tail.as_ref().and_then(|t| t.growth()),
        }
    }

    /// Whether the sequence tends to infinity, when known exactly.
    fn unbounded(&self) -> Option<bool> {
        self.growth().map(|g| match g {
            Growth::Poly { degree, .. } => degree > 0,
            Growth::Geom { .. } => true,
        })
    }
}

impl fmt::Display for IndexSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &mut dyn Iterator<Item = String>| v.collect::<Vec<_>>().join(",");
        match self {
            IndexSequence::Poly(c) => write!(f, "poly [{}]", list(&mut c.iter().map(|x| x.to_string()))),
            IndexSequence::Geom { base, scale } => write!(f, "geom {base} {scale}"),
            IndexSequence::Explicit { values, tail } => {
                write!(f, "explicit [{}]", list(&mut values.iter().map(|x| x.to_string())))?;
                if let Some(t) = tail {
                    write!(f, " then {t}")?;
                }
                Ok(())
            }
        }
    }
}

fn parse_list<T: FromStr>(text: &str, whole: &str) -> Result<(Vec<T>, String), SeqError> {
    let err = |msg: &str| SeqError::Parse { text: whole.to_string(), msg: msg.to_string() };
    let text = text.trim_start();
    let rest = text.strip_prefix('[').ok_or_else(|| err("expected `[`"))?;
    let close = rest.find(']').ok_or_else(|| err("missing `]`"))?;
    let items = rest[..close]
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|_| err(&format!("bad integer `{s}`"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((items, rest[close + 1..].trim().to_string()))
}

impl FromStr for IndexSequence {
    type Err = SeqError;

    fn from_str(s: &str) -> Result<Self, SeqError> {
        let err = |msg: &str| SeqError::Parse { text: s.to_string(), msg: msg.to_string() };
        let t = s.trim();
        let (kind, rest) = t.split_once(char::is_whitespace).unwrap_or((t, ""));
        let seq = match kind {
            "poly" => {
                let (c, rest) = parse_list::<i64>(rest, s)?;
                if !rest.is_empty() {
                    return Err(err("trailing input"));
                }
                IndexSequence::Poly(c)
            }
            "geom" => {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 2 {
                    return Err(err("expected `geom <base> <scale>`"));
                }
                let base = parts[0].parse().map_err(|_| err("bad base"))?;
                let scale = parts[1].parse().map_err(|_| err("bad scale"))?;
                IndexSequence::Geom { base, scale }
            }
            "explicit" => {
                let (values, rest) = parse_list::<u64>(rest, s)?;
                let tail = if rest.is_empty() {
                    None
                } else {
                    let t = rest.strip_prefix("then").ok_or_else(|| err("expected `then <closed form>`"))?;
                    Some(Box::new(t.parse::<IndexSequence>()?))
                };
                IndexSequence::Explicit { values, tail }
            }
            _ => return Err(err("expected `poly`, `geom` or `explicit`")),
        };
        seq.validate()?;
        Ok(seq)
    }
}

impl TryFrom<String> for IndexSequence {
    type Error = SeqError;
    fn try_from(s: String) -> Result<Self, SeqError> {
        s.parse()
    }
}

impl From<IndexSequence> for String {
    fn from(s: IndexSequence) -> String {
        s.to_string()
    }
}

/// An ordered family `λ^(1), ..., λ^(σ0)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<IndexSequence>", into = "Vec<IndexSequence>")]
pub struct SequenceFamily {
    members: Vec<IndexSequence>,
}

impl SequenceFamily {
    pub fn new(members: Vec<IndexSequence>) -> Result<Self, SeqError> {
        if members.is_empty() {
            return Err(SeqError::EmptyFamily);
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[IndexSequence] {
        &self.members
    }

    pub fn sigma0(&self) -> usize {
        self.members.len()
    }

    /// `λ^(σ)_n` with `σ` counted from 1.
    pub fn eval(&self, sigma: usize, n: u64) -> Result<u128, SeqError> {
        self.members[sigma - 1].eval(n)
    }

    /// The family reordered so that position `i` holds member `perm[i]` (1-based).
    pub fn permuted(&self, perm: &[usize]) -> SequenceFamily {
        SequenceFamily { members: perm.iter().map(|&i| self.members[i - 1].clone()).collect() }
    }
}

impl TryFrom<Vec<IndexSequence>> for SequenceFamily {
    type Error = SeqError;
    fn try_from(v: Vec<IndexSequence>) -> Result<Self, SeqError> {
        Self::new(v)
    }
}

impl From<SequenceFamily> for Vec<IndexSequence> {
    fn from(f: SequenceFamily) -> Self {
        f.members
    }
}

/// A value in `[0, +∞]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    Infinity,
}

impl ExtReal {
    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtReal::Infinity)
    }

    fn from_f64(x: f64) -> Self {
        if x.is_infinite() { ExtReal::Infinity } else { ExtReal::Finite(x) }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtReal::Infinity, ExtReal::Infinity) => Some(Ordering::Equal),
            (ExtReal::Infinity, _) => Some(Ordering::Greater),
            (_, ExtReal::Infinity) => Some(Ordering::Less),
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(x) => write!(f, "{x}"),
            ExtReal::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(x) => s.serialize_f64(*x),
            ExtReal::Infinity => s.serialize_str("inf"),
        }
    }
}

/// A limsup value, exact for closed forms and a tail-window maximum otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Limsup {
    pub value: ExtReal,
    pub exact: bool,
}

pub const MIN_HORIZON: u64 = 16;

/// `limsup_n a(n) / b(n)`.
pub fn limsup_ratio(a: &IndexSequence, b: &IndexSequence, horizon: u64) -> Result<Limsup, SeqError> {
    if horizon < MIN_HORIZON {
        return Err(SeqError::HorizonTooSmall(horizon));
    }
    if let (Some(ga), Some(gb)) = (a.growth(), b.growth()) {
        let value = match (ga, gb) {
            (Growth::Poly { degree: da, lead: la }, Growth::Poly { degree: db, lead: lb }) => match da.cmp(&db) {
                Ordering::Greater => ExtReal::Infinity,
                Ordering::Less => ExtReal::Finite(0.0),
                Ordering::Equal => ExtReal::Finite(la / lb),
            },
            (Growth::Geom { .. }, Growth::Poly { .. }) => ExtReal::Infinity,
            (Growth::Poly { .. }, Growth::Geom { .. }) => ExtReal::Finite(0.0),
            (Growth::Geom { base: ba, scale: sa }, Growth::Geom { base: bb, scale: sb }) => match ba.cmp(&bb) {
                Ordering::Greater => ExtReal::Infinity,
                Ordering::Less => ExtReal::Finite(0.0),
                Ordering::Equal => ExtReal::Finite(sa / sb),
            },
        };
        return Ok(Limsup { value, exact: true });
    }
    let mut best = f64::NEG_INFINITY;
    for n in horizon / 2..=horizon {
        best = best.max(a.ln_eval(n)? - b.ln_eval(n)?);
    }
    Ok(Limsup { value: ExtReal::from_f64(best.exp()), exact: false })
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderStep {
    /// Compares members `sigma` and `sigma + 1`.
    pub sigma: usize,
    pub forward: Limsup,
    pub backward: Limsup,
    pub ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct WellOrderReport {
    pub well_ordered: bool,
    pub steps: Vec<OrderStep>,
}

fn in_order(lo: &IndexSequence, hi: &IndexSequence, horizon: u64) -> Result<(Limsup, Limsup, bool), SeqError> {
    let forward = limsup_ratio(hi, lo, horizon)?;
    let backward = limsup_ratio(lo, hi, horizon)?;
    let ok = forward.value >= backward.value;
    Ok((forward, backward, ok))
}

/// Each consecutive pair satisfies
/// `limsup λ^(σ+1)/λ^(σ) >= limsup λ^(σ)/λ^(σ+1)`.
pub fn is_well_ordered(family: &SequenceFamily, horizon: u64) -> Result<WellOrderReport, SeqError> {
    if horizon < MIN_HORIZON {
        return Err(SeqError::HorizonTooSmall(horizon));
    }
    let mut steps = Vec::new();
    for (i, pair) in family.members.windows(2).enumerate() {
        let (forward, backward, ok) = in_order(&pair[0], &pair[1], horizon)?;
        steps.push(OrderStep { sigma: i + 1, forward, backward, ok });
    }
    Ok(WellOrderReport { well_ordered: steps.iter().all(|s| s.ok), steps })
}

#[derive(Clone, Debug, Serialize)]
pub struct Rearrangement {
    /// Position `i` of the new family holds member `perm[i]` of the old (1-based).
    pub perm: Vec<usize>,
    pub interchanges: usize,
    pub well_ordered: bool,
}

/// Walks each member down past the earlier members that dominate it,
/// interchanging adjacent positions, as in an insertion sort.
pub fn rearrange_well_ordered(family: &SequenceFamily, horizon: u64) -> Result<Rearrangement, SeqError> {
    let s0 = family.sigma0();
    let mut perm: Vec<usize> = (1..=s0).collect();
    let mut interchanges = 0;
    let limit = s0 * s0;
    'outer: for i in 1..s0 {
        let mut j = i;
        while j > 0 {
            let lo = &family.members[perm[j - 1] - 1];
            let hi = &family.members[perm[j] - 1];
            if in_order(lo, hi, horizon)?.2 {
                break;
            }
            perm.swap(j - 1, j);
            interchanges += 1;
            if interchanges >= limit {
                break 'outer;
            }
            j -= 1;
        }
    }
    let well_ordered = is_well_ordered(&family.permuted(&perm), horizon)?.well_ordered;
    Ok(Rearrangement { perm, interchanges, well_ordered })
}

pub const DEFAULT_LEVELS: [u64; 5] = [2, 4, 8, 16, 32];

/// Exact answer to whether the divergence criterion can be met, available
/// when every member has a closed form.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum ExactVerdict {
    ClassNonempty,
    /// `λ^(1)` stays bounded.
    ClassEmptyBoundedFirst,
    /// `λ^(σ+1) / λ^(σ)` stays bounded.
    ClassEmptyBoundedRatio { sigma: usize, limit: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertificateRow {
    pub level: u64,
    pub mu: u64,
    pub values: Vec<u128>,
    pub ratios: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriterionCertificate {
    pub mu: Vec<u64>,
    pub rows: Vec<CertificateRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "constraint", rename_all = "snake_case")]
pub enum Binding {
    FirstBelowLevel { best: u128 },
    RatioBelowLevel { sigma: usize, best: f64 },
    Overflow { n: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CertificateSearch {
    Found(CriterionCertificate),
    NotFound { level: u64, partial: CriterionCertificate, binding: Binding },
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionOutcome {
    pub exact: Option<ExactVerdict>,
    pub search: CertificateSearch,
}

fn row(family: &SequenceFamily, level: u64, m: u64) -> Result<CertificateRow, SeqError> {
    let values = (1..=family.sigma0()).map(|s| family.eval(s, m)).collect::<Result<Vec<_>, _>>()?;
    let ratios = values.windows(2).map(|w| w[1] as f64 / w[0] as f64).collect();
    Ok(CertificateRow { level, mu: m, values, ratios })
}

/// Greedy search for `μ_1 < μ_2 < ...` with `λ^(1)_{μ_i} >= T_i` and every
/// consecutive ratio at `μ_i` at least `T_i`, searching `n <= horizon`.
pub fn criterion_subsequence(family: &SequenceFamily, levels: &[u64], horizon: u64) -> Result<CriterionOutcome, SeqError> {
    if !is_well_ordered(family, horizon)?.well_ordered {
        return Err(SeqError::NotWellOrdered);
    }
    let exact = exact_verdict(family, horizon)?;
    let mut cert = CriterionCertificate { mu: Vec::new(), rows: Vec::new() };
    let mut start = 1;
    for &level in levels {
        let mut best_first = 0u128;
        let mut best_ratio: Vec<f64> = vec![0.0; family.sigma0().saturating_sub(1)];
        let mut found = None;
        for m in start..=horizon {
            let r = match row(family, level, m) {
                Ok(r) => r,
                Err(SeqError::Overflow(n)) => {
                    return Ok(CriterionOutcome { exact, search: CertificateSearch::NotFound { level, partial: cert, binding: Binding::Overflow { n } } });
                }
                Err(e) => return Err(e),
            };
            best_first = best_first.max(r.values[0]);
            for (b, x) in best_ratio.iter_mut().zip(&r.ratios) {
                *b = b.max(*x);
            }
            if r.values[0] >= level as u128 && r.ratios.iter().all(|&x| x >= level as f64) {
                found = Some(r);
                break;
            }
        }
        match found {
            Some(r) => {
                start = r.mu + 1;
                cert.mu.push(r.mu);
                cert.rows.push(r);
            }
            None => {
                let binding = if best_first < level as u128 {
                    Binding::FirstBelowLevel { best: best_first }
                } else {
                    let (i, b) = best_ratio
                        .iter()
                        .enumerate()
                        .min_by(|x, y| x.1.total_cmp(y.1))
                        .map(|(i, b)| (i + 1, *b))
                        .unwrap_or((1, 0.0));
                    Binding::RatioBelowLevel { sigma: i, best: b }
                };
                return Ok(CriterionOutcome { exact, search: CertificateSearch::NotFound { level, partial: cert, binding } });
            }
        }
    }
    Ok(CriterionOutcome { exact, search: CertificateSearch::Found(cert) })
}

fn exact_verdict(family: &SequenceFamily, horizon: u64) -> Result<Option<ExactVerdict>, SeqError> {
    match family.members[0].unbounded() {
        None => return Ok(None),
        Some(false) => return Ok(Some(ExactVerdict::ClassEmptyBoundedFirst)),
        Some(true) => {}
    }
    for (i, pair) in family.members.windows(2).enumerate() {
        let r = limsup_ratio(&pair[1], &pair[0], horizon)?;
        if !r.exact {
            return Ok(None);
        }
        if let ExtReal::Finite(limit) = r.value {
            return Ok(Some(ExactVerdict::ClassEmptyBoundedRatio { sigma: i + 1, limit }));
        }
    }
    Ok(Some(ExactVerdict::ClassNonempty))
}

/// Recomputes every row from the family and compares it with the record.
pub fn replay_certificate(family: &SequenceFamily, cert: &CriterionCertificate) -> Result<bool, SeqError> {
    if cert.mu.windows(2).any(|w| w[0] >= w[1]) || cert.mu.len() != cert.rows.len() {
        return Ok(false);
    }
    for (m, r) in cert.mu.iter().zip(&cert.rows) {
        let again = row(family, r.level, *m)?;
        if &again != r {
            return Ok(false);
        }
        if r.values[0] < r.level as u128 || r.ratios.iter().any(|&x| x < r.level as f64) {
            return Ok(false);
        }
    }
    Ok(true)
}
