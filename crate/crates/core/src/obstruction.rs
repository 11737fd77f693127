//! Machine-checkable certificates.
//!
//! A certificate stores the procedure that produced it (`input`) and what
//! that procedure reported (`evidence`). Evidence is a deterministic
//! function of the input, so verification reruns the procedure and compares
//! the two JSON values exactly.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::diff_poly::DiffPolynomial;
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::formal_eval::{prop3_threshold, substitute, Verdict};
use crate::io::SeriesSpec;
use crate::lattice::{gap_ratios, integer_basis, LatticeBasis};
use crate::numtheory::{factorize, factorize_limited};
use crate::parse::{parse_diffpoly, xpoly_to_string};
use crate::rational::{format_rational, parse_rational, Q};
use crate::real::{decimal_string, Interval, DEFAULT_PRECISION};
use crate::series::{FormalSeries, Horizon};
use crate::symbols::{BasisEntry, Symbol, SymbolBasis};
use crate::transforms::{check_hilbert_zeta, check_rescale_invariance};
use crate::wronskian::derive_ade_search;

pub const TOOL_VERSION: &str = concat!("dforge ", env!("CARGO_PKG_VERSION"));

pub const VERDICT_SCOPE: &str =
    "Every statement concerns the scanned prefix only; nothing is asserted about terms beyond it.";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CertificateKind {
    FiniteBasisRefutation,
    GapCriterion,
    CoefficientField,
    BivariateCriterion,
    SignFlipConstruction,
    FormalSatisfaction,
    FormalRefutation,
}

fn default_precision() -> u32 {
    DEFAULT_PRECISION
}

fn default_factor_limit() -> u64 {
    1 << 20
}

fn default_min_increases() -> usize {
    3
}

/// What a certificate was computed from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "procedure", rename_all = "snake_case")]
pub enum Procedure {
    /// Lattice rank of the exponents, scanned in order.
    FiniteBasis {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        indices: Option<Vec<u64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        series: Option<SeriesSpec>,
        rank_bound: usize,
        #[serde(default = "default_factor_limit")]
        factor_limit: u64,
        #[serde(default = "default_precision")]
        precision: u32,
    },
    /// Ratios of consecutive exponents against a threshold.
    Gap {
        exponents: Vec<Exponent>,
        basis: Vec<BasisEntry>,
        #[serde(with = "crate::rational::serde_q")]
        threshold: Q,
        #[serde(default)]
        first_index: usize,
        #[serde(default = "default_precision")]
        precision: u32,
    },
    /// Field generated by tagged coefficients.
    CoefficientField {
        tags: Vec<String>,
        #[serde(default = "default_min_increases")]
        min_increases: usize,
    },
    /// `log m_i / log λ_i` diagnostics for `Σ x^{m_i} e^{-λ_i s}`.
    Bivariate {
        degrees: Vec<u64>,
        exponents: Vec<Exponent>,
        basis: Vec<BasisEntry>,
        #[serde(with = "crate::rational::serde_q")]
        ratio_threshold: Q,
        #[serde(default = "default_precision")]
        precision: u32,
    },
    /// Sign changes on a sparse set of positions of a power series.
    SignFlip {
        #[serde(with = "crate::rational::serde_q_vec")]
        coefficients: Vec<Q>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        positions: Option<Vec<u64>>,
    },
    Substitute {
        equation: String,
        series: SeriesSpec,
        #[serde(default)]
        horizon: Option<Exponent>,
        #[serde(default)]
        prop3: bool,
        #[serde(default = "default_precision")]
        precision: u32,
    },
    Rescale {
        equation: String,
        series: SeriesSpec,
        #[serde(with = "crate::rational::serde_q_vec")]
        scalars: Vec<Q>,
        /// Lattice generators; the lattice of the series exponents if absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        generators: Option<Vec<Exponent>>,
        #[serde(default)]
        horizon: Option<Exponent>,
        #[serde(default = "default_precision")]
        precision: u32,
    },
    Hilbert {
        n: u64,
        max_mu: u32,
        max_nu: u32,
    },
    DeriveAde {
        series: SeriesSpec,
        max_weight: u32,
        #[serde(default)]
        horizon: Option<Exponent>,
        #[serde(default = "default_precision")]
        precision: u32,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub kind: CertificateKind,
    pub scanned: usize,
    pub verdict_scope: String,
    pub tool_version: String,
    pub basis: Vec<BasisEntry>,
    pub input: Procedure,
    pub evidence: Value,
    pub digest: String,
}

#[derive(Clone, Debug, PartialEq)]
pub enum VerifyOutcome {
    Ok { version_note: Option<String> },
    Mismatch(Vec<String>),
}

impl VerifyOutcome {
    pub fn is_ok(&self) -> bool {
        matches!(self, VerifyOutcome::Ok { .. })
    }
}

struct Outcome {
    kind: CertificateKind,
    scanned: usize,
    basis: Vec<BasisEntry>,
    evidence: Value,
}

fn digest_of(kind: CertificateKind, scanned: usize, scope: &str, basis: &[BasisEntry], input: &Procedure, evidence: &Value) -> String {
    let body = json!({
        "kind": kind,
        "scanned": scanned,
        "verdict_scope": scope,
        "basis": basis,
        "input": input,
        "evidence": evidence,
    });
    hex::encode(Sha256::digest(body.to_string().as_bytes()))
}

impl Certificate {
    /// Runs the procedure and packages its evidence.
    pub fn build(input: Procedure) -> Result<Certificate> {
        let o = run(&input)?;
        let digest = digest_of(o.kind, o.scanned, VERDICT_SCOPE, &o.basis, &input, &o.evidence);
        Ok(Certificate {
            kind: o.kind,
            scanned: o.scanned,
            verdict_scope: VERDICT_SCOPE.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            basis: o.basis,
            input,
            evidence: o.evidence,
            digest,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Certificate> {
        serde_json::from_str(text).map_err(|e| Error::SchemaError(e.to_string()))
    }

    /// Whether the evidence reports an obstruction (or a violated identity).
    pub fn is_refutation(&self) -> bool {
        match self.kind {
            CertificateKind::FormalRefutation => true,
            CertificateKind::FormalSatisfaction => false,
            _ => self.evidence.get("obstruction").and_then(Value::as_bool).unwrap_or(false),
        }
    }
}

/// Recomputes the evidence from the stored input and compares bit-exactly.
pub fn verify_certificate(cert: &Certificate) -> Result<VerifyOutcome> {
    let o = run(&cert.input)?;
    let mut diffs = Vec::new();
    if o.kind != cert.kind {
        diffs.push(format!("kind: stored {:?}, recomputed {:?}", cert.kind, o.kind));
    }
    if o.scanned != cert.scanned {
        diffs.push(format!("scanned: stored {}, recomputed {}", cert.scanned, o.scanned));
    }
    if o.basis != cert.basis {
        diffs.push("basis differs".into());
    }
    diff_values("evidence", &cert.evidence, &o.evidence, &mut diffs);
    let digest = digest_of(cert.kind, cert.scanned, &cert.verdict_scope, &cert.basis, &cert.input, &cert.evidence);
    if digest != cert.digest {
        diffs.push("digest does not match the certificate body".into());
    }
    if !diffs.is_empty() {
        return Ok(VerifyOutcome::Mismatch(diffs));
    }
    let version_note = (cert.tool_version != TOOL_VERSION)
        .then(|| format!("certificate written by {}, checked by {}", cert.tool_version, TOOL_VERSION));
    Ok(VerifyOutcome::Ok { version_note })
}

/// Reads and verifies a certificate file.
pub fn verify_certificate_text(text: &str) -> Result<VerifyOutcome> {
    verify_certificate(&Certificate::from_json(text)?)
}

fn diff_values(path: &str, stored: &Value, fresh: &Value, out: &mut Vec<String>) {
    match (stored, fresh) {
        (Value::Object(a), Value::Object(b)) => {
            let keys: BTreeSet<&String> = a.keys().chain(b.keys()).collect();
            for k in keys {
                let p = format!("{path}.{k}");
                match (a.get(k), b.get(k)) {
                    (Some(x), Some(y)) => diff_values(&p, x, y, out),
                    (Some(_), None) => out.push(format!("{p}: not produced by recomputation")),
                    (None, Some(_)) => out.push(format!("{p}: missing")),
                    (None, None) => {}
                }
            }
        }
        (Value::Array(a), Value::Array(b)) if a.len() == b.len() => {
            for (i, (x, y)) in a.iter().zip(b).enumerate() {
                diff_values(&format!("{path}[{i}]"), x, y, out);
            }
        }
        _ if stored == fresh => {}
        _ => out.push(format!("{path}: stored {stored}, recomputed {fresh}")),
    }
}

fn run(input: &Procedure) -> Result<Outcome> {
    match input {
        Procedure::FiniteBasis { indices, series, rank_bound, factor_limit, precision } => {
            run_finite_basis(indices.as_deref(), series.as_ref(), *rank_bound, *factor_limit, *precision)
        }
        Procedure::Gap { exponents, basis, threshold, first_index, precision } => {
            run_gap(exponents, basis, threshold, *first_index, *precision)
        }
        Procedure::CoefficientField { tags, min_increases } => run_coefficient_field(tags, *min_increases),
        Procedure::Bivariate { degrees, exponents, basis, ratio_threshold, precision } => {
            run_bivariate(degrees, exponents, basis, ratio_threshold, *precision)
        }
        Procedure::SignFlip { coefficients, positions } => run_signflip(coefficients, positions.as_deref()),
        Procedure::Substitute { equation, series, horizon, prop3, precision } => {
            run_substitute(equation, series, horizon.as_ref(), *prop3, *precision)
        }
        Procedure::Rescale { equation, series, scalars, generators, horizon, precision } => {
            run_rescale(equation, series, scalars, generators.as_deref(), horizon.as_ref(), *precision)
        }
        Procedure::Hilbert { n, max_mu, max_nu } => run_hilbert(*n, *max_mu, *max_nu),
        Procedure::DeriveAde { series, max_weight, horizon, precision } => {
            run_derive_ade(series, *max_weight, horizon.as_ref(), *precision)
        }
    }
}

/// Incremental rank over `Q` of sparse vectors.
#[derive(Default)]
pub struct RankTracker {
    rows: BTreeMap<usize, BTreeMap<usize, Q>>,
}

impl RankTracker {
    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Adds a vector; returns whether the rank grew.
    pub fn push(&mut self, v: BTreeMap<usize, Q>) -> bool {
        let mut v: BTreeMap<usize, Q> = v.into_iter().filter(|(_, x)| !x.is_zero()).collect();
        for (p, row) in &self.rows {
            let Some(c) = v.get(p).cloned() else { continue };
            let f = c / &row[p];
            for (j, x) in row {
                let e = v.entry(*j).or_insert_with(Q::zero);
                *e -= &f * x;
            }
            v.retain(|_, x| !x.is_zero());
        }
        match v.keys().next().copied() {
            Some(p) => {
                self.rows.insert(p, v);
                true
            }
            None => false,
        }
    }
}

fn rank_profile(vectors: impl Iterator<Item = BTreeMap<usize, Q>>) -> (usize, Vec<(usize, usize)>, usize) {
    let mut t = RankTracker::default();
    let mut increases = Vec::new();
    let mut count = 0;
    for (i, v) in vectors.enumerate() {
        if t.push(v) {
            increases.push((i, t.rank()));
        }
        count = i + 1;
    }
    (t.rank(), increases, count)
}

fn exponent_vectors<'a>(exps: impl Iterator<Item = &'a Exponent> + 'a) -> impl Iterator<Item = BTreeMap<usize, Q>> + 'a {
    let mut cols: BTreeMap<Symbol, usize> = BTreeMap::new();
    exps.map(move |e| {
        let mut v = BTreeMap::new();
        for (s, c) in e.iter() {
            let n = cols.len();
            let j = *cols.entry(s.clone()).or_insert(n);
            v.insert(j, c.clone());
        }
        v
    })
}

fn run_finite_basis(
    indices: Option<&[u64]>,
    series: Option<&SeriesSpec>,
    rank_bound: usize,
    factor_limit: u64,
    precision: u32,
) -> Result<Outcome> {
    let (rank, increases, scanned, basis, primes) = match (indices, series) {
        (Some(idx), None) => {
            let mut vecs = Vec::with_capacity(idx.len());
            let mut primes = BTreeSet::new();
            for &n in idx {
                if n == 0 {
                    return Err(Error::DegenerateInput("index 0".into()));
                }
                let f = factorize_limited(n, factor_limit).ok_or(Error::FactorLimitExceeded(n))?;
                let mut v = BTreeMap::new();
                for (p, k) in f {
                    primes.insert(p);
                    v.insert(p as usize, Q::from_integer(k.into()));
                }
                vecs.push(v);
            }
            let (r, inc, c) = rank_profile(vecs.into_iter());
            let basis = SymbolBasis::log_primes(&primes.iter().copied().collect::<Vec<_>>()).to_spec();
            (r, inc, c, basis, Some(primes))
        }
        (None, Some(spec)) => {
            let phi = spec.to_series(precision)?;
            let exps: Vec<Exponent> = phi.exponents().cloned().collect();
            let (r, inc, c) = rank_profile(exponent_vectors(exps.iter()));
            (r, inc, c, phi.basis().to_spec(), None)
        }
        _ => return Err(Error::SchemaError("give exactly one of indices or series".into())),
    };
    let exceeded_at = increases.iter().find(|(_, r)| *r > rank_bound).map(|(i, _)| *i);
    let mut ev = json!({
        "rank": rank,
        "rank_bound": rank_bound,
        "obstruction": exceeded_at.is_some(),
        "verdict": if exceeded_at.is_some() { "rank_exceeds_bound" } else { "rank_within_bound" },
        "exceeded_at": exceeded_at,
        "rank_increases": increases,
        "last_increase_at": increases.last().map(|(i, _)| *i),
    });
    if let Some(p) = primes {
        ev["primes"] = json!(p);
    }
    Ok(Outcome { kind: CertificateKind::FiniteBasisRefutation, scanned, basis, evidence: ev })
}

fn run_gap(exponents: &[Exponent], basis: &[BasisEntry], threshold: &Q, first_index: usize, precision: u32) -> Result<Outcome> {
    let b = SymbolBasis::from_spec(basis, precision)?;
    for e in exponents {
        b.check(e)?;
    }
    let g = gap_ratios(exponents, &b);
    let mut exceed = Vec::new();
    for (j, r) in g.ratios.iter().enumerate() {
        if &r.lo >= threshold {
            exceed.push(first_index + g.dropped + j + 1);
        }
    }
    let ev = json!({
        "threshold": format_rational(threshold),
        "dropped": g.dropped,
        "ratios": g.ratios.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        "envelope": g.envelope.iter().map(|q| decimal_string(q, 12)).collect::<Vec<_>>(),
        "exceeding_indices": exceed,
        "obstruction": g.ratios.last().is_some_and(|r| &r.lo >= threshold),
    });
    Ok(Outcome { kind: CertificateKind::GapCriterion, scanned: exponents.len(), basis: basis.to_vec(), evidence: ev })
}

/// A coefficient family the field test understands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoefficientTag {
    RootOfUnity(u64),
    PrimeSquareRoot(u64),
    Rational(Q),
    UserAsserted(String),
}

impl CoefficientTag {
    pub fn parse(s: &str) -> Result<Self> {
        let (fam, arg) = s.split_once(':').ok_or_else(|| Error::UnknownFamily(s.to_string()))?;
        let num = |a: &str| a.trim().parse::<u64>().map_err(|_| Error::UnknownFamily(s.to_string()));
        match fam.trim() {
            "root_of_unity" => {
                let n = num(arg)?;
                if n == 0 {
                    return Err(Error::UnknownFamily(s.to_string()));
                }
                Ok(CoefficientTag::RootOfUnity(n))
            }
            "sqrt" => {
                let p = num(arg)?;
                if !crate::numtheory::is_prime(p) {
                    return Err(Error::UnknownFamily(s.to_string()));
                }
                Ok(CoefficientTag::PrimeSquareRoot(p))
            }
            "rational" => Ok(CoefficientTag::Rational(parse_rational(arg.trim())?)),
            "asserted" => Ok(CoefficientTag::UserAsserted(arg.trim().to_string())),
            _ => Err(Error::UnknownFamily(s.to_string())),
        }
    }
}

/// Square classes `±Π p` as bit sets over `{-1} ∪ primes`, with Gaussian
/// elimination over `F_2`.
#[derive(Default, Clone)]
struct F2Span {
    rows: BTreeMap<u64, BTreeSet<u64>>,
}

impl F2Span {
    /// Key 0 stands for `-1`.
    fn push(&mut self, mut v: BTreeSet<u64>) -> bool {
        for (p, row) in &self.rows {
            if v.contains(p) {
                v = v.symmetric_difference(row).copied().collect();
            }
        }
        match v.iter().next().copied() {
            Some(p) => {
                let new = v.clone();
                // keep rows reduced against the new pivot
                for row in self.rows.values_mut() {
                    if row.contains(&p) {
                        *row = row.symmetric_difference(&new).copied().collect();
                    }
                }
                self.rows.insert(p, new);
                true
            }
            None => false,
        }
    }

    fn dim(&self) -> usize {
        self.rows.len()
    }
}

/// Square classes of the quadratic subfields of `Q(ζ_L)`, where `L` is
/// given by its factorization.
fn cyclotomic_square_classes(l: &BTreeMap<u64, u32>) -> F2Span {
    let mut s = F2Span::default();
    for (&p, &k) in l {
        if p == 2 {
            if k >= 2 {
                s.push(BTreeSet::from([0]));
            }
            if k >= 3 {
                s.push(BTreeSet::from([2]));
            }
        } else if p % 4 == 1 {
            s.push(BTreeSet::from([p]));
        } else {
            s.push(BTreeSet::from([0, p]));
        }
    }
    s
}

/// `[Q(ζ_L, √p_1, …, √p_k) : Q]` as `φ(L) · 2^r`.
fn field_degree(l: &BTreeMap<u64, u32>, radicals: &BTreeSet<u64>) -> (BigInt, usize) {
    let mut phi = BigInt::one();
    for (&p, &k) in l {
        phi *= BigInt::from(p).pow(k - 1) * BigInt::from(p - 1);
    }
    let cyc = cyclotomic_square_classes(l);
    let base = cyc.dim();
    let mut all = cyc;
    for &p in radicals {
        all.push(BTreeSet::from([p]));
    }
    let r = all.dim() - base;
    (phi << r, r)
}

fn run_coefficient_field(tags: &[String], min_increases: usize) -> Result<Outcome> {
    let parsed: Vec<CoefficientTag> = tags.iter().map(|t| CoefficientTag::parse(t)).collect::<Result<_>>()?;
    let mut l: BTreeMap<u64, u32> = BTreeMap::new();
    let mut radicals = BTreeSet::new();
    let mut asserted = BTreeSet::new();
    let mut degree = BigInt::one();
    let mut profile = Vec::new();
    for (i, t) in parsed.iter().enumerate() {
        match t {
            CoefficientTag::RootOfUnity(n) => {
                for (p, k) in factorize(*n) {
                    let e = l.entry(p).or_insert(0);
                    *e = (*e).max(k);
                }
            }
            CoefficientTag::PrimeSquareRoot(p) => {
                radicals.insert(*p);
            }
            CoefficientTag::Rational(_) => {}
            CoefficientTag::UserAsserted(name) => {
                asserted.insert(name.clone());
            }
        }
        let (d, _) = field_degree(&l, &radicals);
        if d > degree {
            degree = d;
            profile.push(json!([i, degree.to_string()]));
        }
    }
    let half = parsed.len() / 2;
    let last = profile.last().and_then(|p| p[0].as_u64()).map(|x| x as usize);
    let obstruction = profile.len() >= min_increases && last.is_some_and(|i| i >= half);
    let (_, r) = field_degree(&l, &radicals);
    let ev = json!({
        "degree": degree.to_string(),
        "cyclotomic_conductor_factors": l.iter().map(|(p, k)| json!([p, k])).collect::<Vec<_>>(),
        "radical_primes": radicals,
        "independent_radicals": r,
        "user_asserted": asserted,
        "degree_increases": profile,
        "min_increases": min_increases,
        "obstruction": obstruction,
        "verdict": if obstruction { "degree_unbounded_within_scan" } else { "no_obstruction_from_this_test" },
        "rule": "degree grew at least min_increases times, the last time in the second half of the scan",
    });
    Ok(Outcome { kind: CertificateKind::CoefficientField, scanned: tags.len(), basis: vec![], evidence: ev })
}

fn best_rational(x: &Q, max_den: i64) -> Q {
    let mut best = x.round();
    let mut err = (x - &best).abs();
    for d in 2..=max_den {
        let dq = Q::from_integer(d.into());
        let c = (x * &dq).round() / dq;
        let e = (x - &c).abs();
        if e < err {
            best = c;
            err = e;
        }
    }
    best
}

fn run_bivariate(
    degrees: &[u64],
    exponents: &[Exponent],
    basis: &[BasisEntry],
    ratio_threshold: &Q,
    precision: u32,
) -> Result<Outcome> {
    if degrees.len() != exponents.len() {
        return Err(Error::SchemaError("degrees and exponents differ in length".into()));
    }
    let b = SymbolBasis::from_spec(basis, precision)?;
    let p = b.precision();
    let mut values: Vec<(usize, Q)> = Vec::new();
    let mut dropped = 0;
    for (i, (m, e)) in degrees.iter().zip(exponents).enumerate() {
        let lam = b.eval(e);
        let one = Interval::one();
        if lam.certain_cmp(&one) != Some(std::cmp::Ordering::Greater) || *m == 0 {
            dropped += 1;
            continue;
        }
        let num = crate::real::ln_interval(&Q::from_integer((*m).into()), p);
        let den = lam.ln(p).expect("positive").recip(p).expect("log of a value above one");
        values.push((i, num.mul(&den, p).midpoint()));
    }
    let tail = &values[values.len() / 2..];
    let tol = Q::new(1.into(), 1_000_000.into());
    let nondecreasing = tail.windows(2).all(|w| w[1].1 >= w[0].1);
    let nonincreasing = tail.windows(2).all(|w| w[1].1 <= w[0].1);
    let rational = tail.last().map(|(_, v)| best_rational(v, 12)).filter(|r| {
        !r.is_zero() && tail.iter().all(|(_, v)| (v - r).abs() < tol)
    });
    let trend = match (&rational, tail.len() >= 2) {
        (Some(_), _) => "rational_accumulation",
        (None, false) => "undetermined",
        (None, true) if nondecreasing && tail.last().unwrap().1 > tail[0].1 => "increasing",
        (None, true) if nonincreasing && tail.last().unwrap().1 < tail[0].1 => "decreasing",
        _ => "undetermined",
    };
    // condition (1): the exponent lattice still grows in the second half
    let (rank, inc, _) = rank_profile(exponent_vectors(exponents.iter()));
    let half = exponents.len() / 2;
    let cond1 = inc.last().is_some_and(|(i, _)| *i >= half);
    // condition (2): large gap ratios in the second half
    let g = gap_ratios(exponents, &b);
    let tail_ratio_max = g.ratios.iter().skip(g.ratios.len() / 2).map(|r| r.lo.clone()).max();
    let cond2 = tail_ratio_max.as_ref().is_some_and(|m| m >= ratio_threshold);
    let histogram = histogram(&values.iter().map(|(_, v)| v.clone()).collect::<Vec<_>>(), 10);
    let satisfied = rational.is_none() && matches!(trend, "increasing" | "decreasing") && (cond1 || cond2);
    let ev = json!({
        "dropped": dropped,
        "log_ratios": values.iter().map(|(i, v)| json!([i, decimal_string(v, 12)])).collect::<Vec<_>>(),
        "tail_trend": trend,
        "rational_accumulation": rational.as_ref().map(format_rational),
        "histogram": histogram,
        "lattice_rank": rank,
        "no_finite_linear_basis_within_scan": cond1,
        "tail_max_gap_ratio": tail_ratio_max.as_ref().map(|q| decimal_string(q, 12)),
        "large_gaps_within_scan": cond2,
        "obstruction": satisfied,
        "caveat": "formal data only; convergence of the series is not modelled",
    });
    Ok(Outcome { kind: CertificateKind::BivariateCriterion, scanned: degrees.len(), basis: basis.to_vec(), evidence: ev })
}

fn histogram(values: &[Q], bins: usize) -> Value {
    let (Some(lo), Some(hi)) = (values.iter().min(), values.iter().max()) else {
        return json!({"bins": [], "lo": null, "hi": null});
    };
    let width = (hi - lo) / Q::from_integer((bins as i64).into());
    let mut counts = vec![0usize; bins];
    for v in values {
        let k = if width.is_zero() { 0 } else { ((v - lo) / &width).floor().to_integer().to_usize().unwrap_or(0) };
        counts[k.min(bins - 1)] += 1;
    }
    json!({"lo": decimal_string(lo, 12), "hi": decimal_string(hi, 12), "bins": counts})
}

/// Default gap rule `n_i = 2^{i²}`, `i ≥ 1`, up to `limit`.
pub fn default_gap_positions(limit: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for i in 1u32.. {
        let e = i * i;
        if e >= 64 || (1u64 << e) > limit {
            break;
        }
        out.push(1u64 << e);
    }
    out
}

/// Splits `P` into `P_1 = P - 2Q`, where `Q` keeps the coefficients of `P`
/// at the selected positions. Each rule position moves forward to the next
/// nonzero coefficient.
pub fn signflip_construct(p: &[Q], rule: Option<&[u64]>) -> Result<(Vec<Q>, Vec<Q>, Vec<u64>)> {
    let n = p.len() as u64;
    let rule = rule.map(<[u64]>::to_vec).unwrap_or_else(|| default_gap_positions(n.saturating_sub(1)));
    let mut chosen: Vec<u64> = Vec::new();
    for r in rule {
        let start = chosen.last().map_or(r, |&c| r.max(c + 1));
        match (start..n).find(|&k| !p[k as usize].is_zero()) {
            Some(k) => chosen.push(k),
            None => break,
        }
    }
    if chosen.len() < 2 {
        return Err(Error::InsufficientNonzeroTerms { found: chosen.len() });
    }
    let mut q = vec![Q::zero(); p.len()];
    let mut p1 = p.to_vec();
    for &k in &chosen {
        q[k as usize] = p[k as usize].clone();
        p1[k as usize] = -p[k as usize].clone();
    }
    Ok((p1, q, chosen))
}

fn run_signflip(p: &[Q], positions: Option<&[u64]>) -> Result<Outcome> {
    let (p1, q, chosen) = signflip_construct(p, positions)?;
    let identity = p1.iter().zip(&q).zip(p).all(|((a, b), c)| &(a + b + b) == c);
    let ratios: Vec<String> = chosen.windows(2).map(|w| format!("{}/{}", w[1], w[0])).collect();
    let ev = json!({
        "positions": chosen,
        "position_ratios": ratios,
        "q": chosen.iter().map(|&k| json!([k, format_rational(&q[k as usize])])).collect::<Vec<_>>(),
        "p1_flipped": chosen.iter().map(|&k| json!([k, format_rational(&p1[k as usize])])).collect::<Vec<_>>(),
        "identity_p1_plus_2q_equals_p": identity,
        "obstruction": identity,
    });
    Ok(Outcome { kind: CertificateKind::SignFlipConstruction, scanned: p.len(), basis: vec![], evidence: ev })
}

fn load(series: &SeriesSpec, equation: Option<&str>, precision: u32) -> Result<(FormalSeries, Option<DiffPolynomial>)> {
    let phi = series.to_series(precision)?;
    let f = match equation {
        Some(text) => Some(parse_diffpoly(text, phi.basis().symbols())?),
        None => None,
    };
    Ok((phi, f))
}

fn run_substitute(equation: &str, series: &SeriesSpec, horizon: Option<&Exponent>, prop3: bool, precision: u32) -> Result<Outcome> {
    let (phi, f) = load(series, Some(equation), precision)?;
    let f = f.expect("equation given");
    let r = substitute(&f, &phi, horizon)?;
    let (kind, mut ev) = match &r.verdict {
        Verdict::ZeroUpToT => (
            CertificateKind::FormalSatisfaction,
            json!({"residual": "zero", "horizon": r.horizon, "max_horizon": r.max_horizon}),
        ),
        Verdict::NonzeroWithLeading(e, p) => (
            CertificateKind::FormalRefutation,
            json!({
                "residual": "nonzero",
                "horizon": r.horizon,
                "max_horizon": r.max_horizon,
                "leading_exponent": e,
                "leading_coefficient": xpoly_to_string(p),
            }),
        ),
    };
    if prop3 && kind == CertificateKind::FormalSatisfaction {
        ev["prop3"] = serde_json::to_value(prop3_threshold(&f, &phi)?).expect("report serializes");
    }
    Ok(Outcome { kind, scanned: phi.len(), basis: phi.basis().to_spec(), evidence: ev })
}

fn run_rescale(
    equation: &str,
    series: &SeriesSpec,
    scalars: &[Q],
    generators: Option<&[Exponent]>,
    horizon: Option<&Exponent>,
    precision: u32,
) -> Result<Outcome> {
    let (phi, f) = load(series, Some(equation), precision)?;
    let lb = match generators {
        Some(g) => integer_basis(g, phi.basis()),
        None => integer_basis(&phi.exponents().cloned().collect::<Vec<_>>(), phi.basis()),
    };
    let check = check_rescale_invariance(&f.expect("equation given"), &phi, &lb, scalars, horizon)?;
    let ev = json!({
        "lattice_generators": lb.generators,
        "horizon": check.horizon,
        "homogeneous_groups": check.groups,
        "rescaled_residual": "zero",
    });
    Ok(Outcome { kind: CertificateKind::FormalSatisfaction, scanned: phi.len(), basis: phi.basis().to_spec(), evidence: ev })
}

fn run_hilbert(n: u64, max_mu: u32, max_nu: u32) -> Result<Outcome> {
    let r = check_hilbert_zeta(n, max_mu, max_nu)?;
    if let Some(i) = r.checks.iter().position(|c| c.residual_terms != 0) {
        return Err(Error::VerificationFailed(i));
    }
    let primes: Vec<u64> = (2..=n).filter(|&p| crate::numtheory::is_prime(p)).collect();
    let ev = serde_json::to_value(&r).expect("report serializes");
    Ok(Outcome {
        kind: CertificateKind::FormalSatisfaction,
        scanned: n as usize,
        basis: SymbolBasis::log_primes(&primes).to_spec(),
        evidence: ev,
    })
}

fn run_derive_ade(series: &SeriesSpec, max_weight: u32, horizon: Option<&Exponent>, precision: u32) -> Result<Outcome> {
    let (phi, _) = load(series, None, precision)?;
    let s = derive_ade_search(&phi, max_weight, horizon)?;
    let refuted: Vec<Value> = s
        .refuted
        .iter()
        .map(|r| json!({"products": r.products.iter().map(|p| p.to_string()).collect::<Vec<_>>(), "witness": r.witness}))
        .collect();
    let (kind, ev) = match &s.found {
        Some(d) => (
            CertificateKind::FormalSatisfaction,
            json!({
                "equation": d.equation.to_string(),
                "products": d.products.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
                "coefficients": d.coefficients.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                "checked_to": d.checked_to,
                "wronskian_terms": d.wronskian.len(),
                "wronskian_horizon": d.wronskian.horizon(),
                "subsets_tested": s.subsets_tested,
                "refuted": refuted,
            }),
        ),
        None => (
            CertificateKind::FormalRefutation,
            json!({
                "equation": null,
                "verdict": "not_found_within_weight",
                "max_weight": max_weight,
                "subsets_tested": s.subsets_tested,
                "refuted": refuted,
            }),
        ),
    };
    Ok(Outcome { kind, scanned: phi.len(), basis: phi.basis().to_spec(), evidence: ev })
}

/// Procedure inputs for a series over indices `1..=n` with unit coefficients.
pub fn zeta_indices(n: u64) -> Vec<u64> {
    (1..=n).collect()
}

/// Helper for callers holding a series rather than a spec.
pub fn substitute_procedure(f: &DiffPolynomial, phi: &FormalSeries, horizon: Option<&Exponent>, prop3: bool) -> Procedure {
    Procedure::Substitute {
        equation: f.to_string(),
        series: SeriesSpec::from_series(phi),
        horizon: horizon.cloned(),
        prop3,
        precision: phi.basis().precision(),
    }
}

pub fn rescale_procedure(
    f: &DiffPolynomial,
    phi: &FormalSeries,
    b: Option<&LatticeBasis>,
    scalars: &[Q],
    horizon: Option<&Exponent>,
) -> Procedure {
    Procedure::Rescale {
        equation: f.to_string(),
        series: SeriesSpec::from_series(phi),
        scalars: scalars.to_vec(),
        generators: b.map(|b| b.generators.clone()),
        horizon: horizon.cloned(),
        precision: phi.basis().precision(),
    }
}

pub fn derive_ade_procedure(phi: &FormalSeries, max_weight: u32, horizon: Option<&Exponent>) -> Procedure {
    Procedure::DeriveAde {
        series: SeriesSpec::from_series(phi),
        max_weight,
        horizon: horizon.cloned(),
        precision: phi.basis().precision(),
    }
}

/// Source of exponents for [`finite_basis_certificate`].
pub enum ExponentStream<'a> {
    /// Indices `n`, read as `log n` over prime symbols.
    Indices(&'a [u64]),
    Series(&'a FormalSeries),
}

pub fn finite_basis_certificate(input: ExponentStream<'_>, rank_bound: usize) -> Result<Certificate> {
    let p = match input {
        ExponentStream::Indices(idx) => Procedure::FiniteBasis {
            indices: Some(idx.to_vec()),
            series: None,
            rank_bound,
            factor_limit: default_factor_limit(),
            precision: DEFAULT_PRECISION,
        },
        ExponentStream::Series(phi) => Procedure::FiniteBasis {
            indices: None,
            series: Some(SeriesSpec::from_series(phi)),
            rank_bound,
            factor_limit: default_factor_limit(),
            precision: phi.basis().precision(),
        },
    };
    Certificate::build(p)
}

pub fn gap_certificate(exponents: &[Exponent], basis: &SymbolBasis, ratio_threshold: &Q) -> Result<Certificate> {
    Certificate::build(Procedure::Gap {
        exponents: exponents.to_vec(),
        basis: basis.to_spec(),
        threshold: ratio_threshold.clone(),
        first_index: 1,
        precision: basis.precision(),
    })
}

pub fn coefficient_field_certificate(tags: &[String]) -> Result<Certificate> {
    Certificate::build(Procedure::CoefficientField { tags: tags.to_vec(), min_increases: default_min_increases() })
}

pub fn bivariate_certificate(degrees: &[u64], exponents: &[Exponent], basis: &SymbolBasis, ratio_threshold: &Q) -> Result<Certificate> {
    Certificate::build(Procedure::Bivariate {
        degrees: degrees.to_vec(),
        exponents: exponents.to_vec(),
        basis: basis.to_spec(),
        ratio_threshold: ratio_threshold.clone(),
        precision: basis.precision(),
    })
}

/// [`signflip_construct`] plus its certificate.
pub fn signflip_certificate(p: &[Q], rule: Option<&[u64]>) -> Result<(Vec<Q>, Vec<Q>, Certificate)> {
    let (p1, q, _) = signflip_construct(p, rule)?;
    let cert = Certificate::build(Procedure::SignFlip { coefficients: p.to_vec(), positions: rule.map(<[u64]>::to_vec) })?;
    Ok((p1, q, cert))
}

pub fn substitute_certificate(f: &DiffPolynomial, phi: &FormalSeries, horizon: Option<&Exponent>, prop3: bool) -> Result<Certificate> {
    Certificate::build(substitute_procedure(f, phi, horizon, prop3))
}

pub fn derive_ade_certificate(phi: &FormalSeries, max_weight: u32, horizon: Option<&Exponent>) -> Result<Certificate> {
    Certificate::build(derive_ade_procedure(phi, max_weight, horizon))
}

/// Horizon helper for reports.
pub fn horizon_string(h: &Horizon) -> String {
    h.to_string()
}
