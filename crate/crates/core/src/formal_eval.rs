//! Formal substitution of a series into a difference-differential polynomial
//! and the quantitative leading-term argument built on it.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::coefficient::{Coefficient, XPoly};
use crate::diff_poly::{DiffIndeterminate, DiffPolynomial};
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::lattice::integer_basis;
use crate::rational::{format_rational, Q};
use crate::real::{decimal_string, exp_interval, Interval};
use crate::series::{FormalSeries, Horizon};
use crate::symbols::{PrecisionTie, SymbolBasis};

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    ZeroUpToT,
    NonzeroWithLeading(Exponent, XPoly),
}

/// The series `F(φ)` rearranged by exponent.
#[derive(Clone, Debug)]
pub struct Residual {
    pub series: FormalSeries,
    /// Horizon the verdict speaks about.
    pub horizon: Horizon,
    /// Largest horizon the inputs support.
    pub max_horizon: Horizon,
    pub verdict: Verdict,
}

impl Residual {
    pub fn is_zero(&self) -> bool {
        self.verdict == Verdict::ZeroUpToT
    }
}

/// `F(φ)` with its natural validity horizon.
pub fn evaluate(f: &DiffPolynomial, phi: &FormalSeries) -> Result<FormalSeries> {
    let basis = phi.basis().clone();
    let one = FormalSeries::constant(basis.clone(), Coefficient::one());
    let x = FormalSeries::x(basis.clone());
    let mut derivs: BTreeMap<u32, FormalSeries> = BTreeMap::new();
    let b2 = basis.clone();
    f.evaluate(
        &one,
        &x,
        &mut |z: &DiffIndeterminate| {
            let d = derivs.entry(z.order).or_insert_with(|| phi.differentiate(z.order)).clone();
            Ok(d.shift(&z.shift))
        },
        &|c| FormalSeries::constant(b2.clone(), c.clone()),
    )
}

/// Substitutes `φ` into `F` and decides whether the result vanishes up to
/// `t` (default: the largest supported horizon).
pub fn substitute(f: &DiffPolynomial, phi: &FormalSeries, t: Option<&Exponent>) -> Result<Residual> {
    let full = evaluate(f, phi)?;
    let max_horizon = full.horizon().clone();
    let series = match t {
        Some(t) => {
            phi.basis().check(t)?;
            if Horizon::Finite(t.clone()).cmp_with(&max_horizon, phi.basis()) == Ordering::Greater {
                return Err(Error::HorizonTooShort { max: max_horizon.to_string() });
            }
            full.truncate(t)?
        }
        None => full,
    };
    let verdict = match series.terms().first() {
        None => Verdict::ZeroUpToT,
        Some((e, p)) => Verdict::NonzeroWithLeading(e.clone(), p.clone()),
    };
    Ok(Residual { horizon: series.horizon().clone(), series, max_horizon, verdict })
}

/// First nonvanishing term `b e^{-λ s}` of `∂F/∂z` evaluated at `φ`.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialTerm {
    pub z: DiffIndeterminate,
    pub b: XPoly,
    pub lambda: Exponent,
}

#[derive(Clone, Debug)]
pub struct PartialsReport {
    pub terms: Vec<PartialTerm>,
    /// `Λ₁ = min λ_{ϱ,σ}`.
    pub lambda1: Exponent,
    /// Indices into `terms` attaining the minimum.
    pub argmin: Vec<usize>,
}

/// Leading terms of every `∂F/∂z(φ)` for the indeterminates occurring in `F`.
pub fn initial_terms_of_partials(f: &DiffPolynomial, phi: &FormalSeries) -> Result<PartialsReport> {
    let zs = f.indeterminates();
    if zs.is_empty() {
        return Err(Error::DegenerateInput("equation has no f-indeterminates".into()));
    }
    let basis = phi.basis();
    let mut terms = Vec::new();
    for z in zs {
        let r = substitute(&f.partial_wrt(&z), phi, None)?;
        match r.verdict {
            Verdict::NonzeroWithLeading(lambda, b) => terms.push(PartialTerm { z, b, lambda }),
            Verdict::ZeroUpToT => return Err(Error::PartialVanishes(z.to_string())),
        }
    }
    let mut lambda1 = terms[0].lambda.clone();
    for t in &terms[1..] {
        if basis.cmp(&t.lambda, &lambda1) == Ordering::Less {
            lambda1 = t.lambda.clone();
        }
    }
    let argmin = terms.iter().enumerate().filter(|(_, t)| t.lambda == lambda1).map(|(i, _)| i).collect();
    Ok(PartialsReport { terms, lambda1, argmin })
}

/// Replaces `F` by a vanishing partial until all partials are nonzero, at
/// most `deg F` times. Returns the equation used and the restart trail.
pub fn minimal_equation(f: &DiffPolynomial, phi: &FormalSeries) -> Result<(DiffPolynomial, PartialsReport, Vec<String>)> {
    let mut g = f.clone();
    let mut trail = Vec::new();
    let cap = f.total_degree().max(1);
    loop {
        match initial_terms_of_partials(&g, phi) {
            Ok(rep) => return Ok((g, rep, trail)),
            Err(Error::PartialVanishes(z)) if (trail.len() as u32) < cap => {
                let zi = g.indeterminates().into_iter().find(|w| w.to_string() == z).expect("named indeterminate");
                let next = g.partial_wrt(&zi);
                log::info!("partial by {z} vanishes; restarting with {next}");
                trail.push(z);
                g = next;
                if g.indeterminates().is_empty() {
                    return Err(Error::PartialVanishes(trail.last().cloned().unwrap_or_default()));
                }
            }
            Err(e) => return Err(e),
        }
    }
}

/// One term `c λ^t e^{λ k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpTerm {
    pub t: u32,
    pub k: Q,
    pub c: Coefficient,
}

/// `L(λ) = Σ c λ^t e^{λ k}` with coefficients evaluated over a basis.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpPolynomial {
    pub terms: Vec<ExpTerm>,
}

impl ExpPolynomial {
    /// Merges equal `(t, k)` pairs and drops zero coefficients.
    pub fn new(terms: impl IntoIterator<Item = ExpTerm>) -> Self {
        let mut m: BTreeMap<(Q, u32), Coefficient> = BTreeMap::new();
        for ExpTerm { t, k, c } in terms {
            let slot = m.entry((k, t)).or_default();
            *slot = &*slot + &c;
        }
        ExpPolynomial {
            terms: m.into_iter().filter(|(_, c)| !c.is_zero()).map(|((k, t), c)| ExpTerm { t, k, c }).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Certified enclosure of `L(λ)`.
    pub fn eval(&self, lambda: &Q, basis: &SymbolBasis) -> Interval {
        let p = basis.precision();
        let mut acc = Interval::zero();
        for term in &self.terms {
            let c = term.c.eval(basis);
            let pw = Interval::exact(num_traits::pow(lambda.clone(), term.t as usize));
            let e = exp_interval(&(&term.k * lambda), p);
            acc = acc.add(&c.mul(&pw, p).mul(&e, p), p);
        }
        acc
    }

    /// Certified sign of `L(λ)`, or `None` if the enclosure straddles zero.
    ///
    /// Evaluates `e^{-λ k_max} L(λ)`: the enclosures are fixed-point, so `L`
    /// itself underflows once every `λ k` is very negative.
    pub fn sign_at(&self, lambda: &Q, basis: &SymbolBasis) -> Option<Ordering> {
        let Some(d) = self.dominant() else { return Some(Ordering::Equal) };
        let p = basis.precision();
        let kmax = &self.terms[d].k;
        let mut acc = Interval::zero();
        for term in &self.terms {
            let pw = Interval::exact(num_traits::pow(lambda.clone(), term.t as usize));
            let e = exp_interval(&((&term.k - kmax) * lambda), p);
            acc = acc.add(&term.c.eval(basis).mul(&pw, p).mul(&e, p), p);
        }
        acc.certain_cmp(&Interval::zero())
    }

    /// Index of the dominant term: largest `k`, then largest `t`.
    pub fn dominant(&self) -> Option<usize> {
        (0..self.terms.len()).max_by(|&i, &j| {
            let (a, b) = (&self.terms[i], &self.terms[j]);
            a.k.cmp(&b.k).then(a.t.cmp(&b.t))
        })
    }
}

/// Certified upper bound on the real roots of an exponential polynomial.
#[derive(Clone, Debug, PartialEq)]
pub struct RootBound {
    pub bound: Q,
    /// `(t, k)` of the dominating term.
    pub dominant: (u32, Q),
    /// Smallest point from which every non-dominant ratio is nonincreasing.
    pub monotone_from: Q,
}

fn monotone_from(l: &ExpPolynomial, d: usize) -> Q {
    let td = l.terms[d].t as i64;
    let kd = &l.terms[d].k;
    let mut b0 = Q::one();
    for (j, term) in l.terms.iter().enumerate() {
        if j == d {
            continue;
        }
        let a = term.t as i64 - td;
        let delta = kd - &term.k;
        if a > 0 && delta.is_positive() {
            let v = Q::from_integer(a.into()) / delta;
            if v > b0 {
                b0 = v;
            }
        }
    }
    b0
}

/// Checks `|c_D| > Σ_{j≠D} |c_j| λ^{t_j - t_D} e^{λ(k_j - k_D)}` at `λ = b`
/// with interval arithmetic. Returns `None` if a coefficient cannot be
/// separated from zero.
fn dominance_at(l: &ExpPolynomial, d: usize, b: &Q, basis: &SymbolBasis) -> std::result::Result<bool, ()> {
    let p = basis.precision();
    let cd = l.terms[d].c.eval(basis);
    if cd.contains_zero() {
        return Err(());
    }
    let td = l.terms[d].t as i32;
    let kd = &l.terms[d].k;
    let bi = Interval::exact(b.clone());
    let mut sum = Interval::zero();
    for (j, term) in l.terms.iter().enumerate() {
        if j == d {
            continue;
        }
        let a = term.t as i32 - td;
        let pw = if a >= 0 { bi.pow(a as u32, p) } else { bi.pow((-a) as u32, p).recip(p).ok_or(())? };
        let e = exp_interval(&(b * (&term.k - kd)), p);
        sum = sum.add(&term.c.eval(basis).abs().mul(&pw, p).mul(&e, p), p);
    }
    Ok(cd.abs().certain_cmp(&sum) == Some(Ordering::Greater))
}

/// Re-checks that `b` certifies the dominance inequality.
pub fn verify_dominance(l: &ExpPolynomial, b: &Q, basis: &SymbolBasis) -> bool {
    let Some(d) = l.dominant() else { return false };
    if l.terms.len() == 1 {
        return !b.is_negative();
    }
    *b >= monotone_from(l, d) && dominance_at(l, d, b, basis) == Ok(true)
}

/// A rational `B` at least every real root of `L`.
///
/// Beyond `B₀ = max(1, max (t_j - t_D)/(k_D - k_j))` each ratio
/// `λ^{t_j-t_D} e^{λ(k_j-k_D)}` is nonincreasing, so the dominance
/// inequality at `B ≥ B₀` persists for all larger `λ`. `B` is found by
/// doubling and then tightened by bisection.
pub fn exp_poly_root_bound(l: &ExpPolynomial, basis: &SymbolBasis) -> Result<RootBound> {
    let d = l.dominant().ok_or_else(|| Error::DegenerateInput("zero exponential polynomial".into()))?;
    let dominant = (l.terms[d].t, l.terms[d].k.clone());
    if l.terms.len() == 1 {
        return Ok(RootBound { bound: Q::zero(), dominant, monotone_from: Q::zero() });
    }
    let tie = || PrecisionTie {
        a: l.terms[d].c.to_string(),
        b: "0".into(),
        precision: basis.precision(),
    };
    let b0 = monotone_from(l, d);
    let mut hi = b0.clone();
    let mut steps = 0;
    loop {
        match dominance_at(l, d, &hi, basis) {
            Ok(true) => break,
            Ok(false) => {}
            Err(()) => return Err(tie().into()),
        }
        hi *= Q::from_integer(2.into());
        steps += 1;
        if steps > 256 {
            return Err(Error::DegenerateInput("root bound search did not terminate".into()));
        }
    }
    let mut lo = if steps == 0 { b0.clone() } else { (&hi / Q::from_integer(2.into())).max(b0.clone()) };
    if lo != hi {
        for _ in 0..40 {
            let mid = (&lo + &hi) / Q::from_integer(2.into());
            if dominance_at(l, d, &mid, basis) == Ok(true) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    Ok(RootBound { bound: hi, dominant, monotone_from: b0 })
}

/// Output of [`prop3_threshold`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Prop3Report {
    /// Equation actually used (after minimality restarts).
    pub equation: String,
    pub restarts: Vec<String>,
    /// Truncation-stability bound, an exponent of `φ`.
    pub big_lambda: Exponent,
    pub prefix_terms: usize,
    pub lambda1: Exponent,
    pub argmin: Vec<String>,
    #[serde(with = "crate::rational::serde_q")]
    pub lambda2: Q,
    pub n: u32,
    pub lambda0: Exponent,
    /// `Λ + |Λ₁| + n|λ₀|` exactly; add `|Λ₂|` for the threshold.
    pub exact_part: Exponent,
    /// Certified upper end of the numeric threshold, as a decimal.
    pub threshold: String,
    #[serde(with = "crate::rational::serde_q")]
    pub threshold_upper: Q,
    pub verified_indices: Vec<usize>,
    pub horizon: Horizon,
}

fn leading_partials_on(f: &DiffPolynomial, zs: &[DiffIndeterminate], phi: &FormalSeries) -> Option<Vec<(Exponent, XPoly)>> {
    let mut out = Vec::new();
    for z in zs {
        let r = substitute(&f.partial_wrt(z), phi, None).ok()?;
        match r.verdict {
            Verdict::NonzeroWithLeading(e, b) => out.push((e, b)),
            Verdict::ZeroUpToT => return None,
        }
    }
    Some(out)
}

/// The quantitative step of the leading-term argument: computes
/// `Λ + |Λ₁| + |Λ₂| + n|λ₀|` and checks that every exponent of `φ` beyond it
/// is an integer combination of the earlier ones.
pub fn prop3_threshold(f: &DiffPolynomial, phi: &FormalSeries) -> Result<Prop3Report> {
    let basis = phi.basis().clone();
    let p = basis.precision();
    let res = substitute(f, phi, None)?;
    if let Verdict::NonzeroWithLeading(e, _) = &res.verdict {
        return Err(Error::NotSatisfied(format!("residual has a term at {e}")));
    }
    if phi.is_empty() {
        return Err(Error::DegenerateInput("empty series".into()));
    }
    let (g, rep, restarts) = minimal_equation(f, phi)?;
    let zs: Vec<DiffIndeterminate> = rep.terms.iter().map(|t| t.z.clone()).collect();
    let want: Vec<(Exponent, XPoly)> = rep.terms.iter().map(|t| (t.lambda.clone(), t.b.clone())).collect();
    let stable = |k: usize| leading_partials_on(&g, &zs, &phi.prefix(k)).as_ref() == Some(&want);

    // doubling search, then confirm every longer prefix and walk back down
    let len = phi.len();
    let mut k = 1;
    while k < len && !stable(k) {
        k = (k * 2).min(len);
    }
    for j in k + 1..=len {
        if !stable(j) {
            return Err(Error::VerificationFailed(j - 1));
        }
    }
    while k > 1 && stable(k - 1) {
        k -= 1;
    }
    let big_lambda = phi.terms()[k - 1].0.clone();

    let mut lterms = Vec::new();
    for &i in &rep.argmin {
        let t = &rep.terms[i];
        let b = t.b.as_constant().ok_or(Error::ExplicitX)?;
        let sign = if t.z.order % 2 == 0 { Q::one() } else { -Q::one() };
        lterms.push(ExpTerm { t: t.z.order, k: -t.z.shift.clone(), c: b.scale(&sign) });
    }
    let lpoly = ExpPolynomial::new(lterms);
    let lambda2 = if lpoly.is_zero() { Q::zero() } else { exp_poly_root_bound(&lpoly, &basis)?.bound };

    let n = g.total_degree();
    let lambda0 = phi.terms()[0].0.clone();
    let exact_part = &(&big_lambda + &basis.abs(&rep.lambda1)) + &basis.abs(&lambda0).scale(&Q::from_integer(n.into()));
    let thr = basis.eval(&exact_part).add(&Interval::exact(lambda2.abs()), p);

    let mut verified = Vec::new();
    for i in 1..len {
        let li = &phi.terms()[i].0;
        let v = basis.eval(li);
        if v.certain_cmp(&thr) == Some(Ordering::Less) || v.hi() <= thr.lo() {
            continue;
        }
        let earlier: Vec<Exponent> = phi.terms()[..i].iter().map(|(e, _)| e.clone()).collect();
        let lb = integer_basis(&earlier, &basis);
        if lb.express(li).is_none() {
            return Err(Error::VerificationFailed(i));
        }
        verified.push(i);
    }
    Ok(Prop3Report {
        equation: g.to_string(),
        restarts,
        big_lambda,
        prefix_terms: k,
        lambda1: rep.lambda1.clone(),
        argmin: rep.argmin.iter().map(|&i| rep.terms[i].z.to_string()).collect(),
        lambda2,
        n,
        lambda0,
        exact_part,
        threshold: decimal_string(thr.hi(), 20),
        threshold_upper: thr.hi().clone(),
        verified_indices: verified,
        horizon: res.horizon,
    })
}

/// Rational formatting helper for reports.
pub fn fmt_q(q: &Q) -> String {
    format_rational(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_diffpoly_lenient;
    use crate::rational::{q, qr};
    use crate::symbols::Symbol;
    use std::sync::Arc;

    fn geometric(n: i64) -> FormalSeries {
        let basis = Arc::new(SymbolBasis::from_pairs(&[("lam", "3/2")]).unwrap());
        let lam = |k: i64| Exponent::single(Symbol::new("lam"), q(k));
        FormalSeries::from_coefficients(basis, (1..=n).map(|k| (lam(k), Coefficient::one())), Horizon::Finite(lam(n)))
            .unwrap()
    }

    fn zeta(n: u64) -> FormalSeries {
        let idx: Vec<_> = (1..=n).map(|k| (k, q(1))).collect();
        FormalSeries::dirichlet(&idx, Some(n), 128).unwrap()
    }

    #[test]
    fn geometric_satisfies_riccati() {
        let phi = geometric(12);
        let f = parse_diffpoly_lenient("f' + lam*f + lam*f^2").unwrap();
        let r = substitute(&f, &phi, None).unwrap();
        assert!(r.is_zero());
        assert_eq!(r.horizon, Horizon::Finite(Exponent::single(Symbol::new("lam"), q(12))));
        let beyond = Exponent::single(Symbol::new("lam"), q(13));
        assert!(matches!(substitute(&f, &phi, Some(&beyond)), Err(Error::HorizonTooShort { .. })));
    }

    #[test]
    fn derivative_of_zeta_leads_with_two() {
        let r = substitute(&DiffPolynomial::f(1), &zeta(6), None).unwrap();
        let l2 = Symbol::log_prime(2);
        match r.verdict {
            Verdict::NonzeroWithLeading(e, b) => {
                assert_eq!(e, Exponent::single(l2.clone(), q(1)));
                assert_eq!(b.as_constant().unwrap(), -&Coefficient::symbol(&l2));
            }
            v => panic!("{v:?}"),
        }
        assert!(substitute(&DiffPolynomial::zero(), &zeta(6), None).unwrap().is_zero());
    }

    #[test]
    fn partial_initial_terms() {
        let basis = Arc::new(SymbolBasis::one());
        let phi = FormalSeries::from_coefficients(basis, [(Exponent::integer(1), Coefficient::one())], Horizon::Infinite)
            .unwrap();
        let f = parse_diffpoly_lenient("f'^2 - 4*f").unwrap();
        let rep = initial_terms_of_partials(&f, &phi).unwrap();
        assert_eq!(rep.terms[0].b.as_constant().unwrap(), Coefficient::int(-4));
        assert_eq!(rep.terms[0].lambda, Exponent::zero());
        assert_eq!(rep.terms[1].b.as_constant().unwrap(), Coefficient::int(-2));
        assert_eq!(rep.terms[1].lambda, Exponent::integer(1));
        assert_eq!(rep.argmin, vec![0]);
        let g = parse_diffpoly_lenient("f*f(s+1)").unwrap();
        let rep = initial_terms_of_partials(&g, &phi).unwrap();
        let shifted = rep.terms.iter().find(|t| t.z.shift.is_zero()).unwrap();
        assert_eq!(shifted.b.as_constant().unwrap(), Coefficient::shift_multiplier(&Exponent::integer(1), &q(1)));
    }

    #[test]
    fn root_bounds() {
        let b = SymbolBasis::one();
        let l = ExpPolynomial::new([
            ExpTerm { t: 2, k: q(0), c: Coefficient::int(1) },
            ExpTerm { t: 0, k: q(0), c: Coefficient::int(-4) },
        ]);
        let rb = exp_poly_root_bound(&l, &b).unwrap();
        assert!(rb.bound >= q(2) && rb.bound < qr(201, 100), "{}", rb.bound);
        assert!(verify_dominance(&l, &rb.bound, &b));
        let l = ExpPolynomial::new([
            ExpTerm { t: 0, k: q(1), c: Coefficient::int(1) },
            ExpTerm { t: 1, k: q(0), c: Coefficient::int(-1) },
        ]);
        let rb = exp_poly_root_bound(&l, &b).unwrap();
        assert!(rb.bound <= q(2));
        let c = ExpPolynomial::new([ExpTerm { t: 0, k: q(0), c: Coefficient::int(5) }]);
        assert_eq!(exp_poly_root_bound(&c, &b).unwrap().bound, q(0));
    }

    #[test]
    fn sign_survives_underflow() {
        let b = SymbolBasis::one();
        let l = ExpPolynomial::new([
            ExpTerm { t: 0, k: q(-5), c: Coefficient::int(-1) },
            ExpTerm { t: 3, k: q(-6), c: Coefficient::int(7) },
        ]);
        let lambda = q(500);
        assert!(l.eval(&lambda, &b).contains_zero());
        assert_eq!(l.sign_at(&lambda, &b), Some(Ordering::Less));
    }

    #[test]
    fn threshold_for_geometric() {
        let phi = geometric(16);
        let f = parse_diffpoly_lenient("f' + lam*f + lam*f^2").unwrap();
        let rep = prop3_threshold(&f, &phi).unwrap();
        assert_eq!(rep.n, 2);
        assert_eq!(rep.prefix_terms, 1);
        // threshold = λ + 0 + λ + 2λ with λ = 3/2
        let t: f64 = rep.threshold.parse().unwrap();
        assert!((t - 6.0).abs() < 1e-6, "{t}");
        assert_eq!(rep.verified_indices, (4..16).collect::<Vec<_>>());
    }
}
