//! Coefficient rescaling along a lattice basis, the passage from an ODE in
//! `s` to a PDE at `s = 0`, and the Hilbert identities for `ζ(x, s)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::coefficient::{Coefficient, XPoly};
use crate::diff_poly::DiffPolynomial;
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::formal_eval::{evaluate, substitute, Verdict};
use crate::lattice::LatticeBasis;
use crate::numtheory::factorize;
use crate::obstruction::{rescale_procedure, Certificate, Procedure};
use crate::rational::Q;
use crate::series::{FormalSeries, Horizon};
use crate::symbols::{Symbol, SymbolBasis, SymbolValue};

fn check_scalars(b: &LatticeBasis, c: &[Q]) -> Result<()> {
    if c.len() != b.rank() {
        return Err(Error::DegenerateInput(format!("{} scalars for a lattice of rank {}", c.len(), b.rank())));
    }
    if let Some(i) = c.iter().position(Zero::is_zero) {
        return Err(Error::ZeroScalar(i));
    }
    Ok(())
}

/// `Π c_k^{α_k}` for integer `α`.
pub fn weight_factor(c: &[Q], alpha: &[BigInt]) -> Q {
    let mut f = Q::one();
    for (ck, a) in c.iter().zip(alpha) {
        let k = a.abs().to_usize().expect("weight fits in usize");
        let p = num_traits::pow(ck.clone(), k);
        if a.is_negative() {
            f /= p;
        } else {
            f *= p;
        }
    }
    f
}

/// Multiplies the coefficient of every `e^{-λ s}` by `Π c_k^{α_k}`, where
/// `α` are the coordinates of `λ` over the lattice basis.
pub fn rescale(phi: &FormalSeries, b: &LatticeBasis, c: &[Q]) -> Result<FormalSeries> {
    check_scalars(b, c)?;
    let mut terms = Vec::with_capacity(phi.len());
    for (e, p) in phi.terms() {
        let alpha = b.express(e).ok_or_else(|| Error::NotInLattice(e.to_string()))?;
        terms.push((e.clone(), p.scale(&Coefficient::constant(weight_factor(c, &alpha)))));
    }
    FormalSeries::new(phi.basis().clone(), terms, phi.horizon().clone())
}

/// Outcome of an invariance check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RescaleCheck {
    pub horizon: Horizon,
    /// Nonzero (monomial, exponent) groups whose homogeneity was checked.
    pub groups: usize,
    pub residual_zero: bool,
}

/// Checks that `F(rescale(φ))` vanishes whenever `F(φ)` does, and that
/// each monomial of `F` contributes at every exponent `λ` exactly
/// `c^{α(λ)}` times its unscaled contribution.
pub fn check_rescale_invariance(
    f: &DiffPolynomial,
    phi: &FormalSeries,
    b: &LatticeBasis,
    c: &[Q],
    horizon: Option<&Exponent>,
) -> Result<RescaleCheck> {
    let base = substitute(f, phi, horizon)?;
    if let Verdict::NonzeroWithLeading(e, _) = &base.verdict {
        return Err(Error::NotSatisfied(format!("residual has a term at {e}")));
    }
    let t = base.horizon.clone();
    let psi = rescale(phi, b, c)?;
    let cut = |s: FormalSeries| match t.finite() {
        Some(e) => s.truncate(e),
        None => Ok(s),
    };
    let mut groups = 0;
    for (m, coef) in f.terms() {
        let single = DiffPolynomial::term(m.clone(), coef.clone());
        let before = cut(evaluate(&single, phi)?)?;
        let after = cut(evaluate(&single, &psi)?)?;
        let mut exps: Vec<&Exponent> = before.exponents().chain(after.exponents()).collect();
        exps.sort();
        exps.dedup();
        for e in exps {
            let alpha = b.express(e).ok_or_else(|| Error::InvarianceViolated(format!("{e} outside the lattice")))?;
            let expect = before.coeff(e).scale(&Coefficient::constant(weight_factor(c, &alpha)));
            if after.coeff(e) != expect {
                return Err(Error::InvarianceViolated(format!("monomial {single} at {e} is not homogeneous")));
            }
            groups += 1;
        }
    }
    let res = substitute(f, &psi, t.finite())?;
    if let Verdict::NonzeroWithLeading(e, _) = res.verdict {
        return Err(Error::InvarianceViolated(format!("rescaled residual has a term at {e}")));
    }
    Ok(RescaleCheck { horizon: t, groups, residual_zero: true })
}

/// Certificate form of [`check_rescale_invariance`].
pub fn verify_rescale_invariance(
    f: &DiffPolynomial,
    phi: &FormalSeries,
    b: &LatticeBasis,
    c: &[Q],
    horizon: Option<&Exponent>,
) -> Result<Certificate> {
    Certificate::build(rescale_procedure(f, phi, Some(b), c, horizon))
}

/// Monomial `Π x_k^{a_k} · Π (∂^β G)^{m_β}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PdeMonomial {
    pub x: Vec<u32>,
    pub derivs: BTreeMap<Vec<u32>, u32>,
}

impl PdeMonomial {
    fn one(mu: usize) -> Self {
        PdeMonomial { x: vec![0; mu], derivs: BTreeMap::new() }
    }

    fn mul(&self, o: &PdeMonomial) -> PdeMonomial {
        let x = self.x.iter().zip(&o.x).map(|(a, b)| a + b).collect();
        let mut derivs = self.derivs.clone();
        for (d, k) in &o.derivs {
            *derivs.entry(d.clone()).or_insert(0) += k;
        }
        PdeMonomial { x, derivs }
    }

    /// Largest derivative order occurring.
    pub fn order(&self) -> u32 {
        self.derivs.keys().map(|d| d.iter().sum::<u32>()).max().unwrap_or(0)
    }
}

/// A polynomial PDE for `G(x_1, …, x_μ)` with coefficients in `Q[λ]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Pde {
    pub lambdas: Vec<Symbol>,
    pub terms: BTreeMap<PdeMonomial, Coefficient>,
}

impl Pde {
    fn zero(lambdas: &[Symbol]) -> Self {
        Pde { lambdas: lambdas.to_vec(), terms: BTreeMap::new() }
    }

    fn constant(lambdas: &[Symbol], c: Coefficient) -> Self {
        let mut p = Pde::zero(lambdas);
        if !c.is_zero() {
            p.terms.insert(PdeMonomial::one(lambdas.len()), c);
        }
        p
    }

    /// The unknown `G` itself.
    pub fn g(lambdas: &[Symbol]) -> Self {
        let mu = lambdas.len();
        let mut m = PdeMonomial::one(mu);
        m.derivs.insert(vec![0; mu], 1);
        let mut p = Pde::zero(lambdas);
        p.terms.insert(m, Coefficient::one());
        p
    }

    pub fn vars(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert(&mut self, m: PdeMonomial, c: Coefficient) {
        let slot = self.terms.entry(m.clone()).or_default();
        *slot = &*slot + &c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, o: &Pde) -> Pde {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.insert(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Coefficient) -> Pde {
        let mut out = Pde::zero(&self.lambdas);
        for (m, k) in &self.terms {
            out.insert(m.clone(), k * c);
        }
        out
    }

    pub fn mul(&self, o: &Pde) -> Pde {
        let mut out = Pde::zero(&self.lambdas);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                out.insert(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    /// The derivation `D = Σ_k (-λ_k) x_k ∂/∂x_k`, the image of `d/ds`.
    pub fn euler_derivation(&self) -> Pde {
        let mu = self.vars();
        let neg_lam: Vec<Coefficient> = self.lambdas.iter().map(|s| -&Coefficient::symbol(s)).collect();
        let mut out = Pde::zero(&self.lambdas);
        for (m, c) in &self.terms {
            // x_k^{a} contributes a·(-λ_k) times itself
            for k in 0..mu {
                if m.x[k] > 0 {
                    out.insert(m.clone(), &c.scale(&Q::from_integer(m.x[k].into())) * &neg_lam[k]);
                }
            }
            for (d, &pw) in &m.derivs {
                let mut rest = m.clone();
                if pw == 1 {
                    rest.derivs.remove(d);
                } else {
                    rest.derivs.insert(d.clone(), pw - 1);
                }
                for k in 0..mu {
                    let mut nd = d.clone();
                    nd[k] += 1;
                    let mut t = rest.clone();
                    t.x[k] += 1;
                    *t.derivs.entry(nd).or_insert(0) += 1;
                    out.insert(t, &c.scale(&Q::from_integer(pw.into())) * &neg_lam[k]);
                }
            }
        }
        out
    }

    /// Divides out the common symbol monomial and fixes the sign of the
    /// structurally first term to be positive.
    pub fn normalized(&self) -> Pde {
        let mut content: Option<BTreeMap<Symbol, u32>> = None;
        for c in self.terms.values() {
            let m = c.monomial_content().powers;
            content = Some(match content {
                None => m,
                Some(mut g) => {
                    g.retain(|s, k| {
                        *k = (*k).min(m.get(s).copied().unwrap_or(0));
                        *k > 0
                    });
                    g
                }
            });
        }
        let d = crate::coefficient::Monomial { powers: content.unwrap_or_default(), shift: Exponent::zero() };
        let mut out = Pde::zero(&self.lambdas);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), c.div_monomial(&d).expect("content divides"));
        }
        let sign = out.terms.values().next().and_then(|c| c.leading_rational().cloned());
        match sign {
            Some(s) if s.is_negative() => out.scale(&Coefficient::int(-1)),
            _ => out,
        }
    }

    pub fn max_order(&self) -> u32 {
        self.terms.keys().map(PdeMonomial::order).max().unwrap_or(0)
    }
}

fn fmt_deriv(d: &[u32]) -> String {
    if d.len() == 1 {
        match d[0] {
            0 => "G".into(),
            k @ 1..=3 => format!("G{}", "'".repeat(k as usize)),
            k => format!("G^({k})"),
        }
    } else if d.iter().all(|&k| k == 0) {
        "G".into()
    } else {
        let parts: Vec<String> = d.iter().map(|k| k.to_string()).collect();
        format!("G_[{}]", parts.join(","))
    }
}

impl fmt::Display for PdeMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let single = self.x.len() == 1;
        for (k, &a) in self.x.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let name = if single { "x".to_string() } else { format!("x{}", k + 1) };
            parts.push(if a == 1 { name } else { format!("{name}^{a}") });
        }
        for (d, &p) in &self.derivs {
            let g = fmt_deriv(d);
            parts.push(if p == 1 { g } else { format!("{g}^{p}") });
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("*"))
        }
    }
}

impl fmt::Display for Pde {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let (neg, mag) = match c.as_constant() {
                Some(q) if q.is_negative() => (true, Coefficient::constant(-q)),
                _ => (false, c.clone()),
            };
            let sep = match (i, neg) {
                (0, true) => "-",
                (0, false) => "",
                (_, true) => " - ",
                (_, false) => " + ",
            };
            let ms = m.to_string();
            let body = if mag.is_one() {
                ms
            } else if ms == "1" {
                if mag.as_constant().is_some() { mag.to_string() } else { format!("({mag})") }
            } else if mag.as_constant().is_some() {
                format!("{mag}*{ms}")
            } else {
                format!("({mag})*{ms}")
            };
            write!(f, "{sep}{body}")?;
        }
        Ok(())
    }
}

/// Replaces `f^{(n)}` by `D^n G` with `D = Σ (-λ_k) x_k ∂_k`, the value at
/// `s = 0` of `d^n/ds^n G(x_1 e^{-λ_1 s}, …)`.
pub fn ode_to_pde(f: &DiffPolynomial, lambdas: &[Symbol]) -> Result<Pde> {
    if f.has_shifts() {
        return Err(Error::ShiftPresent);
    }
    if f.x_degree() > 0 {
        return Err(Error::ExplicitX);
    }
    if lambdas.is_empty() {
        return Err(Error::DegenerateInput("at least one variable is required".into()));
    }
    let mut cache: Vec<Pde> = vec![Pde::g(lambdas)];
    let one = Pde::constant(lambdas, Coefficient::one());
    let mut out = Pde::zero(lambdas);
    for (m, c) in f.terms() {
        let mut t = Pde::constant(lambdas, c.clone());
        for (z, &k) in &m.powers {
            while cache.len() <= z.order as usize {
                let next = cache.last().unwrap().euler_derivation();
                cache.push(next);
            }
            let mut p = one.clone();
            for _ in 0..k {
                p = p.mul(&cache[z.order as usize]);
            }
            t = t.mul(&p);
        }
        out = out.add(&t);
    }
    Ok(out)
}

/// Truncated power series in `x_1, …, x_μ`, keyed by multi-index.
pub type PowerSeries = BTreeMap<Vec<u32>, Coefficient>;

fn ps_mul(a: &PowerSeries, b: &PowerSeries, order: u32) -> PowerSeries {
    let mut out = PowerSeries::new();
    for (ia, ca) in a {
        let da: u32 = ia.iter().sum();
        for (ib, cb) in b {
            if da + ib.iter().sum::<u32>() > order {
                continue;
            }
            let idx: Vec<u32> = ia.iter().zip(ib).map(|(x, y)| x + y).collect();
            let slot = out.entry(idx).or_default();
            *slot = &*slot + &(ca * cb);
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn ps_partial(a: &PowerSeries, d: &[u32]) -> PowerSeries {
    let mut out = PowerSeries::new();
    'terms: for (i, c) in a {
        let mut factor = Q::one();
        let mut idx = i.clone();
        for (k, &n) in d.iter().enumerate() {
            if idx[k] < n {
                continue 'terms;
            }
            for j in 0..n {
                factor *= Q::from_integer((idx[k] - j).into());
            }
            idx[k] -= n;
        }
        out.insert(idx, c.scale(&factor));
    }
    out
}

/// The PDE applied to `G` given by its coefficients up to total degree
/// `order`. Returns the residual and the degree up to which it is exact.
pub fn evaluate_pde_on_power_series(pde: &Pde, g: &PowerSeries, order: u32) -> (PowerSeries, u32) {
    let valid = order.saturating_sub(pde.max_order());
    let mu = pde.vars();
    let mut out = PowerSeries::new();
    for (m, c) in &pde.terms {
        let mut t: PowerSeries = BTreeMap::from([(m.x.clone(), c.clone())]);
        for (d, &p) in &m.derivs {
            let gd = ps_partial(g, d);
            for _ in 0..p {
                t = ps_mul(&t, &gd, order);
            }
        }
        for (i, v) in t {
            if i.iter().sum::<u32>() <= valid {
                let slot = out.entry(i).or_default();
                *slot = &*slot + &v;
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    debug_assert!(out.keys().all(|k| k.len() == mu));
    (out, valid)
}

/// Which identity of the Hilbert family was checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HilbertIdentity {
    /// `(x∂_x)^μ ζ(x, s-ν) = ζ(x, s-μ-ν)`.
    EulerShift,
    /// `∂_s (x∂_x)^μ ζ(x, s-ν) = (x∂_x)^μ ∂_s ζ(x, s-ν)`.
    Commute,
    /// `∂_s (x∂_x)^μ ζ(x, s-ν) = ∂_s ζ(x, s-μ-ν)`.
    LogDerivative,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HilbertCheck {
    pub mu: u32,
    pub nu: u32,
    pub identity: HilbertIdentity,
    pub residual_terms: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HilbertReport {
    pub n: u64,
    pub max_mu: u32,
    pub max_nu: u32,
    pub horizon: Horizon,
    pub checks: Vec<HilbertCheck>,
}

impl HilbertReport {
    pub fn all_zero(&self) -> bool {
        self.checks.iter().all(|c| c.residual_terms == 0)
    }
}

/// `Σ_{n ≤ N} n^k x^n n^{-s}`, built directly from the definition.
pub fn zeta_bivariate(n: u64, k: u32, basis: &Arc<SymbolBasis>, horizon: &Horizon) -> Result<FormalSeries> {
    let mut terms = Vec::new();
    for m in 1..=n {
        let e = Exponent::from_pairs(
            factorize(m).into_iter().map(|(p, a)| (Symbol::log_prime(p), Q::from_integer(a.into()))),
        );
        let c = Coefficient::constant(Q::from_integer(BigInt::from(m).pow(k)));
        terms.push((e, XPoly::monomial(c, m as usize)));
    }
    FormalSeries::new(basis.clone(), terms, horizon.clone())
}

/// Checks the Hilbert family on the prefix `n ≤ N` for all
/// `μ ≤ max_mu`, `ν ≤ max_nu`. Shifts in `s` are applied through the
/// series shift operator and resolved into the factors `n^ν`.
pub fn check_hilbert_zeta(n: u64, max_mu: u32, max_nu: u32) -> Result<HilbertReport> {
    if n < 2 {
        return Err(Error::DegenerateInput("prefix bound must be at least 2".into()));
    }
    let primes: Vec<u64> = (2..=n).filter(|&p| crate::numtheory::is_prime(p)).collect();
    let entries =
        primes.iter().map(|&p| (Symbol::log_prime(p), SymbolValue::Log(Q::from_integer(p.into())))).collect();
    let basis = Arc::new(SymbolBasis::new(entries, crate::real::DEFAULT_PRECISION)?);
    let horizon = Horizon::Finite(Exponent::from_pairs(
        factorize(n).into_iter().map(|(p, a)| (Symbol::log_prime(p), Q::from_integer(a.into()))),
    ));
    let z0 = zeta_bivariate(n, 0, &basis, &horizon)?;
    let direct: Vec<FormalSeries> =
        (0..=max_mu + max_nu).map(|k| zeta_bivariate(n, k, &basis, &horizon)).collect::<Result<_>>()?;
    let mut checks = Vec::new();
    for nu in 0..=max_nu {
        let shifted = z0.shift(&-Q::from_integer(nu.into())).resolve_log_multipliers();
        for mu in 0..=max_mu {
            let mut lhs = shifted.clone();
            for _ in 0..mu {
                lhs = lhs.x_euler();
            }
            let rhs = &direct[(mu + nu) as usize];
            let r1 = lhs.sub(rhs)?;
            let ds_lhs = lhs.differentiate(1);
            let mut commuted = shifted.differentiate(1);
            for _ in 0..mu {
                commuted = commuted.x_euler();
            }
            let r2 = ds_lhs.sub(&commuted)?;
            let r3 = ds_lhs.sub(&rhs.differentiate(1))?;
            for (identity, r) in [
                (HilbertIdentity::EulerShift, r1),
                (HilbertIdentity::Commute, r2),
                (HilbertIdentity::LogDerivative, r3),
            ] {
                checks.push(HilbertCheck { mu, nu, identity, residual_terms: r.len() });
            }
        }
    }
    Ok(HilbertReport { n, max_mu, max_nu, horizon, checks })
}

/// Certificate form of [`check_hilbert_zeta`].
pub fn verify_hilbert_zeta(n: u64, max_nu: u32, max_mu: u32) -> Result<Certificate> {
    Certificate::build(Procedure::Hilbert { n, max_mu, max_nu })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::integer_basis;
    use crate::parse::parse_diffpoly_lenient;
    use crate::rational::{q, qr};

    fn geometric(n: i64) -> FormalSeries {
        let basis = Arc::new(SymbolBasis::from_pairs(&[("lam", "3/2")]).unwrap());
        let lam = |k: i64| Exponent::single(Symbol::new("lam"), q(k));
        FormalSeries::from_coefficients(basis, (1..=n).map(|k| (lam(k), Coefficient::one())), Horizon::Finite(lam(n)))
            .unwrap()
    }

    fn lattice_of(phi: &FormalSeries) -> LatticeBasis {
        let exps: Vec<Exponent> = phi.exponents().cloned().collect();
        integer_basis(&exps, phi.basis())
    }

    #[test]
    fn rescale_examples() {
        let phi = geometric(6);
        let b = lattice_of(&phi);
        assert_eq!(rescale(&phi, &b, &[q(1)]).unwrap(), phi);
        let r = rescale(&phi, &b, &[q(3)]).unwrap();
        for (k, (_, p)) in r.terms().iter().enumerate() {
            assert_eq!(p.as_constant().unwrap(), Coefficient::constant(num_traits::pow(q(3), k + 1)));
        }
        assert!(matches!(rescale(&phi, &b, &[q(0)]), Err(Error::ZeroScalar(0))));

        let idx: Vec<_> = (1..=6u64).map(|k| (k, q(1))).collect();
        let z = FormalSeries::dirichlet(&idx, Some(6), 128).unwrap();
        let b = lattice_of(&z);
        let r = rescale(&z, &b, &[q(2), q(1), q(1)]).unwrap();
        let at = |n: u64| {
            let e = Exponent::from_pairs(
                factorize(n).into_iter().map(|(p, a)| (Symbol::log_prime(p), Q::from_integer(a.into()))),
            );
            r.coeff(&e).as_constant().unwrap()
        };
        assert_eq!(at(4), Coefficient::int(4));
        assert_eq!(at(6), Coefficient::int(2));
        assert_eq!(at(5), Coefficient::int(1));
    }

    #[test]
    fn rescale_composes() {
        let idx: Vec<_> = (1..=12u64).map(|k| (k, q(1))).collect();
        let z = FormalSeries::dirichlet(&idx, Some(12), 128).unwrap();
        let b = lattice_of(&z);
        let c1 = [q(2), qr(1, 3), q(-1), q(5), qr(7, 2)];
        let c2 = [qr(1, 2), q(3), q(4), q(-2), q(1)];
        let prod: Vec<Q> = c1.iter().zip(&c2).map(|(a, b)| a * b).collect();
        let lhs = rescale(&rescale(&z, &b, &c1).unwrap(), &b, &c2).unwrap();
        assert_eq!(lhs, rescale(&z, &b, &prod).unwrap());
    }

    #[test]
    fn geometric_invariance() {
        let phi = geometric(10);
        let f = parse_diffpoly_lenient("f' + lam*f + lam*f^2").unwrap();
        let b = lattice_of(&phi);
        let r = check_rescale_invariance(&f, &phi, &b, &[qr(1, 2)], None).unwrap();
        assert!(r.residual_zero && r.groups > 0);
        let g = parse_diffpoly_lenient("f' + f").unwrap();
        assert!(matches!(check_rescale_invariance(&g, &phi, &b, &[q(2)], None), Err(Error::NotSatisfied(_))));
    }

    #[test]
    fn riccati_pde() {
        let lam = Symbol::new("lam");
        let f = parse_diffpoly_lenient("f' + lam*f + lam*f^2").unwrap();
        let pde = ode_to_pde(&f, std::slice::from_ref(&lam)).unwrap().normalized();
        assert_eq!(pde.to_string(), "G + G^2 - x*G'");
        // G = x/(1-x)
        let g: PowerSeries = (1..=30u32).map(|k| (vec![k], Coefficient::one())).collect();
        let (res, valid) = evaluate_pde_on_power_series(&pde, &g, 30);
        assert!(res.is_empty());
        assert_eq!(valid, 29);
        // G = x/(1-2x) is not a solution
        let g2: PowerSeries = (1..=30u32).map(|k| (vec![k], Coefficient::constant(num_traits::pow(q(2), k as usize - 1)))).collect();
        assert!(!evaluate_pde_on_power_series(&pde, &g2, 30).0.is_empty());
    }

    #[test]
    fn second_order_pde_keeps_lambda() {
        let lam = Symbol::new("lam");
        let f = parse_diffpoly_lenient("f'' - f'").unwrap();
        let pde = ode_to_pde(&f, std::slice::from_ref(&lam)).unwrap();
        assert_eq!(pde.to_string(), "(lam + lam^2)*x*G' + (lam^2)*x^2*G''");
        let e = parse_diffpoly_lenient("f' + lam*f").unwrap();
        let pde = ode_to_pde(&e, std::slice::from_ref(&lam)).unwrap().normalized();
        assert_eq!(pde.to_string(), "G - x*G'");
        assert!(matches!(ode_to_pde(&parse_diffpoly_lenient("f(s+1)").unwrap(), &[lam]), Err(Error::ShiftPresent)));
    }

    #[test]
    fn two_variable_pde() {
        // G(x1, x2) = x1 + x2 solves D G = -(λ1 x1 + λ2 x2) for f' + ... only when λ1 = λ2; check structure
        let l = [Symbol::new("l1"), Symbol::new("l2")];
        let pde = ode_to_pde(&parse_diffpoly_lenient("f'").unwrap(), &l).unwrap();
        assert_eq!(pde.terms.len(), 2);
        let g: PowerSeries = BTreeMap::from([(vec![1, 0], Coefficient::one()), (vec![0, 1], Coefficient::one())]);
        let (res, _) = evaluate_pde_on_power_series(&pde, &g, 4);
        assert_eq!(res.get(&vec![1, 0]).unwrap(), &-&Coefficient::symbol(&l[0]));
    }

    #[test]
    fn hilbert_small() {
        let r = check_hilbert_zeta(5, 1, 0).unwrap();
        assert!(r.all_zero());
        let r = check_hilbert_zeta(4, 2, 0).unwrap();
        assert!(r.all_zero());
        let r = check_hilbert_zeta(12, 3, 3).unwrap();
        assert!(r.all_zero());
        assert_eq!(r.checks.len(), 4 * 4 * 3);
        // the comparison is not vacuous: x∂x ζ differs from ζ itself
        let basis = Arc::new(SymbolBasis::log_primes(&[2, 3, 5]));
        let h = Horizon::Finite(Exponent::single(Symbol::log_prime(5), q(1)));
        let z = zeta_bivariate(5, 0, &basis, &h).unwrap();
        assert_eq!(z.x_euler().sub(&z).unwrap().len(), 4);
    }
}
