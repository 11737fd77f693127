//! Truncated generalized Dirichlet series `Σ a_i e^{-λ_i s}` and the bivariate
//! variant `Σ φ_i(x) e^{-λ_i s}`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use crate::coefficient::{Coefficient, XPoly};
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::linalg::Ring;
use crate::numtheory::factorize;
use crate::rational::Q;
use crate::symbols::{Symbol, SymbolBasis, SymbolValue};

/// Validity bound of a truncated series: terms with exponent `<= T` are exact,
/// anything beyond is unknown. `Infinite` means the stored terms are the
/// whole series.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Horizon {
    Finite(Exponent),
    Infinite,
}

impl Horizon {
    pub fn finite(&self) -> Option<&Exponent> {
        match self {
            Horizon::Finite(e) => Some(e),
            Horizon::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Horizon::Infinite)
    }

    pub fn cmp_with(&self, other: &Horizon, basis: &SymbolBasis) -> Ordering {
        match (self, other) {
            (Horizon::Infinite, Horizon::Infinite) => Ordering::Equal,
            (Horizon::Infinite, _) => Ordering::Greater,
            (_, Horizon::Infinite) => Ordering::Less,
            (Horizon::Finite(a), Horizon::Finite(b)) => basis.cmp(a, b),
        }
    }

    /// `true` when `e <= self`.
    pub fn admits(&self, e: &Exponent, basis: &SymbolBasis) -> bool {
        match self {
            Horizon::Infinite => true,
            Horizon::Finite(t) => basis.cmp(e, t) != Ordering::Greater,
        }
    }

    pub fn min(self, other: Horizon, basis: &SymbolBasis) -> Horizon {
        if self.cmp_with(&other, basis) == Ordering::Greater {
            other
        } else {
            self
        }
    }

    pub fn add(&self, other: &Horizon) -> Horizon {
        match (self, other) {
            (Horizon::Finite(a), Horizon::Finite(b)) => Horizon::Finite(a + b),
            _ => Horizon::Infinite,
        }
    }

    pub fn shifted(&self, e: &Exponent) -> Horizon {
        match self {
            Horizon::Finite(a) => Horizon::Finite(a + e),
            Horizon::Infinite => Horizon::Infinite,
        }
    }
}

impl serde::Serialize for Horizon {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        serde::Serialize::serialize(&self.finite(), s)
    }
}

impl<'de> serde::Deserialize<'de> for Horizon {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(match <Option<Exponent> as serde::Deserialize>::deserialize(d)? {
            Some(e) => Horizon::Finite(e),
            None => Horizon::Infinite,
        })
    }
}

impl fmt::Display for Horizon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Horizon::Finite(e) => write!(f, "{e}"),
            Horizon::Infinite => f.write_str("inf"),
        }
    }
}

/// Result of [`FormalSeries::leading_term`].
#[derive(Clone, Debug, PartialEq)]
pub enum Leading<'a> {
    Term(&'a Exponent, &'a XPoly),
    /// No stored term: the series vanishes up to the horizon.
    ZeroUpTo(Horizon),
}

#[derive(Clone)]
pub struct FormalSeries {
    basis: Arc<SymbolBasis>,
    terms: Vec<(Exponent, XPoly)>,
    horizon: Horizon,
}

impl FormalSeries {
    /// Sorts, merges equal exponents by addition and prunes zero terms.
    pub fn new(
        basis: Arc<SymbolBasis>,
        terms: impl IntoIterator<Item = (Exponent, XPoly)>,
        horizon: Horizon,
    ) -> Result<Self> {
        if let Horizon::Finite(t) = &horizon {
            basis.check(t)?;
        }
        let mut merged: BTreeMap<Exponent, XPoly> = BTreeMap::new();
        for (e, p) in terms {
            basis.check(&e)?;
            if !horizon.admits(&e, &basis) {
                return Err(Error::BadBound { requested: e.to_string(), available: horizon.to_string() });
            }
            let slot = merged.entry(e).or_default();
            *slot = slot.add(&p);
        }
        Ok(FormalSeries::from_merged(basis, merged, horizon))
    }

    fn from_merged(basis: Arc<SymbolBasis>, merged: BTreeMap<Exponent, XPoly>, horizon: Horizon) -> Self {
        let mut terms: Vec<(Exponent, XPoly)> = merged.into_iter().filter(|(_, p)| !p.is_zero()).collect();
        terms.sort_by(|a, b| basis.cmp(&a.0, &b.0));
        FormalSeries { basis, terms, horizon }
    }

    /// Univariate convenience constructor.
    pub fn from_coefficients(
        basis: Arc<SymbolBasis>,
        terms: impl IntoIterator<Item = (Exponent, Coefficient)>,
        horizon: Horizon,
    ) -> Result<Self> {
        FormalSeries::new(basis, terms.into_iter().map(|(e, c)| (e, XPoly::constant(c))), horizon)
    }

    pub fn zero(basis: Arc<SymbolBasis>, horizon: Horizon) -> Self {
        FormalSeries { basis, terms: Vec::new(), horizon }
    }

    /// The exact constant series `c`.
    pub fn constant(basis: Arc<SymbolBasis>, c: Coefficient) -> Self {
        let terms = if c.is_zero() { vec![] } else { vec![(Exponent::zero(), XPoly::constant(c))] };
        FormalSeries { basis, terms, horizon: Horizon::Infinite }
    }

    /// `Σ_{n} a_n n^{-s}` over the basis of `log p` symbols for the primes
    /// dividing the indices. Indices must be at least 1.
    pub fn dirichlet(
        indices: &[(u64, Q)],
        horizon: Option<u64>,
        precision: u32,
    ) -> Result<Self> {
        let mut primes: Vec<u64> = Vec::new();
        let mut exps = Vec::new();
        for (n, a) in indices {
            if *n == 0 {
                return Err(Error::DegenerateInput("index 0 in a Dirichlet series".into()));
            }
            let f = factorize(*n);
            for (p, _) in &f {
                if !primes.contains(p) {
                    primes.push(*p);
                }
            }
            exps.push((f, a.clone()));
        }
        let horizon_factors = horizon.map(factorize);
        if let Some(f) = &horizon_factors {
            for (p, _) in f {
                if !primes.contains(p) {
                    primes.push(*p);
                }
            }
        }
        primes.sort_unstable();
        let entries = primes
            .iter()
            .map(|&p| (Symbol::log_prime(p), SymbolValue::Log(Q::from_integer(p.into()))))
            .collect();
        let basis = Arc::new(SymbolBasis::new(entries, precision)?);
        let log_of = |f: &[(u64, u32)]| {
            Exponent::from_pairs(f.iter().map(|(p, k)| (Symbol::log_prime(*p), Q::from_integer((*k).into()))))
        };
        let h = match &horizon_factors {
            Some(f) => Horizon::Finite(log_of(f)),
            None => Horizon::Infinite,
        };
        let terms: Vec<_> = exps.iter().map(|(f, a)| (log_of(f), Coefficient::constant(a.clone()))).collect();
        FormalSeries::from_coefficients(basis, terms, h)
    }

    /// The exact series `x` (bivariate mode).
    pub fn x(basis: Arc<SymbolBasis>) -> Self {
        let terms = vec![(Exponent::zero(), XPoly::monomial(Coefficient::one(), 1))];
        FormalSeries { basis, terms, horizon: Horizon::Infinite }
    }

    pub fn basis(&self) -> &Arc<SymbolBasis> {
        &self.basis
    }

    pub fn terms(&self) -> &[(Exponent, XPoly)] {
        &self.terms
    }

    pub fn horizon(&self) -> &Horizon {
        &self.horizon
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degrees `m_i` of the `x`-polynomials, in exponent order.
    pub fn x_degrees(&self) -> Vec<usize> {
        self.terms.iter().map(|(_, p)| p.degree().unwrap_or(0)).collect()
    }

    pub fn is_bivariate(&self) -> bool {
        self.terms.iter().any(|(_, p)| p.degree().unwrap_or(0) > 0)
    }

    pub fn exponents(&self) -> impl Iterator<Item = &Exponent> {
        self.terms.iter().map(|(e, _)| e)
    }

    /// Coefficient at `e` (zero if absent).
    pub fn coeff(&self, e: &Exponent) -> XPoly {
        self.terms.iter().find(|(f, _)| f == e).map(|(_, p)| p.clone()).unwrap_or_default()
    }

    pub fn leading_term(&self) -> Leading<'_> {
        match self.terms.first() {
            Some((e, p)) => Leading::Term(e, p),
            None => Leading::ZeroUpTo(self.horizon.clone()),
        }
    }

    /// Least exponent of the full (untruncated) series, as far as it is
    /// known: the first stored term, else the horizon.
    fn lower_bound(&self) -> Horizon {
        match self.terms.first() {
            Some((e, _)) => Horizon::Finite(e.clone()),
            None => self.horizon.clone(),
        }
    }

    fn same_basis(&self, other: &FormalSeries) -> Result<()> {
        if Arc::ptr_eq(&self.basis, &other.basis) || *self.basis == *other.basis {
            Ok(())
        } else {
            Err(Error::BasisMismatch)
        }
    }

    fn combine(&self, other: &FormalSeries, sign: bool) -> Result<FormalSeries> {
        self.same_basis(other)?;
        let horizon = self.horizon.clone().min(other.horizon.clone(), &self.basis);
        let mut merged: BTreeMap<Exponent, XPoly> = BTreeMap::new();
        for (e, p) in &self.terms {
            if horizon.admits(e, &self.basis) {
                merged.insert(e.clone(), p.clone());
            }
        }
        for (e, p) in &other.terms {
            if horizon.admits(e, &self.basis) {
                let slot = merged.entry(e.clone()).or_default();
                *slot = if sign { slot.add(p) } else { slot.sub(p) };
            }
        }
        Ok(FormalSeries::from_merged(self.basis.clone(), merged, horizon))
    }

    pub fn add(&self, other: &FormalSeries) -> Result<FormalSeries> {
        self.combine(other, true)
    }

    pub fn sub(&self, other: &FormalSeries) -> Result<FormalSeries> {
        self.combine(other, false)
    }

    pub fn neg(&self) -> FormalSeries {
        self.map_coeffs(|p| p.neg())
    }

    /// Cauchy product truncated at `min(T_a + λmin(b), T_b + λmin(a))`.
    pub fn mul(&self, other: &FormalSeries) -> Result<FormalSeries> {
        self.same_basis(other)?;
        let basis = &self.basis;
        let h1 = match &self.horizon {
            Horizon::Finite(t) => other.lower_bound().shifted(t),
            Horizon::Infinite => Horizon::Infinite,
        };
        let h2 = match &other.horizon {
            Horizon::Finite(t) => self.lower_bound().shifted(t),
            Horizon::Infinite => Horizon::Infinite,
        };
        let horizon = h1.min(h2, basis);
        let mut merged: BTreeMap<Exponent, XPoly> = BTreeMap::new();
        for (ea, pa) in &self.terms {
            for (eb, pb) in &other.terms {
                let e = ea + eb;
                if !horizon.admits(&e, basis) {
                    // terms are sorted, later eb only grow
                    break;
                }
                let slot = merged.entry(e).or_default();
                *slot = slot.add(&pa.mul(pb));
            }
        }
        Ok(FormalSeries::from_merged(basis.clone(), merged, horizon))
    }

    pub fn pow(&self, k: u32) -> Result<FormalSeries> {
        let mut acc = FormalSeries::constant(self.basis.clone(), Coefficient::one());
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    pub fn map_coeffs(&self, f: impl Fn(&XPoly) -> XPoly) -> FormalSeries {
        let terms = self.terms.iter().map(|(e, p)| (e.clone(), f(p))).filter(|(_, p)| !p.is_zero()).collect();
        FormalSeries { basis: self.basis.clone(), terms, horizon: self.horizon.clone() }
    }

    fn map_terms(&self, f: impl Fn(&Exponent, &XPoly) -> XPoly) -> FormalSeries {
        let terms = self
            .terms
            .iter()
            .map(|(e, p)| (e.clone(), f(e, p)))
            .filter(|(_, p)| !p.is_zero())
            .collect();
        FormalSeries { basis: self.basis.clone(), terms, horizon: self.horizon.clone() }
    }

    pub fn scale(&self, c: &Coefficient) -> FormalSeries {
        self.map_coeffs(|p| p.scale(c))
    }

    /// `d^k/ds^k`: multiplies each coefficient by `(-λ)^k` with `λ` kept
    /// symbolic.
    pub fn differentiate(&self, k: u32) -> FormalSeries {
        if k == 0 {
            return self.clone();
        }
        self.map_terms(|e, p| p.scale(&(-&Coefficient::from_exponent(e)).pow(k)))
    }

    /// `φ(s + h)`: multiplies each coefficient by `M(λ, h) = e^{-λh}`.
    pub fn shift(&self, h: &Q) -> FormalSeries {
        if h.is_zero() {
            return self.clone();
        }
        self.map_terms(|e, p| p.scale(&Coefficient::shift_multiplier(e, h)))
    }

    /// Drops terms beyond `t`.
    pub fn truncate(&self, t: &Exponent) -> Result<FormalSeries> {
        self.basis.check(t)?;
        let new = Horizon::Finite(t.clone());
        if new.cmp_with(&self.horizon, &self.basis) == Ordering::Greater {
            return Err(Error::BadBound { requested: t.to_string(), available: self.horizon.to_string() });
        }
        let terms = self.terms.iter().filter(|(e, _)| new.admits(e, &self.basis)).cloned().collect();
        Ok(FormalSeries { basis: self.basis.clone(), terms, horizon: new })
    }

    /// Keeps the first `k` terms, with horizon just below the next stored
    /// exponent (or the old horizon when nothing is dropped).
    pub fn prefix(&self, k: usize) -> FormalSeries {
        if k >= self.terms.len() {
            return self.clone();
        }
        let terms = self.terms[..k].to_vec();
        let horizon = match terms.last() {
            Some((e, _)) => Horizon::Finite(e.clone()),
            None => Horizon::Finite(self.terms[0].0.clone() - Exponent::integer(1)),
        };
        FormalSeries { basis: self.basis.clone(), terms, horizon }
    }

    /// `x ∂/∂x` applied coefficientwise (bivariate mode).
    pub fn x_euler(&self) -> FormalSeries {
        self.map_coeffs(XPoly::euler)
    }

    /// Replaces multipliers `e^{-μ}` by their rational value when every
    /// symbol of `μ` is `log q` and the coordinates are integers.
    pub fn resolve_log_multipliers(&self) -> FormalSeries {
        let basis = self.basis.clone();
        self.map_coeffs(|p| p.map(|c| resolve_multipliers(c, &basis)))
    }

    /// Replaces the basis by an equal one (used after deserialization so
    /// pointer-equal fast paths hit).
    pub fn with_basis(&self, basis: Arc<SymbolBasis>) -> Result<FormalSeries> {
        if *basis != *self.basis {
            return Err(Error::BasisMismatch);
        }
        Ok(FormalSeries { basis, terms: self.terms.clone(), horizon: self.horizon.clone() })
    }

    /// Exact structural equality of terms and horizon, ignoring the basis.
    pub fn same_terms(&self, other: &FormalSeries) -> bool {
        self.terms == other.terms && self.horizon == other.horizon
    }
}

fn resolve_multipliers(c: &Coefficient, basis: &SymbolBasis) -> Coefficient {
    let mut out = Coefficient::zero();
    for (m, q) in c.terms() {
        let mut rest = m.clone();
        let mut factor = q.clone();
        let resolvable = m.shift.iter().all(|(s, k)| {
            k.is_integer() && matches!(basis.value(s), Some(SymbolValue::Log(_)))
        });
        if resolvable && !m.shift.is_zero() {
            for (s, k) in m.shift.iter() {
                let Some(SymbolValue::Log(base)) = basis.value(s) else { unreachable!() };
                let e = k.to_integer();
                let e_i: i32 = (&e).try_into().expect("exponent fits in i32");
                // e^{-k log q} = q^{-k}
                factor *= num_traits::pow::Pow::pow(base.clone(), -e_i);
            }
            rest.shift = Exponent::zero();
        }
        out = &out + &Coefficient::term(rest, factor);
    }
    out
}

/// Ring operations for generic evaluation. All operands must share a basis.
impl Ring for FormalSeries {
    fn add(&self, o: &Self) -> Self {
        FormalSeries::add(self, o).expect("same basis")
    }
    fn sub(&self, o: &Self) -> Self {
        FormalSeries::sub(self, o).expect("same basis")
    }
    fn mul(&self, o: &Self) -> Self {
        FormalSeries::mul(self, o).expect("same basis")
    }
    fn neg(&self) -> Self {
        FormalSeries::neg(self)
    }
    fn vanishes(&self) -> bool {
        self.is_empty()
    }
    fn zero_like(&self) -> Self {
        FormalSeries::zero(self.basis.clone(), Horizon::Infinite)
    }
    fn one_like(&self) -> Self {
        FormalSeries::constant(self.basis.clone(), Coefficient::one())
    }
}

impl PartialEq for FormalSeries {
    fn eq(&self, other: &Self) -> bool {
        *self.basis == *other.basis && self.same_terms(other)
    }
}

impl fmt::Debug for FormalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FormalSeries({self})")
    }
}

impl fmt::Display for FormalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            f.write_str("0")?;
        }
        for (i, (e, p)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            if e.is_zero() {
                write!(f, "({p})")?;
            } else {
                write!(f, "({p})*e^(-({e})*s)")?;
            }
        }
        write!(f, " [T = {}]", self.horizon)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr};

    fn l(p: u64, k: i64) -> Exponent {
        Exponent::single(Symbol::log_prime(p), q(k))
    }

    fn zeta(n: u64, t: Option<u64>) -> FormalSeries {
        let idx: Vec<_> = (1..=n).map(|k| (k, q(1))).collect();
        FormalSeries::dirichlet(&idx, t, 128).unwrap()
    }

    #[test]
    fn single_term_and_cancellation() {
        let b = Arc::new(SymbolBasis::log_primes(&[2]));
        let s = FormalSeries::from_coefficients(
            b.clone(),
            [(l(2, 1), Coefficient::one())],
            Horizon::Finite(l(2, 10)),
        )
        .unwrap();
        assert_eq!(s.len(), 1);
        let z = FormalSeries::from_coefficients(
            b.clone(),
            [(l(2, 2), Coefficient::int(3)), (l(2, 2), Coefficient::int(-3))],
            Horizon::Finite(l(2, 10)),
        )
        .unwrap();
        assert!(z.is_empty());
        let bad = FormalSeries::from_coefficients(b, [(l(3, 1), Coefficient::one())], Horizon::Infinite);
        assert!(matches!(bad, Err(Error::BadBasis(_))));
    }

    #[test]
    fn binomial_square() {
        let b = Arc::new(SymbolBasis::one());
        let s = FormalSeries::from_coefficients(
            b,
            [(Exponent::zero(), Coefficient::one()), (Exponent::integer(1), Coefficient::one())],
            Horizon::Infinite,
        )
        .unwrap();
        let sq = s.mul(&s).unwrap();
        let coeffs: Vec<_> = sq.terms().iter().map(|(_, p)| p.as_constant().unwrap()).collect();
        assert_eq!(coeffs, vec![Coefficient::int(1), Coefficient::int(2), Coefficient::int(1)]);
        assert!(sq.horizon().is_infinite());
    }

    #[test]
    fn zeta_square_is_divisor_count() {
        let z = zeta(4, None);
        let sq = z.mul(&z).unwrap();
        // coefficient of n^{-s} is the number of divisors d(n) for n <= 4
        let want = [(1u64, 1i64), (2, 2), (3, 2), (4, 3)];
        for (n, d) in want {
            let e = Exponent::from_pairs(factorize(n).into_iter().map(|(p, k)| (Symbol::log_prime(p), q(k as i64))));
            assert_eq!(sq.coeff(&e).as_constant().unwrap(), Coefficient::int(d), "n = {n}");
        }
    }

    #[test]
    fn derivative_kills_constant_term() {
        let d = zeta(3, None).differentiate(1);
        assert_eq!(d.len(), 2);
        assert_eq!(d.terms()[0].0, l(2, 1));
        assert_eq!(d.terms()[0].1.as_constant().unwrap(), -&Coefficient::symbol(&Symbol::log_prime(2)));
        assert_eq!(d.terms()[1].1.as_constant().unwrap(), -&Coefficient::symbol(&Symbol::log_prime(3)));
        let z = zeta(3, None);
        assert_eq!(z.differentiate(0), z);
    }

    #[test]
    fn shift_round_trips_and_evaluates() {
        let b = Arc::new(SymbolBasis::log_primes(&[2]));
        let s = FormalSeries::from_coefficients(b.clone(), [(l(2, 1), Coefficient::one())], Horizon::Infinite)
            .unwrap();
        let sh = s.shift(&q(1));
        let v = sh.terms()[0].1.coeff(0).eval(&b);
        assert!(v.lo() <= &qr(1, 2) && &qr(1, 2) <= v.hi());
        assert_eq!(sh.shift(&q(-1)), s);
        assert_eq!(s.shift(&q(0)), s);
        assert_eq!(sh.resolve_log_multipliers().terms()[0].1.as_constant().unwrap(), Coefficient::constant(qr(1, 2)));
    }

    #[test]
    fn truncate_by_numeric_order() {
        let z = zeta(8, Some(8));
        let t = z.truncate(&l(5, 1)).unwrap();
        assert_eq!(t.len(), 5);
        assert!(matches!(t.truncate(&l(2, 3)), Err(Error::BadBound { .. })));
        assert_eq!(z.truncate(&l(2, 3)).unwrap(), z);
        let low = z.truncate(&Exponent::zero()).unwrap();
        assert_eq!(low.len(), 1);
    }

    #[test]
    fn product_horizon() {
        let b = Arc::new(SymbolBasis::one());
        let t = Horizon::Finite(Exponent::integer(5));
        let a = FormalSeries::from_coefficients(b.clone(), [(Exponent::integer(1), Coefficient::one())], t.clone())
            .unwrap();
        let p = a.mul(&a).unwrap();
        assert_eq!(p.horizon(), &Horizon::Finite(Exponent::integer(6)));
        let zero = FormalSeries::zero(b, Horizon::Infinite);
        assert!(a.mul(&zero).unwrap().horizon().is_infinite());
    }
}
