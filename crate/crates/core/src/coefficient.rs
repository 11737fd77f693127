//! Series coefficients: sparse polynomials over the rationals in the basis
//! symbols and in formal exponential multipliers `E(μ) = e^{-μ}`.
//!
//! A shift multiplier `M(λ, h) = e^{-λh}` is the multiplier `E(h·λ)`, so the
//! rule `M(λ,h)·M(λ',h) = M(λ+λ',h)` holds structurally: every monomial carries
//! exactly one multiplier whose argument adds under multiplication.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use crate::exponent::Exponent;
use crate::rational::{format_rational, Q};
use crate::real::Interval;
use crate::symbols::{Symbol, SymbolBasis};

/// `Π sym^k · e^{-shift}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial {
    pub powers: BTreeMap<Symbol, u32>,
    pub shift: Exponent,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn is_one(&self) -> bool {
        self.powers.is_empty() && self.shift.is_zero()
    }

    pub fn degree(&self) -> u32 {
        self.powers.values().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut powers = self.powers.clone();
        for (s, k) in &other.powers {
            *powers.entry(s.clone()).or_insert(0) += k;
        }
        Monomial { powers, shift: &self.shift + &other.shift }
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut powers = self.powers.clone();
        for (s, k) in &other.powers {
            let e = powers.get_mut(s)?;
            if *e < *k {
                return None;
            }
            *e -= k;
            if *e == 0 {
                powers.remove(s);
            }
        }
        Some(Monomial { powers, shift: &self.shift - &other.shift })
    }

    fn eval(&self, basis: &SymbolBasis) -> Interval {
        let p = basis.precision();
        let mut acc = Interval::one();
        for (s, k) in &self.powers {
            let v = basis.enclosure(s).unwrap_or_else(|| panic!("symbol {s} not in basis"));
            acc = acc.mul(&v.pow(*k, p), p);
        }
        if !self.shift.is_zero() {
            let mu = basis.eval(&self.shift);
            acc = acc.mul(&mu.neg().exp(p), p);
        }
        acc
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (s, k) in &self.powers {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if *k == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{k}")?;
            }
        }
        if !self.shift.is_zero() {
            if !first {
                f.write_str("*")?;
            }
            write!(f, "exp(-({}))", self.shift)?;
        }
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Coefficient {
    terms: BTreeMap<Monomial, Q>,
}

impl Coefficient {
    pub fn zero() -> Self {
        Coefficient::default()
    }

    pub fn one() -> Self {
        Coefficient::constant(Q::one())
    }

    pub fn constant(q: Q) -> Self {
        Coefficient::term(Monomial::one(), q)
    }

    pub fn int(n: i64) -> Self {
        Coefficient::constant(Q::from_integer(n.into()))
    }

    pub fn term(m: Monomial, q: Q) -> Self {
        let mut c = Coefficient::zero();
        if !q.is_zero() {
            c.terms.insert(m, q);
        }
        c
    }

    /// The symbol as a coefficient; `ONE` evaluates to the constant 1.
    pub fn symbol(s: &Symbol) -> Self {
        if s.is_one() {
            return Coefficient::one();
        }
        let mut m = Monomial::one();
        m.powers.insert(s.clone(), 1);
        Coefficient::term(m, Q::one())
    }

    /// The exponent `Σ c_k sym_k` read as a polynomial in the symbols.
    pub fn from_exponent(e: &Exponent) -> Self {
        let mut acc = Coefficient::zero();
        for (s, c) in e.iter() {
            acc = &acc + &Coefficient::symbol(s).scale(c);
        }
        acc
    }

    /// Formal multiplier `e^{-μ}`.
    pub fn multiplier(mu: Exponent) -> Self {
        Coefficient::term(Monomial { powers: BTreeMap::new(), shift: mu }, Q::one())
    }

    /// Shift multiplier `M(λ, h) = e^{-λh}`.
    pub fn shift_multiplier(lambda: &Exponent, h: &Q) -> Self {
        Coefficient::multiplier(lambda.scale(h))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|q| q.is_one())
    }

    /// The rational value if this coefficient has no symbols or multipliers.
    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Q::zero()),
            1 => {
                let (m, q) = self.terms.iter().next().unwrap();
                m.is_one().then(|| q.clone())
            }
            _ => None,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn has_multipliers(&self) -> bool {
        self.terms.keys().any(|m| !m.shift.is_zero())
    }

    /// Symbols appearing as polynomial variables or inside multipliers.
    pub fn symbols(&self) -> Vec<Symbol> {
        let mut v: Vec<Symbol> = Vec::new();
        for m in self.terms.keys() {
            for s in m.powers.keys().chain(m.shift.symbols()) {
                if !v.contains(s) {
                    v.push(s.clone());
                }
            }
        }
        v.sort();
        v
    }

    fn add_term(&mut self, m: Monomial, q: Q) {
        if q.is_zero() {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert_with(Q::zero);
        *entry += q;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn scale(&self, q: &Q) -> Coefficient {
        if q.is_zero() {
            return Coefficient::zero();
        }
        Coefficient { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * q)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Coefficient {
        Coefficient { terms: self.terms.iter().map(|(n, c)| (n.mul(m), c.clone())).collect() }
    }

    pub fn pow(&self, k: u32) -> Coefficient {
        let mut acc = Coefficient::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Certified numeric enclosure at the basis precision.
    pub fn eval(&self, basis: &SymbolBasis) -> Interval {
        let p = basis.precision();
        let mut acc = Interval::zero();
        for (m, q) in &self.terms {
            acc = acc.add(&m.eval(basis).scale(q, p), p);
        }
        acc
    }

    /// Ring homomorphism to the rationals given images of the symbols and of
    /// the multipliers. Returns `None` if some multiplier has no image.
    pub fn specialize(
        &self,
        sym: &dyn Fn(&Symbol) -> Q,
        mult: &dyn Fn(&Exponent) -> Option<Q>,
    ) -> Option<Q> {
        let mut acc = Q::zero();
        for (m, q) in &self.terms {
            let mut v = q.clone();
            for (s, k) in &m.powers {
                v *= num_traits::pow(sym(s), *k as usize);
            }
            if !m.shift.is_zero() {
                v *= mult(&m.shift)?;
            }
            acc += v;
        }
        Some(acc)
    }

    /// Largest monomial dividing every term (symbol powers only).
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else { return Monomial::one() };
        let mut powers = first.powers.clone();
        for m in it {
            powers.retain(|s, k| {
                let other = m.powers.get(s).copied().unwrap_or(0);
                *k = (*k).min(other);
                *k > 0
            });
        }
        Monomial { powers, shift: Exponent::zero() }
    }

    /// Exact division by a monomial dividing every term.
    pub fn div_monomial(&self, d: &Monomial) -> Option<Coefficient> {
        let mut out = Coefficient::zero();
        for (m, q) in &self.terms {
            out.terms.insert(m.div(d)?, q.clone());
        }
        Some(out)
    }

    /// Leading rational coefficient under the structural monomial order.
    pub fn leading_rational(&self) -> Option<&Q> {
        self.terms.values().next_back()
    }
}

impl Add for &Coefficient {
    type Output = Coefficient;
    fn add(self, rhs: &Coefficient) -> Coefficient {
        let mut out = self.clone();
        for (m, q) in &rhs.terms {
            out.add_term(m.clone(), q.clone());
        }
        out
    }
}

impl Sub for &Coefficient {
    type Output = Coefficient;
    fn sub(self, rhs: &Coefficient) -> Coefficient {
        let mut out = self.clone();
        for (m, q) in &rhs.terms {
            out.add_term(m.clone(), -q.clone());
        }
        out
    }
}

impl Neg for &Coefficient {
    type Output = Coefficient;
    fn neg(self) -> Coefficient {
        self.scale(&-Q::one())
    }
}

impl Mul for &Coefficient {
    type Output = Coefficient;
    fn mul(self, rhs: &Coefficient) -> Coefficient {
        if self.is_zero() || rhs.is_zero() {
            return Coefficient::zero();
        }
        if let Some(c) = self.as_constant() {
            return rhs.scale(&c);
        }
        if let Some(c) = rhs.as_constant() {
            return self.scale(&c);
        }
        let mut out = Coefficient::zero();
        for (a, p) in &self.terms {
            for (b, q) in &rhs.terms {
                out.add_term(a.mul(b), p * q);
            }
        }
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Coefficient {
            type Output = Coefficient;
            fn $m(self, rhs: Coefficient) -> Coefficient {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, q)) in self.terms.iter().enumerate() {
            let neg = q.is_negative();
            let a = q.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if m.is_one() {
                f.write_str(&format_rational(&a))?;
            } else if a.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", format_rational(&a))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Coefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Coefficient({self})")
    }
}

/// Univariate polynomial in the auxiliary variable `x` with [`Coefficient`]
/// entries; index `i` holds the coefficient of `x^i`. Trailing zeros are
/// trimmed so the zero polynomial is the empty vector.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct XPoly {
    coeffs: Vec<Coefficient>,
}

impl XPoly {
    pub fn zero() -> Self {
        XPoly::default()
    }

    pub fn constant(c: Coefficient) -> Self {
        XPoly::from_coeffs(vec![c])
    }

    pub fn from_coeffs(coeffs: Vec<Coefficient>) -> Self {
        let mut p = XPoly { coeffs };
        p.trim();
        p
    }

    /// `c · x^k`.
    pub fn monomial(c: Coefficient, k: usize) -> Self {
        let mut v = vec![Coefficient::zero(); k + 1];
        v[k] = c;
        XPoly::from_coeffs(v)
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(Coefficient::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Exact degree in `x`; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Coefficient] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Coefficient {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    /// The `x^0` coefficient when the polynomial is constant in `x`.
    pub fn as_constant(&self) -> Option<Coefficient> {
        match self.coeffs.len() {
            0 => Some(Coefficient::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    pub fn map(&self, f: impl Fn(&Coefficient) -> Coefficient) -> XPoly {
        XPoly::from_coeffs(self.coeffs.iter().map(f).collect())
    }

    pub fn scale(&self, c: &Coefficient) -> XPoly {
        self.map(|a| a * c)
    }

    pub fn add(&self, other: &XPoly) -> XPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        XPoly::from_coeffs((0..n).map(|i| &self.coeff(i) + &other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &XPoly) -> XPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        XPoly::from_coeffs((0..n).map(|i| &self.coeff(i) - &other.coeff(i)).collect())
    }

    pub fn neg(&self) -> XPoly {
        self.map(|a| -a)
    }

    pub fn mul(&self, other: &XPoly) -> XPoly {
        if self.is_zero() || other.is_zero() {
            return XPoly::zero();
        }
        let mut v = vec![Coefficient::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                v[i + j] = &v[i + j] + &(a * b);
            }
        }
        XPoly::from_coeffs(v)
    }

    /// `d/dx`.
    pub fn derivative(&self) -> XPoly {
        XPoly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.scale(&Q::from_integer((i as i64).into())))
                .collect(),
        )
    }

    /// The Euler operator `x · d/dx`.
    pub fn euler(&self) -> XPoly {
        XPoly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| c.scale(&Q::from_integer((i as i64).into())))
                .collect(),
        )
    }
}

impl fmt::Display for XPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(c) = self.as_constant() {
            return write!(f, "{c}");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*x")?,
                _ => write!(f, "({c})*x^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for XPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "XPoly({self})")
    }
}
