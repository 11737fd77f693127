//! Named positive generators for exponents, with certified numeric values.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::exponent::Exponent;
use crate::rational::{format_rational, parse_rational, Q};
use crate::real::{ln_interval, Interval, DEFAULT_PRECISION};

/// Name of the distinguished generator with value exactly 1. Integer
/// exponents of ordinary power series (`x = e^{-s}`) live over it.
pub const ONE: &str = "ONE";

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn one() -> Self {
        Symbol::new(ONE)
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        &*self.0 == ONE
    }

    /// Symbol conventionally used for `log p`.
    pub fn log_prime(p: u64) -> Self {
        Symbol::new(&format!("L{p}"))
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Serialize for Symbol {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Symbol {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(Symbol::new(&s))
    }
}

/// Exact description of a generator's real value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SymbolValue {
    /// A rational value.
    Exact(Q),
    /// `ln(q)` for a rational `q > 1`.
    Log(Q),
}

impl SymbolValue {
    /// Parses `"log(q)"`/`"ln(q)"` or a rational/decimal literal.
    pub fn parse(s: &str) -> Result<Self, Error> {
        let t = s.trim();
        for prefix in ["log(", "ln("] {
            if let Some(rest) = t.strip_prefix(prefix) {
                let inner = rest
                    .strip_suffix(')')
                    .ok_or_else(|| Error::BadBasis(format!("malformed value {s:?}")))?;
                return Ok(SymbolValue::Log(parse_rational(inner)?));
            }
        }
        Ok(SymbolValue::Exact(parse_rational(t)?))
    }

    pub fn render(&self) -> String {
        match self {
            SymbolValue::Exact(q) => format_rational(q),
            SymbolValue::Log(q) => format!("log({})", format_rational(q)),
        }
    }

    pub fn enclosure(&self, prec: u32) -> Interval {
        match self {
            SymbolValue::Exact(q) => Interval::exact(q.clone()),
            SymbolValue::Log(q) => ln_interval(q, prec),
        }
    }

    fn is_positive(&self) -> bool {
        match self {
            SymbolValue::Exact(q) => q.is_positive(),
            SymbolValue::Log(q) => *q > Q::one(),
        }
    }
}

/// Raised when two exponents cannot be ordered at the working precision.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("precision tie between {a} and {b} at {precision} bits")]
pub struct PrecisionTie {
    pub a: String,
    pub b: String,
    pub precision: u32,
}

/// An ordered list of positive generators with enclosures at precision `P`.
///
/// Rational linear independence of the generators is assumed, never checked;
/// `independence_assumed` records that assumption in serialized output.
#[derive(Clone)]
pub struct SymbolBasis {
    symbols: Vec<Symbol>,
    values: Vec<SymbolValue>,
    enclosures: Vec<Interval>,
    approx: Vec<f64>,
    index: HashMap<Symbol, usize>,
    precision: u32,
    pub independence_assumed: bool,
}

impl PartialEq for SymbolBasis {
    fn eq(&self, other: &Self) -> bool {
        self.symbols == other.symbols && self.values == other.values
    }
}

impl fmt::Debug for SymbolBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (s, v) in self.symbols.iter().zip(&self.values) {
            m.entry(s, &v.render());
        }
        m.finish()
    }
}

impl SymbolBasis {
    pub fn new(entries: Vec<(Symbol, SymbolValue)>, precision: u32) -> Result<Self, Error> {
        let mut index = HashMap::new();
        let mut symbols = Vec::new();
        let mut values = Vec::new();
        for (i, (s, v)) in entries.into_iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::BadBasis(format!("duplicate symbol {s}")));
            }
            if !v.is_positive() {
                return Err(Error::BadBasis(format!("symbol {s} must be positive")));
            }
            if s.is_one() && v != SymbolValue::Exact(Q::one()) {
                return Err(Error::BadBasis(format!("{ONE} must have value 1")));
            }
            symbols.push(s);
            values.push(v);
        }
        let enclosures: Vec<Interval> = values.iter().map(|v| v.enclosure(precision)).collect();
        let approx = enclosures.iter().map(Interval::to_f64).collect();
        Ok(SymbolBasis {
            symbols,
            values,
            enclosures,
            approx,
            index,
            precision,
            independence_assumed: true,
        })
    }

    /// Basis `{L_p = log p}` over the given primes.
    pub fn log_primes(primes: &[u64]) -> Self {
        let entries = primes
            .iter()
            .map(|&p| (Symbol::log_prime(p), SymbolValue::Log(Q::from_integer(p.into()))))
            .collect();
        SymbolBasis::new(entries, DEFAULT_PRECISION).expect("primes are distinct and > 1")
    }

    /// Basis consisting of the single symbol `ONE`.
    pub fn one() -> Self {
        SymbolBasis::new(vec![(Symbol::one(), SymbolValue::Exact(Q::one()))], DEFAULT_PRECISION)
            .unwrap()
    }

    /// Convenience constructor from `(name, value-string)` pairs.
    pub fn from_pairs(pairs: &[(&str, &str)]) -> Result<Self, Error> {
        let entries = pairs
            .iter()
            .map(|(n, v)| Ok((Symbol::new(n), SymbolValue::parse(v)?)))
            .collect::<Result<Vec<_>, Error>>()?;
        SymbolBasis::new(entries, DEFAULT_PRECISION)
    }

    pub fn with_precision(&self, precision: u32) -> Self {
        let entries = self.symbols.iter().cloned().zip(self.values.iter().cloned()).collect();
        let mut b = SymbolBasis::new(entries, precision).expect("already validated");
        b.independence_assumed = self.independence_assumed;
        b
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn values(&self) -> &[SymbolValue] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn position(&self, s: &Symbol) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn contains(&self, s: &Symbol) -> bool {
        self.index.contains_key(s)
    }

    pub fn value(&self, s: &Symbol) -> Option<&SymbolValue> {
        self.position(s).map(|i| &self.values[i])
    }

    pub fn enclosure(&self, s: &Symbol) -> Option<&Interval> {
        self.position(s).map(|i| &self.enclosures[i])
    }

    /// Returns a basis extended by any of `extra` not already present.
    pub fn extended(&self, extra: &[(Symbol, SymbolValue)]) -> Result<Self, Error> {
        let mut entries: Vec<_> =
            self.symbols.iter().cloned().zip(self.values.iter().cloned()).collect();
        for (s, v) in extra {
            match self.value(s) {
                Some(old) if old != v => {
                    return Err(Error::BadBasis(format!("conflicting value for {s}")))
                }
                Some(_) => {}
                None => entries.push((s.clone(), v.clone())),
            }
        }
        SymbolBasis::new(entries, self.precision)
    }

    /// Fails with `BadBasis` if the exponent mentions an unknown symbol.
    pub fn check(&self, e: &Exponent) -> Result<(), Error> {
        for s in e.symbols() {
            if !self.contains(s) {
                return Err(Error::BadBasis(format!("unknown symbol {s}")));
            }
        }
        Ok(())
    }

    /// Certified enclosure of the exponent's real value.
    pub fn eval(&self, e: &Exponent) -> Interval {
        let mut acc = Interval::zero();
        for (s, c) in e.iter() {
            let v = self.enclosure(s).unwrap_or_else(|| panic!("symbol {s} not in basis"));
            acc = acc.add(&v.scale(c, self.precision), self.precision);
        }
        acc
    }

    fn approx(&self, e: &Exponent) -> Option<(f64, f64)> {
        let mut v = 0.0f64;
        let mut mag = 0.0f64;
        for (s, c) in e.iter() {
            let i = self.position(s)?;
            let cf = c.to_f64()?;
            if !cf.is_finite() {
                return None;
            }
            let t = cf * self.approx[i];
            v += t;
            mag += t.abs();
        }
        Some((v, mag * 1e-12 + 1e-300))
    }

    /// Numeric ordering of two exponents at the basis precision.
    pub fn try_cmp(&self, a: &Exponent, b: &Exponent) -> Result<Ordering, PrecisionTie> {
        if a == b {
            return Ok(Ordering::Equal);
        }
        let d = a - b;
        if let Some((v, err)) = self.approx(&d) {
            if v > err {
                return Ok(Ordering::Greater);
            }
            if v < -err {
                return Ok(Ordering::Less);
            }
        }
        let i = self.eval(&d);
        if i.is_positive() {
            Ok(Ordering::Greater)
        } else if i.is_negative() {
            Ok(Ordering::Less)
        } else {
            Err(PrecisionTie { a: a.to_string(), b: b.to_string(), precision: self.precision })
        }
    }

    /// Total order used for sorting: numeric, falling back to the structural
    /// order of the coordinates on a precision tie (logged as a diagnostic).
    pub fn cmp(&self, a: &Exponent, b: &Exponent) -> Ordering {
        match self.try_cmp(a, b) {
            Ok(o) => o,
            Err(tie) => {
                log::warn!("{tie}; falling back to lexicographic order");
                a.cmp(b)
            }
        }
    }

    pub fn min<'a>(&self, a: &'a Exponent, b: &'a Exponent) -> &'a Exponent {
        if self.cmp(a, b) == Ordering::Greater {
            b
        } else {
            a
        }
    }

    pub fn is_zero_value(&self, e: &Exponent) -> bool {
        e.is_zero()
    }

    pub fn sign(&self, e: &Exponent) -> Ordering {
        self.cmp(e, &Exponent::zero())
    }

    /// Absolute value as an exponent (negated when numerically negative).
    pub fn abs(&self, e: &Exponent) -> Exponent {
        if self.sign(e) == Ordering::Less {
            -e
        } else {
            e.clone()
        }
    }

    pub fn to_spec(&self) -> Vec<BasisEntry> {
        self.symbols
            .iter()
            .zip(&self.values)
            .map(|(s, v)| BasisEntry { name: s.name().to_string(), value: v.render() })
            .collect()
    }

    pub fn from_spec(entries: &[BasisEntry], precision: u32) -> Result<Self, Error> {
        let entries = entries
            .iter()
            .map(|e| Ok((Symbol::new(&e.name), SymbolValue::parse(&e.value)?)))
            .collect::<Result<Vec<_>, Error>>()?;
        SymbolBasis::new(entries, precision)
    }
}

/// Serialized form of one basis generator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisEntry {
    pub name: String,
    #[serde(alias = "value_decimal_string")]
    pub value: String,
}

impl Default for SymbolBasis {
    fn default() -> Self {
        SymbolBasis::new(vec![], DEFAULT_PRECISION).unwrap()
    }
}
