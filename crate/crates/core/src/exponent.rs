//! Exponents: exact rational linear combinations of basis symbols.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::rational::{format_rational, parse_rational, Q};
use crate::symbols::Symbol;

/// `Σ c_k · sym_k` with exact rational `c_k`; zero coordinates are never
/// stored, so structural equality is value equality over independent symbols.
///
/// The derived `Ord` is structural (lexicographic over coordinates). Numeric
/// ordering lives on [`crate::SymbolBasis`].
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Exponent {
    coords: BTreeMap<Symbol, Q>,
}

impl Exponent {
    pub fn zero() -> Self {
        Exponent::default()
    }

    pub fn single(s: Symbol, c: Q) -> Self {
        let mut e = Exponent::zero();
        if !c.is_zero() {
            e.coords.insert(s, c);
        }
        e
    }

    /// `n · ONE`.
    pub fn integer(n: i64) -> Self {
        Exponent::single(Symbol::one(), Q::from_integer(n.into()))
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Symbol, Q)>) -> Self {
        let mut e = Exponent::zero();
        for (s, c) in pairs {
            e.add_coord(s, c);
        }
        e
    }

    fn add_coord(&mut self, s: Symbol, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.coords.entry(s.clone()).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.coords.remove(&s);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coord(&self, s: &Symbol) -> Q {
        self.coords.get(s).cloned().unwrap_or_else(Q::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &Q)> {
        self.coords.iter()
    }

    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.coords.keys()
    }

    pub fn scale(&self, k: &Q) -> Exponent {
        if k.is_zero() {
            return Exponent::zero();
        }
        Exponent { coords: self.coords.iter().map(|(s, c)| (s.clone(), c * k)).collect() }
    }

    pub fn to_map(&self) -> BTreeMap<String, String> {
        self.coords.iter().map(|(s, c)| (s.name().to_string(), format_rational(c))).collect()
    }

    pub fn from_map(m: &BTreeMap<String, String>) -> Result<Self, Error> {
        let mut e = Exponent::zero();
        for (k, v) in m {
            e.add_coord(Symbol::new(k), parse_rational(v)?);
        }
        Ok(e)
    }
}

impl Add for &Exponent {
    type Output = Exponent;
    fn add(self, rhs: &Exponent) -> Exponent {
        let mut out = self.clone();
        for (s, c) in &rhs.coords {
            out.add_coord(s.clone(), c.clone());
        }
        out
    }
}

impl Add for Exponent {
    type Output = Exponent;
    fn add(self, rhs: Exponent) -> Exponent {
        &self + &rhs
    }
}

impl Sub for &Exponent {
    type Output = Exponent;
    fn sub(self, rhs: &Exponent) -> Exponent {
        let mut out = self.clone();
        for (s, c) in &rhs.coords {
            out.add_coord(s.clone(), -c.clone());
        }
        out
    }
}

impl Sub for Exponent {
    type Output = Exponent;
    fn sub(self, rhs: Exponent) -> Exponent {
        &self - &rhs
    }
}

impl Neg for &Exponent {
    type Output = Exponent;
    fn neg(self) -> Exponent {
        Exponent { coords: self.coords.iter().map(|(s, c)| (s.clone(), -c.clone())).collect() }
    }
}

impl Neg for Exponent {
    type Output = Exponent;
    fn neg(self) -> Exponent {
        -&self
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.is_empty() {
            return f.write_str("0");
        }
        for (i, (s, c)) in self.coords.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if a.is_one() {
                write!(f, "{s}")?;
            } else {
                write!(f, "{}*{s}", format_rational(&a))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Exponent({self})")
    }
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_map().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let m = BTreeMap::<String, String>::deserialize(d)?;
        Exponent::from_map(&m).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr};

    #[test]
    fn canonical_form_drops_zero_coordinates() {
        let a = Exponent::from_pairs([(Symbol::new("L2"), q(2)), (Symbol::new("L3"), q(1))]);
        let b = Exponent::from_pairs([(Symbol::new("L2"), q(2))]);
        let d = &a - &b;
        assert_eq!(d, Exponent::single(Symbol::new("L3"), q(1)));
        assert!((&d - &d).is_zero());
        assert_eq!((&a - &a), Exponent::zero());
    }

    #[test]
    fn display_and_serde() {
        let a = Exponent::from_pairs([(Symbol::new("L2"), qr(-1, 2)), (Symbol::new("L3"), q(3))]);
        assert_eq!(a.to_string(), "-1/2*L2 + 3*L3");
        let js = serde_json::to_string(&a).unwrap();
        assert_eq!(js, r#"{"L2":"-1/2","L3":"3"}"#);
        let back: Exponent = serde_json::from_str(&js).unwrap();
        assert_eq!(back, a);
    }
}
