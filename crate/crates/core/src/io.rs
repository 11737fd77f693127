//! Series specification files and index corpora.

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;
use std::sync::Arc;

use flate2::read::GzDecoder;
use serde::{Deserialize, Serialize};

use crate::coefficient::{Coefficient, XPoly};
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::parse::{parse_xpoly, xpoly_to_string};
use crate::rational::{parse_rational, Q};
use crate::series::{FormalSeries, Horizon};
use crate::real::DEFAULT_PRECISION;
use crate::symbols::{BasisEntry, SymbolBasis};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermSpec {
    pub exponent: Exponent,
    /// Polynomial in `x` over the basis symbols.
    pub coeff: String,
    /// Extra power of `x` multiplying `coeff`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xdegree: Option<u32>,
}

/// On-disk form of a [`FormalSeries`]. A missing or null `truncation`
/// means the listed terms are the whole series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesSpec {
    pub basis: Vec<BasisEntry>,
    pub terms: Vec<TermSpec>,
    #[serde(default)]
    pub truncation: Option<Exponent>,
}

impl SeriesSpec {
    pub fn from_series(phi: &FormalSeries) -> Self {
        SeriesSpec {
            basis: phi.basis().to_spec(),
            terms: phi
                .terms()
                .iter()
                .map(|(e, p)| TermSpec { exponent: e.clone(), coeff: xpoly_to_string(p), xdegree: None })
                .collect(),
            truncation: phi.horizon().finite().cloned(),
        }
    }

    pub fn to_series(&self, precision: u32) -> Result<FormalSeries> {
        let basis = Arc::new(SymbolBasis::from_spec(&self.basis, precision)?);
        let known = basis.symbols().to_vec();
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let mut p = parse_xpoly(&t.coeff, &known)?;
            if let Some(k) = t.xdegree {
                p = p.mul(&XPoly::monomial(Coefficient::one(), k as usize));
            }
            terms.push((t.exponent.clone(), p));
        }
        let horizon = match &self.truncation {
            Some(e) => Horizon::Finite(e.clone()),
            None => Horizon::Infinite,
        };
        FormalSeries::new(basis, terms, horizon)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("series spec serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::SchemaError(e.to_string()))
    }
}

pub fn read_series(path: &Path, precision: u32) -> Result<FormalSeries> {
    let text = std::fs::read_to_string(path)?;
    SeriesSpec::from_json(&text)?.to_series(precision)
}

pub fn write_series(path: &Path, phi: &FormalSeries) -> Result<()> {
    std::fs::write(path, SeriesSpec::from_series(phi).to_json())?;
    Ok(())
}

fn open_maybe_gz(path: &Path) -> Result<Box<dyn BufRead>> {
    let mut f = File::open(path)?;
    let mut magic = [0u8; 2];
    let n = f.read(&mut magic)?;
    let f = File::open(path)?;
    if n == 2 && magic == [0x1f, 0x8b] {
        Ok(Box::new(BufReader::new(GzDecoder::new(f))))
    } else {
        Ok(Box::new(BufReader::new(f)))
    }
}

/// Parses corpus lines `n` or `n a_n`; `#` starts a comment. Coefficients
/// default to 1.
pub fn parse_corpus(reader: impl BufRead) -> Result<Vec<(u64, Q)>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut parts = body.split_whitespace();
        let n_str = parts.next().unwrap_or_default();
        let n: u64 = n_str.parse().map_err(|_| Error::SyntaxError {
            line: i + 1,
            col: 1,
            msg: format!("expected a positive index, found {n_str:?}"),
        })?;
        if n == 0 {
            return Err(Error::SyntaxError { line: i + 1, col: 1, msg: "index 0".into() });
        }
        let a = match parts.next() {
            Some(t) => parse_rational(t).map_err(|_| Error::SyntaxError {
                line: i + 1,
                col: body.find(t).unwrap_or(0) + 1,
                msg: format!("bad coefficient {t:?}"),
            })?,
            None => Q::from_integer(1.into()),
        };
        if let Some(extra) = parts.next() {
            return Err(Error::SyntaxError {
                line: i + 1,
                col: body.find(extra).unwrap_or(0) + 1,
                msg: "trailing input".into(),
            });
        }
        out.push((n, a));
    }
    Ok(out)
}

/// Reads a corpus file, transparently gunzipping.
pub fn read_corpus(path: &Path) -> Result<Vec<(u64, Q)>> {
    parse_corpus(open_maybe_gz(path)?)
}

/// `Σ a_n n^{-s}` over the corpus, exact up to the largest index.
pub fn corpus_series(entries: &[(u64, Q)], precision: u32) -> Result<FormalSeries> {
    let max = entries.iter().map(|(n, _)| *n).max();
    FormalSeries::dirichlet(entries, max, precision)
}

/// Loads either a series spec (`.json`) or a corpus file.
pub fn load_series(path: &Path, precision: Option<u32>) -> Result<FormalSeries> {
    let precision = precision.unwrap_or(DEFAULT_PRECISION);
    let is_json = path.extension().is_some_and(|e| e == "json");
    if is_json {
        read_series(path, precision)
    } else {
        corpus_series(&read_corpus(path)?, precision)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;
    use crate::symbols::Symbol;

    #[test]
    fn spec_round_trip() {
        let idx: Vec<_> = (1..=12u64).map(|k| (k, q(k as i64 % 3 + 1))).collect();
        let phi = FormalSeries::dirichlet(&idx, Some(12), 128).unwrap();
        let spec = SeriesSpec::from_series(&phi);
        let back = SeriesSpec::from_json(&spec.to_json()).unwrap().to_series(128).unwrap();
        assert_eq!(back, phi);
        assert_eq!(back.horizon(), phi.horizon());
    }

    #[test]
    fn spec_with_xdegree() {
        let text = r#"{"basis":[{"name":"lam","value_decimal_string":"1"}],
            "terms":[{"exponent":{"lam":"1"},"coeff":"2*lam","xdegree":2}],"truncation":null}"#;
        let phi = SeriesSpec::from_json(text).unwrap().to_series(64).unwrap();
        let lam = Symbol::new("lam");
        assert_eq!(phi.terms()[0].1, XPoly::monomial(Coefficient::symbol(&lam).scale(&q(2)), 2));
        assert!(phi.horizon().is_infinite());
    }

    #[test]
    fn corpus_parsing() {
        let c = parse_corpus("# zeta\n1\n2 1/2\n\n3 -4 # tail\n".as_bytes()).unwrap();
        assert_eq!(c, vec![(1, q(1)), (2, crate::rational::qr(1, 2)), (3, q(-4))]);
        match parse_corpus("1\nx 2\n".as_bytes()) {
            Err(Error::SyntaxError { line, col, .. }) => assert_eq!((line, col), (2, 1)),
            r => panic!("{r:?}"),
        }
    }
}
