//! Integer-linear structure of exponent systems: Hermite normal form bases,
//! membership, prime support of index sets, multi-index rewriting and gap
//! ratios.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::coefficient::XPoly;
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::numtheory::factorize_limited;
use crate::rational::{format_rational, lcm_denominators, Q};
use crate::real::{decimal_string, Interval};
use crate::series::FormalSeries;
use crate::symbols::{Symbol, SymbolBasis};

/// Row-style Hermite normal form of an integer matrix: returns the nonzero
/// rows, upper echelon with positive pivots and entries above each pivot
/// reduced into `[0, pivot)`.
pub fn hermite_normal_form(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let n = a.len();
    let m = a.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..m {
        if r == n {
            break;
        }
        loop {
            let Some(piv) = (r..n)
                .filter(|&i| !a[i][c].is_zero())
                .min_by(|&i, &j| a[i][c].abs().cmp(&a[j][c].abs()))
            else {
                break;
            };
            a.swap(r, piv);
            let mut done = true;
            for i in r + 1..n {
                if !a[i][c].is_zero() {
                    let q = a[i][c].div_floor(&a[r][c]);
                    let sub: Vec<BigInt> = a[r].iter().map(|x| x * &q).collect();
                    for (x, s) in a[i].iter_mut().zip(sub) {
                        *x -= s;
                    }
                    if !a[i][c].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if r < n && !a[r][c].is_zero() {
            if a[r][c].is_negative() {
                for x in a[r].iter_mut() {
                    *x = -x.clone();
                }
            }
            for i in 0..r {
                let q = a[i][c].div_floor(&a[r][c]);
                if !q.is_zero() {
                    let sub: Vec<BigInt> = a[r].iter().map(|x| x * &q).collect();
                    for (x, s) in a[i].iter_mut().zip(sub) {
                        *x -= s;
                    }
                }
            }
            r += 1;
        }
    }
    a.truncate(r);
    a
}

/// A basis `ω_1..ω_α` of the integer lattice spanned by a list of exponents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeBasis {
    /// Coordinate order used for the integer matrix.
    pub symbols: Vec<Symbol>,
    /// Common denominator cleared before the HNF.
    #[serde(with = "crate::rational::serde_bigint")]
    pub denominator: BigInt,
    /// Generators, numerically positive.
    pub generators: Vec<Exponent>,
    /// Row `i` expresses input `i` over the generators.
    #[serde(with = "crate::rational::serde_bigint_matrix")]
    pub change_of_basis: Vec<Vec<BigInt>>,
    #[serde(skip)]
    hnf: Vec<Vec<BigInt>>,
    #[serde(skip)]
    signs: Vec<bool>,
}

impl LatticeBasis {
    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    fn integer_row(&self, e: &Exponent) -> Option<Vec<BigInt>> {
        let mut row = Vec::with_capacity(self.symbols.len());
        for s in &self.symbols {
            let v = e.coord(s) * Q::from_integer(self.denominator.clone());
            if !v.is_integer() {
                return None;
            }
            row.push(v.to_integer());
        }
        if e.symbols().any(|s| !self.symbols.contains(s)) {
            return None;
        }
        Some(row)
    }

    /// Integer coordinates of `e` over the generators, if it lies in the
    /// lattice.
    pub fn express(&self, e: &Exponent) -> Option<Vec<BigInt>> {
        let mut v = self.integer_row(e)?;
        let mut out = Vec::with_capacity(self.hnf.len());
        for (j, h) in self.hnf.iter().enumerate() {
            let p = h.iter().position(|x| !x.is_zero()).expect("nonzero row");
            let (q, r) = v[p].div_rem(&h[p]);
            if !r.is_zero() {
                return None;
            }
            for (x, y) in v.iter_mut().zip(h) {
                *x -= &q * y;
            }
            out.push(if self.signs[j] { -q } else { q });
        }
        v.iter().all(Zero::is_zero).then_some(out)
    }

    /// `Σ x_j ω_j`.
    pub fn reconstruct(&self, x: &[BigInt]) -> Exponent {
        let mut e = Exponent::zero();
        for (g, k) in self.generators.iter().zip(x) {
            e = &e + &g.scale(&Q::from_integer(k.clone()));
        }
        e
    }

    /// Generators given as exponents; used to restore skipped fields after
    /// deserialization.
    pub fn rebuild(&self, basis: &SymbolBasis) -> LatticeBasis {
        let mut b = integer_basis(&self.generators, basis);
        b.change_of_basis = self.change_of_basis.clone();
        b
    }
}

/// HNF basis of the lattice generated by `exponents` (coordinates are
/// scaled by the LCM of all denominators, then reduced over the integers).
pub fn integer_basis(exponents: &[Exponent], basis: &SymbolBasis) -> LatticeBasis {
    let mut symbols: Vec<Symbol> = Vec::new();
    for s in basis.symbols() {
        if exponents.iter().any(|e| !e.coord(s).is_zero()) {
            symbols.push(s.clone());
        }
    }
    for e in exponents {
        for s in e.symbols() {
            if !symbols.contains(s) {
                symbols.push(s.clone());
            }
        }
    }
    let denominator = lcm_denominators(exponents.iter().flat_map(|e| e.iter().map(|(_, c)| c)));
    let scale = Q::from_integer(denominator.clone());
    let rows: Vec<Vec<BigInt>> = exponents
        .iter()
        .map(|e| symbols.iter().map(|s| (e.coord(s) * &scale).to_integer()).collect())
        .collect();
    let hnf = hermite_normal_form(&rows);
    let mut generators = Vec::new();
    let mut signs = Vec::new();
    for h in &hnf {
        let g = Exponent::from_pairs(
            symbols.iter().zip(h).map(|(s, k)| (s.clone(), Q::new(k.clone(), denominator.clone()))),
        );
        let negative = g.symbols().all(|s| basis.contains(s)) && basis.sign(&g).is_lt();
        signs.push(negative);
        generators.push(if negative { -g } else { g });
    }
    let mut lb = LatticeBasis { symbols, denominator, generators, change_of_basis: Vec::new(), hnf, signs };
    lb.change_of_basis =
        exponents.iter().map(|e| lb.express(e).expect("inputs lie in their own lattice")).collect();
    lb
}

/// Membership query returning an error value for non-members.
pub fn express(e: &Exponent, b: &LatticeBasis) -> Result<Vec<BigInt>> {
    b.express(e).ok_or_else(|| Error::NotInLattice(e.to_string()))
}

/// Prime factors of indices with nonzero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeSupport {
    pub primes: BTreeSet<u64>,
    pub sample_size: usize,
    /// Indices whose factorization needed trial divisors above the limit.
    pub unfactored: Vec<u64>,
}

impl PrimeSupport {
    pub fn require_complete(&self) -> Result<()> {
        match self.unfactored.first() {
            Some(&n) => Err(Error::FactorLimitExceeded(n)),
            None => Ok(()),
        }
    }
}

/// Trial-division factoring of every index, with divisors up to `limit`.
pub fn prime_support(indices: impl IntoIterator<Item = u64>, limit: u64) -> Result<PrimeSupport> {
    let mut ps = PrimeSupport::default();
    for n in indices {
        if n == 0 {
            return Err(Error::DegenerateInput("index 0".into()));
        }
        ps.sample_size += 1;
        match factorize_limited(n, limit) {
            Some(f) => ps.primes.extend(f.into_iter().map(|(p, _)| p)),
            None => {
                log::warn!("index {n} exceeds factoring limit {limit}");
                ps.unfactored.push(n);
            }
        }
    }
    Ok(ps)
}

/// Rewrites `φ` as a power series in `e^{-ω_j s}`: multi-index → coefficient.
pub fn omega_rewrite(phi: &FormalSeries, b: &LatticeBasis) -> Result<BTreeMap<Vec<i64>, XPoly>> {
    let mut out = BTreeMap::new();
    for (e, p) in phi.terms() {
        let x = express(e, b)?;
        let idx = x
            .iter()
            .map(|k| k.to_i64().ok_or_else(|| Error::NotInLattice(format!("{e} (index overflow)"))))
            .collect::<Result<Vec<_>>>()?;
        out.insert(idx, p.clone());
    }
    Ok(out)
}

/// A ratio `λ_i / λ_{i-1}`: exact when the two exponents are proportional,
/// otherwise a certified enclosure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ratio {
    #[serde(with = "crate::rational::serde_opt_q")]
    pub exact: Option<Q>,
    #[serde(with = "crate::rational::serde_q")]
    pub lo: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub hi: Q,
}

impl Ratio {
    fn exact(q: Q) -> Self {
        Ratio { exact: Some(q.clone()), lo: q.clone(), hi: q }
    }

    pub fn decimal(&self) -> String {
        match &self.exact {
            Some(q) if q.is_integer() => format_rational(q),
            _ => decimal_string(&((&self.lo + &self.hi) / Q::from_integer(2.into())), 12),
        }
    }

    pub fn to_f64(&self) -> f64 {
        Interval::new(self.lo.clone(), self.hi.clone()).to_f64()
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(q) => f.write_str(&format_rational(q)),
            None => f.write_str(&self.decimal()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapRatios {
    /// Number of leading nonpositive exponents skipped.
    pub dropped: usize,
    /// `ratios[j]` is `λ_{d+j+1} / λ_{d+j}` where `d = dropped`.
    pub ratios: Vec<Ratio>,
    /// Running maximum of the lower ends.
    #[serde(with = "crate::rational::serde_q_vec")]
    pub envelope: Vec<Q>,
}

fn proportional(a: &Exponent, b: &Exponent) -> Option<Q> {
    let (s, cb) = b.iter().next()?;
    let r = a.coord(s) / cb;
    (&b.scale(&r) == a).then_some(r)
}

/// Ratios of consecutive positive exponents.
pub fn gap_ratios(exponents: &[Exponent], basis: &SymbolBasis) -> GapRatios {
    let p = basis.precision();
    let dropped = exponents.iter().take_while(|e| basis.sign(e).is_le()).count();
    let pos = &exponents[dropped..];
    let mut ratios = Vec::new();
    let mut envelope: Vec<Q> = Vec::new();
    for w in pos.windows(2) {
        let r = match proportional(&w[1], &w[0]) {
            Some(q) => Ratio::exact(q),
            None => {
                let num = basis.eval(&w[1]);
                let den = basis.eval(&w[0]).recip(p).expect("positive exponent");
                let i = num.mul(&den, p);
                Ratio { exact: None, lo: i.lo().clone(), hi: i.hi().clone() }
            }
        };
        let m = match envelope.last() {
            Some(prev) if prev > &r.lo => prev.clone(),
            _ => r.lo.clone(),
        };
        envelope.push(m);
        ratios.push(r);
    }
    GapRatios { dropped, ratios, envelope }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn e(pairs: &[(&str, i64)]) -> Exponent {
        Exponent::from_pairs(pairs.iter().map(|(s, c)| (Symbol::new(s), q(*c))))
    }

    #[test]
    fn rank_two_from_four() {
        let b = SymbolBasis::log_primes(&[2, 3]);
        let xs = [e(&[("L2", 1)]), e(&[("L3", 1)]), e(&[("L2", 1), ("L3", 1)]), e(&[("L2", 2), ("L3", 1)])];
        let lb = integer_basis(&xs, &b);
        assert_eq!(lb.rank(), 2);
        for (x, c) in xs.iter().zip(&lb.change_of_basis) {
            assert_eq!(&lb.reconstruct(c), x);
        }
        let twelve = e(&[("L2", 2), ("L3", 1)]);
        assert_eq!(lb.reconstruct(&express(&twelve, &lb).unwrap()), twelve);
        assert!(b.sign(&lb.generators[0]).is_gt() && b.sign(&lb.generators[1]).is_gt());
    }

    #[test]
    fn gcd_generator_and_half_integers() {
        let b = SymbolBasis::one();
        let lb = integer_basis(&[Exponent::integer(2), Exponent::integer(3)], &b);
        assert_eq!(lb.generators, vec![Exponent::integer(1)]);
        let b2 = SymbolBasis::log_primes(&[2]);
        let l2 = integer_basis(&[e(&[("L2", 1)])], &b2);
        let half = Exponent::single(Symbol::new("L2"), crate::rational::qr(1, 2));
        assert!(matches!(express(&half, &l2), Err(Error::NotInLattice(_))));
        assert_eq!(express(&e(&[("L2", 5)]), &l2).unwrap(), vec![BigInt::from(5)]);
        assert_eq!(integer_basis(&[], &b).rank(), 0);
    }

    #[test]
    fn prime_supports() {
        let ps = prime_support([1, 2, 3, 4, 6, 12], 1000).unwrap();
        assert_eq!(ps.primes.into_iter().collect::<Vec<_>>(), vec![2, 3]);
        let ps = prime_support(1..=20, 1000).unwrap();
        assert_eq!(ps.primes.len(), 8);
        assert!(prime_support([], 10).unwrap().primes.is_empty());
        let big = prime_support([1_000_003 * 1_000_033], 100).unwrap();
        assert!(matches!(big.require_complete(), Err(Error::FactorLimitExceeded(_))));
    }

    #[test]
    fn gap_ratios_of_squares_of_exponents() {
        let b = SymbolBasis::one();
        let xs: Vec<_> = (1..=6).map(|i: i64| Exponent::integer(1 << (i * i).min(62))).collect();
        let g = gap_ratios(&xs, &b);
        let vals: Vec<_> = g.ratios.iter().map(|r| r.exact.clone().unwrap()).collect();
        assert_eq!(vals, vec![q(8), q(32), q(128), q(512), q(2048)]);
        let lin: Vec<_> = (0..5).map(Exponent::integer).collect();
        assert_eq!(gap_ratios(&lin, &b).dropped, 1);
    }
}
