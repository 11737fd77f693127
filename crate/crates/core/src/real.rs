//! Outward-rounded interval arithmetic over dyadic rationals.
//!
//! Every endpoint is a rational whose denominator divides `2^prec`; lower
//! endpoints are rounded toward negative infinity and upper endpoints toward
//! positive infinity, so the true value always lies inside the interval.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Default working precision in bits.
pub const DEFAULT_PRECISION: u32 = 128;

const GUARD_BITS: u32 = 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: BigRational,
    hi: BigRational,
}

fn pow2(bits: u32) -> BigInt {
    BigInt::one() << bits as usize
}

fn floor_scaled(x: &BigRational, bits: u32) -> BigInt {
    (x.numer() << bits as usize).div_floor(x.denom())
}

fn ceil_scaled(x: &BigRational, bits: u32) -> BigInt {
    -((-(x.numer() << bits as usize)).div_floor(x.denom()))
}

fn round_down(x: &BigRational, bits: u32) -> BigRational {
    if x.denom().bits() <= bits as u64 && is_dyadic(x) {
        return x.clone();
    }
    BigRational::new(floor_scaled(x, bits), pow2(bits))
}

fn round_up(x: &BigRational, bits: u32) -> BigRational {
    if x.denom().bits() <= bits as u64 && is_dyadic(x) {
        return x.clone();
    }
    BigRational::new(ceil_scaled(x, bits), pow2(bits))
}

fn is_dyadic(x: &BigRational) -> bool {
    let d = x.denom();
    let tz = d.trailing_zeros().unwrap_or(0);
    (d >> tz as usize).is_one()
}

impl Interval {
    pub fn exact(x: BigRational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn from_int(n: i64) -> Self {
        Self::exact(BigRational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// Builds an interval from bounds; panics if `lo > hi`.
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "inverted interval");
        Interval { lo, hi }
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(2.into())
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.hi.is_negative()
    }

    /// Certain ordering against another interval, `None` when they overlap.
    pub fn certain_cmp(&self, other: &Interval) -> Option<Ordering> {
        if self.is_exact() && other.is_exact() && self.lo == other.lo {
            Some(Ordering::Equal)
        } else if self.hi < other.lo {
            Some(Ordering::Less)
        } else if self.lo > other.hi {
            Some(Ordering::Greater)
        } else {
            None
        }
    }

    pub fn round(&self, prec: u32) -> Self {
        Interval {
            lo: round_down(&self.lo, prec),
            hi: round_up(&self.hi, prec),
        }
    }

    pub fn add(&self, other: &Interval, prec: u32) -> Self {
        Interval {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
        .round(prec)
    }

    pub fn sub(&self, other: &Interval, prec: u32) -> Self {
        Interval {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
        }
        .round(prec)
    }

    pub fn neg(&self) -> Self {
        Interval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    pub fn abs(&self) -> Self {
        if self.lo.is_negative() && self.hi.is_positive() {
            let m = if -&self.lo > self.hi { -&self.lo } else { self.hi.clone() };
            Interval { lo: BigRational::zero(), hi: m }
        } else if self.hi.is_negative() || (self.hi.is_zero() && self.lo.is_negative()) {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn mul(&self, other: &Interval, prec: u32) -> Self {
        let cands = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let lo = cands.iter().min().unwrap().clone();
        let hi = cands.iter().max().unwrap().clone();
        Interval { lo, hi }.round(prec)
    }

    pub fn scale(&self, q: &BigRational, prec: u32) -> Self {
        let a = &self.lo * q;
        let b = &self.hi * q;
        if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
        .round(prec)
    }

    pub fn pow(&self, e: u32, prec: u32) -> Self {
        let mut acc = Interval::one();
        for _ in 0..e {
            acc = acc.mul(self, prec);
        }
        if e % 2 == 0 && self.contains_zero() {
            // even powers are non-negative
            acc.lo = acc.lo.max(BigRational::zero());
        }
        acc
    }

    /// Reciprocal; `None` if the interval contains zero.
    pub fn recip(&self, prec: u32) -> Option<Self> {
        if self.contains_zero() {
            return None;
        }
        Some(Interval { lo: self.hi.recip(), hi: self.lo.recip() }.round(prec))
    }

    pub fn exp(&self, prec: u32) -> Self {
        let (lo, _) = exp_bounds(&self.lo, prec);
        let (_, hi) = exp_bounds(&self.hi, prec);
        Interval { lo, hi }
    }

    /// Natural logarithm; `None` unless the interval is strictly positive.
    pub fn ln(&self, prec: u32) -> Option<Self> {
        if !self.lo.is_positive() {
            return None;
        }
        let (lo, _) = ln_bounds(&self.lo, prec);
        let (_, hi) = ln_bounds(&self.hi, prec);
        Some(Interval { lo, hi })
    }

    pub fn to_f64(&self) -> f64 {
        self.midpoint().to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal rendering of the midpoint with `digits` fractional digits,
    /// truncated toward zero. Deterministic across platforms.
    pub fn to_decimal(&self, digits: usize) -> String {
        decimal_string(&self.midpoint(), digits)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", decimal_string(&self.lo, 12), decimal_string(&self.hi, 12))
    }
}

/// Renders a rational in fixed-point decimal, truncated toward zero.
pub fn decimal_string(x: &BigRational, digits: usize) -> String {
    let neg = x.is_negative();
    let a = x.abs();
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = (a.numer() * &scale) / a.denom();
    let int_part = &scaled / &scale;
    let frac = &scaled % &scale;
    let mut s = String::new();
    if neg && !scaled.is_zero() {
        s.push('-');
    }
    s.push_str(&int_part.to_string());
    if digits > 0 {
        let f = frac.to_string();
        s.push('.');
        for _ in f.len()..digits {
            s.push('0');
        }
        s.push_str(&f);
    }
    s
}

fn bit_length_floor_log2(x: &BigRational) -> i64 {
    // floor(log2(x)) for x > 0
    let n = x.numer().bits() as i64;
    let d = x.denom().bits() as i64;
    let mut k = n - d;
    let two = BigRational::from_integer(2.into());
    let pow = |k: i64| -> BigRational {
        if k >= 0 {
            BigRational::from_integer(pow2(k as u32))
        } else {
            BigRational::new(BigInt::one(), pow2((-k) as u32))
        }
    };
    while pow(k) > *x {
        k -= 1;
    }
    while pow(k) * &two <= *x {
        k += 1;
    }
    k
}

/// Certified enclosure of `exp(x)` for rational `x`, at `prec` fractional bits.
pub fn exp_bounds(x: &BigRational, prec: u32) -> (BigRational, BigRational) {
    if x.is_zero() {
        return (BigRational::one(), BigRational::one());
    }
    if x.is_negative() {
        // e^x < e^{-prec} < 2^{-prec}
        if *x <= BigRational::from_integer((-(prec as i64)).into()) {
            return (BigRational::zero(), BigRational::new(BigInt::one(), pow2(prec)));
        }
        let (lo, hi) = exp_bounds(&-x, prec + 4);
        return (round_down(&hi.recip(), prec), round_up(&lo.recip(), prec));
    }
    // reduce: t = x / 2^m <= 1/2
    let m = (bit_length_floor_log2(x) + 2).max(0) as u32;
    // squaring doubles the relative error m times
    let w = prec + m + GUARD_BITS;
    let s = pow2(w);
    let t = x / BigRational::from_integer(pow2(m));
    let t_lo = floor_scaled(&t, w);
    let t_hi = ceil_scaled(&t, w);

    let mut sum_lo = s.clone();
    let mut sum_hi = s.clone();
    let mut term_lo = s.clone();
    let mut term_hi = s.clone();
    let mut j: u64 = 1;
    loop {
        term_lo = (&term_lo * &t_lo).div_floor(&(&s * BigInt::from(j)));
        term_hi = -((-(&term_hi * &t_hi)).div_floor(&(&s * BigInt::from(j))));
        sum_lo += &term_lo;
        sum_hi += &term_hi;
        j += 1;
        if term_hi <= BigInt::one() || j > 10_000 {
            break;
        }
    }
    // tail: next terms are bounded by term_hi * t^k/..., t <= 1/2 → at most term_hi
    sum_hi += &term_hi + BigInt::from(j + 2);

    let mut lo = sum_lo;
    let mut hi = sum_hi;
    for _ in 0..m {
        lo = (&lo * &lo).div_floor(&s);
        hi = -((-(&hi * &hi)).div_floor(&s));
    }
    let lo = BigRational::new(lo, s.clone());
    let hi = BigRational::new(hi, s);
    (round_down(&lo, prec), round_up(&hi, prec))
}

fn atanh_bounds_scaled(z_lo: &BigInt, z_hi: &BigInt, s: &BigInt) -> (BigInt, BigInt) {
    // atanh(z) = sum z^(2j+1)/(2j+1), 0 <= z <= 1/3
    let s2 = s * s;
    let zz_lo = z_lo * z_lo;
    let zz_hi = z_hi * z_hi;
    let mut p_lo = z_lo.clone();
    let mut p_hi = z_hi.clone();
    let mut sum_lo = p_lo.clone();
    let mut sum_hi = p_hi.clone();
    let mut k: u64 = 1;
    loop {
        p_lo = (&p_lo * &zz_lo).div_floor(&s2);
        p_hi = -((-(&p_hi * &zz_hi)).div_floor(&s2));
        let d = BigInt::from(2 * k + 1);
        sum_lo += p_lo.div_floor(&d);
        sum_hi += -((-&p_hi).div_floor(&d));
        k += 1;
        if p_hi <= BigInt::one() || k > 100_000 {
            break;
        }
    }
    // tail bound: remaining terms <= p_hi * (1/9 + 1/81 + ...) < p_hi
    sum_hi += &p_hi + BigInt::from(k + 2);
    (sum_lo, sum_hi)
}

/// Certified enclosure of `ln(x)` for rational `x > 0`.
pub fn ln_bounds(x: &BigRational, prec: u32) -> (BigRational, BigRational) {
    assert!(x.is_positive(), "ln of non-positive value");
    if x.is_one() {
        return (BigRational::zero(), BigRational::zero());
    }
    if *x < BigRational::one() {
        let (lo, hi) = ln_bounds(&x.recip(), prec);
        return (-hi, -lo);
    }
    let k = bit_length_floor_log2(x);
    let w = prec + GUARD_BITS + 2 * (64 - (k.max(1) as u64).leading_zeros());
    let s = pow2(w);
    let y = x / BigRational::from_integer(pow2(k as u32));
    // z = (y-1)/(y+1) in [0, 1/3)
    let z = (&y - BigRational::one()) / (&y + BigRational::one());
    let (ly_lo, ly_hi) = atanh_bounds_scaled(&floor_scaled(&z, w), &ceil_scaled(&z, w), &s);
    let third = BigRational::new(BigInt::one(), BigInt::from(3));
    let (l2_lo, l2_hi) =
        atanh_bounds_scaled(&floor_scaled(&third, w), &ceil_scaled(&third, w), &s);
    let kk = BigInt::from(k);
    let lo = (BigInt::from(2) * (ly_lo + &kk * l2_lo), s.clone());
    let hi = (BigInt::from(2) * (ly_hi + &kk * l2_hi), s);
    let lo = BigRational::new(lo.0, lo.1);
    let hi = BigRational::new(hi.0, hi.1);
    (round_down(&lo, prec), round_up(&hi, prec))
}

/// Interval enclosing `ln(x)` for rational `x > 0`.
pub fn ln_interval(x: &BigRational, prec: u32) -> Interval {
    let (lo, hi) = ln_bounds(x, prec);
    Interval { lo, hi }
}

/// Interval enclosing `exp(x)` for rational `x`.
pub fn exp_interval(x: &BigRational, prec: u32) -> Interval {
    let (lo, hi) = exp_bounds(x, prec);
    Interval { lo, hi }
}

/// Sign of a rational as an `Ordering` against zero.
pub fn sign_of(x: &BigRational) -> Ordering {
    match x.numer().sign() {
        Sign::Minus => Ordering::Less,
        Sign::NoSign => Ordering::Equal,
        Sign::Plus => Ordering::Greater,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn ln2_encloses_reference() {
        let i = ln_interval(&q(2, 1), 128);
        let reference = 0.693_147_180_559_945_3_f64;
        assert!((i.to_f64() - reference).abs() < 1e-15);
        assert!(i.width() < q(1, 1 << 62));
        assert!(i.lo().to_f64().unwrap() <= reference + 1e-16);
    }

    #[test]
    fn ln_of_fraction_is_negative() {
        let i = ln_interval(&q(1, 3), 96);
        assert!(i.is_negative());
        assert!((i.to_f64() + 3f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn exp_matches_std() {
        for (n, d) in [(1, 1), (-1, 1), (7, 3), (-25, 2), (40, 1)] {
            let x = q(n, d);
            let i = exp_interval(&x, 128);
            let r = (n as f64 / d as f64).exp();
            assert!(((i.to_f64() - r) / r).abs() < 1e-14, "exp({n}/{d})");
            assert!(i.lo() <= i.hi());
        }
    }

    #[test]
    fn exp_ln_roundtrip_contains_input() {
        let x = q(5, 1);
        let l = ln_interval(&x, 128);
        let back = l.exp(128);
        assert!(back.lo() <= &x && &x <= back.hi());
    }

    #[test]
    fn decimal_rendering_truncates() {
        assert_eq!(decimal_string(&q(1, 3), 4), "0.3333");
        assert_eq!(decimal_string(&q(-7, 2), 2), "-3.50");
        assert_eq!(decimal_string(&q(5, 1), 0), "5");
    }

    #[test]
    fn abs_and_recip() {
        let i = Interval::new(q(-1, 2), q(3, 1));
        assert_eq!(i.abs(), Interval::new(q(0, 1), q(3, 1)));
        assert!(i.recip(64).is_none());
        let j = Interval::new(q(2, 1), q(4, 1));
        assert_eq!(j.recip(64).unwrap(), Interval::new(q(1, 4), q(1, 2)));
    }
}
