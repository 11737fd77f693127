//! Difference-differential polynomials `F(x, f^{(ν)}(s + h))` and elimination
//! of the explicit variable `x` by resultants.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::coefficient::{Coefficient, XPoly};
use crate::error::{Error, Result};
use crate::linalg::{det, Ring};
use crate::rational::{format_rational, Q};

/// `f^{(order)}(s + shift)`. Ordered by `(shift, order)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct DiffIndeterminate {
    pub shift: Q,
    pub order: u32,
}

impl DiffIndeterminate {
    pub fn new(order: u32, shift: Q) -> Self {
        DiffIndeterminate { shift, order }
    }

    /// `f^{(order)}(s)`.
    pub fn deriv(order: u32) -> Self {
        DiffIndeterminate { shift: Q::zero(), order }
    }

    pub fn next(&self) -> Self {
        DiffIndeterminate { shift: self.shift.clone(), order: self.order + 1 }
    }
}

impl fmt::Display for DiffIndeterminate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("f")?;
        for _ in 0..self.order {
            f.write_str("'")?;
        }
        if !self.shift.is_zero() {
            let sign = if self.shift.is_negative() { '-' } else { '+' };
            write!(f, "(s{sign}{})", format_rational(&self.shift.abs()))?;
        }
        Ok(())
    }
}

/// `x^{x_degree} · Π z^{k}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Debug)]
pub struct DiffMonomial {
    pub x_degree: u32,
    pub powers: BTreeMap<DiffIndeterminate, u32>,
}

impl DiffMonomial {
    pub fn one() -> Self {
        DiffMonomial::default()
    }

    pub fn degree(&self) -> u32 {
        self.powers.values().sum()
    }

    pub fn mul(&self, o: &DiffMonomial) -> DiffMonomial {
        let mut powers = self.powers.clone();
        for (z, k) in &o.powers {
            *powers.entry(z.clone()).or_insert(0) += k;
        }
        DiffMonomial { x_degree: self.x_degree + o.x_degree, powers }
    }

    pub fn div(&self, o: &DiffMonomial) -> Option<DiffMonomial> {
        if o.x_degree > self.x_degree {
            return None;
        }
        let mut powers = self.powers.clone();
        for (z, k) in &o.powers {
            let e = powers.get_mut(z)?;
            if *e < *k {
                return None;
            }
            *e -= k;
            if *e == 0 {
                powers.remove(z);
            }
        }
        Some(DiffMonomial { x_degree: self.x_degree - o.x_degree, powers })
    }

    pub fn is_one(&self) -> bool {
        self.x_degree == 0 && self.powers.is_empty()
    }
}

impl fmt::Display for DiffMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.x_degree {
            0 => {}
            1 => parts.push("x".to_string()),
            k => parts.push(format!("x^{k}")),
        }
        for (z, k) in &self.powers {
            parts.push(if *k == 1 { z.to_string() } else { format!("{z}^{k}") });
        }
        f.write_str(&parts.join("*"))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct DiffPolynomial {
    terms: BTreeMap<DiffMonomial, Coefficient>,
}

impl DiffPolynomial {
    pub fn zero() -> Self {
        DiffPolynomial::default()
    }

    pub fn one() -> Self {
        DiffPolynomial::constant(Coefficient::one())
    }

    pub fn constant(c: Coefficient) -> Self {
        DiffPolynomial::term(DiffMonomial::one(), c)
    }

    pub fn int(n: i64) -> Self {
        DiffPolynomial::constant(Coefficient::int(n))
    }

    pub fn term(m: DiffMonomial, c: Coefficient) -> Self {
        let mut p = DiffPolynomial::zero();
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    pub fn var(z: DiffIndeterminate) -> Self {
        let mut m = DiffMonomial::one();
        m.powers.insert(z, 1);
        DiffPolynomial::term(m, Coefficient::one())
    }

    /// `f^{(order)}(s)`.
    pub fn f(order: u32) -> Self {
        DiffPolynomial::var(DiffIndeterminate::deriv(order))
    }

    pub fn x() -> Self {
        DiffPolynomial::term(DiffMonomial { x_degree: 1, powers: BTreeMap::new() }, Coefficient::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DiffMonomial, &Coefficient)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree `n` in the `f`-indeterminates.
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(DiffMonomial::degree).max().unwrap_or(0)
    }

    pub fn x_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.x_degree).max().unwrap_or(0)
    }

    pub fn has_shifts(&self) -> bool {
        self.indeterminates().iter().any(|z| !z.shift.is_zero())
    }

    pub fn max_order(&self) -> u32 {
        self.indeterminates().iter().map(|z| z.order).max().unwrap_or(0)
    }

    /// Indeterminates occurring in some monomial, in canonical order.
    pub fn indeterminates(&self) -> Vec<DiffIndeterminate> {
        let mut v: Vec<DiffIndeterminate> = Vec::new();
        for m in self.terms.keys() {
            for z in m.powers.keys() {
                if !v.contains(z) {
                    v.push(z.clone());
                }
            }
        }
        v.sort();
        v
    }

    /// Every coefficient is a rational constant.
    pub fn has_rational_coefficients(&self) -> bool {
        self.terms.values().all(|c| c.as_constant().is_some())
    }

    fn add_term(&mut self, m: DiffMonomial, c: Coefficient) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m.clone()).or_default();
        *slot = &*slot + &c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, o: &DiffPolynomial) -> DiffPolynomial {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &DiffPolynomial) -> DiffPolynomial {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub fn neg(&self) -> DiffPolynomial {
        self.scale(&Coefficient::int(-1))
    }

    pub fn mul(&self, o: &DiffPolynomial) -> DiffPolynomial {
        let mut out = DiffPolynomial::zero();
        for (a, c) in &self.terms {
            for (b, d) in &o.terms {
                out.add_term(a.mul(b), c * d);
            }
        }
        out
    }

    pub fn scale(&self, c: &Coefficient) -> DiffPolynomial {
        let mut out = DiffPolynomial::zero();
        for (m, d) in &self.terms {
            out.add_term(m.clone(), d * c);
        }
        out
    }

    pub fn pow(&self, k: u32) -> DiffPolynomial {
        let mut acc = DiffPolynomial::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// `∂F/∂z`.
    pub fn partial_wrt(&self, z: &DiffIndeterminate) -> DiffPolynomial {
        let mut out = DiffPolynomial::zero();
        for (m, c) in &self.terms {
            if let Some(&k) = m.powers.get(z) {
                let mut n = m.clone();
                if k == 1 {
                    n.powers.remove(z);
                } else {
                    n.powers.insert(z.clone(), k - 1);
                }
                out.add_term(n, c.scale(&Q::from_integer(k.into())));
            }
        }
        out
    }

    /// `∂F/∂x` (explicit dependence only).
    pub fn partial_x(&self) -> DiffPolynomial {
        let mut out = DiffPolynomial::zero();
        for (m, c) in &self.terms {
            if m.x_degree > 0 {
                let mut n = m.clone();
                n.x_degree -= 1;
                out.add_term(n, c.scale(&Q::from_integer(m.x_degree.into())));
            }
        }
        out
    }

    fn chain_rule(&self) -> DiffPolynomial {
        let mut out = DiffPolynomial::zero();
        for z in self.indeterminates() {
            out = out.add(&self.partial_wrt(&z).mul(&DiffPolynomial::var(z.next())));
        }
        out
    }

    /// `d/ds` with `x` and all coefficients constant in `s`.
    pub fn total_derivative_s(&self) -> DiffPolynomial {
        self.chain_rule()
    }

    /// `d/dx` when `x` is itself the independent variable: `∂F/∂x` plus the
    /// chain rule. This is the `F*` of the elimination step.
    pub fn total_derivative_x(&self) -> DiffPolynomial {
        self.partial_x().add(&self.chain_rule())
    }

    /// Coefficients of `F` as a polynomial in `x`; index `i` is the
    /// coefficient of `x^i`.
    pub fn x_coefficients(&self) -> Vec<DiffPolynomial> {
        let mut out = vec![DiffPolynomial::zero(); self.x_degree() as usize + 1];
        for (m, c) in &self.terms {
            let mut n = m.clone();
            n.x_degree = 0;
            out[m.x_degree as usize].add_term(n, c.clone());
        }
        while out.len() > 1 && out.last().is_some_and(DiffPolynomial::is_zero) {
            out.pop();
        }
        out
    }

    pub fn from_x_coefficients(cs: &[DiffPolynomial]) -> DiffPolynomial {
        let mut out = DiffPolynomial::zero();
        for (i, c) in cs.iter().enumerate() {
            for (m, d) in &c.terms {
                let mut n = m.clone();
                n.x_degree += i as u32;
                out.add_term(n, d.clone());
            }
        }
        out
    }

    /// Evaluates the polynomial in an arbitrary commutative ring given the
    /// image of `x`, of each indeterminate, and of each coefficient.
    pub fn evaluate<R: Ring>(
        &self,
        one: &R,
        x: &R,
        var: &mut dyn FnMut(&DiffIndeterminate) -> Result<R>,
        coef: &dyn Fn(&Coefficient) -> R,
    ) -> Result<R> {
        let mut cache: BTreeMap<DiffIndeterminate, Vec<R>> = BTreeMap::new();
        let mut x_pows = vec![one.clone()];
        let mut acc = one.zero_like();
        for (m, c) in &self.terms {
            while x_pows.len() <= m.x_degree as usize {
                let next = x_pows.last().unwrap().mul(x);
                x_pows.push(next);
            }
            let mut t = coef(c).mul(&x_pows[m.x_degree as usize]);
            for (z, &k) in &m.powers {
                if !cache.contains_key(z) {
                    let v = var(z)?;
                    cache.insert(z.clone(), vec![one.clone(), v]);
                }
                let pows = cache.get_mut(z).unwrap();
                while pows.len() <= k as usize {
                    let next = pows.last().unwrap().mul(&pows[1]);
                    pows.push(next);
                }
                t = t.mul(&pows[k as usize]);
            }
            acc = acc.add(&t);
        }
        Ok(acc)
    }

    /// Substitutes a polynomial `φ(x)` (with `f^{(ν)} = d^νφ/dx^ν` and
    /// `f(x + h) = φ(x + h)`) and returns the resulting polynomial in `x`.
    pub fn evaluate_on_polynomial(&self, phi: &XPoly) -> XPoly {
        let one = XPoly::constant(Coefficient::one());
        let x = XPoly::monomial(Coefficient::one(), 1);
        self.evaluate(
            &one,
            &x,
            &mut |z| {
                let mut p = phi.clone();
                for _ in 0..z.order {
                    p = p.derivative();
                }
                Ok(taylor_shift(&p, &z.shift))
            },
            &|c| XPoly::constant(c.clone()),
        )
        .expect("polynomial evaluation is infallible")
    }

    /// Divides every coefficient by the leading rational coefficient so that
    /// the structurally last monomial has coefficient with leading rational 1.
    pub fn monic(&self) -> DiffPolynomial {
        match self.terms.values().next_back().and_then(|c| c.leading_rational().cloned()) {
            Some(lead) => self.scale(&Coefficient::constant(Q::one() / lead)),
            None => self.clone(),
        }
    }

    /// Largest monomial dividing every term.
    pub fn monomial_content(&self) -> DiffMonomial {
        let mut it = self.terms.keys();
        let Some(first) = it.next() else { return DiffMonomial::one() };
        let mut g = first.clone();
        for m in it {
            g.x_degree = g.x_degree.min(m.x_degree);
            g.powers.retain(|z, k| {
                *k = (*k).min(m.powers.get(z).copied().unwrap_or(0));
                *k > 0
            });
        }
        g
    }

    pub fn div_monomial(&self, d: &DiffMonomial) -> Option<DiffPolynomial> {
        let mut out = DiffPolynomial::zero();
        for (m, c) in &self.terms {
            out.terms.insert(m.div(d)?, c.clone());
        }
        Some(out)
    }
}

/// `p(x + h)`.
fn taylor_shift(p: &XPoly, h: &Q) -> XPoly {
    if h.is_zero() {
        return p.clone();
    }
    let lin = XPoly::from_coeffs(vec![Coefficient::constant(h.clone()), Coefficient::one()]);
    let mut acc = XPoly::zero();
    for c in p.coeffs().iter().rev() {
        acc = acc.mul(&lin).add(&XPoly::constant(c.clone()));
    }
    acc
}

impl Ring for DiffPolynomial {
    fn add(&self, o: &Self) -> Self {
        DiffPolynomial::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        DiffPolynomial::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        DiffPolynomial::mul(self, o)
    }
    fn neg(&self) -> Self {
        DiffPolynomial::neg(self)
    }
    fn vanishes(&self) -> bool {
        DiffPolynomial::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        DiffPolynomial::zero()
    }
    fn one_like(&self) -> Self {
        DiffPolynomial::one()
    }
}

/// Determinant of the Sylvester matrix of `A = Σ a_i x^i` and `B = Σ b_i x^i`
/// (coefficient lists in ascending degree, trailing entries nonzero).
///
/// Convention: the `deg B` rows carrying `A`'s coefficients come first, each
/// row lists coefficients from the highest power down. With this convention
/// `Res(x - a, x - b) = a - b`.
pub fn sylvester_resultant(a: &[DiffPolynomial], b: &[DiffPolynomial]) -> Result<DiffPolynomial> {
    let trim = |v: &[DiffPolynomial]| {
        let mut v = v.to_vec();
        while v.len() > 1 && v.last().is_some_and(DiffPolynomial::is_zero) {
            v.pop();
        }
        v
    };
    let a = trim(a);
    let b = trim(b);
    if a.iter().all(DiffPolynomial::is_zero) || b.iter().all(DiffPolynomial::is_zero) {
        return Err(Error::DegenerateInput("zero polynomial in resultant".into()));
    }
    let m = a.len() - 1;
    let n = b.len() - 1;
    if m == 0 && n == 0 {
        return Err(Error::DegenerateInput("both polynomials have degree 0 in x".into()));
    }
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for r in 0..n {
        let mut row = vec![DiffPolynomial::zero(); size];
        for i in 0..=m {
            row[r + i] = a[m - i].clone();
        }
        rows.push(row);
    }
    for r in 0..m {
        let mut row = vec![DiffPolynomial::zero(); size];
        for i in 0..=n {
            row[r + i] = b[n - i].clone();
        }
        rows.push(row);
    }
    Ok(det(&rows))
}

/// `F** = Res_x(F, dF/dx)`: an equation free of `x` satisfied by every
/// solution of `F = 0`. Returns `F` unchanged when it does not involve `x`.
pub fn eliminate_x(f: &DiffPolynomial) -> Result<DiffPolynomial> {
    if f.is_zero() {
        return Err(Error::DegenerateInput("zero polynomial".into()));
    }
    if f.x_degree() == 0 {
        return Ok(f.clone());
    }
    let fs = f.total_derivative_x();
    if fs.is_zero() {
        return Err(Error::ResultantVanished);
    }
    let r = sylvester_resultant(&f.x_coefficients(), &fs.x_coefficients())?;
    if r.is_zero() {
        return Err(Error::ResultantVanished);
    }
    Ok(r)
}

/// Outcome of [`split_x`].
#[derive(Clone, Debug, PartialEq)]
pub struct SplitX {
    /// Common monomial factor removed from every term.
    pub content: DiffMonomial,
    /// Repeated factor in `x` found by a pseudo-remainder gcd, if any.
    pub repeated: Option<DiffPolynomial>,
    /// What is left: primitive in the monomial sense and, when `repeated` is
    /// set, the pseudo-quotient by it.
    pub reduced: DiffPolynomial,
}

/// Cheap splitting over `x` only: monomial content removal and a square-free
/// step via the pseudo-remainder gcd of `F` and `∂F/∂x`.
pub fn split_x(f: &DiffPolynomial) -> SplitX {
    let content = f.monomial_content();
    let mut reduced = f.div_monomial(&content).expect("content divides");
    let mut repeated = None;
    if reduced.x_degree() >= 2 {
        let g = pseudo_gcd_x(&reduced, &reduced.partial_x());
        if g.x_degree() >= 1 {
            let (q, _) = pseudo_divmod_x(&reduced, &g);
            let c = q.monomial_content();
            reduced = q.div_monomial(&c).expect("content divides");
            repeated = Some(g);
        }
    }
    SplitX { content, repeated, reduced }
}

/// Pseudo-division in `x`: returns `(Q, R)` with `lc(B)^k A = Q B + R`.
pub fn pseudo_divmod_x(a: &DiffPolynomial, b: &DiffPolynomial) -> (DiffPolynomial, DiffPolynomial) {
    let bc = b.x_coefficients();
    let n = bc.len() - 1;
    let lb = bc[n].clone();
    let mut r = a.clone();
    let mut q = DiffPolynomial::zero();
    while !r.is_zero() && r.x_degree() as usize >= n {
        let rc = r.x_coefficients();
        let d = rc.len() - 1 - n;
        let lr = rc.last().unwrap().clone();
        let xd = DiffPolynomial::term(DiffMonomial { x_degree: d as u32, powers: BTreeMap::new() }, Coefficient::one());
        q = q.mul(&lb).add(&lr.mul(&xd));
        r = r.mul(&lb).sub(&lr.mul(&xd).mul(b));
    }
    (q, r)
}

fn pseudo_gcd_x(a: &DiffPolynomial, b: &DiffPolynomial) -> DiffPolynomial {
    let (mut a, mut b) = if a.x_degree() >= b.x_degree() { (a.clone(), b.clone()) } else { (b.clone(), a.clone()) };
    while !b.is_zero() && b.x_degree() > 0 {
        let (_, r) = pseudo_divmod_x(&a, &b);
        let c = r.monomial_content();
        let r = r.div_monomial(&c).unwrap_or(r);
        a = b;
        b = r;
    }
    if b.is_zero() {
        a
    } else {
        DiffPolynomial::one()
    }
}

impl fmt::Display for DiffPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let (neg, body) = match c.as_constant() {
                Some(q) => {
                    let a = q.abs();
                    let body = if m.is_one() {
                        format_rational(&a)
                    } else if a.is_one() {
                        m.to_string()
                    } else {
                        format!("{}*{m}", format_rational(&a))
                    };
                    (q.is_negative(), body)
                }
                None => {
                    let body = if m.is_one() { format!("({c})") } else { format!("({c})*{m}") };
                    (false, body)
                }
            };
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            f.write_str(&body)?;
        }
        Ok(())
    }
}

impl fmt::Debug for DiffPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiffPolynomial({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn fp(k: u32) -> DiffPolynomial {
        DiffPolynomial::f(k)
    }

    #[test]
    fn partials() {
        let g = fp(1).pow(2).sub(&fp(0).scale(&Coefficient::int(4)));
        assert_eq!(g.partial_wrt(&DiffIndeterminate::deriv(1)), fp(1).scale(&Coefficient::int(2)));
        let sh = DiffIndeterminate::new(0, q(1));
        let h = fp(0).mul(&DiffPolynomial::var(sh.clone()));
        assert_eq!(h.partial_wrt(&sh), fp(0));
    }

    #[test]
    fn total_derivatives() {
        assert_eq!(fp(0).pow(2).total_derivative_s(), fp(0).mul(&fp(1)).scale(&Coefficient::int(2)));
        let f = fp(0).sub(&DiffPolynomial::x().pow(2));
        assert_eq!(f.total_derivative_x(), fp(1).sub(&DiffPolynomial::x().scale(&Coefficient::int(2))));
        let sh = DiffPolynomial::var(DiffIndeterminate::new(0, q(1)));
        assert_eq!(sh.total_derivative_s(), DiffPolynomial::var(DiffIndeterminate::new(1, q(1))));
    }

    #[test]
    fn resultant_conventions() {
        let a = DiffPolynomial::var(DiffIndeterminate::new(0, q(1)));
        let b = DiffPolynomial::var(DiffIndeterminate::new(0, q(2)));
        let r = sylvester_resultant(&[a.neg(), DiffPolynomial::one()], &[b.neg(), DiffPolynomial::one()]).unwrap();
        assert_eq!(r, a.sub(&b));
        // Res(x^2 - f, 2x - f') = f'^2 - 4 f
        let r = sylvester_resultant(
            &[fp(0).neg(), DiffPolynomial::zero(), DiffPolynomial::one()],
            &[fp(1).neg(), DiffPolynomial::int(2)],
        )
        .unwrap();
        assert_eq!(r, fp(1).pow(2).sub(&fp(0).scale(&Coefficient::int(4))));
        let same = [fp(0).neg(), DiffPolynomial::one()];
        assert!(sylvester_resultant(&same, &same).unwrap().is_zero());
        assert!(matches!(
            sylvester_resultant(&[fp(0)], &[fp(1)]),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn eliminates_x_from_parabola() {
        let f = fp(0).sub(&DiffPolynomial::x().pow(2));
        let r = eliminate_x(&f).unwrap();
        let want = fp(0).scale(&Coefficient::int(4)).sub(&fp(1).pow(2));
        assert!(r == want || r == want.neg(), "{r}");
        let phi = XPoly::monomial(Coefficient::one(), 2);
        assert!(f.evaluate_on_polynomial(&phi).is_zero());
        assert!(r.evaluate_on_polynomial(&phi).is_zero());
        let xf = DiffPolynomial::x().mul(&fp(0));
        assert_eq!(eliminate_x(&xf).unwrap(), fp(0).pow(2));
        assert_eq!(eliminate_x(&fp(1)).unwrap(), fp(1));
    }

    #[test]
    fn split_removes_square() {
        // (x - f)^2 * f'
        let base = DiffPolynomial::x().sub(&fp(0));
        let f = base.pow(2).mul(&fp(1));
        assert!(matches!(eliminate_x(&f), Err(Error::ResultantVanished)));
        let s = split_x(&f);
        assert_eq!(s.content.powers.get(&DiffIndeterminate::deriv(1)), Some(&1));
        assert!(s.repeated.is_some());
        assert_eq!(s.reduced.x_degree(), 1);
        assert!(eliminate_x(&s.reduced).is_ok());
    }

    #[test]
    fn taylor_shift_is_substitution() {
        let p = XPoly::from_coeffs(vec![Coefficient::int(1), Coefficient::int(0), Coefficient::int(1)]);
        let s = taylor_shift(&p, &q(2));
        assert_eq!(s.coeffs(), &[Coefficient::int(5), Coefficient::int(4), Coefficient::int(1)]);
    }
}
