//! Text form of difference-differential polynomials and coefficients.
//!
//! ```text
//! expr   := ('+'|'-')? term (('+'|'-') term)*
//! term   := unary ('*' unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' uint)*
//! atom   := rational | 'x' | deriv | ident | 'exp' '(' expr ')' | '(' expr ')'
//! deriv  := 'f' '\''* ('(' 's' (('+'|'-') rational)? ')')?
//! ```
//!
//! `ident` names a basis symbol; `exp(E)` with `E` linear in the symbols is
//! the multiplier `e^{E}`. The printers in this crate emit this grammar.

use num_traits::Zero;

use crate::coefficient::{Coefficient, XPoly};
use crate::diff_poly::{DiffIndeterminate, DiffMonomial, DiffPolynomial};
use crate::error::{Error, Result};
use crate::exponent::Exponent;
use crate::rational::{parse_rational, Q};
use crate::symbols::Symbol;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Prime,
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Caret,
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
}

impl Lexer {
    fn run(src: &str) -> Result<Vec<(Tok, usize)>> {
        let mut lx = Lexer { toks: Vec::new() };
        let bytes = src.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i] as char;
            let start = i;
            match c {
                ' ' | '\t' | '\n' | '\r' => {
                    i += 1;
                    continue;
                }
                '\'' => lx.push(Tok::Prime, start),
                '(' => lx.push(Tok::LParen, start),
                ')' => lx.push(Tok::RParen, start),
                '+' => lx.push(Tok::Plus, start),
                '-' => lx.push(Tok::Minus, start),
                '*' => lx.push(Tok::Star, start),
                '^' => lx.push(Tok::Caret, start),
                d if d.is_ascii_digit() || d == '.' => {
                    let mut j = i;
                    while j < bytes.len() && (bytes[j].is_ascii_digit() || bytes[j] == b'.') {
                        j += 1;
                    }
                    if j + 1 < bytes.len() && bytes[j] == b'/' && bytes[j + 1].is_ascii_digit() {
                        j += 1;
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                    }
                    lx.toks.push((Tok::Num(src[i..j].to_string()), start));
                    i = j;
                    continue;
                }
                a if a.is_ascii_alphabetic() || a == '_' => {
                    let mut j = i;
                    while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                        j += 1;
                    }
                    lx.toks.push((Tok::Ident(src[i..j].to_string()), start));
                    i = j;
                    continue;
                }
                other => return Err(syntax(src, start, &format!("unexpected character {other:?}"))),
            }
            i += 1;
        }
        lx.toks.push((Tok::End, src.len()));
        Ok(lx.toks)
    }

    fn push(&mut self, t: Tok, at: usize) {
        self.toks.push((t, at));
    }
}

fn syntax(src: &str, offset: usize, msg: &str) -> Error {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.len() - before.rfind('\n').map(|p| p + 1).unwrap_or(0) + 1;
    Error::SyntaxError { line, col, msg: msg.to_string() }
}

struct Parser<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
    known: Option<&'a [Symbol]>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn at(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn err(&self, msg: &str) -> Error {
        syntax(self.src, self.at(), msg)
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.err(&format!("expected {t:?}, found {:?}", self.peek())))
        }
    }

    fn expr(&mut self) -> Result<DiffPolynomial> {
        let mut acc = match self.peek() {
            Tok::Plus => {
                self.bump();
                self.term()?
            }
            Tok::Minus => {
                self.bump();
                self.term()?.neg()
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = acc.add(&self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<DiffPolynomial> {
        let mut acc = self.unary()?;
        while *self.peek() == Tok::Star {
            self.bump();
            acc = acc.mul(&self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<DiffPolynomial> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(self.unary()?.neg());
        }
        self.power()
    }

    fn power(&mut self) -> Result<DiffPolynomial> {
        let mut base = self.atom()?;
        while *self.peek() == Tok::Caret {
            self.bump();
            let Tok::Num(n) = self.bump() else { return Err(self.err("expected exponent")) };
            let k: u32 = n.parse().map_err(|_| self.err("exponent must be a non-negative integer"))?;
            base = base.pow(k);
        }
        Ok(base)
    }

    fn rational(&mut self) -> Result<Q> {
        let at = self.at();
        match self.bump() {
            Tok::Num(n) => parse_rational(&n).map_err(|_| syntax(self.src, at, "bad number")),
            _ => Err(syntax(self.src, at, "expected a number")),
        }
    }

    fn atom(&mut self) -> Result<DiffPolynomial> {
        let at = self.at();
        match self.bump() {
            Tok::Num(n) => {
                let q = parse_rational(&n).map_err(|_| syntax(self.src, at, "bad number"))?;
                Ok(DiffPolynomial::constant(Coefficient::constant(q)))
            }
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "x" => Ok(DiffPolynomial::x()),
                "f" => self.deriv(),
                "exp" => {
                    self.expect(Tok::LParen)?;
                    let inner_at = self.at();
                    let e = self.expr()?;
                    self.expect(Tok::RParen)?;
                    let mu = as_linear_exponent(&e).ok_or_else(|| {
                        syntax(self.src, inner_at, "exp argument must be linear in basis symbols")
                    })?;
                    Ok(DiffPolynomial::constant(Coefficient::multiplier(-mu)))
                }
                "s" => Err(syntax(self.src, at, "s may only appear inside f(...)")),
                _ => {
                    let sym = Symbol::new(&name);
                    if let Some(known) = self.known {
                        if !sym.is_one() && !known.contains(&sym) {
                            return Err(Error::UnknownSymbol(name));
                        }
                    }
                    Ok(DiffPolynomial::constant(Coefficient::symbol(&sym)))
                }
            },
            t => Err(syntax(self.src, at, &format!("unexpected {t:?}"))),
        }
    }

    fn deriv(&mut self) -> Result<DiffPolynomial> {
        let mut order = 0;
        while *self.peek() == Tok::Prime {
            self.bump();
            order += 1;
        }
        let mut shift = Q::zero();
        if *self.peek() == Tok::LParen {
            self.bump();
            match self.bump() {
                Tok::Ident(s) if s == "s" => {}
                _ => return Err(self.err("expected s")),
            }
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    shift = self.rational()?;
                }
                Tok::Minus => {
                    self.bump();
                    shift = -self.rational()?;
                }
                _ => {}
            }
            self.expect(Tok::RParen)?;
        }
        Ok(DiffPolynomial::var(DiffIndeterminate::new(order, shift)))
    }
}

/// `Σ c_k sym_k` with rational `c_k` (a constant part counts as a multiple of
/// `ONE`).
fn as_linear_exponent(p: &DiffPolynomial) -> Option<Exponent> {
    let c = constant_part(p)?;
    let mut e = Exponent::zero();
    for (m, q) in c.terms() {
        if !m.shift.is_zero() {
            return None;
        }
        match m.powers.len() {
            0 => e = &e + &Exponent::single(Symbol::one(), q.clone()),
            1 => {
                let (s, k) = m.powers.iter().next().unwrap();
                if *k != 1 {
                    return None;
                }
                e = &e + &Exponent::single(s.clone(), q.clone());
            }
            _ => return None,
        }
    }
    Some(e)
}

fn constant_part(p: &DiffPolynomial) -> Option<Coefficient> {
    let mut out = Coefficient::zero();
    for (m, c) in p.terms() {
        if !m.is_one() {
            return None;
        }
        out = &out + c;
    }
    Some(out)
}

fn parse_with(text: &str, known: Option<&[Symbol]>) -> Result<DiffPolynomial> {
    let toks = Lexer::run(text)?;
    let mut p = Parser { src: text, toks, pos: 0, known };
    if *p.peek() == Tok::End {
        return Err(p.err("empty expression"));
    }
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.err(&format!("unexpected {:?}", p.peek())));
    }
    Ok(e)
}

/// Parses a difference-differential polynomial; identifiers must be among
/// `known` (or `ONE`).
pub fn parse_diffpoly(text: &str, known: &[Symbol]) -> Result<DiffPolynomial> {
    parse_with(text, Some(known))
}

/// Like [`parse_diffpoly`] but accepts any identifier as a symbol.
pub fn parse_diffpoly_lenient(text: &str) -> Result<DiffPolynomial> {
    parse_with(text, None)
}

/// Parses an exponent: a rational combination of basis symbols such as
/// `3*lam` or `L2 + L3`, or `log n` for a positive integer `n` (read over
/// `log p` symbols).
pub fn parse_exponent(text: &str, known: &[Symbol]) -> Result<Exponent> {
    let t = text.trim();
    if let Some(rest) = t.strip_prefix("log ").or_else(|| t.strip_prefix("log(").and_then(|r| r.strip_suffix(')'))) {
        let n: u64 = rest.trim().parse().map_err(|_| syntax(text, 0, "expected log <positive integer>"))?;
        if n == 0 {
            return Err(syntax(text, 0, "log 0"));
        }
        let pairs = crate::numtheory::factorize(n).into_iter().map(|(p, k)| (Symbol::log_prime(p), Q::from_integer(k.into())));
        return Ok(Exponent::from_pairs(pairs));
    }
    let p = parse_with(text, Some(known))?;
    as_linear_exponent(&p).ok_or_else(|| syntax(text, 0, "not a linear combination of basis symbols"))
}

/// Parses a series coefficient: a polynomial in `x` and the basis symbols,
/// free of `f`.
pub fn parse_xpoly(text: &str, known: &[Symbol]) -> Result<XPoly> {
    let p = parse_diffpoly(text, known)?;
    diffpoly_to_xpoly(&p).ok_or_else(|| Error::SchemaError(format!("coefficient {text:?} mentions f")))
}

pub fn parse_coefficient(text: &str, known: &[Symbol]) -> Result<Coefficient> {
    let p = parse_diffpoly(text, known)?;
    constant_part(&p).ok_or_else(|| Error::SchemaError(format!("{text:?} is not a constant coefficient")))
}

fn diffpoly_to_xpoly(p: &DiffPolynomial) -> Option<XPoly> {
    let mut out = XPoly::zero();
    for (m, c) in p.terms() {
        if !m.powers.is_empty() {
            return None;
        }
        out = out.add(&XPoly::monomial(c.clone(), m.x_degree as usize));
    }
    Some(out)
}

/// Inverse of [`parse_xpoly`] for printing; `x`-free polynomials print as
/// their coefficient.
pub fn xpoly_to_string(p: &XPoly) -> String {
    let mut d = DiffPolynomial::zero();
    for (i, c) in p.coeffs().iter().enumerate() {
        d = d.add(&DiffPolynomial::term(
            DiffMonomial { x_degree: i as u32, powers: Default::default() },
            c.clone(),
        ));
    }
    d.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr};

    #[test]
    fn parses_examples() {
        let p = parse_diffpoly_lenient("f'^2 - 4*f").unwrap();
        assert_eq!(p, DiffPolynomial::f(1).pow(2).sub(&DiffPolynomial::f(0).scale(&Coefficient::int(4))));
        let p = parse_diffpoly_lenient("f(s+1) - 2*f").unwrap();
        assert!(p.indeterminates().contains(&DiffIndeterminate::new(0, q(1))));
        let p = parse_diffpoly_lenient("x^2*f'' + f").unwrap();
        assert_eq!(p.x_degree(), 2);
        let p = parse_diffpoly_lenient("f'(s-1/2)").unwrap();
        assert_eq!(p.indeterminates(), vec![DiffIndeterminate::new(1, qr(-1, 2))]);
    }

    #[test]
    fn reports_positions_and_unknown_symbols() {
        match parse_diffpoly_lenient("f' +\n  * f") {
            Err(Error::SyntaxError { line, col, .. }) => assert_eq!((line, col), (2, 3)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_diffpoly("lam*f", &[]), Err(Error::UnknownSymbol(_))));
        assert!(parse_diffpoly("lam*f", &[Symbol::new("lam")]).is_ok());
        assert!(matches!(parse_diffpoly_lenient("f + s"), Err(Error::SyntaxError { .. })));
        assert!(matches!(parse_diffpoly_lenient(""), Err(Error::SyntaxError { .. })));
    }

    #[test]
    fn round_trips_multipliers() {
        let known = [Symbol::new("L2"), Symbol::new("L3")];
        let c = &Coefficient::shift_multiplier(
            &Exponent::from_pairs([(Symbol::new("L2"), q(1)), (Symbol::new("L3"), qr(-1, 2))]),
            &q(2),
        ) * &Coefficient::symbol(&Symbol::new("L2"));
        let p = DiffPolynomial::f(1).scale(&c).add(&DiffPolynomial::int(3));
        let text = p.to_string();
        assert_eq!(parse_diffpoly(&text, &known).unwrap(), p, "{text}");
    }

    #[test]
    fn exponents() {
        let lam = Symbol::new("lam");
        assert_eq!(parse_exponent("3*lam", &[lam.clone()]).unwrap(), Exponent::single(lam.clone(), q(3)));
        let l6 = parse_exponent("log 6", &[]).unwrap();
        assert_eq!(l6.to_string(), "L2 + L3");
        assert_eq!(parse_exponent("L2 + L3", &[Symbol::log_prime(2), Symbol::log_prime(3)]).unwrap(), l6);
        assert!(parse_exponent("lam^2", &[lam]).is_err());
    }

    #[test]
    fn coefficient_strings() {
        let known = [Symbol::new("L2")];
        let x = parse_xpoly("3*x^2 - L2", &known).unwrap();
        assert_eq!(x.degree(), Some(2));
        assert_eq!(parse_xpoly(&xpoly_to_string(&x), &known).unwrap(), x);
        assert!(parse_xpoly("f", &known).is_err());
        assert_eq!(parse_coefficient("1/2", &known).unwrap(), Coefficient::constant(qr(1, 2)));
    }
}
