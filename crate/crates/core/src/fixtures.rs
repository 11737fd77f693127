//! Bundled series and equations used by tests, benches and the CLI.

use std::sync::Arc;

use crate::coefficient::Coefficient;
use crate::diff_poly::DiffPolynomial;
use crate::exponent::Exponent;
use crate::lattice::{integer_basis, LatticeBasis};
use crate::parse::parse_diffpoly;
use crate::rational::Q;
use crate::series::{FormalSeries, Horizon};
use crate::symbols::{Symbol, SymbolBasis};
use crate::transforms::PowerSeries;

fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

/// `Σ_{k≤n} e^{-kλs}` with `λ = 3/2`, exact up to `nλ`.
pub fn geometric(n: i64) -> FormalSeries {
    let basis = Arc::new(SymbolBasis::from_pairs(&[("lam", "3/2")]).expect("valid basis"));
    let lam = |k: i64| Exponent::single(Symbol::new("lam"), q(k));
    FormalSeries::from_coefficients(basis, (1..=n).map(|k| (lam(k), Coefficient::one())), Horizon::Finite(lam(n)))
        .expect("valid series")
}

pub fn geometric_equation() -> DiffPolynomial {
    parse_diffpoly("f' + lam*f + lam*f^2", &[Symbol::new("lam")]).expect("valid equation")
}

/// The exact series `e^{-s}`.
pub fn exp_neg() -> FormalSeries {
    let basis = Arc::new(SymbolBasis::one());
    FormalSeries::from_coefficients(basis, [(Exponent::integer(1), Coefficient::one())], Horizon::Infinite)
        .expect("valid series")
}

/// `Σ_{n≤N} n^{-s}`, exact up to `log N`.
pub fn zeta(n: u64) -> FormalSeries {
    let idx: Vec<(u64, Q)> = (1..=n).map(|k| (k, q(1))).collect();
    FormalSeries::dirichlet(&idx, Some(n), crate::real::DEFAULT_PRECISION).expect("valid series")
}

/// `e^{-as} + e^{-bs}` over two independent symbols.
pub fn two_exponentials() -> FormalSeries {
    let basis = Arc::new(SymbolBasis::from_pairs(&[("a", "1"), ("b", "5/2")]).expect("valid basis"));
    let t = |s: &str| (Exponent::single(Symbol::new(s), q(1)), Coefficient::one());
    FormalSeries::from_coefficients(basis, [t("a"), t("b")], Horizon::Infinite).expect("valid series")
}

pub fn two_exponentials_equation() -> DiffPolynomial {
    parse_diffpoly("f'' + (a + b)*f' + a*b*f", &[Symbol::new("a"), Symbol::new("b")]).expect("valid equation")
}

/// `1 + 2^{-s}`, which satisfies `f' + L2*f - L2`.
pub fn two_term_dirichlet() -> FormalSeries {
    FormalSeries::dirichlet(&[(1, q(1)), (2, q(1))], None, crate::real::DEFAULT_PRECISION).expect("valid series")
}

pub fn two_term_dirichlet_equation() -> DiffPolynomial {
    parse_diffpoly("f' + L2*f - L2", &[Symbol::log_prime(2)]).expect("valid equation")
}

/// A series, an equation it satisfies formally, and its exponent lattice.
#[derive(Clone, Debug)]
pub struct SatisfactionFixture {
    pub name: &'static str,
    pub equation: DiffPolynomial,
    pub series: FormalSeries,
    pub lattice: LatticeBasis,
}

fn fixture(name: &'static str, equation: DiffPolynomial, series: FormalSeries) -> SatisfactionFixture {
    let exps: Vec<Exponent> = series.exponents().cloned().collect();
    let lattice = integer_basis(&exps, series.basis());
    SatisfactionFixture { name, equation, series, lattice }
}

pub fn satisfaction_fixtures() -> Vec<SatisfactionFixture> {
    vec![
        fixture("geometric", geometric_equation(), geometric(20)),
        fixture("exp_neg", parse_diffpoly("f' + f", &[]).expect("valid equation"), exp_neg()),
        fixture("two_exponentials", two_exponentials_equation(), two_exponentials()),
        fixture("two_term_dirichlet", two_term_dirichlet_equation(), two_term_dirichlet()),
    ]
}

/// An ODE, the rate symbol, and a power-series solution of its PDE.
#[derive(Clone, Debug)]
pub struct PdeFixture {
    pub name: &'static str,
    pub equation: DiffPolynomial,
    pub lambdas: Vec<Symbol>,
    pub solution: PowerSeries,
    pub order: u32,
}

pub fn pde_fixtures() -> Vec<PdeFixture> {
    let lam = Symbol::new("lam");
    let known = std::slice::from_ref(&lam);
    let order = 30;
    vec![
        PdeFixture {
            name: "riccati",
            equation: geometric_equation(),
            lambdas: vec![lam.clone()],
            solution: (1..=order).map(|k| (vec![k], Coefficient::one())).collect(),
            order,
        },
        PdeFixture {
            name: "euler",
            equation: parse_diffpoly("f' + lam*f", known).expect("valid equation"),
            lambdas: vec![lam.clone()],
            solution: [(vec![1], Coefficient::one())].into_iter().collect(),
            order,
        },
        PdeFixture {
            name: "second_order_constant",
            equation: parse_diffpoly("f'' - f'", known).expect("valid equation"),
            lambdas: vec![lam.clone()],
            solution: [(vec![0], Coefficient::one())].into_iter().collect(),
            order,
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formal_eval::substitute;
    use crate::transforms::{evaluate_pde_on_power_series, ode_to_pde};

    #[test]
    fn fixtures_satisfy_their_equations() {
        for fx in satisfaction_fixtures() {
            let r = substitute(&fx.equation, &fx.series, None).unwrap();
            assert!(r.is_zero(), "{}", fx.name);
        }
    }

    #[test]
    fn pde_fixtures_hold() {
        for fx in pde_fixtures() {
            let pde = ode_to_pde(&fx.equation, &fx.lambdas).unwrap();
            let (res, _) = evaluate_pde_on_power_series(&pde, &fx.solution, fx.order);
            assert!(res.is_empty(), "{}", fx.name);
        }
    }
}
