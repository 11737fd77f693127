use std::collections::BTreeMap;
use std::sync::Arc;

use dforge_core::diff_poly::{eliminate_x, sylvester_resultant};
use dforge_core::fixtures;
use dforge_core::formal_eval::{evaluate, initial_terms_of_partials, substitute};
use dforge_core::lattice::{integer_basis, prime_support};
use dforge_core::obstruction::{
    finite_basis_certificate, signflip_construct, verify_certificate, Certificate, ExponentStream, Procedure,
};
use dforge_core::parse::parse_diffpoly_lenient;
use dforge_core::transforms::rescale;
use dforge_core::wronskian::derive_ade_search;
use dforge_core::{
    Coefficient, DiffIndeterminate, DiffMonomial, DiffPolynomial, Exponent, FormalSeries, Horizon, Symbol,
    SymbolBasis, XPoly, Q,
};
use num_traits::{One, Zero};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, rng_seed: RngSeed::Fixed(0x5eed), failure_persistence: None, ..ProptestConfig::default() }
}

fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

fn qr(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

fn rational() -> impl Strategy<Value = Q> {
    (-6i64..=6, 1i64..=3).prop_map(|(n, d)| qr(n, d))
}

fn nonzero_rational() -> impl Strategy<Value = Q> {
    rational().prop_filter("nonzero", |x| !x.is_zero())
}

fn smooth_basis() -> Arc<SymbolBasis> {
    Arc::new(SymbolBasis::log_primes(&[2, 3, 5]))
}

fn log_exponent(n: u64) -> Exponent {
    let mut pairs = Vec::new();
    let mut m = n;
    for p in [2u64, 3, 5] {
        let mut k = 0;
        while m % p == 0 {
            m /= p;
            k += 1;
        }
        if k > 0 {
            pairs.push((Symbol::log_prime(p), q(k)));
        }
    }
    assert_eq!(m, 1, "index must be 5-smooth");
    Exponent::from_pairs(pairs)
}

const SMOOTH: [u64; 18] = [1, 2, 3, 4, 5, 6, 8, 9, 10, 12, 15, 16, 18, 20, 24, 25, 27, 30];

/// Series over `{log 2, log 3, log 5}` with 5-smooth indices.
fn smooth_series_from(basis: &Arc<SymbolBasis>, terms: &[(usize, Q)], horizon: Option<u64>) -> FormalSeries {
    let h = match horizon {
        Some(n) => Horizon::Finite(log_exponent(n)),
        None => Horizon::Infinite,
    };
    let limit = horizon.unwrap_or(u64::MAX);
    let terms = terms
        .iter()
        .filter(|(i, _)| SMOOTH[*i] <= limit)
        .map(|(i, c)| (log_exponent(SMOOTH[*i]), Coefficient::constant(c.clone())));
    FormalSeries::from_coefficients(basis.clone(), terms, h).unwrap()
}

fn smooth_terms() -> impl Strategy<Value = Vec<(usize, Q)>> {
    prop::collection::vec((0..SMOOTH.len(), nonzero_rational()), 0..=6)
}

fn horizon_choice() -> impl Strategy<Value = Option<u64>> {
    prop_oneof![Just(None), (2usize..SMOOTH.len()).prop_map(|i| Some(SMOOTH[i]))]
}

fn common_cut(a: &FormalSeries, b: &FormalSeries) -> (FormalSeries, FormalSeries) {
    let h = a.horizon().clone().min(b.horizon().clone(), a.basis());
    match h.finite() {
        Some(t) => (a.truncate(t).unwrap(), b.truncate(t).unwrap()),
        None => (a.clone(), b.clone()),
    }
}

proptest! {
    #![proptest_config(cfg(64))]

    #[test]
    fn series_ring_laws(ta in smooth_terms(), tb in smooth_terms(), tc in smooth_terms(),
                        ha in horizon_choice(), hb in horizon_choice(), hc in horizon_choice()) {
        let basis = smooth_basis();
        let a = smooth_series_from(&basis, &ta, ha);
        let b = smooth_series_from(&basis, &tb, hb);
        let c = smooth_series_from(&basis, &tc, hc);
        let l = a.add(&b).unwrap().add(&c).unwrap();
        let r = a.add(&b.add(&c).unwrap()).unwrap();
        prop_assert_eq!(l, r);
        let l = a.mul(&b.add(&c).unwrap()).unwrap();
        let r = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        let (l, r) = common_cut(&l, &r);
        prop_assert_eq!(l, r);
        let l = a.mul(&b).unwrap().mul(&c).unwrap();
        let r = a.mul(&b.mul(&c).unwrap()).unwrap();
        let (l, r) = common_cut(&l, &r);
        prop_assert_eq!(l, r);
    }

    #[test]
    fn shift_and_differentiation_commute(ta in smooth_terms(), h in rational(), k in 0u32..4) {
        let a = smooth_series_from(&smooth_basis(), &ta, Some(30));
        prop_assert_eq!(a.shift(&h).differentiate(k), a.differentiate(k).shift(&h));
    }

    #[test]
    fn product_matches_double_loop(
        ta in prop::collection::vec(((0i64..4, 0i64..4), nonzero_rational()), 0..=6),
        tb in prop::collection::vec(((0i64..4, 0i64..4), nonzero_rational()), 0..=6),
        ha in prop::option::of((0i64..5, 0i64..5)),
        hb in prop::option::of((0i64..5, 0i64..5)),
    ) {
        let basis = Arc::new(SymbolBasis::from_pairs(&[("a", "1"), ("b", "7/3")]).unwrap());
        let e = |(i, j): (i64, i64)| Exponent::from_pairs([(Symbol::new("a"), q(i)), (Symbol::new("b"), q(j))]);
        let hz = |h: Option<(i64, i64)>| h.map(e);
        let build = |t: &[((i64, i64), Q)], h: &Option<Exponent>| {
            let kept: Vec<_> = t
                .iter()
                .filter(|(ij, _)| h.as_ref().is_none_or(|h| basis.cmp(&e(*ij), h) != std::cmp::Ordering::Greater))
                .map(|(ij, c)| (e(*ij), Coefficient::constant(c.clone())))
                .collect();
            let hor = h.clone().map_or(Horizon::Infinite, Horizon::Finite);
            FormalSeries::from_coefficients(basis.clone(), kept, hor).unwrap()
        };
        let (ha, hb) = (hz(ha), hz(hb));
        let a = build(&ta, &ha);
        let b = build(&tb, &hb);
        let p = a.mul(&b).unwrap();
        // independent oracle: all pairwise products, cut at the product horizon
        let lowest = |s: &FormalSeries| s.exponents().next().cloned();
        let mut cap: Option<Exponent> = None;
        let mut tighten = |t: Exponent| {
            cap = Some(match cap.take() {
                Some(c) if basis.cmp(&c, &t) != std::cmp::Ordering::Greater => c,
                _ => t,
            });
        };
        if let Some(t) = &ha {
            tighten(lowest(&b).map_or(t.clone(), |m| t + &m));
        }
        if let Some(t) = &hb {
            tighten(lowest(&a).map_or(t.clone(), |m| t + &m));
        }
        let mut oracle: BTreeMap<Exponent, Q> = BTreeMap::new();
        for (ea, pa) in a.terms() {
            for (eb, pb) in b.terms() {
                let s = ea + eb;
                if cap.as_ref().is_some_and(|c| basis.cmp(&s, c) == std::cmp::Ordering::Greater) {
                    continue;
                }
                let ca = pa.as_constant().unwrap().as_constant().unwrap();
                let cb = pb.as_constant().unwrap().as_constant().unwrap();
                *oracle.entry(s).or_insert_with(Q::zero) += ca * cb;
            }
        }
        oracle.retain(|_, c| !c.is_zero());
        let got: BTreeMap<Exponent, Q> =
            p.terms().iter().map(|(e, c)| (e.clone(), c.as_constant().unwrap().as_constant().unwrap())).collect();
        prop_assert_eq!(got, oracle);
    }
}

#[test]
fn exponent_order_is_stable_under_more_precision() {
    let lo = SymbolBasis::log_primes(&[2, 3, 5]).with_precision(64);
    let hi = lo.with_precision(128);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let syms = [Symbol::log_prime(2), Symbol::log_prime(3), Symbol::log_prime(5)];
    let random = |rng: &mut ChaCha8Rng| {
        Exponent::from_pairs(syms.iter().map(|s| (s.clone(), q(rng.random_range(-20..=20)))))
    };
    let mut ties = 0;
    for _ in 0..10_000 {
        let a = random(&mut rng);
        let b = random(&mut rng);
        match lo.try_cmp(&a, &b) {
            Ok(o) => assert_eq!(hi.try_cmp(&a, &b).unwrap_or(o), o, "{a} vs {b}"),
            Err(_) => ties += 1,
        }
    }
    // integer combinations of independent logs only tie when equal
    assert!(ties < 10_000);
}

fn small_poly() -> impl Strategy<Value = DiffPolynomial> {
    // terms x^i f^j f'^k with small integer coefficients
    prop::collection::vec(((0u32..=3, 0u32..=3, 0u32..=1), -3i64..=3), 1..=5).prop_map(|ts| {
        let mut p = DiffPolynomial::zero();
        for ((i, j, k), c) in ts {
            let mut powers = BTreeMap::new();
            if j > 0 {
                powers.insert(DiffIndeterminate::deriv(0), j);
            }
            if k > 0 {
                powers.insert(DiffIndeterminate::deriv(1), k);
            }
            p = p.add(&DiffPolynomial::term(DiffMonomial { x_degree: i, powers }, Coefficient::int(c)));
        }
        p
    })
}

fn x_poly_over_f() -> impl Strategy<Value = DiffPolynomial> {
    prop::collection::vec(((0u32..=2, 0u32..=1), -3i64..=3), 1..=4).prop_map(|ts| {
        let mut p = DiffPolynomial::zero();
        for ((i, j), c) in ts {
            let powers = if j > 0 { BTreeMap::from([(DiffIndeterminate::deriv(0), j)]) } else { BTreeMap::new() };
            p = p.add(&DiffPolynomial::term(DiffMonomial { x_degree: i, powers }, Coefficient::int(c)));
        }
        p
    })
}

fn res(a: &DiffPolynomial, b: &DiffPolynomial) -> DiffPolynomial {
    sylvester_resultant(&a.x_coefficients(), &b.x_coefficients()).unwrap()
}

proptest! {
    #![proptest_config(cfg(48))]

    #[test]
    fn elimination_vanishes_on_constructed_solutions(
        c in nonzero_rational(), k in 1u32..=2,
        g in prop::collection::vec(((0u32..=1, 0u32..=1), -2i64..=2), 1..=3),
    ) {
        // F = (f - c x^k) G has the solution φ = c x^k
        let phi = XPoly::monomial(Coefficient::constant(c.clone()), k as usize);
        let mut gp = DiffPolynomial::zero();
        for ((i, j), a) in g {
            let powers = if j > 0 { BTreeMap::from([(DiffIndeterminate::deriv(0), j)]) } else { BTreeMap::new() };
            gp = gp.add(&DiffPolynomial::term(DiffMonomial { x_degree: i, powers }, Coefficient::int(a)));
        }
        prop_assume!(!gp.is_zero());
        let root = DiffPolynomial::f(0).sub(&DiffPolynomial::x().pow(k).scale(&Coefficient::constant(c)));
        let f = root.mul(&gp);
        prop_assert!(f.evaluate_on_polynomial(&phi).is_zero());
        match eliminate_x(&f) {
            Ok(r) => {
                prop_assert_eq!(r.x_degree(), 0);
                prop_assert!(r.evaluate_on_polynomial(&phi).is_zero(), "F** = {}", r);
            }
            Err(dforge_core::Error::ResultantVanished) => {}
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn resultant_symmetry_and_multiplicativity(a in x_poly_over_f(), b in x_poly_over_f(), c in x_poly_over_f()) {
        prop_assume!(a.x_degree() >= 1 && b.x_degree() >= 1 && c.x_degree() >= 1);
        let ab = res(&a, &b);
        let ba = res(&b, &a);
        prop_assert!(ab == ba || ab == ba.neg());
        prop_assert_eq!(res(&a, &b.mul(&c)), ab.mul(&res(&a, &c)));
    }

    #[test]
    fn partials_do_not_raise_degree(f in small_poly()) {
        let n = f.total_degree();
        for z in f.indeterminates() {
            let p = f.partial_wrt(&z);
            prop_assert!(p.is_zero() || p.total_degree() <= n);
        }
    }
}

/// Random positive-exponent series over `ONE` with small rational coefficients.
fn one_series() -> impl Strategy<Value = FormalSeries> {
    (prop::collection::btree_map(1i64..=8, nonzero_rational(), 1..=5), 9i64..=12).prop_map(|(ts, h)| {
        let basis = Arc::new(SymbolBasis::one());
        let terms = ts.into_iter().map(|(e, c)| (Exponent::integer(e), Coefficient::constant(c)));
        FormalSeries::from_coefficients(basis, terms, Horizon::Finite(Exponent::integer(h))).unwrap()
    })
}

fn const_poly() -> impl Strategy<Value = DiffPolynomial> {
    small_poly().prop_map(|p| {
        let mut out = DiffPolynomial::zero();
        for (m, c) in p.terms() {
            let m = DiffMonomial { x_degree: 0, powers: m.powers.clone() };
            out = out.add(&DiffPolynomial::term(m, c.clone()));
        }
        out
    })
}

fn factorial(n: u32) -> Q {
    (1..=n).fold(Q::one(), |acc, k| acc * q(k as i64))
}

proptest! {
    #![proptest_config(cfg(32))]

    #[test]
    fn substitution_is_linear(f in const_poly(), g in const_poly(), phi in one_series()) {
        let rf = substitute(&f, &phi, None).unwrap().series;
        let rg = substitute(&g, &phi, None).unwrap().series;
        let rs = substitute(&f.add(&g), &phi, None).unwrap().series;
        let sum = rf.add(&rg).unwrap();
        let (a, b) = common_cut(&rs, &sum);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn taylor_split_recombines(f in const_poly(), phi in one_series(), split in 1usize..5) {
        prop_assume!(split < phi.len());
        let basis = phi.basis().clone();
        let head = FormalSeries::new(basis.clone(), phi.terms()[..split].to_vec(), Horizon::Infinite).unwrap();
        let tail = FormalSeries::new(basis.clone(), phi.terms()[split..].to_vec(), phi.horizon().clone()).unwrap();
        let lambda_i = phi.terms()[split].0.clone();
        let lambda_0 = phi.terms()[0].0.clone();
        let n = f.total_degree() as i64;
        let zs = f.indeterminates();
        // all multi-indices over zs of total order <= n
        let mut alphas: Vec<Vec<u32>> = vec![vec![]];
        for _ in &zs {
            alphas = alphas
                .into_iter()
                .flat_map(|a| (0..=n as u32).map(move |k| { let mut b = a.clone(); b.push(k); b }))
                .filter(|a| a.iter().sum::<u32>() as i64 <= n)
                .collect();
        }
        let mut total = FormalSeries::zero(basis.clone(), Horizon::Infinite);
        let bound = &lambda_i.scale(&q(2)) - &lambda_0.scale(&q((n - 2).max(0)));
        for alpha in alphas {
            let mut d = f.clone();
            let mut fact = Q::one();
            let mut term = FormalSeries::constant(basis.clone(), Coefficient::one());
            for (z, &k) in zs.iter().zip(&alpha) {
                for _ in 0..k {
                    d = d.partial_wrt(z);
                }
                fact *= factorial(k);
                term = term.mul(&tail.differentiate(z.order).pow(k).unwrap()).unwrap();
            }
            if d.is_zero() {
                continue;
            }
            let piece = evaluate(&d, &head).unwrap().mul(&term).unwrap().scale(&Coefficient::constant(fact.recip()));
            if alpha.iter().sum::<u32>() >= 2 {
                for e in piece.exponents() {
                    prop_assert!(basis.cmp(e, &bound) != std::cmp::Ordering::Less, "{} below {}", e, bound);
                }
            }
            total = total.add(&piece).unwrap();
        }
        let direct = evaluate(&f, &phi).unwrap();
        let (a, b) = common_cut(&total, &direct);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn truncation_keeps_initial_partial_terms(n in 6i64..16) {
        let f = fixtures::geometric_equation();
        let long = initial_terms_of_partials(&f, &fixtures::geometric(20)).unwrap();
        let short = initial_terms_of_partials(&f, &fixtures::geometric(n)).unwrap();
        prop_assert_eq!(short.terms, long.terms);
    }
}

fn rational_exponents() -> impl Strategy<Value = Vec<Exponent>> {
    let e = prop::collection::vec((-3i64..=3, 1i64..=2), 3).prop_map(|v| {
        Exponent::from_pairs(
            ["a", "b", "c"].iter().zip(v).map(|(s, (n, d))| (Symbol::new(s), qr(n, d))),
        )
    });
    prop::collection::vec(e, 1..=5)
}

fn abc_basis() -> SymbolBasis {
    SymbolBasis::from_pairs(&[("a", "1"), ("b", "log(2)"), ("c", "log(3)")]).unwrap()
}

proptest! {
    #![proptest_config(cfg(64))]

    #[test]
    fn lattice_basis_is_sound_and_idempotent(exps in rational_exponents()) {
        let basis = abc_basis();
        let b = integer_basis(&exps, &basis);
        for e in &exps {
            let x = b.express(e).unwrap();
            prop_assert_eq!(&b.reconstruct(&x), e);
        }
        let again = integer_basis(&b.generators, &basis);
        prop_assert_eq!(again.rank(), b.rank());
        for (j, g) in b.generators.iter().enumerate() {
            let x = b.express(g).unwrap();
            for (i, xi) in x.iter().enumerate() {
                prop_assert_eq!(xi.clone(), if i == j { 1.into() } else { 0.into() });
            }
        }
    }

    #[test]
    fn prime_support_of_union(s1 in prop::collection::vec(1u64..500, 0..20), s2 in prop::collection::vec(1u64..500, 0..20)) {
        let a = prime_support(s1.clone(), 1000).unwrap();
        let b = prime_support(s2.clone(), 1000).unwrap();
        let u = prime_support(s1.into_iter().chain(s2), 1000).unwrap();
        let union: std::collections::BTreeSet<u64> = a.primes.union(&b.primes).copied().collect();
        prop_assert_eq!(u.primes, union);
    }

    #[test]
    fn rescale_composes_and_is_multiplicative(
        ta in smooth_terms(), tb in smooth_terms(),
        c1 in prop::collection::vec(nonzero_rational(), 3),
        c2 in prop::collection::vec(nonzero_rational(), 3),
    ) {
        let basis = smooth_basis();
        let lb = integer_basis(&[log_exponent(2), log_exponent(3), log_exponent(5)], &basis);
        let a = smooth_series_from(&basis, &ta, Some(30));
        let b = smooth_series_from(&basis, &tb, Some(30));
        let prod: Vec<Q> = c1.iter().zip(&c2).map(|(x, y)| x * y).collect();
        let twice = rescale(&rescale(&a, &lb, &c1).unwrap(), &lb, &c2).unwrap();
        prop_assert_eq!(twice, rescale(&a, &lb, &prod).unwrap());
        prop_assert_eq!(rescale(&a, &lb, &[q(1), q(1), q(1)]).unwrap(), a.clone());
        let lhs = rescale(&a.mul(&b).unwrap(), &lb, &c1).unwrap();
        let rhs = rescale(&a, &lb, &c1).unwrap().mul(&rescale(&b, &lb, &c1).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(cfg(12))]

    #[test]
    fn found_equations_substitute_to_zero(p in nonzero_rational(), r in nonzero_rational(), w in 2u32..=3) {
        let basis = Arc::new(SymbolBasis::from_pairs(&[("a", "1"), ("b", "5/2")]).unwrap());
        let t = |s: &str, c: &Q| (Exponent::single(Symbol::new(s), q(1)), Coefficient::constant(c.clone()));
        let phi = FormalSeries::from_coefficients(basis, [t("a", &p), t("b", &r)], Horizon::Infinite).unwrap();
        let s = derive_ade_search(&phi, w, None).unwrap();
        if let Some(d) = s.found {
            prop_assert!(substitute(&d.equation, &phi, None).unwrap().is_zero());
        }
        for z in &s.refuted {
            prop_assert!(!z.products.is_empty());
        }
    }

    #[test]
    fn zeta_prefixes_have_no_small_equation(n in 24u64..=40, w in 2u32..=4) {
        let s = derive_ade_search(&fixtures::zeta(n), w, None).unwrap();
        prop_assert!(s.found.is_none());
    }
}

fn random_diffpoly() -> impl Strategy<Value = DiffPolynomial> {
    let z = prop_oneof![
        Just(DiffIndeterminate::deriv(0)),
        Just(DiffIndeterminate::deriv(1)),
        Just(DiffIndeterminate::deriv(2)),
        Just(DiffIndeterminate::new(0, q(1))),
        Just(DiffIndeterminate::new(1, qr(-1, 2))),
    ];
    let coef = (rational(), 0u32..=2, 0u32..=1).prop_map(|(r, l, m)| {
        let mut c = Coefficient::constant(r);
        for _ in 0..l {
            c = &c * &Coefficient::symbol(&Symbol::new("lam"));
        }
        for _ in 0..m {
            c = &c * &Coefficient::symbol(&Symbol::new("mu"));
        }
        c
    });
    let mono = (0u32..=2, prop::collection::btree_map(z, 1u32..=3, 0..=3));
    prop::collection::vec((mono, coef), 0..=5).prop_map(|ts| {
        let mut p = DiffPolynomial::zero();
        for ((x_degree, powers), c) in ts {
            p = p.add(&DiffPolynomial::term(DiffMonomial { x_degree, powers }, c));
        }
        p
    })
}

proptest! {
    #![proptest_config(cfg(1000))]

    #[test]
    fn print_parse_round_trip(p in random_diffpoly()) {
        let text = p.to_string();
        prop_assert_eq!(parse_diffpoly_lenient(&text).unwrap(), p, "{}", text);
    }
}

proptest! {
    #![proptest_config(cfg(24))]

    #[test]
    fn signflip_identity(coeffs in prop::collection::vec(rational(), 20..80)) {
        match signflip_construct(&coeffs, None) {
            Ok((p1, qq, pos)) => {
                for i in 0..coeffs.len() {
                    prop_assert_eq!(&p1[i] + &qq[i] + &qq[i], coeffs[i].clone());
                }
                prop_assert!(pos.windows(2).all(|w| w[1] > w[0]));
                for &k in &pos {
                    prop_assert!(!coeffs[k as usize].is_zero());
                }
            }
            Err(dforge_core::Error::InsufficientNonzeroTerms { found }) => prop_assert!(found < 2),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
    }

    #[test]
    fn random_certificates_reverify(idx in prop::collection::vec(1u64..400, 1..60), bound in 1usize..8) {
        let c = finite_basis_certificate(ExponentStream::Indices(&idx), bound).unwrap();
        prop_assert!(verify_certificate(&c).unwrap().is_ok());
        let again = Certificate::build(c.input.clone()).unwrap();
        prop_assert_eq!(again.to_json(), c.to_json());
    }
}

#[test]
fn satisfied_fixtures_have_stable_rank() {
    for fx in fixtures::satisfaction_fixtures() {
        let sub = Certificate::build(Procedure::Substitute {
            equation: fx.equation.to_string(),
            series: dforge_core::io::SeriesSpec::from_series(&fx.series),
            horizon: None,
            prop3: false,
            precision: fx.series.basis().precision(),
        })
        .unwrap();
        assert!(!sub.is_refutation(), "{}", fx.name);
        let fb = finite_basis_certificate(ExponentStream::Series(&fx.series), fx.series.basis().len()).unwrap();
        let rank = fb.evidence["rank"].as_u64().unwrap() as usize;
        assert_eq!(rank, fx.lattice.rank(), "{}", fx.name);
        assert!(rank <= fx.series.basis().len(), "{}", fx.name);
        assert!(!fb.is_refutation(), "{}", fx.name);
        if fx.series.len() >= 4 {
            let last = fb.evidence["last_increase_at"].as_u64().unwrap() as usize;
            assert!(last < fx.series.len() / 2, "{}", fx.name);
        }
    }
}
