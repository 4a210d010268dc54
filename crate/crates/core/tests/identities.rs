mod common;

use common::{int, rat, Point};
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use qvolk_core::measure::{fermionic_power_moment, riemann_sum, BuiltinIntegrand, MeasureKind, MeasureSpec};
use qvolk_core::numbers::{self, Form, IntegralOptions};
use qvolk_core::{
    series, CyclotomicElement, DirichletCharacter, Polynomial, ProfiniteDomain, QField, RationalFunction, RationalQ,
    SymbolicQ,
};

fn sym(d: u32) -> SymbolicQ {
    SymbolicQ::new(d).unwrap()
}

fn ratfunc(num: &[i64], den: &[i64]) -> RationalFunction {
    RationalFunction::reduce_fraction(Polynomial::from_ints(num), Polynomial::from_ints(den), 1).unwrap()
}

fn x_strategy() -> impl Strategy<Value = BigRational> {
    (-6i64..7, 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

fn q_strategy() -> impl Strategy<Value = BigRational> {
    prop::sample::select(vec![rat(1, 2), rat(3, 1), rat(-2, 5), rat(7, 3)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn k_polynomial_forms_agree(n in 0u32..6, x in x_strategy()) {
        let f = sym(u32::try_from(x.denom()).unwrap());
        let closed = numbers::k_polynomial(&f, n, &x, Form::Closed).unwrap();
        prop_assert_eq!(&closed, &numbers::k_polynomial(&f, n, &x, Form::Expansion).unwrap());
        let w = rat(3, 2);
        prop_assert_eq!(closed.evaluate(&w).unwrap(), Point::new(w, f.root_order()).k_closed(n, &x));
    }

    #[test]
    fn beta_polynomial_forms_agree(n in 0u32..5, x in x_strategy()) {
        let f = sym(u32::try_from(x.denom()).unwrap());
        prop_assert_eq!(
            numbers::beta_polynomial(&f, n, &x, Form::Closed).unwrap(),
            numbers::beta_polynomial(&f, n, &x, Form::Expansion).unwrap()
        );
    }

    #[test]
    fn distribution_relation_at_rational_q(n in 0u32..5, m in prop::sample::select(vec![1u64, 3, 5, 7]), a in 0i64..4, q in q_strategy()) {
        // Integer x keeps every power of q rational.
        let field = RationalQ::new(q).unwrap();
        let x = int(a);
        prop_assert_eq!(
            numbers::k_polynomial(&field, n, &x, Form::Closed).unwrap(),
            numbers::k_distribution_rhs(&field, n, &x, m).unwrap()
        );
    }

    #[test]
    fn fermionic_moments_match_closed_form(i in 0u32..4, level in 1u32..3, q in q_strategy()) {
        // At a finite level M the sum carries (1 + q^{(i+1)M}) / (1 + q^M) on top of the limit.
        let field = RationalQ::new(q.clone()).unwrap();
        let spec = MeasureSpec::new(MeasureKind::Fermionic, field.clone(), ProfiniteDomain::zp(3).unwrap()).unwrap();
        let sum = riemann_sum(&spec, &BuiltinIntegrand::QPower(i), level, 1 << 20).unwrap();
        let m = 3u64.pow(level);
        let qi1 = num_traits::Pow::pow(&q, i + 1);
        let qm = num_traits::Pow::pow(&q, m);
        let tail = (int(1) + num_traits::Pow::pow(&qi1, m)) / (int(1) + &qm);
        let limit = (int(1) + &q) / (int(1) + &qi1);
        prop_assert_eq!(&sum, &(&limit * &tail));
        prop_assert_eq!(fermionic_power_moment(&field, i).unwrap(), limit);
    }

    #[test]
    fn trivial_twist_is_untwisted(n in 0u32..6, q in q_strategy()) {
        let field = RationalQ::new(q).unwrap();
        let chi = DirichletCharacter::trivial(1).unwrap();
        prop_assert_eq!(numbers::k_chi_closed(&field, n, &chi).unwrap(), numbers::k_number(&field, n).unwrap());
    }

    #[test]
    fn twisted_regrouping_is_exact(n in 0u32..3, q in q_strategy(), points in prop::sample::select(vec![1u64, 3, 5])) {
        let field = RationalQ::new(q).unwrap();
        let chi: DirichletCharacter = "3:1".parse().unwrap();
        prop_assert_eq!(
            numbers::k_chi_riemann_finite(&field, n, &chi, points).unwrap(),
            numbers::k_chi_decomposed_finite(&field, n, &chi, points).unwrap()
        );
    }
}

#[test]
fn beta_examples() {
    let f = sym(1);
    assert!(numbers::beta_number(&f, 0).unwrap().is_one());
    assert_eq!(numbers::beta_number(&f, 1).unwrap(), ratfunc(&[-1], &[1, 1]));
    let b2 = numbers::beta_number(&f, 2).unwrap();
    assert_eq!(b2, ratfunc(&[0, 1], &[1, 2, 2, 1]));
    assert_eq!(b2.limit_at_one().unwrap(), rat(1, 6));
    for n in 0..=6 {
        assert_eq!(
            numbers::beta_polynomial(&f, n, &int(0), Form::Closed).unwrap(),
            numbers::beta_number(&f, n).unwrap()
        );
    }
    // beta_1(1) = q beta_1 + [1]_q = 1/(1+q)
    assert_eq!(numbers::beta_polynomial(&f, 1, &int(1), Form::Expansion).unwrap(), ratfunc(&[1], &[1, 1]));
    // n = 1, x = 1/2 over w^2 = q: (1/(1-q)) (1 - 2w/[2]_q) = (1 - w)^2 / ((1 - w^2)(1 + w^2))
    let half = numbers::beta_polynomial(&sym(2), 1, &rat(1, 2), Form::Closed).unwrap();
    let expected =
        RationalFunction::reduce_fraction(Polynomial::from_ints(&[1, -2, 1]), Polynomial::from_ints(&[1, 0, 0, 0, -1]), 2)
            .unwrap();
    assert_eq!(half, expected);
}

#[test]
fn k_examples() {
    let f = sym(1);
    assert!(numbers::k_number(&f, 0).unwrap().is_one());
    assert_eq!(numbers::k_number(&f, 1).unwrap(), ratfunc(&[0, -1], &[1, 0, 1]));
    assert_eq!(numbers::k_number(&f, 1).unwrap().limit_at_one().unwrap(), rat(-1, 2));
    for n in 0..=8 {
        assert_eq!(numbers::k_polynomial(&f, n, &int(0), Form::Expansion).unwrap(), numbers::k_number(&f, n).unwrap());
    }
    // K_1(1) = ([2]_q/(1-q)) (1/(1+q) - q/(1+q^2)) = 1/(1+q^2)
    assert_eq!(numbers::k_polynomial(&f, 1, &int(1), Form::Closed).unwrap(), ratfunc(&[1], &[1, 0, 1]));
    assert_eq!(numbers::k_number(&RationalQ::new(rat(1, 2)).unwrap(), 1).unwrap(), rat(-2, 5));
}

#[test]
fn distribution_examples() {
    let f = sym(1);
    for n in 0..=4 {
        assert_eq!(
            numbers::k_distribution_rhs(&f, n, &int(0), 1).unwrap(),
            numbers::k_polynomial(&f, n, &int(0), Form::Closed).unwrap()
        );
    }
    assert!(numbers::k_distribution_rhs(&f, 0, &int(0), 3).unwrap().is_one());
    assert!(numbers::k_distribution_rhs(&f, 1, &int(0), 4).is_err());
}

#[test]
fn quadratic_twist_mod_three() {
    let chi: DirichletCharacter = "3:1".parse().unwrap();
    let f = sym(1);
    // n = 0: (1/[3]_{-q}) (-q - q^2) = -q(1+q)^2 / (1+q^3)
    assert_eq!(numbers::k_chi_closed(&f, 0, &chi).unwrap(), ratfunc(&[0, -1, -2, -1], &[1, 0, 0, 1]));
    let pt = Point::new(rat(2, 1), 1);
    for n in 0..=3 {
        let oracle = num_traits::Pow::pow(&pt.bracket(&int(3)), n) / pt.bracket_neg(3)
            * (-pt.q() * pt.k_closed_base(n, &rat(1, 3), 3) - pt.q() * pt.q() * pt.k_closed_base(n, &rat(2, 3), 3));
        assert_eq!(numbers::k_chi_closed(&f, n, &chi).unwrap().evaluate(&int(2)).unwrap(), oracle);
    }
}

#[test]
fn cyclotomic_twist_reduces_to_quadratic() {
    // A real character seen through Q(zeta_2) matches the rational path.
    let chi: DirichletCharacter = "5:2".parse().unwrap();
    let f = sym(1);
    for n in 0..=2 {
        let c: CyclotomicElement = numbers::k_chi_cyclotomic(n, &chi).unwrap();
        let real = numbers::k_chi_closed(&f, n, &chi).unwrap();
        assert_eq!(c.as_base(), Some(real), "n = {n}");
    }
}

#[test]
fn padic_integrals_match_closed_forms() {
    let field = qvolk_core::PadicQ::from_rational(&int(6), 5, 24).unwrap();
    let rq = RationalQ::new(int(6)).unwrap();
    let opts = IntegralOptions { target: 5, n_max: 7, cap: 1 << 22 };
    for n in 0..=3 {
        let res = numbers::k_polynomial_integral(&field, n, &int(1), opts).unwrap();
        let exact = numbers::k_polynomial(&rq, n, &int(1), Form::Closed).unwrap();
        let exact = qvolk_core::PadicNumber::from_rational(&exact, 5, 24).unwrap();
        assert!(res.value.agrees_with(&exact, 5).unwrap(), "n = {n}");
        let res = numbers::beta_polynomial_integral(&field, n, &BigRational::zero(), opts).unwrap();
        let exact = qvolk_core::PadicNumber::from_rational(&numbers::beta_number(&rq, n).unwrap(), 5, 24).unwrap();
        assert!(res.value.agrees_with(&exact, 4).unwrap(), "beta n = {n}");
    }
}

#[test]
fn generating_function_matches_numbers_at_rational_q() {
    let rq = RationalQ::new(rat(-1, 3)).unwrap();
    let s = series::f_q_series(&rq, 8).unwrap();
    let pt = Point::new(rat(-1, 3), 1);
    for n in 0..=8 {
        assert_eq!(s.scaled_coeff(n as usize), pt.k_closed(n, &int(0)));
    }
    assert_eq!(rq.q(), rat(-1, 3));
}

#[test]
fn classical_oracles_agree() {
    assert_eq!(numbers::classical_euler(14), common::euler(14));
    assert_eq!(numbers::classical_bernoulli(14), common::bernoulli(14));
    let gf = series::bernoulli_gf(10);
    let b = common::bernoulli(10);
    for n in 0..=10 {
        assert_eq!(gf.scaled_coeff(n), b[n]);
    }
    assert_eq!(common::fact(5), int(120));
}
