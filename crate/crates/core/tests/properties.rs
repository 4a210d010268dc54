mod common;

use common::{int, rat};
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use qvolk_core::characters::euler_phi;
use qvolk_core::measure::{ball_measure, MeasureKind, MeasureSpec};
use qvolk_core::padic::Valuation;
use qvolk_core::{
    enumerate_characters, Field, PadicNumber, Polynomial, ProfiniteDomain, RationalFunction, RationalQ, Rationals,
    TruncatedSeries,
};

fn small_rational() -> impl Strategy<Value = BigRational> {
    (-40i64..40, 1i64..12).prop_map(|(n, d)| rat(n, d))
}

fn poly(max_len: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec(-6i64..7, 1..=max_len).prop_map(|c| Polynomial::from_ints(&c))
}

fn ratfunc(d: u32) -> impl Strategy<Value = RationalFunction> {
    (poly(4), poly(4))
        .prop_filter("nonzero denominator", |(_, den)| !den.is_zero())
        .prop_map(move |(num, den)| RationalFunction::reduce_fraction(num, den, d).unwrap())
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(64)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn rational_functions_form_a_field(a in ratfunc(2), b in ratfunc(2), c in ratfunc(2)) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        if !a.is_zero() {
            prop_assert!(a.checked_div(&a).unwrap().is_one());
        }
    }

    #[test]
    fn reduction_is_idempotent(a in ratfunc(1)) {
        let again = RationalFunction::reduce_fraction(a.numerator().clone(), a.denominator().clone(), 1).unwrap();
        prop_assert_eq!(again, a);
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in ratfunc(1), b in ratfunc(1), t in small_rational()) {
        let (Ok(ea), Ok(eb)) = (a.evaluate(&t), b.evaluate(&t)) else { return Ok(()) };
        prop_assert_eq!((&a * &b).evaluate(&t).unwrap(), &ea * &eb);
        prop_assert_eq!((&a + &b).evaluate(&t).unwrap(), ea + eb);
    }

    #[test]
    fn limit_at_one_is_multiplicative(a in ratfunc(1), b in ratfunc(1)) {
        if let (Ok(la), Ok(lb)) = (a.limit_at_one(), b.limit_at_one()) {
            prop_assert_eq!((&a * &b).limit_at_one().unwrap(), la * lb);
        }
    }

    #[test]
    fn rebasing_preserves_values(a in ratfunc(1), t in small_rational()) {
        // w' = t with w = t^3
        let rebased = a.rebase_root_order(3).unwrap();
        let cube = &t * &t * &t;
        if let Ok(v) = a.evaluate(&cube) {
            prop_assert_eq!(rebased.evaluate(&t).unwrap(), v);
        }
    }
}

fn padic_pair() -> impl Strategy<Value = (u64, BigRational, BigRational)> {
    (prop::sample::select(vec![3u64, 5, 7]), small_rational(), small_rational())
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn padic_embedding_is_a_ring_homomorphism((p, r, s) in padic_pair()) {
        let a = PadicNumber::from_rational(&r, p, 20).unwrap();
        let b = PadicNumber::from_rational(&s, p, 20).unwrap();
        let sum = PadicNumber::from_rational(&(&r + &s), p, 20).unwrap();
        let prod = PadicNumber::from_rational(&(&r * &s), p, 20).unwrap();
        let abs = a.absolute_precision().min(b.absolute_precision());
        prop_assert!(a.add(&b).unwrap().agrees_with(&sum, abs).unwrap());
        let (va, vb) = (a.valuation().lower_bound(), b.valuation().lower_bound());
        let prod_abs = (a.absolute_precision() + vb).min(b.absolute_precision() + va);
        prop_assert!(a.mul(&b).unwrap().agrees_with(&prod, prod_abs).unwrap());
        prop_assert!(a.add(&b).unwrap().agrees_with(&b.add(&a).unwrap(), abs).unwrap());
    }

    #[test]
    fn valuation_is_ultrametric((p, r, s) in padic_pair()) {
        prop_assume!(!r.is_zero() && !s.is_zero());
        let a = PadicNumber::from_rational(&r, p, 20).unwrap();
        let b = PadicNumber::from_rational(&s, p, 20).unwrap();
        let va = a.valuation().lower_bound();
        let vb = b.valuation().lower_bound();
        prop_assert!(a.add(&b).unwrap().valuation().lower_bound() >= va.min(vb));
        prop_assert_eq!(a.mul(&b).unwrap().valuation(), Valuation::Finite(va + vb));
        prop_assert_eq!(va, common::valuation(&r, p));
    }

    #[test]
    fn precision_is_never_overstated((p, r, s) in padic_pair()) {
        prop_assume!(!r.is_zero() && !s.is_zero());
        let a = PadicNumber::from_rational(&r, p, 8).unwrap();
        let b = PadicNumber::from_rational(&s, p, 12).unwrap();
        let prod = a.mul(&b).unwrap();
        prop_assert!(prod.precision() <= 8);
        // The exact product agrees to every digit the result claims.
        let exact = PadicNumber::from_rational(&(&r * &s), p, 40).unwrap();
        prop_assert!(prod.agrees_with(&exact, prod.absolute_precision()).unwrap());
    }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn characters_are_multiplicative(f in 1u64..=15, a in 0u64..200, b in 0u64..200) {
        for chi in enumerate_characters(f).unwrap() {
            let l = chi.value_order();
            match (chi.value_exponent(a), chi.value_exponent(b)) {
                (Some(ea), Some(eb)) => prop_assert_eq!(chi.value_exponent(a * b), Some((ea + eb) % l)),
                _ => prop_assert_eq!(chi.value_exponent(a * b), None),
            }
        }
    }

    #[test]
    fn characters_are_periodic(f in 1u64..=15, a in 0u64..100) {
        for chi in enumerate_characters(f).unwrap() {
            prop_assert_eq!(chi.value_exponent(a), chi.value_exponent(a + f));
        }
    }
}

/// `chi(a)` as the fraction `e / L` of a full turn.
fn turn(e: u64, l: u64) -> BigRational {
    rat(e as i64, l as i64)
}

#[test]
fn character_orthogonality() {
    for f in 1..=15u64 {
        let chars = enumerate_characters(f).unwrap();
        let phi = euler_phi(f);
        assert_eq!(chars.len() as u64, phi, "f = {f}");
        let units: Vec<u64> = (0..f).filter(|&a| num_integer::gcd(a, f) == 1).collect();
        // Over the units, a nontrivial character takes each of its L values equally often.
        for chi in &chars {
            let l = chi.value_order();
            let mut counts = vec![0u64; l as usize];
            for &a in &units {
                counts[chi.value_exponent(a).unwrap() as usize] += 1;
            }
            assert!(counts.iter().all(|&c| c == phi / l), "f = {f}, chi = {chi}");
        }
        // Over the characters, chi(a) is equidistributed on more than one value when a != 1.
        for &a in &units {
            let mut seen: Vec<(BigRational, u64)> = Vec::new();
            for chi in &chars {
                let t = turn(chi.value_exponent(a).unwrap(), chi.value_order());
                match seen.iter_mut().find(|(v, _)| *v == t) {
                    Some((_, c)) => *c += 1,
                    None => seen.push((t, 1)),
                }
            }
            let first = seen[0].1;
            assert!(seen.iter().all(|&(_, c)| c == first), "f = {f}, a = {a}");
            assert_eq!(seen.len() == 1, a == 1 % f, "f = {f}, a = {a}");
        }
    }
}

fn rational_series(order: usize) -> impl Strategy<Value = Vec<BigRational>> {
    prop::collection::vec(small_rational(), order + 1)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn exp_of_negation_is_inverse(mut c in rational_series(6)) {
        c[0] = BigRational::zero();
        let s = TruncatedSeries::new(Rationals, c, 6);
        let e = s.exp().unwrap();
        let back = s.scale(&int(-1)).exp().unwrap();
        prop_assert_eq!(e.mul(&back).unwrap(), TruncatedSeries::one(Rationals, 6));
        prop_assert_eq!(e.inverse().unwrap(), back);
    }

    #[test]
    fn inverse_is_two_sided(mut c in rational_series(6)) {
        if c[0].is_zero() {
            c[0] = BigRational::one();
        }
        let s = TruncatedSeries::new(Rationals, c, 6);
        let inv = s.inverse().unwrap();
        prop_assert_eq!(s.mul(&inv).unwrap(), TruncatedSeries::one(Rationals, 6));
        prop_assert_eq!(inv.inverse().unwrap(), s);
    }

    #[test]
    fn exp_turns_sums_into_products(mut a in rational_series(5), mut b in rational_series(5)) {
        a[0] = BigRational::zero();
        b[0] = BigRational::zero();
        let a = TruncatedSeries::new(Rationals, a, 5);
        let b = TruncatedSeries::new(Rationals, b, 5);
        prop_assert_eq!(a.add(&b).unwrap().exp().unwrap(), a.exp().unwrap().mul(&b.exp().unwrap()).unwrap());
    }
}

fn measure_case() -> impl Strategy<Value = (bool, u64, u64, u32, u64, BigRational)> {
    (
        any::<bool>(),
        prop::sample::select(vec![3u64, 5, 7]),
        prop::sample::select(vec![1u64, 5, 7, 11]),
        1u32..=2,
        0u64..10_000,
        prop::sample::select(vec![rat(2, 3), rat(-3, 1), rat(5, 2), rat(1, 7)]),
    )
        .prop_filter("d prime to p", |(_, p, d, ..)| d % p != 0)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn ball_measures_are_additive((bosonic, p, d, level, a, q) in measure_case()) {
        let kind = if bosonic { MeasureKind::Bosonic } else { MeasureKind::Fermionic };
        let spec = MeasureSpec::new(kind, RationalQ::new(q).unwrap(), ProfiniteDomain::new(p, d).unwrap()).unwrap();
        let m = spec.domain().level_size(level, 1 << 20).unwrap();
        let a = a % m;
        let whole = ball_measure(&spec, a, level, 1 << 20).unwrap();
        let parts = spec.field().sum((0..p).map(|i| ball_measure(&spec, a + i * m, level + 1, 1 << 20).unwrap()));
        prop_assert_eq!(whole, parts);
        let total = spec.field().sum((0..m).map(|b| ball_measure(&spec, b, level, 1 << 20).unwrap()));
        prop_assert!(total.is_one());
    }
}
