//! The q-Bernoulli numbers and polynomials `beta`, the fermionic numbers and
//! polynomials `K`, the distribution relation for `K`, and the twisted
//! numbers `K_{n,chi,q}`.
//!
//! Every closed form takes a base exponent `b` where it is evaluated at
//! `q^b`. Arguments `y` then only ever appear as `q^{b y k}`, so a
//! fraction like `(a + x) / m` at base `m` needs nothing beyond the
//! denominator of `x`, and `a / f` at base `f` needs no root of `q` at all.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::{CyclotomicElement, RationalFunction};
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::field::{Field, PadicQ, QField, SymbolicQ};
use crate::measure::{
    integrate, q_bracket, q_bracket_base, q_bracket_neg, weighted_sum, BuiltinIntegrand,
    IntegrationResult, MeasureKind, MeasureSpec,
};
use crate::padic::{PadicNumber, ProfiniteDomain, DEFAULT_BALL_BUDGET};
use crate::series;

/// `C(n, k)` as a rational.
pub fn binomial(n: u32, k: u32) -> BigRational {
    if k > n {
        return BigRational::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    BigRational::from_integer(acc)
}

/// Which of the equivalent expressions to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    Closed,
    Expansion,
    Integral,
}

impl FromStr for Form {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "closed" => Ok(Form::Closed),
            "expansion" => Ok(Form::Expansion),
            "integral" => Ok(Form::Integral),
            other => Err(Error::Invalid(format!("unknown form {other:?}"))),
        }
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Form::Closed => "closed",
            Form::Expansion => "expansion",
            Form::Integral => "integral",
        })
    }
}

fn integral_needs_padic() -> Error {
    Error::Invalid("the integral form needs a p-adic q".into())
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

fn signed<F: Field>(field: &F, c: F::Elem, negative: bool) -> F::Elem {
    if negative {
        field.neg(&c)
    } else {
        c
    }
}

/// `(1 - q)^{-n}`.
fn inv_one_minus_q_pow<F: QField>(field: &F, base: u64, n: u32) -> Result<F::Elem> {
    let one = field.one();
    let d = field.sub(&one, &field.q_pow_int(base as i64)?);
    Ok(field.pow(&field.div(&one, &d)?, n))
}

/// `sum_{i<=n} C(n,i) (-1)^i q^{x i} (i+1) / [i+1]_q`, scaled by `(1-q)^{-n}`.
fn beta_closed<F: QField>(field: &F, n: u32, x: &BigRational) -> Result<F::Elem> {
    let mut sum = field.zero();
    for i in 0..=n {
        let k = rat(i as i64 + 1);
        let moment = field.div(&field.from_rational(&k), &q_bracket(field, &k)?)?;
        let qxi = field.q_pow(&(x * rat(i as i64)))?;
        let c = field.from_rational(&binomial(n, i));
        let term = field.mul(&field.mul(&c, &qxi), &moment);
        sum = field.add(&sum, &signed(field, term, i % 2 == 1));
    }
    Ok(field.mul(&inv_one_minus_q_pow(field, 1, n)?, &sum))
}

/// `beta_{m,q}`, the bosonic moment of `[y]_q^m`.
pub fn beta_number<F: QField>(field: &F, m: u32) -> Result<F::Elem> {
    beta_closed(field, m, &BigRational::zero())
}

/// `beta_{n,q}(x)` in the closed or expansion form.
pub fn beta_polynomial<F: QField>(field: &F, n: u32, x: &BigRational, form: Form) -> Result<F::Elem> {
    match form {
        Form::Closed => beta_closed(field, n, x),
        Form::Expansion => {
            let bx = q_bracket(field, x)?;
            let mut sum = field.zero();
            for i in 0..=n {
                let c = field.from_rational(&binomial(n, i));
                let qix = field.q_pow(&(x * rat(i as i64)))?;
                let t = field.mul(&field.mul(&c, &qix), &beta_number(field, i)?);
                sum = field.add(&sum, &field.mul(&t, &field.pow(&bx, n - i)));
            }
            Ok(sum)
        }
        Form::Integral => Err(integral_needs_padic()),
    }
}

/// `K_{n,q^b}(y) = [2]_{q^b} (1-q^b)^{-n} sum_k C(n,k) (-1)^k q^{b y k} / (1 + q^{b(k+1)})`.
pub fn k_polynomial_at_base<F: QField>(field: &F, n: u32, y: &BigRational, base: u64) -> Result<F::Elem> {
    let one = field.one();
    let b = base as i64;
    let mut sum = field.zero();
    for k in 0..=n {
        let c = field.from_rational(&binomial(n, k));
        let qyk = field.q_pow(&(y * rat(b * k as i64)))?;
        let den = field.add(&one, &field.q_pow_int(b * (k as i64 + 1))?);
        let term = field.div(&field.mul(&c, &qyk), &den)?;
        sum = field.add(&sum, &signed(field, term, k % 2 == 1));
    }
    let two = field.add(&one, &field.q_pow_int(b)?);
    Ok(field.mul(&field.mul(&two, &inv_one_minus_q_pow(field, base, n)?), &sum))
}

/// `K_{k,q}`, the fermionic moment of `[y]_q^k`.
pub fn k_number<F: QField>(field: &F, k: u32) -> Result<F::Elem> {
    k_polynomial_at_base(field, k, &BigRational::zero(), 1)
}

/// `K_{n,q}(x)` in the closed form or as `sum_j C(n,j) [x]^{n-j} q^{j x} K_{j,q}`.
pub fn k_polynomial<F: QField>(field: &F, n: u32, x: &BigRational, form: Form) -> Result<F::Elem> {
    match form {
        Form::Closed => k_polynomial_at_base(field, n, x, 1),
        Form::Expansion => {
            let bx = q_bracket(field, x)?;
            let mut sum = field.zero();
            for j in 0..=n {
                let c = field.from_rational(&binomial(n, j));
                let qjx = field.q_pow(&(x * rat(j as i64)))?;
                let t = field.mul(&field.mul(&c, &qjx), &k_number(field, j)?);
                sum = field.add(&sum, &field.mul(&t, &field.pow(&bx, n - j)));
            }
            Ok(sum)
        }
        Form::Integral => Err(integral_needs_padic()),
    }
}

fn require_odd(what: &'static str, value: u64) -> Result<()> {
    if value % 2 == 0 {
        return Err(Error::EvenParameter { what, value });
    }
    Ok(())
}

/// `([m]_q^n / [m]_{-q}) sum_{a<m} (-1)^a q^a K_{n,q^m}((a + x) / m)` for odd `m`.
pub fn k_distribution_rhs<F: QField>(field: &F, n: u32, x: &BigRational, m: u64) -> Result<F::Elem> {
    require_odd("m", m)?;
    let mut sum = field.zero();
    for a in 0..m {
        let y = (rat(a as i64) + x) / rat(m as i64);
        let t = field.mul(&field.q_pow_int(a as i64)?, &k_polynomial_at_base(field, n, &y, m)?);
        sum = field.add(&sum, &signed(field, t, a % 2 == 1));
    }
    let mq = field.pow(&q_bracket(field, &rat(m as i64))?, n);
    let prefactor = field.div(&mq, &q_bracket_neg(field, m)?)?;
    Ok(field.mul(&prefactor, &sum))
}

/// `([f]_q^n / [f]_{-q}) sum_{a<f} chi(a) (-1)^a q^a K_{n,q^f}(a / f)` for characters
/// with values in `{0, 1, -1}` and odd modulus `f`.
pub fn k_chi_closed<F: QField>(field: &F, n: u32, chi: &DirichletCharacter) -> Result<F::Elem> {
    let f = chi.modulus();
    require_odd("f", f)?;
    let mut sum = field.zero();
    for a in 0..f {
        let c = chi.value_rational(a)?;
        if c.is_zero() {
            continue;
        }
        let y = BigRational::new(a.into(), f.into());
        let t = field.mul(&field.q_pow_int(a as i64)?, &k_polynomial_at_base(field, n, &y, f)?);
        let t = field.mul(&field.from_rational(&c), &t);
        sum = field.add(&sum, &signed(field, t, a % 2 == 1));
    }
    let fq = field.pow(&q_bracket(field, &rat(f as i64))?, n);
    let prefactor = field.div(&fq, &q_bracket_neg(field, f)?)?;
    Ok(field.mul(&prefactor, &sum))
}

/// The closed form for a character of any order, with `chi(a)` in the
/// cyclotomic field of order `L` over `Q(q)`.
pub fn k_chi_cyclotomic(n: u32, chi: &DirichletCharacter) -> Result<CyclotomicElement> {
    let f = chi.modulus();
    require_odd("f", f)?;
    let field = SymbolicQ::new(1)?;
    let order = chi.value_order();
    let mut sum = CyclotomicElement::zero(order, 1);
    for a in 0..f {
        let value = chi.value_cyclotomic(a, 1);
        if value.is_zero() {
            continue;
        }
        let y = BigRational::new(a.into(), f.into());
        let t = field.mul(&field.q_pow_int(a as i64)?, &k_polynomial_at_base(&field, n, &y, f)?);
        let t = signed(&field, t, a % 2 == 1);
        sum = sum.add(&value.scale(&t))?;
    }
    let fq = field.pow(&q_bracket(&field, &rat(f as i64))?, n);
    let prefactor: RationalFunction = field.div(&fq, &q_bracket_neg(&field, f)?)?;
    Ok(sum.scale(&prefactor))
}

/// `(1 / [f P]_{-q}) sum_{j < f P} chi(j) (-q)^j [j]_q^n`: the twisted Riemann sum
/// over `f P` points, for odd `f` and `P`.
pub fn k_chi_riemann_finite<F: QField>(field: &F, n: u32, chi: &DirichletCharacter, points: u64) -> Result<F::Elem> {
    let f = chi.modulus();
    require_odd("f", f)?;
    require_odd("P", points)?;
    let count = f * points;
    let s = weighted_sum(field, MeasureKind::Fermionic, count, &BuiltinIntegrand::CharTwisted(n, chi.clone()))?;
    field.div(&s, &q_bracket_neg(field, count)?)
}

/// The same sum regrouped by residues `a` mod `f`:
/// `([f]_q^n / [f]_{-q}) sum_a chi(a) (-1)^a q^a (1/[P]_{-q^f}) sum_{y<P} (-q^f)^y [a/f + y]_{q^f}^n`.
pub fn k_chi_decomposed_finite<F: QField>(
    field: &F,
    n: u32,
    chi: &DirichletCharacter,
    points: u64,
) -> Result<F::Elem> {
    let f = chi.modulus();
    require_odd("f", f)?;
    require_odd("P", points)?;
    let one = field.one();
    let qf = field.q_pow_int(f as i64)?;
    // [P]_{-q^f} = (1 + q^{f P}) / (1 + q^f) for odd P.
    let mass = field.div(&field.add(&one, &field.q_pow_int((f * points) as i64)?), &field.add(&one, &qf))?;
    let mut outer = field.zero();
    for a in 0..f {
        let c = chi.value_rational(a)?;
        if c.is_zero() {
            continue;
        }
        // (-q^f)^y: run the fermionic weights over the powers of q^f.
        let mut w = field.one();
        let mut s = field.zero();
        let step = field.neg(&qf);
        for y in 0..points {
            let arg = BigRational::new(a.into(), f.into()) + rat(y as i64);
            let bracket = field.pow(&q_bracket_base(field, &arg, f)?, n);
            s = field.add(&s, &field.mul(&w, &bracket));
            w = field.mul(&w, &step);
        }
        let t = field.mul(&field.q_pow_int(a as i64)?, &field.div(&s, &mass)?);
        let t = field.mul(&field.from_rational(&c), &t);
        outer = field.add(&outer, &signed(field, t, a % 2 == 1));
    }
    let fq = field.pow(&q_bracket(field, &rat(f as i64))?, n);
    let prefactor = field.div(&fq, &q_bracket_neg(field, f)?)?;
    Ok(field.mul(&prefactor, &outer))
}

/// Stopping rule for the p-adic integral forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntegralOptions {
    pub target: i64,
    pub n_max: u32,
    pub cap: u64,
}

impl Default for IntegralOptions {
    fn default() -> Self {
        IntegralOptions { target: 6, n_max: 8, cap: DEFAULT_BALL_BUDGET }
    }
}

fn integral_over(
    field: &PadicQ,
    kind: MeasureKind,
    d: u64,
    f: BuiltinIntegrand,
    opts: IntegralOptions,
) -> Result<IntegrationResult<PadicNumber>> {
    let domain = ProfiniteDomain::new(field.prime(), d)?;
    let spec = MeasureSpec::new(kind, field.clone(), domain)?;
    integrate(&spec, &f, opts.target, opts.n_max, opts.cap)
}

/// `beta_{n,q}(x)` as the bosonic integral of `[x + t]_q^n`.
pub fn beta_polynomial_integral(
    field: &PadicQ,
    n: u32,
    x: &BigRational,
    opts: IntegralOptions,
) -> Result<IntegrationResult<PadicNumber>> {
    integral_over(field, MeasureKind::Bosonic, 1, BuiltinIntegrand::ShiftedBracketPow(n, x.clone()), opts)
}

/// `K_{n,q}(x)` as the fermionic integral of `[x + y]_q^n`.
pub fn k_polynomial_integral(
    field: &PadicQ,
    n: u32,
    x: &BigRational,
    opts: IntegralOptions,
) -> Result<IntegrationResult<PadicNumber>> {
    integral_over(field, MeasureKind::Fermionic, 1, BuiltinIntegrand::ShiftedBracketPow(n, x.clone()), opts)
}

/// `K_{n,chi,q}` as the fermionic integral of `chi(x) [x]_q^n` over `X_f`.
pub fn k_chi_integral(
    field: &PadicQ,
    n: u32,
    chi: &DirichletCharacter,
    opts: IntegralOptions,
) -> Result<IntegrationResult<PadicNumber>> {
    require_odd("f", chi.modulus())?;
    chi.value_rational(1)?;
    integral_over(field, MeasureKind::Fermionic, chi.modulus(), BuiltinIntegrand::CharTwisted(n, chi.clone()), opts)
}

/// `n!` as a rational.
pub fn factorial(n: u32) -> BigRational {
    BigRational::from_integer((1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k)))
}

/// `E_0 .. E_{n_max}` from `2 / (e^t + 1)`.
pub fn classical_euler(n_max: u32) -> Vec<BigRational> {
    let gf = series::euler_gf(n_max as usize);
    (0..=n_max).map(|n| gf.coeff(n as usize) * factorial(n)).collect()
}

/// `B_0 .. B_{n_max}` from `t / (e^t - 1)`.
pub fn classical_bernoulli(n_max: u32) -> Vec<BigRational> {
    let gf = series::bernoulli_gf(n_max as usize);
    (0..=n_max).map(|n| gf.coeff(n as usize) * factorial(n)).collect()
}
