//! The bosonic measure `mu_q` and fermionic measure `mu_{-q}` on `X_d`,
//! their Riemann sums, and the p-adic limit with a Cauchy-style
//! certificate.
//!
//! Bosonic balls weigh `q^a / [d p^N]_q`; fermionic balls weigh
//! `(-q)^a / [d p^N]_{-q}`, which for odd `d p^N` equals
//! `(-q)^a (1 + q) / (1 + q^{d p^N})`.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{format_rational, parse_rational};
use crate::characters::DirichletCharacter;
use crate::error::{Error, Result};
use crate::field::{PadicQ, QField};
use crate::numbers::binomial;
use crate::padic::ProfiniteDomain;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureKind {
    Bosonic,
    Fermionic,
}

impl FromStr for MeasureKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bosonic" => Ok(MeasureKind::Bosonic),
            "fermionic" => Ok(MeasureKind::Fermionic),
            other => Err(Error::Invalid(format!("unknown measure kind {other:?}"))),
        }
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeasureKind::Bosonic => "bosonic",
            MeasureKind::Fermionic => "fermionic",
        })
    }
}

/// A measure kind over a domain, in a chosen field for `q`.
#[derive(Debug, Clone)]
pub struct MeasureSpec<F> {
    kind: MeasureKind,
    field: F,
    domain: ProfiniteDomain,
}

impl<F: QField> MeasureSpec<F> {
    /// Fermionic measures need odd `d`, so that `d p^N` is odd at every level.
    pub fn new(kind: MeasureKind, field: F, domain: ProfiniteDomain) -> Result<Self> {
        if kind == MeasureKind::Fermionic && domain.d() % 2 == 0 {
            return Err(Error::EvenParameter { what: "d", value: domain.d() });
        }
        Ok(MeasureSpec { kind, field, domain })
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn domain(&self) -> ProfiniteDomain {
        self.domain
    }
}

/// `[x]_{q^base} = (1 - q^{base x}) / (1 - q^base)`.
pub fn q_bracket_base<F: QField>(field: &F, x: &BigRational, base: u64) -> Result<F::Elem> {
    if x.is_zero() {
        return Ok(field.zero());
    }
    let b = BigRational::from_integer(base.into());
    let one = field.one();
    let num = field.sub(&one, &field.q_pow(&(x * &b))?);
    let den = field.sub(&one, &field.q_pow(&b)?);
    field.div(&num, &den)
}

/// `[x]_q = (1 - q^x) / (1 - q)`.
pub fn q_bracket<F: QField>(field: &F, x: &BigRational) -> Result<F::Elem> {
    q_bracket_base(field, x, 1)
}

/// `[n]_{-q} = (1 - (-q)^n) / (1 + q)` for a nonnegative integer `n`.
pub fn q_bracket_neg<F: QField>(field: &F, n: u64) -> Result<F::Elem> {
    let one = field.one();
    let q = field.q();
    let mut qn = field.q_pow_int(n as i64)?;
    if n % 2 == 1 {
        qn = field.neg(&qn);
    }
    field.div(&field.sub(&one, &qn), &field.add(&one, &q))
}

/// `(q)^j` or `(-q)^j` according to the measure kind.
fn weight<F: QField>(field: &F, kind: MeasureKind, j: u64) -> Result<F::Elem> {
    let qj = field.q_pow_int(j as i64)?;
    Ok(match kind {
        MeasureKind::Fermionic if j % 2 == 1 => field.neg(&qj),
        _ => qj,
    })
}

/// Normaliser `[M]_{±q}` of a level with `M` balls.
fn level_mass<F: QField>(field: &F, kind: MeasureKind, m: u64) -> Result<F::Elem> {
    match kind {
        MeasureKind::Bosonic => q_bracket(field, &BigRational::from_integer(m.into())),
        MeasureKind::Fermionic => q_bracket_neg(field, m),
    }
}

/// `mu(a + d p^N X)` for `0 <= a < d p^N`.
pub fn ball_measure<F: QField>(spec: &MeasureSpec<F>, a: u64, level: u32, cap: u64) -> Result<F::Elem> {
    let m = spec.domain.level_size(level, cap)?;
    if a >= m {
        return Err(Error::BallOutOfRange { a, bound: m });
    }
    let field = &spec.field;
    field.div(&weight(field, spec.kind, a)?, &level_mass(field, spec.kind, m)?)
}

/// The limit shape of the fermionic measure, `([2]_q / 2) (-1)^a q^a`.
pub fn fermionic_measure_limit<F: QField>(field: &F, a: u64) -> Result<F::Elem> {
    let half_two = field.mul(
        &field.add(&field.one(), &field.q()),
        &field.from_rational(&BigRational::new(1.into(), 2.into())),
    );
    Ok(field.mul(&half_two, &weight(field, MeasureKind::Fermionic, a)?))
}

/// A function on the integer representatives of the balls.
pub trait Integrand<F: QField>: Sync {
    fn eval(&self, field: &F, j: u64) -> Result<F::Elem>;
}

/// Wraps a closure as an integrand.
pub struct FnIntegrand<G>(pub G);

impl<F, G> Integrand<F> for FnIntegrand<G>
where
    F: QField,
    G: Fn(&F, u64) -> Result<F::Elem> + Sync,
{
    fn eval(&self, field: &F, j: u64) -> Result<F::Elem> {
        (self.0)(field, j)
    }
}

/// The built-in integrand families selectable by name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BuiltinIntegrand {
    /// `1`
    One,
    /// `[y]_q^n`
    BracketPow(u32),
    /// `[x + y]_q^n`
    ShiftedBracketPow(u32, BigRational),
    /// `chi(y) [y]_q^n`
    CharTwisted(u32, DirichletCharacter),
    /// `q^{i y}`
    QPower(u32),
}

impl<F: QField> Integrand<F> for BuiltinIntegrand {
    fn eval(&self, field: &F, j: u64) -> Result<F::Elem> {
        let y = BigRational::from_integer(j.into());
        match self {
            BuiltinIntegrand::One => Ok(field.one()),
            BuiltinIntegrand::BracketPow(n) => Ok(field.pow(&q_bracket(field, &y)?, *n)),
            BuiltinIntegrand::ShiftedBracketPow(n, x) => {
                Ok(field.pow(&q_bracket(field, &(x + y))?, *n))
            }
            BuiltinIntegrand::CharTwisted(n, chi) => {
                let c = chi.value_rational(j)?;
                if c.is_zero() {
                    return Ok(field.zero());
                }
                let b = field.pow(&q_bracket(field, &y)?, *n);
                Ok(field.mul(&field.from_rational(&c), &b))
            }
            BuiltinIntegrand::QPower(i) => field.q_pow_int(j as i64 * *i as i64),
        }
    }
}

impl FromStr for BuiltinIntegrand {
    type Err = Error;

    /// `one`, `bracket_pow:n`, `shifted_bracket_pow:n:x`, `char_twisted:n:chi_id`, `q_power:i`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Invalid(format!("unknown integrand {s:?}"));
        let int = |t: &str| t.parse::<u32>().map_err(|_| bad());
        let mut parts = s.splitn(3, ':');
        let name = parts.next().unwrap_or_default();
        let first = parts.next();
        let rest = parts.next();
        match (name, first, rest) {
            ("one", None, None) => Ok(BuiltinIntegrand::One),
            ("bracket_pow", Some(n), None) => Ok(BuiltinIntegrand::BracketPow(int(n)?)),
            ("q_power", Some(i), None) => Ok(BuiltinIntegrand::QPower(int(i)?)),
            ("shifted_bracket_pow", Some(n), Some(x)) => {
                Ok(BuiltinIntegrand::ShiftedBracketPow(int(n)?, parse_rational(x)?))
            }
            ("char_twisted", Some(n), Some(chi)) => {
                Ok(BuiltinIntegrand::CharTwisted(int(n)?, chi.parse()?))
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for BuiltinIntegrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuiltinIntegrand::One => write!(f, "one"),
            BuiltinIntegrand::BracketPow(n) => write!(f, "bracket_pow:{n}"),
            BuiltinIntegrand::ShiftedBracketPow(n, x) => {
                write!(f, "shifted_bracket_pow:{n}:{}", format_rational(x))
            }
            BuiltinIntegrand::CharTwisted(n, chi) => write!(f, "char_twisted:{n}:{chi}"),
            BuiltinIntegrand::QPower(i) => write!(f, "q_power:{i}"),
        }
    }
}

const CHUNK: u64 = 2048;

/// `sum_{0 <= j < count} (±q)^j f(j)`, reduced in parallel over index chunks.
///
/// Field arithmetic is exact (p-adic sums truncate to the minimum absolute
/// precision, which is associative), so the result does not depend on how
/// the range is split.
pub fn weighted_sum<F, I>(field: &F, kind: MeasureKind, count: u64, f: &I) -> Result<F::Elem>
where
    F: QField,
    I: Integrand<F> + ?Sized,
{
    let chunks = count.div_ceil(CHUNK);
    let step = match kind {
        MeasureKind::Bosonic => field.q(),
        MeasureKind::Fermionic => field.neg(&field.q()),
    };
    let partials: Vec<F::Elem> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(count);
            let mut w = weight(field, kind, start)?;
            let mut acc = field.zero();
            for j in start..end {
                let term = f.eval(field, j)?;
                if !field.is_zero(&term) {
                    acc = field.add(&acc, &field.mul(&w, &term));
                }
                w = field.mul(&w, &step);
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    Ok(field.sum(partials))
}

/// `(1 / [d p^N]_{±q}) sum_{j < d p^N} (±q)^j f(j)`.
pub fn riemann_sum<F, I>(spec: &MeasureSpec<F>, f: &I, level: u32, cap: u64) -> Result<F::Elem>
where
    F: QField,
    I: Integrand<F> + ?Sized,
{
    let m = spec.domain.ball_representatives(level, cap)?.end;
    let field = &spec.field;
    let s = weighted_sum(field, spec.kind, m, f)?;
    field.div(&s, &level_mass(field, spec.kind, m)?)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntegrationResult<E> {
    pub value: E,
    pub n_used: u32,
    /// Certified lower bound on `v_p(S_N - S_{N-1})` at `N = n_used`.
    pub stability: i64,
    /// `v_p(S_N - S_{N-1})` (or its lower bound) for `N = 2..=n_used`.
    pub trace: Vec<i64>,
}

/// The p-adic integral as the limit of Riemann sums: the smallest
/// `2 <= N <= n_max` with `v_p(S_N - S_{N-1}) >= target`.
pub fn integrate<I>(
    spec: &MeasureSpec<PadicQ>,
    f: &I,
    target: i64,
    n_max: u32,
    cap: u64,
) -> Result<IntegrationResult<crate::padic::PadicNumber>>
where
    I: Integrand<PadicQ> + ?Sized,
{
    let mut prev = riemann_sum(spec, f, 1, cap)?;
    let mut trace = Vec::new();
    for level in 2..=n_max {
        let cur = riemann_sum(spec, f, level, cap)?;
        let stability = cur.sub(&prev)?.valuation().lower_bound();
        trace.push(stability);
        if stability >= target {
            return Ok(IntegrationResult { value: cur, n_used: level, stability, trace });
        }
        prev = cur;
    }
    Err(Error::NonConvergence { trace })
}

/// `∫ q^{t i} dmu_q(t) = (i + 1) / [i + 1]_q`.
pub fn bosonic_power_moment<F: QField>(field: &F, i: u32) -> Result<F::Elem> {
    let k = BigRational::from_integer((i + 1).into());
    field.div(&field.from_rational(&k), &q_bracket(field, &k)?)
}

/// `∫ q^{t i} dmu_{-q}(t) = [2]_q / (1 + q^{i + 1})`.
pub fn fermionic_power_moment<F: QField>(field: &F, i: u32) -> Result<F::Elem> {
    let one = field.one();
    let two = field.add(&one, &field.q());
    field.div(&two, &field.add(&one, &field.q_pow_int(i as i64 + 1)?))
}

/// Closed form of the fermionic Riemann sum of `[x + y]_q^n` at a finite level:
/// `[2]_q (1/(1-q))^n sum_k C(n,k) (-1)^k q^{xk} (1/(1+q^M)) (1+q^{M(k+1)})/(1+q^{k+1})`
/// with `M = d p^N` balls.
pub fn fermionic_finite_rhs<F: QField>(
    field: &F,
    n: u32,
    x: &BigRational,
    domain: ProfiniteDomain,
    level: u32,
    cap: u64,
) -> Result<F::Elem> {
    if domain.d() % 2 == 0 {
        return Err(Error::EvenParameter { what: "d", value: domain.d() });
    }
    let m = domain.level_size(level, cap)? as i64;
    let one = field.one();
    let q = field.q();
    let qm = field.q_pow_int(m)?;
    let one_plus_qm = field.add(&one, &qm);
    let mut sum = field.zero();
    for k in 0..=n {
        let c = field.from_rational(&binomial(n, k));
        let sign = if k % 2 == 0 { c } else { field.neg(&c) };
        let qxk = field.q_pow(&(x * BigRational::from_integer(k.into())))?;
        let upper = field.add(&one, &field.q_pow_int(m * (k as i64 + 1))?);
        let lower = field.mul(&one_plus_qm, &field.add(&one, &field.q_pow_int(k as i64 + 1)?));
        let term = field.div(&field.mul(&field.mul(&sign, &qxk), &upper), &lower)?;
        sum = field.add(&sum, &term);
    }
    let two = field.add(&one, &q);
    let inv = field.pow(&field.div(&one, &field.sub(&one, &q))?, n);
    Ok(field.mul(&field.mul(&two, &inv), &sum))
}
