//! Truncated formal power series and the generating functions of the Euler,
//! Bernoulli and `K_{n,q}` numbers.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::format_rational;
use crate::error::{Error, Result};
use crate::field::{Field, QField, Rationals, SymbolicQ};
use crate::numbers::{factorial, k_number};

/// `c_0 + c_1 t + ... + c_T t^T`, with coefficients in `F`.
#[derive(Debug, Clone)]
pub struct TruncatedSeries<F: Field> {
    field: F,
    coeffs: Vec<F::Elem>,
}

impl<F: Field> TruncatedSeries<F> {
    /// Pads or truncates `coeffs` to exactly `order + 1` entries.
    pub fn new(field: F, mut coeffs: Vec<F::Elem>, order: usize) -> Self {
        coeffs.resize(order + 1, field.zero());
        TruncatedSeries { field, coeffs }
    }

    pub fn zero(field: F, order: usize) -> Self {
        Self::new(field, Vec::new(), order)
    }

    pub fn one(field: F, order: usize) -> Self {
        let one = field.one();
        Self::new(field, vec![one], order)
    }

    /// The series `t`.
    pub fn variable(field: F, order: usize) -> Self {
        let c = vec![field.zero(), field.one()];
        Self::new(field, c, order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn field(&self) -> &F {
        &self.field
    }

    pub fn coeffs(&self) -> &[F::Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> F::Elem {
        self.coeffs.get(n).cloned().unwrap_or_else(|| self.field.zero())
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() || !self.field.same_field(&other.field) {
            return Err(Error::SeriesMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| self.field.add(a, b)).collect();
        Ok(TruncatedSeries { field: self.field.clone(), coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&self.field.from_int(-1)))
    }

    pub fn scale(&self, c: &F::Elem) -> Self {
        let coeffs = self.coeffs.iter().map(|a| self.field.mul(a, c)).collect();
        TruncatedSeries { field: self.field.clone(), coeffs }
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let f = &self.field;
        let coeffs = (0..=self.order())
            .into_par_iter()
            .map(|n| f.sum((0..=n).map(|k| f.mul(&self.coeffs[k], &other.coeffs[n - k]))))
            .collect();
        Ok(TruncatedSeries { field: f.clone(), coeffs })
    }

    /// `exp(s)` for `s` without constant term, via `n g_n = sum_k k s_k g_{n-k}`.
    pub fn exp(&self) -> Result<Self> {
        let f = &self.field;
        if !f.is_zero(&self.coeffs[0]) {
            return Err(Error::NonzeroConstantTerm);
        }
        let mut g = vec![f.one()];
        for n in 1..=self.order() {
            let acc = f.sum((1..=n).map(|k| f.mul(&f.mul(&f.from_int(k as i64), &self.coeffs[k]), &g[n - k])));
            g.push(f.div(&acc, &f.from_int(n as i64))?);
        }
        Ok(TruncatedSeries { field: f.clone(), coeffs: g })
    }

    /// `1 / s` for `s` with nonzero constant term.
    pub fn inverse(&self) -> Result<Self> {
        let f = &self.field;
        if f.is_zero(&self.coeffs[0]) {
            return Err(Error::ZeroConstantTerm);
        }
        let inv0 = f.div(&f.one(), &self.coeffs[0])?;
        let mut h = vec![inv0.clone()];
        for n in 1..=self.order() {
            let acc = f.sum((1..=n).map(|k| f.mul(&self.coeffs[k], &h[n - k])));
            h.push(f.neg(&f.mul(&inv0, &acc)));
        }
        Ok(TruncatedSeries { field: f.clone(), coeffs: h })
    }

    /// `n! c_n`, the numbers an exponential generating function encodes.
    pub fn scaled_coeff(&self, n: usize) -> F::Elem {
        self.field.mul(&self.coeff(n), &self.field.from_rational(&factorial(n as u32)))
    }
}

impl<F: Field> PartialEq for TruncatedSeries<F>
where
    F::Elem: PartialEq,
{
    fn eq(&self, other: &Self) -> bool {
        self.field.same_field(&other.field) && self.coeffs == other.coeffs
    }
}

/// `e^t` over the rationals.
pub fn exp_t(order: usize) -> TruncatedSeries<Rationals> {
    TruncatedSeries::variable(Rationals, order).exp().expect("t has no constant term")
}

/// `2 / (e^t + 1)`, whose scaled coefficients are the Euler numbers.
pub fn euler_gf(order: usize) -> TruncatedSeries<Rationals> {
    let half = BigRational::new(1.into(), 2.into());
    let e = exp_t(order);
    let shifted = e.add(&TruncatedSeries::one(Rationals, order)).expect("same order");
    shifted.scale(&half).inverse().expect("constant term is 1")
}

/// `t / (e^t - 1)`, whose scaled coefficients are the Bernoulli numbers.
pub fn bernoulli_gf(order: usize) -> TruncatedSeries<Rationals> {
    // (e^t - 1) / t = sum t^n / (n+1)!
    let e = exp_t(order + 1);
    let quotient = TruncatedSeries::new(Rationals, e.coeffs()[1..].to_vec(), order);
    quotient.inverse().expect("constant term is 1")
}

/// `e^{t/(1-q)} sum_j ((1+q)/(1+q^{j+1})) (-1)^j (1-q)^{-j} t^j / j!`.
///
/// Terms with `j > T` only touch orders above `T`, so the sum stops at `T`.
pub fn f_q_series<F: QField>(field: &F, order: usize) -> Result<TruncatedSeries<F>> {
    let one = field.one();
    let q = field.q();
    let inv = field.div(&one, &field.sub(&one, &q))?;
    let lin = TruncatedSeries::new(field.clone(), vec![field.zero(), inv.clone()], order);
    let e = lin.exp()?;
    let two = field.add(&one, &q);
    let mut coeffs = Vec::with_capacity(order + 1);
    let mut inv_pow = one.clone();
    for j in 0..=order {
        let den = field.add(&one, &field.q_pow_int(j as i64 + 1)?);
        let mut c = field.div(&field.mul(&two, &inv_pow), &den)?;
        c = field.div(&c, &field.from_rational(&factorial(j as u32)))?;
        if j % 2 == 1 {
            c = field.neg(&c);
        }
        coeffs.push(c);
        inv_pow = field.mul(&inv_pow, &inv);
    }
    e.mul(&TruncatedSeries::new(field.clone(), coeffs, order))
}

/// A partial sum together with a bound on the omitted tail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialSum {
    pub value: BigRational,
    pub tail_bound: BigRational,
}

/// `[2]_q sum_{n < n_terms} (-1)^n q^n [n]_q^k`, the `t^k / k!` coefficient of
/// `[2]_q sum_n (-1)^n q^n e^{[n]_q t}` truncated after `n_terms` terms.
///
/// Since `|[n]_q| <= 1 / (1 - |q|)`, the tail is at most
/// `|1 + q| (1 - |q|)^{-k} |q|^{n_terms} / (1 - |q|)`.
pub fn f_q_coefficient_partial(k: u32, q: &BigRational, n_terms: u64) -> Result<PartialSum> {
    let one = BigRational::one();
    if q.abs() >= one {
        return Err(Error::QNotInUnitDisc);
    }
    if q.is_zero() {
        return Err(Error::Invalid("q = 0 is not allowed".into()));
    }
    let two = &one + q;
    let mut sum = BigRational::zero();
    let mut qn = one.clone();
    let mut bracket = BigRational::zero();
    for n in 0..n_terms {
        let term = &qn * num_traits::Pow::pow(&bracket, k);
        if n % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        // [n + 1]_q = [n]_q + q^n
        bracket += &qn;
        qn *= q;
    }
    let a = q.abs();
    let shrink = &one - &a;
    let tail_bound = two.abs() * num_traits::Pow::pow(&shrink.recip(), k) * num_traits::Pow::pow(&a, n_terms as u32)
        / &shrink;
    Ok(PartialSum { value: &two * sum, tail_bound })
}

/// One row of the `q -> 1` comparison.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LimitRow {
    pub n: u32,
    #[serde(rename = "K_limit", serialize_with = "ser_rational")]
    pub k_limit: BigRational,
    #[serde(rename = "E_n", serialize_with = "ser_rational")]
    pub e_n: BigRational,
    /// `n!` times the `q -> 1` limit of the `t^n` coefficient of `F_q(t)`.
    #[serde(rename = "Fq_limit", serialize_with = "ser_rational")]
    pub series_limit: BigRational,
    pub equal: bool,
}

/// One row of the `q -> 1` comparison of `beta_{n,q}` with `B_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BernoulliLimitRow {
    pub n: u32,
    #[serde(rename = "beta_limit", serialize_with = "ser_rational")]
    pub beta_limit: BigRational,
    #[serde(rename = "B_n", serialize_with = "ser_rational")]
    pub b_n: BigRational,
    pub equal: bool,
}

fn ser_rational<S: serde::Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

/// Compares `lim_{q->1} K_{n,q}` and the limit of `n! [t^n] F_q(t)` with `E_n`.
pub fn limit_consistency(n_max: u32) -> Result<Vec<LimitRow>> {
    let field = SymbolicQ::new(1)?;
    let euler = crate::numbers::classical_euler(n_max);
    let fq = f_q_series(&field, n_max as usize)?;
    (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let k_limit = k_number(&field, n)?.limit_at_one()?;
            let series_limit = fq.scaled_coeff(n as usize).limit_at_one()?;
            let e_n = euler[n as usize].clone();
            let equal = k_limit == e_n && series_limit == e_n;
            Ok(LimitRow { n, k_limit, e_n, series_limit, equal })
        })
        .collect()
}

/// Compares `lim_{q->1} beta_{n,q}` with `B_n`.
pub fn bernoulli_limits(n_max: u32) -> Result<Vec<BernoulliLimitRow>> {
    let field = SymbolicQ::new(1)?;
    let bernoulli = crate::numbers::classical_bernoulli(n_max);
    (0..=n_max)
        .into_par_iter()
        .map(|n| {
            let beta_limit = crate::numbers::beta_number(&field, n)?.limit_at_one()?;
            let b_n = bernoulli[n as usize].clone();
            let equal = beta_limit == b_n;
            Ok(BernoulliLimitRow { n, beta_limit, b_n, equal })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{Polynomial, RationalFunction};

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn series(c: &[i64], order: usize) -> TruncatedSeries<Rationals> {
        TruncatedSeries::new(Rationals, c.iter().map(|&x| r(x, 1)).collect(), order)
    }

    #[test]
    fn arithmetic_examples() {
        assert_eq!(series(&[1, 1], 2).mul(&series(&[1, -1], 2)).unwrap(), series(&[1, 0, -1], 2));
        let a = series(&[3, 0, 5], 2);
        assert_eq!(a.add(&TruncatedSeries::zero(Rationals, 2)).unwrap(), a);
        let e = exp_t(4);
        let doubled = e.scale(&r(2, 1));
        for n in 0..=4 {
            assert_eq!(doubled.coeff(n), e.coeff(n) * r(2, 1));
        }
        assert_eq!(series(&[1, 1], 2).add(&series(&[1], 3)), Err(Error::SeriesMismatch));
    }

    #[test]
    fn exp_examples() {
        assert_eq!(TruncatedSeries::zero(Rationals, 3).exp().unwrap(), TruncatedSeries::one(Rationals, 3));
        let e = exp_t(3);
        assert_eq!(e.coeffs(), &[r(1, 1), r(1, 1), r(1, 2), r(1, 6)]);
        let neg = series(&[0, -1], 6).exp().unwrap();
        assert_eq!(exp_t(6).mul(&neg).unwrap(), TruncatedSeries::one(Rationals, 6));
        assert_eq!(series(&[1, 1], 2).exp(), Err(Error::NonzeroConstantTerm));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(TruncatedSeries::one(Rationals, 3).inverse().unwrap(), TruncatedSeries::one(Rationals, 3));
        assert_eq!(series(&[1, 1], 2).inverse().unwrap(), series(&[1, -1, 1], 2));
        assert_eq!(series(&[0, 1], 2).inverse(), Err(Error::ZeroConstantTerm));
        let neg = series(&[0, -1], 8).exp().unwrap();
        assert_eq!(exp_t(8).inverse().unwrap(), neg);
    }

    #[test]
    fn euler_gf_examples() {
        let gf = euler_gf(4);
        assert_eq!(gf.coeff(0), r(1, 1));
        assert_eq!(gf.scaled_coeff(1), r(-1, 2));
        assert_eq!(gf.scaled_coeff(2), r(0, 1));
        assert_eq!(gf.scaled_coeff(3), r(1, 4));
    }

    #[test]
    fn f_q_first_coefficients() {
        let f = SymbolicQ::new(1).unwrap();
        let s = f_q_series(&f, 3).unwrap();
        assert!(s.coeff(0).is_one());
        let k1 = RationalFunction::reduce_fraction(Polynomial::from_ints(&[0, -1]), Polynomial::from_ints(&[1, 0, 1]), 1)
            .unwrap();
        assert_eq!(s.scaled_coeff(1), k1);
    }

    #[test]
    fn f_q_rejects_q_one() {
        // RationalQ refuses q = 1 at construction.
        assert!(crate::field::RationalQ::new(r(1, 1)).is_err());
    }

    #[test]
    fn partial_sums() {
        let zero_terms = f_q_coefficient_partial(1, &r(1, 2), 0).unwrap();
        assert_eq!(zero_terms.value, r(0, 1));
        assert_eq!(zero_terms.tail_bound, r(6, 1));
        let k0 = f_q_coefficient_partial(0, &r(1, 2), 40).unwrap();
        assert!((k0.value - r(1, 1)).abs() <= k0.tail_bound);
        let k1 = f_q_coefficient_partial(1, &r(1, 2), 120).unwrap();
        assert!((k1.value - r(-2, 5)).abs() <= k1.tail_bound);
        assert_eq!(f_q_coefficient_partial(1, &r(3, 2), 10), Err(Error::QNotInUnitDisc));
    }

    #[test]
    fn negative_q_tail_bound_holds() {
        let q = r(-1, 3);
        let rq = crate::field::RationalQ::new(q.clone()).unwrap();
        for k in 0..4 {
            let exact = k_number(&rq, k).unwrap();
            let p = f_q_coefficient_partial(k, &q, 30).unwrap();
            assert!((p.value - exact).abs() <= p.tail_bound, "k = {k}");
        }
    }

    #[test]
    fn small_limit_report() {
        let rows = limit_consistency(3).unwrap();
        let e: Vec<BigRational> = rows.iter().map(|row| row.e_n.clone()).collect();
        assert_eq!(e, vec![r(1, 1), r(-1, 2), r(0, 1), r(1, 4)]);
        assert!(rows.iter().all(|row| row.equal));
        let json = serde_json::to_value(&rows[1]).unwrap();
        assert_eq!(json["K_limit"], "-1/2");
        assert_eq!(json["E_n"], "-1/2");
        assert_eq!(json["equal"], true);
    }
}
