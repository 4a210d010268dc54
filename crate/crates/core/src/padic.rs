//! Truncated p-adic numbers with per-value precision, and the profinite
//! domains `X_d = lim Z/dp^N`.
//!
//! A nonzero [`PadicNumber`] is `p^v * u` with `u` a unit known modulo
//! `p^A`; `A` is the relative precision and `v + A` the absolute precision.
//! A value whose known digits are all zero is kept in a distinct
//! zero-at-precision state that only records `x ≡ 0 (mod p^v)`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::ops::Range;

use num_bigint::{BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const DEFAULT_PRECISION: u32 = 32;

pub const DEFAULT_BALL_BUDGET: u64 = 10_000_000;

const EXACT_ZERO_BOUND: i64 = i64::MAX / 4;

thread_local! {
    static POWERS: RefCell<HashMap<(u64, u32), BigUint>> = RefCell::new(HashMap::new());
}

fn p_pow(p: u64, k: u32) -> BigUint {
    POWERS.with(|cache| {
        cache
            .borrow_mut()
            .entry((p, k))
            .or_insert_with(|| BigUint::from(p).pow(k))
            .clone()
    })
}

pub fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p % 2 == 0 {
        return false;
    }
    let mut k = 3;
    while k * k <= p {
        if p % k == 0 {
            return false;
        }
        k += 2;
    }
    true
}

/// Exponent of `p` in a nonzero integer.
fn strip_p(x: &mut BigUint, p: u64) -> u32 {
    let pb = BigUint::from(p);
    let mut v = 0;
    loop {
        let (q, r) = x.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        *x = q;
        v += 1;
    }
}

/// `v_p(x)`, exact or as a certified lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Valuation {
    Finite(i64),
    AtLeast(i64),
}

impl Valuation {
    pub fn lower_bound(self) -> i64 {
        match self {
            Valuation::Finite(v) | Valuation::AtLeast(v) => v,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::AtLeast(v) => write!(f, ">={v}"),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PadicNumber {
    p: u64,
    valuation: i64,
    unit: BigUint,
    precision: u32,
}

impl PadicNumber {
    pub fn from_rational(r: &BigRational, p: u64, precision: u32) -> Result<Self> {
        if !is_odd_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        if precision == 0 {
            return Err(Error::ZeroPrecision);
        }
        if r.is_zero() {
            return Ok(Self::zero_at(p, precision as i64));
        }
        let (sn, mut num) = r.numer().clone().into_parts();
        let (_, mut den) = r.denom().clone().into_parts();
        let vn = strip_p(&mut num, p) as i64;
        let vd = strip_p(&mut den, p) as i64;
        let modulus = p_pow(p, precision);
        let inv = (&den % &modulus).modinv(&modulus).expect("unit is invertible");
        let mut unit = (num % &modulus) * inv % &modulus;
        if sn == Sign::Minus {
            unit = &modulus - unit;
        }
        Ok(PadicNumber { p, valuation: vn - vd, unit, precision })
    }

    pub fn from_int(n: i64, p: u64, precision: u32) -> Result<Self> {
        Self::from_rational(&BigRational::from_integer(n.into()), p, precision)
    }

    /// Zero with no precision limit; the neutral element of sums.
    pub fn exact_zero(p: u64) -> Self {
        Self::zero_at(p, EXACT_ZERO_BOUND)
    }

    /// The value known only to be divisible by `p^abs`.
    pub fn zero_at(p: u64, abs: i64) -> Self {
        PadicNumber { p, valuation: abs, unit: BigUint::zero(), precision: 0 }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn unit(&self) -> &BigUint {
        &self.unit
    }

    /// Relative precision: number of known unit digits.
    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn absolute_precision(&self) -> i64 {
        self.valuation + self.precision as i64
    }

    pub fn is_zero_at_precision(&self) -> bool {
        self.precision == 0
    }

    pub fn valuation(&self) -> Valuation {
        if self.is_zero_at_precision() {
            Valuation::AtLeast(self.valuation)
        } else {
            Valuation::Finite(self.valuation)
        }
    }

    fn check_prime(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch { left: self.p, right: other.p });
        }
        Ok(())
    }

    fn normalize(p: u64, base_v: i64, mut x: BigUint, abs: i64) -> Self {
        if x.is_zero() {
            return Self::zero_at(p, abs);
        }
        let k = strip_p(&mut x, p) as i64;
        let valuation = base_v + k;
        if valuation >= abs {
            return Self::zero_at(p, abs);
        }
        let precision = (abs - valuation) as u32;
        let unit = x % p_pow(p, precision);
        PadicNumber { p, valuation, unit, precision }
    }

    /// Forgets every digit at or above `p^abs`.
    pub fn truncate_absolute(&self, abs: i64) -> Self {
        if abs >= self.absolute_precision() {
            return self.clone();
        }
        if self.is_zero_at_precision() || abs <= self.valuation {
            return Self::zero_at(self.p, abs.min(self.valuation));
        }
        let precision = (abs - self.valuation) as u32;
        PadicNumber {
            p: self.p,
            valuation: self.valuation,
            unit: &self.unit % p_pow(self.p, precision),
            precision,
        }
    }

    pub fn neg(&self) -> Self {
        if self.is_zero_at_precision() {
            return self.clone();
        }
        let modulus = p_pow(self.p, self.precision);
        PadicNumber { unit: &modulus - &self.unit, ..self.clone() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_prime(other)?;
        let abs = self.absolute_precision().min(other.absolute_precision());
        if self.is_zero_at_precision() {
            return Ok(other.truncate_absolute(abs));
        }
        if other.is_zero_at_precision() {
            return Ok(self.truncate_absolute(abs));
        }
        let base_v = self.valuation.min(other.valuation);
        if abs <= base_v {
            return Ok(Self::zero_at(self.p, abs));
        }
        let modulus = p_pow(self.p, (abs - base_v) as u32);
        let lift = |x: &Self| &x.unit * p_pow(x.p, (x.valuation - base_v) as u32);
        let sum = (lift(self) + lift(other)) % &modulus;
        Ok(Self::normalize(self.p, base_v, sum, abs))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_prime(other)?;
        if self.is_zero_at_precision() || other.is_zero_at_precision() {
            return Ok(Self::zero_at(self.p, self.valuation + other.valuation));
        }
        let precision = self.precision.min(other.precision);
        let unit = (&self.unit * &other.unit) % p_pow(self.p, precision);
        Ok(PadicNumber { p: self.p, valuation: self.valuation + other.valuation, unit, precision })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check_prime(other)?;
        if other.is_zero_at_precision() {
            return Err(Error::PadicDivisionByZero);
        }
        if self.is_zero_at_precision() {
            return Ok(Self::zero_at(self.p, self.valuation - other.valuation));
        }
        let precision = self.precision.min(other.precision);
        let modulus = p_pow(self.p, precision);
        let inv = (&other.unit % &modulus).modinv(&modulus).expect("unit is invertible");
        let unit = (&self.unit % &modulus) * inv % &modulus;
        Ok(PadicNumber { p: self.p, valuation: self.valuation - other.valuation, unit, precision })
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.one_like().div(self)? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = self.one_like();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq)?;
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq)?;
            }
        }
        Ok(acc)
    }

    /// Exact 1 carrying this value's relative precision (at least 1 digit).
    fn one_like(&self) -> Self {
        let precision = self.precision.max(1);
        PadicNumber { p: self.p, valuation: 0, unit: BigUint::one(), precision }
    }

    /// True when `v_p(self - other) >= k` is certified.
    pub fn agrees_with(&self, other: &Self, k: i64) -> Result<bool> {
        Ok(self.sub(other)?.valuation().lower_bound() >= k)
    }

    /// The integer in `[0, p^abs)` congruent to this value, when it is integral.
    pub fn residue(&self) -> Option<BigUint> {
        if self.valuation < 0 && !self.is_zero_at_precision() {
            return None;
        }
        if self.is_zero_at_precision() {
            return Some(BigUint::zero());
        }
        Some(&self.unit * p_pow(self.p, self.valuation as u32))
    }
}

impl fmt::Display for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero_at_precision() && self.valuation >= EXACT_ZERO_BOUND {
            write!(f, "0")
        } else if self.is_zero_at_precision() {
            write!(f, "O({}^{})", self.p, self.valuation)
        } else {
            write!(
                f,
                "{}^{} * {} + O({}^{})",
                self.p,
                self.valuation,
                self.unit,
                self.p,
                self.absolute_precision()
            )
        }
    }
}

impl fmt::Debug for PadicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PadicNumber({self})")
    }
}

#[derive(Serialize, Deserialize)]
struct PadicRepr {
    p: u64,
    v: i64,
    unit: String,
    #[serde(rename = "A")]
    precision: u32,
}

impl Serialize for PadicNumber {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PadicRepr {
            p: self.p,
            v: self.valuation,
            unit: self.unit.to_string(),
            precision: self.precision,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PadicNumber {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = PadicRepr::deserialize(deserializer)?;
        if !is_odd_prime(repr.p) {
            return Err(de::Error::custom(Error::NotOddPrime(repr.p)));
        }
        let unit: BigUint = repr.unit.parse().map_err(de::Error::custom)?;
        if repr.precision == 0 {
            if !unit.is_zero() {
                return Err(de::Error::custom("zero-at-precision value must have unit 0"));
            }
            return Ok(PadicNumber::zero_at(repr.p, repr.v));
        }
        if (&unit % repr.p).is_zero() || unit >= p_pow(repr.p, repr.precision) {
            return Err(de::Error::custom("unit must be a reduced p-adic unit"));
        }
        Ok(PadicNumber { p: repr.p, valuation: repr.v, unit, precision: repr.precision })
    }
}

/// True iff `v_p(q - 1) >= 1`; for odd `p` this is `|q - 1|_p < p^(-1/(p-1))`.
pub fn q_admissible(q: &PadicNumber) -> bool {
    let one = PadicNumber { p: q.p, valuation: 0, unit: BigUint::one(), precision: q.precision.max(1) };
    match q.sub(&one) {
        Ok(diff) => diff.valuation().lower_bound() >= 1,
        Err(_) => false,
    }
}

/// The profinite domain `X_d` over `Z_p`, with `gcd(d, p) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProfiniteDomain {
    p: u64,
    d: u64,
}

impl ProfiniteDomain {
    pub fn new(p: u64, d: u64) -> Result<Self> {
        if !is_odd_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        if d == 0 || d.gcd(&p) != 1 {
            return Err(Error::DomainNotCoprime { p, d });
        }
        Ok(ProfiniteDomain { p, d })
    }

    /// `Z_p` itself.
    pub fn zp(p: u64) -> Result<Self> {
        Self::new(p, 1)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    /// `d * p^n`, or an error when it exceeds `cap`.
    pub fn level_size(&self, n: u32, cap: u64) -> Result<u64> {
        let size = (self.p as u128)
            .checked_pow(n)
            .and_then(|pn| pn.checked_mul(self.d as u128))
            .unwrap_or(u128::MAX);
        if size > cap as u128 {
            return Err(Error::BudgetExceeded { requested: size, cap });
        }
        Ok(size as u64)
    }

    /// Representatives `0 .. d p^n` of the balls `a + d p^n Z_p`.
    pub fn ball_representatives(&self, n: u32, cap: u64) -> Result<Range<u64>> {
        if n == 0 {
            return Err(Error::Invalid("level N must be at least 1".into()));
        }
        Ok(0..self.level_size(n, cap)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn padic(n: i64, d: i64, p: u64, a: u32) -> PadicNumber {
        PadicNumber::from_rational(&BigRational::new(n.into(), d.into()), p, a).unwrap()
    }

    #[test]
    fn from_rational_examples() {
        let x = padic(6, 1, 5, 4);
        assert_eq!((x.valuation(), x.unit().clone()), (Valuation::Finite(0), BigUint::from(6u32)));
        let y = padic(50, 1, 5, 4);
        assert_eq!((y.valuation(), y.unit().clone()), (Valuation::Finite(2), BigUint::from(2u32)));
        let z = padic(1, 5, 5, 4);
        assert_eq!((z.valuation(), z.unit().clone()), (Valuation::Finite(-1), BigUint::one()));
    }

    #[test]
    fn negative_and_fractional_units() {
        // -1 = 4 + 4*5 + ... ; 1/2 = 3 + 2*5 + 2*25 + ... mod 125 -> 63
        assert_eq!(padic(-1, 1, 5, 3).unit(), &BigUint::from(124u32));
        assert_eq!(padic(1, 2, 5, 3).unit(), &BigUint::from(63u32));
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(padic(50, 1, 5, 8).valuation(), Valuation::Finite(2));
        assert_eq!(padic(1, 5, 5, 8).valuation(), Valuation::Finite(-1));
        assert_eq!(padic(0, 1, 5, 8).valuation(), Valuation::AtLeast(8));
    }

    #[test]
    fn carrying_consumes_precision() {
        let s = padic(2, 1, 5, 4).add(&padic(3, 1, 5, 4)).unwrap();
        assert_eq!(s.valuation(), Valuation::Finite(1));
        assert_eq!(s.unit(), &BigUint::one());
        assert_eq!(s.precision(), 3);
        assert_eq!(s.absolute_precision(), 4);
    }

    #[test]
    fn valuations_add_under_multiplication() {
        let a = padic(5, 1, 5, 4);
        let b = padic(75, 1, 5, 4);
        let m = a.mul(&b).unwrap();
        assert_eq!(m.valuation(), Valuation::Finite(3));
        assert_eq!(m.unit(), &BigUint::from(3u32));
    }

    #[test]
    fn self_division_is_one() {
        let x = padic(7, 25, 5, 6);
        let one = x.div(&x).unwrap();
        assert_eq!(one, padic(1, 1, 5, 6));
    }

    #[test]
    fn division_errors() {
        let x = padic(3, 1, 5, 4);
        let z = padic(0, 1, 5, 4);
        assert_eq!(x.div(&z), Err(Error::PadicDivisionByZero));
        let y = padic(3, 1, 7, 4);
        assert_eq!(x.add(&y), Err(Error::PrimeMismatch { left: 5, right: 7 }));
    }

    #[test]
    fn construction_errors() {
        let one = BigRational::one();
        assert_eq!(PadicNumber::from_rational(&one, 2, 4), Err(Error::NotOddPrime(2)));
        assert_eq!(PadicNumber::from_rational(&one, 9, 4), Err(Error::NotOddPrime(9)));
        assert_eq!(PadicNumber::from_rational(&one, 5, 0), Err(Error::ZeroPrecision));
    }

    #[test]
    fn admissibility() {
        assert!(q_admissible(&padic(6, 1, 5, 8)));
        assert!(!q_admissible(&padic(2, 1, 5, 8)));
        assert!(q_admissible(&padic(1, 1, 5, 8)));
        assert!(q_admissible(&padic(-4, 1, 5, 8)));
    }

    #[test]
    fn ball_representatives_examples() {
        let cap = DEFAULT_BALL_BUDGET;
        assert_eq!(ProfiniteDomain::new(3, 1).unwrap().ball_representatives(1, cap).unwrap(), 0..3);
        assert_eq!(ProfiniteDomain::new(3, 2).unwrap().ball_representatives(1, cap).unwrap(), 0..6);
        assert_eq!(ProfiniteDomain::new(5, 1).unwrap().ball_representatives(2, cap).unwrap().count(), 25);
        assert_eq!(
            ProfiniteDomain::new(5, 1).unwrap().ball_representatives(11, cap),
            Err(Error::BudgetExceeded { requested: 48_828_125, cap })
        );
        assert_eq!(ProfiniteDomain::new(3, 6), Err(Error::DomainNotCoprime { p: 3, d: 6 }));
    }

    #[test]
    fn json_form() {
        let x = padic(50, 1, 5, 4);
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"p":5,"v":2,"unit":"2","A":4}"#);
        assert_eq!(serde_json::from_str::<PadicNumber>(&s).unwrap(), x);
        assert!(serde_json::from_str::<PadicNumber>(r#"{"p":5,"v":0,"unit":"5","A":4}"#).is_err());
    }
}
