//! The three readings of `q`: an indeterminate (exact rational functions in
//! `w = q^(1/D)`), a rational number, or an admissible p-adic number.
//!
//! Every formula in the crate is written once against [`QField`] and
//! evaluated in whichever field the caller picks.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{format_rational, parse_rational, RationalFunction};
use crate::error::{Error, Result};
use crate::padic::{q_admissible, PadicNumber, DEFAULT_PRECISION};

pub trait Field: Clone + Send + Sync {
    type Elem: Clone + Send + Sync + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_rational(&self, r: &BigRational) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    /// Field identity, used to reject mixing elements of different fields.
    fn same_field(&self, other: &Self) -> bool;

    fn from_int(&self, n: i64) -> Self::Elem {
        self.from_rational(&BigRational::from_integer(n.into()))
    }

    fn pow(&self, a: &Self::Elem, mut e: u32) -> Self::Elem {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    fn sum<I: IntoIterator<Item = Self::Elem>>(&self, items: I) -> Self::Elem {
        items.into_iter().fold(self.zero(), |acc, x| self.add(&acc, &x))
    }
}

/// A field together with a distinguished value of `q`.
pub trait QField: Field {
    /// `q^e`; fractional `e` only where the field has the matching root.
    fn q_pow(&self, e: &BigRational) -> Result<Self::Elem>;

    fn q_pow_int(&self, e: i64) -> Result<Self::Elem> {
        self.q_pow(&BigRational::from_integer(e.into()))
    }

    fn q(&self) -> Self::Elem {
        self.q_pow_int(1).expect("q itself is always available")
    }

    fn to_value(&self, e: &Self::Elem) -> FieldValue;
    fn descriptor(&self) -> QDescriptor;
}

/// Plain rationals; the coefficient field of the classical series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Rationals;

impl Field for Rationals {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_rational(&self, r: &BigRational) -> BigRational {
        r.clone()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn div(&self, a: &BigRational, b: &BigRational) -> Result<BigRational> {
        if b.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(a / b)
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn same_field(&self, _: &Self) -> bool {
        true
    }
}

/// `q` as an indeterminate: elements of Q(w) with `w^D = q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymbolicQ {
    root_order: u32,
}

impl SymbolicQ {
    pub fn new(root_order: u32) -> Result<Self> {
        if root_order == 0 {
            return Err(Error::Invalid("root order must be positive".into()));
        }
        Ok(SymbolicQ { root_order })
    }

    pub fn root_order(&self) -> u32 {
        self.root_order
    }
}

impl Field for SymbolicQ {
    type Elem = RationalFunction;

    fn zero(&self) -> RationalFunction {
        RationalFunction::zero(self.root_order)
    }
    fn one(&self) -> RationalFunction {
        RationalFunction::one(self.root_order)
    }
    fn from_rational(&self, r: &BigRational) -> RationalFunction {
        RationalFunction::constant(r.clone(), self.root_order)
    }
    fn add(&self, a: &RationalFunction, b: &RationalFunction) -> RationalFunction {
        a + b
    }
    fn sub(&self, a: &RationalFunction, b: &RationalFunction) -> RationalFunction {
        a - b
    }
    fn neg(&self, a: &RationalFunction) -> RationalFunction {
        a.neg()
    }
    fn mul(&self, a: &RationalFunction, b: &RationalFunction) -> RationalFunction {
        a * b
    }
    fn div(&self, a: &RationalFunction, b: &RationalFunction) -> Result<RationalFunction> {
        a.checked_div(b)
    }
    fn is_zero(&self, a: &RationalFunction) -> bool {
        a.is_zero()
    }
    fn same_field(&self, other: &Self) -> bool {
        self == other
    }
    fn pow(&self, a: &RationalFunction, e: u32) -> RationalFunction {
        a.pow(e as i64).expect("nonnegative power")
    }
}

impl QField for SymbolicQ {
    fn q_pow(&self, e: &BigRational) -> Result<RationalFunction> {
        RationalFunction::q_pow(e, self.root_order)
    }
    fn to_value(&self, e: &RationalFunction) -> FieldValue {
        FieldValue::Symbolic(e.clone())
    }
    fn descriptor(&self) -> QDescriptor {
        QDescriptor::Symbolic { root_order: self.root_order }
    }
}

/// `q` a fixed rational number other than 0 and 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalQ {
    q: BigRational,
}

impl RationalQ {
    pub fn new(q: BigRational) -> Result<Self> {
        if q.is_one() {
            return Err(Error::QIsOne);
        }
        if q.is_zero() {
            return Err(Error::Invalid("q = 0 is not allowed".into()));
        }
        Ok(RationalQ { q })
    }

    pub fn value(&self) -> &BigRational {
        &self.q
    }

    /// Whether `|q| < 1`, the standing assumption for complex-analytic series.
    pub fn in_unit_disc(&self) -> bool {
        self.q.abs() < BigRational::one()
    }
}

impl Field for RationalQ {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn from_rational(&self, r: &BigRational) -> BigRational {
        r.clone()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn div(&self, a: &BigRational, b: &BigRational) -> Result<BigRational> {
        Rationals.div(a, b)
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn same_field(&self, _: &Self) -> bool {
        true
    }
}

impl QField for RationalQ {
    fn q_pow(&self, e: &BigRational) -> Result<BigRational> {
        if !e.is_integer() {
            return Err(Error::FractionalExponent { exponent: format_rational(e) });
        }
        let k = i32::try_from(e.to_integer())
            .map_err(|_| Error::Invalid("exponent out of range".into()))?;
        Ok(num_traits::Pow::pow(&self.q, k))
    }
    fn to_value(&self, e: &BigRational) -> FieldValue {
        FieldValue::Rational(e.clone())
    }
    fn descriptor(&self) -> QDescriptor {
        QDescriptor::Rational(self.q.clone())
    }
}

/// `q` an admissible element of Q_p at finite precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PadicQ {
    q: PadicNumber,
}

impl PadicQ {
    pub fn new(q: PadicNumber) -> Result<Self> {
        if !q_admissible(&q) {
            let one = PadicNumber::from_int(1, q.prime(), q.precision().max(1))?;
            let valuation = q.sub(&one)?.valuation().lower_bound();
            return Err(Error::InadmissibleQ { valuation });
        }
        Ok(PadicQ { q })
    }

    pub fn from_rational(q: &BigRational, p: u64, precision: u32) -> Result<Self> {
        Self::new(PadicNumber::from_rational(q, p, precision)?)
    }

    pub fn prime(&self) -> u64 {
        self.q.prime()
    }

    pub fn precision(&self) -> u32 {
        self.q.precision().max(1)
    }

    pub fn value(&self) -> &PadicNumber {
        &self.q
    }
}

impl Field for PadicQ {
    type Elem = PadicNumber;

    fn zero(&self) -> PadicNumber {
        PadicNumber::exact_zero(self.prime())
    }
    fn one(&self) -> PadicNumber {
        self.from_int(1)
    }
    fn from_rational(&self, r: &BigRational) -> PadicNumber {
        PadicNumber::from_rational(r, self.prime(), self.precision()).expect("valid prime and precision")
    }
    fn add(&self, a: &PadicNumber, b: &PadicNumber) -> PadicNumber {
        a.add(b).expect("same prime")
    }
    fn sub(&self, a: &PadicNumber, b: &PadicNumber) -> PadicNumber {
        a.sub(b).expect("same prime")
    }
    fn neg(&self, a: &PadicNumber) -> PadicNumber {
        a.neg()
    }
    fn mul(&self, a: &PadicNumber, b: &PadicNumber) -> PadicNumber {
        a.mul(b).expect("same prime")
    }
    fn div(&self, a: &PadicNumber, b: &PadicNumber) -> Result<PadicNumber> {
        a.div(b)
    }
    fn is_zero(&self, a: &PadicNumber) -> bool {
        a.is_zero_at_precision()
    }
    fn same_field(&self, other: &Self) -> bool {
        self.prime() == other.prime()
    }
}

impl QField for PadicQ {
    fn q_pow(&self, e: &BigRational) -> Result<PadicNumber> {
        // Fractional powers would need exp/log; every in-scope exponent is integral.
        if !e.is_integer() {
            return Err(Error::FractionalExponent { exponent: format_rational(e) });
        }
        let k = i64::try_from(e.to_integer())
            .map_err(|_| Error::Invalid("exponent out of range".into()))?;
        self.q.pow(k)
    }
    fn to_value(&self, e: &PadicNumber) -> FieldValue {
        FieldValue::Padic(e.clone())
    }
    fn descriptor(&self) -> QDescriptor {
        QDescriptor::Padic(self.q.clone())
    }
}

/// Which reading of `q` a computation uses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QDescriptor {
    Symbolic { root_order: u32 },
    Rational(BigRational),
    Padic(PadicNumber),
}

impl QDescriptor {
    /// Runs a generic computation in the field this descriptor names.
    pub fn visit<V: FieldVisitor>(&self, visitor: V) -> Result<V::Output> {
        match self {
            QDescriptor::Symbolic { root_order } => Ok(visitor.visit(&SymbolicQ::new(*root_order)?)),
            QDescriptor::Rational(q) => Ok(visitor.visit(&RationalQ::new(q.clone())?)),
            QDescriptor::Padic(q) => Ok(visitor.visit(&PadicQ::new(q.clone())?)),
        }
    }
}

/// A computation that is generic over the choice of field.
pub trait FieldVisitor {
    type Output;
    fn visit<F: QField>(self, field: &F) -> Self::Output;
}

impl FromStr for QDescriptor {
    type Err = Error;

    /// `sym`, `sym:D`, `a/b`, or `padic:p:q[:A]`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Invalid(format!("bad q-spec {s:?}"));
        if s == "sym" {
            return Ok(QDescriptor::Symbolic { root_order: 1 });
        }
        if let Some(d) = s.strip_prefix("sym:") {
            let root_order: u32 = d.parse().map_err(|_| bad())?;
            SymbolicQ::new(root_order)?;
            return Ok(QDescriptor::Symbolic { root_order });
        }
        if let Some(rest) = s.strip_prefix("padic:") {
            let parts: Vec<&str> = rest.split(':').collect();
            let (p, q, a) = match parts.as_slice() {
                [p, q] => (*p, *q, None),
                [p, q, a] => (*p, *q, Some(*a)),
                _ => return Err(bad()),
            };
            let p: u64 = p.parse().map_err(|_| bad())?;
            let precision = match a {
                Some(a) => a.parse().map_err(|_| bad())?,
                None => DEFAULT_PRECISION,
            };
            let q = PadicNumber::from_rational(&parse_rational(q)?, p, precision)?;
            return Ok(QDescriptor::Padic(q));
        }
        Ok(QDescriptor::Rational(parse_rational(s)?))
    }
}

/// A field element tagged with the field it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldValue {
    Symbolic(RationalFunction),
    Rational(BigRational),
    Padic(PadicNumber),
}

impl fmt::Display for FieldValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldValue::Symbolic(r) => write!(f, "{r}"),
            FieldValue::Rational(r) => write!(f, "{}", format_rational(r)),
            FieldValue::Padic(x) => write!(f, "{x}"),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum FieldValueRepr {
    Symbolic(RationalFunction),
    Padic(PadicNumber),
    Rational(String),
}

impl Serialize for FieldValue {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            FieldValue::Symbolic(r) => r.serialize(serializer),
            FieldValue::Padic(x) => x.serialize(serializer),
            FieldValue::Rational(r) => serializer.serialize_str(&format_rational(r)),
        }
    }
}

impl<'de> Deserialize<'de> for FieldValue {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        Ok(match FieldValueRepr::deserialize(deserializer)? {
            FieldValueRepr::Symbolic(r) => FieldValue::Symbolic(r),
            FieldValueRepr::Padic(x) => FieldValue::Padic(x),
            FieldValueRepr::Rational(s) => {
                FieldValue::Rational(parse_rational(&s).map_err(serde::de::Error::custom)?)
            }
        })
    }
}
