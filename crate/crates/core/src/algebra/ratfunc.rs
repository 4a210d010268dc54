use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use super::poly::Polynomial;
use super::zpoly;
use crate::error::{Error, Result};

/// Element of Q(w) in canonical form, where the indeterminate satisfies `w^D = q`.
///
/// The denominator is monic and coprime to the numerator, so two elements are
/// equal exactly when their fields are. Elements with different root orders
/// live in different fields; mixing them panics in the operator methods and
/// is reported by the `checked_*` variants.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
    root_order: u32,
}

impl RationalFunction {
    /// Reduced representative of `num / den` with monic denominator.
    pub fn reduce_fraction(num: Polynomial, den: Polynomial, root_order: u32) -> Result<Self> {
        if root_order == 0 {
            return Err(Error::Invalid("root order must be positive".into()));
        }
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::reduce_unchecked(num, den, root_order))
    }

    fn reduce_unchecked(num: Polynomial, den: Polynomial, root_order: u32) -> Self {
        if num.is_zero() {
            return Self::zero(root_order);
        }
        if den.is_constant() {
            let inv = den.coeffs()[0].recip();
            return RationalFunction { num: num.scale(&inv), den: Polynomial::one(), root_order };
        }
        let (c1, n) = num.to_primitive();
        let (c2, m) = den.to_primitive();
        let g = zpoly::gcd(&n, &m);
        let (n, m) = if g.len() > 1 {
            (
                zpoly::div_exact(&n, &g).expect("gcd divides numerator"),
                zpoly::div_exact(&m, &g).expect("gcd divides denominator"),
            )
        } else {
            (n, m)
        };
        let lead = m.last().expect("nonzero denominator").clone();
        let scale = c1 / (c2 * BigRational::from_integer(lead.clone()));
        RationalFunction {
            num: Polynomial::from_integer_scaled(&n, &scale),
            den: Polynomial::from_integer(&m, &lead),
            root_order,
        }
    }

    pub fn zero(root_order: u32) -> Self {
        RationalFunction { num: Polynomial::zero(), den: Polynomial::one(), root_order }
    }

    pub fn one(root_order: u32) -> Self {
        Self::constant(BigRational::one(), root_order)
    }

    pub fn constant(c: BigRational, root_order: u32) -> Self {
        RationalFunction { num: Polynomial::constant(c), den: Polynomial::one(), root_order }
    }

    pub fn from_int(c: i64, root_order: u32) -> Self {
        Self::constant(BigRational::from_integer(c.into()), root_order)
    }

    pub fn from_polynomial(p: Polynomial, root_order: u32) -> Self {
        RationalFunction { num: p, den: Polynomial::one(), root_order }
    }

    /// `w^k` for any integer `k`.
    pub fn w_pow(k: i64, root_order: u32) -> Self {
        let mono = Polynomial::monomial(BigRational::one(), k.unsigned_abs() as usize);
        if k >= 0 {
            Self::from_polynomial(mono, root_order)
        } else {
            RationalFunction { num: Polynomial::one(), den: mono, root_order }
        }
    }

    /// `q^e = w^(e * D)`; fails unless `e * D` is an integer.
    pub fn q_pow(e: &BigRational, root_order: u32) -> Result<Self> {
        let k = e * BigRational::from_integer(root_order.into());
        if !k.is_integer() {
            return Err(Error::IncompatibleExponent {
                exponent: format_rational(e),
                root_order,
            });
        }
        let k: i64 = i64::try_from(k.to_integer())
            .map_err(|_| Error::Invalid("exponent out of range".into()))?;
        Ok(Self::w_pow(k, root_order))
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    pub fn root_order(&self) -> u32 {
        self.root_order
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    /// The value as a rational constant, if it is one.
    pub fn as_constant(&self) -> Option<BigRational> {
        (self.num.is_constant() && self.den.is_one()).then(|| self.num.coeff(0))
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.root_order != other.root_order {
            return Err(Error::RootOrderMismatch { left: self.root_order, right: other.root_order });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(self.add_same(other))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(self.mul_same(other))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        Ok(self.mul_same(&other.inv()?))
    }

    fn add_same(&self, other: &Self) -> Self {
        let d = self.root_order;
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            if self.den.is_one() {
                return Self::from_polynomial(self.num.add(&other.num), d);
            }
            return Self::reduce_unchecked(self.num.add(&other.num), self.den.clone(), d);
        }
        // Henrici: with g = gcd(b, d), any common factor of the new numerator and
        // b*d/g already divides g.
        let g = self.den.gcd(&other.den);
        if g.is_one() {
            let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
            if num.is_zero() {
                return Self::zero(d);
            }
            return RationalFunction { num, den: self.den.mul(&other.den), root_order: d };
        }
        let b_red = self.den.div_exact(&g);
        let d_red = other.den.div_exact(&g);
        let num = self.num.mul(&d_red).add(&other.num.mul(&b_red));
        if num.is_zero() {
            return Self::zero(d);
        }
        let den = self.den.mul(&d_red);
        let h = num.gcd(&g);
        if h.is_one() {
            RationalFunction { num, den, root_order: d }
        } else {
            RationalFunction { num: num.div_exact(&h), den: den.div_exact(&h), root_order: d }
        }
    }

    fn mul_same(&self, other: &Self) -> Self {
        let d = self.root_order;
        if self.is_zero() || other.is_zero() {
            return Self::zero(d);
        }
        // Cross-cancel: gcd(a, d) and gcd(c, b) are the only possible common factors.
        let g1 = self.num.gcd(&other.den);
        let g2 = other.num.gcd(&self.den);
        let (a, dd) = if g1.is_one() {
            (self.num.clone(), other.den.clone())
        } else {
            (self.num.div_exact(&g1), other.den.div_exact(&g1))
        };
        let (c, b) = if g2.is_one() {
            (other.num.clone(), self.den.clone())
        } else {
            (other.num.div_exact(&g2), self.den.div_exact(&g2))
        };
        let num = a.mul(&c);
        let den = b.mul(&dd);
        // Exact quotients of monic polynomials by monic gcds stay monic.
        debug_assert!(den.is_monic());
        RationalFunction { num, den, root_order: d }
    }

    pub fn neg(&self) -> Self {
        RationalFunction { num: self.num.neg(), den: self.den.clone(), root_order: self.root_order }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let lead = self.num.leading().unwrap().recip();
        Ok(RationalFunction {
            num: self.den.scale(&lead),
            den: self.num.scale(&lead),
            root_order: self.root_order,
        })
    }

    pub fn pow(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let e = e.unsigned_abs() as u32;
        // Powers of a reduced fraction stay reduced.
        Ok(RationalFunction {
            num: base.num.pow(e),
            den: base.den.pow(e),
            root_order: self.root_order,
        })
    }

    /// `num(t) / den(t)` at the point `w = t`.
    pub fn evaluate(&self, point: &BigRational) -> Result<BigRational> {
        let den = self.den.eval(point);
        if den.is_zero() {
            return Err(Error::Pole { point: format_rational(point) });
        }
        Ok(self.num.eval(point) / den)
    }

    /// The value at `q = 1`. Removable singularities were cancelled during
    /// reduction, so only a genuine pole can make this fail.
    pub fn limit_at_one(&self) -> Result<BigRational> {
        self.evaluate(&BigRational::one())
    }

    /// Re-expresses the element over `w'` with `w = w'^(D_new / D)`.
    pub fn rebase_root_order(&self, new_order: u32) -> Result<Self> {
        if new_order == 0 || new_order % self.root_order != 0 {
            return Err(Error::RootOrderNotMultiple { current: self.root_order, target: new_order });
        }
        let k = (new_order / self.root_order) as usize;
        // Substituting w -> w^k keeps numerator and denominator coprime and monic.
        Ok(RationalFunction {
            num: self.num.inflate(k),
            den: self.den.inflate(k),
            root_order: new_order,
        })
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl std::ops::$tr<&RationalFunction> for &RationalFunction {
            type Output = RationalFunction;
            fn $method(self, rhs: &RationalFunction) -> RationalFunction {
                assert_eq!(self.root_order, rhs.root_order, "root order mismatch");
                self.$inner(rhs)
            }
        }
        impl std::ops::$tr for RationalFunction {
            type Output = RationalFunction;
            fn $method(self, rhs: RationalFunction) -> RationalFunction {
                std::ops::$tr::$method(&self, &rhs)
            }
        }
    };
}

impl RationalFunction {
    fn sub_same(&self, other: &Self) -> Self {
        self.add_same(&other.neg())
    }
}

forward_binop!(Add, add, add_same);
forward_binop!(Sub, sub, sub_same);
forward_binop!(Mul, mul, mul_same);

impl std::ops::Neg for &RationalFunction {
    type Output = RationalFunction;
    fn neg(self) -> RationalFunction {
        RationalFunction::neg(self)
    }
}

pub(crate) fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub(crate) fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Invalid(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::ZeroDenominator);
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return self.num.fmt_in("w", f);
        }
        write!(f, "(")?;
        self.num.fmt_in("w", f)?;
        write!(f, ")/(")?;
        self.den.fmt_in("w", f)?;
        write!(f, ")")
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFunction[D={}]({self})", self.root_order)
    }
}

#[derive(Serialize, Deserialize)]
struct RationalFunctionRepr {
    #[serde(rename = "D")]
    root_order: u32,
    num: Vec<String>,
    den: Vec<String>,
}

impl Serialize for RationalFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let strings = |p: &Polynomial| p.coeffs().iter().map(format_rational).collect();
        RationalFunctionRepr {
            root_order: self.root_order,
            num: strings(&self.num),
            den: strings(&self.den),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RationalFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = RationalFunctionRepr::deserialize(deserializer)?;
        let parse = |v: &[String]| -> std::result::Result<Polynomial, D::Error> {
            v.iter()
                .map(|s| parse_rational(s).map_err(de::Error::custom))
                .collect::<std::result::Result<Vec<_>, _>>()
                .map(Polynomial::new)
        };
        let num = parse(&repr.num)?;
        let den = parse(&repr.den)?;
        RationalFunction::reduce_fraction(num, den, repr.root_order).map_err(de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> Polynomial {
        Polynomial::from_ints(c)
    }

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn factor_cancellation() {
        let f = RationalFunction::reduce_fraction(p(&[1, 0, -1]), p(&[1, -1]), 1).unwrap();
        assert_eq!(f.numerator(), &p(&[1, 1]));
        assert!(f.denominator().is_one());
    }

    #[test]
    fn zero_numerator() {
        let f = RationalFunction::reduce_fraction(p(&[]), p(&[7, 1]), 1).unwrap();
        assert_eq!(f, RationalFunction::zero(1));
        assert!(f.denominator().is_one());
    }

    #[test]
    fn zero_denominator_rejected() {
        assert_eq!(
            RationalFunction::reduce_fraction(p(&[1]), p(&[]), 1),
            Err(Error::ZeroDenominator)
        );
    }

    #[test]
    fn reduced_form_of_beta_two() {
        // w (w-1)^2 / ((1-w)^2 (1+w)(1+w+w^2)) -> w / ((1+w)(1+w+w^2))
        let wm1 = p(&[-1, 1]);
        let num = p(&[0, 1]).mul(&wm1.mul(&wm1));
        let den = p(&[1, -1]).pow(2).mul(&p(&[1, 1])).mul(&p(&[1, 1, 1]));
        let f = RationalFunction::reduce_fraction(num, den, 1).unwrap();
        assert_eq!(f.numerator(), &p(&[0, 1]));
        assert_eq!(f.denominator(), &p(&[1, 1]).mul(&p(&[1, 1, 1])));
    }

    #[test]
    fn denominator_is_monic_with_fractional_scale() {
        let f = RationalFunction::reduce_fraction(p(&[3]), p(&[1, 2]), 1).unwrap();
        assert_eq!(f.numerator(), &Polynomial::constant(r(3, 2)));
        assert_eq!(f.denominator(), &Polynomial::new(vec![r(1, 2), r(1, 1)]));
    }

    #[test]
    fn evaluate_examples() {
        let f = RationalFunction::from_polynomial(p(&[1, 1]), 1);
        assert_eq!(f.evaluate(&r(1, 1)).unwrap(), r(2, 1));
        let g = RationalFunction::reduce_fraction(p(&[0, 1]), p(&[1, 0, 1]), 1).unwrap();
        assert_eq!(g.evaluate(&r(1, 2)).unwrap(), r(2, 5));
        let h = RationalFunction::reduce_fraction(p(&[1]), p(&[1, -1]), 1).unwrap();
        assert!(matches!(h.evaluate(&r(1, 1)), Err(Error::Pole { .. })));
    }

    #[test]
    fn limit_at_one_examples() {
        let k1 = RationalFunction::reduce_fraction(p(&[0, -1]), p(&[1, 0, 1]), 1).unwrap();
        assert_eq!(k1.limit_at_one().unwrap(), r(-1, 2));
        let b2 = RationalFunction::reduce_fraction(p(&[0, 1]), p(&[1, 1]).mul(&p(&[1, 1, 1])), 1)
            .unwrap();
        assert_eq!(b2.limit_at_one().unwrap(), r(1, 6));
        assert_eq!(RationalFunction::one(1).limit_at_one().unwrap(), r(1, 1));
    }

    #[test]
    fn rebase_examples() {
        let w = RationalFunction::w_pow(1, 1);
        let w2 = w.rebase_root_order(2).unwrap();
        assert_eq!(w2, RationalFunction::w_pow(2, 2));
        let f = RationalFunction::reduce_fraction(p(&[1]), p(&[1, 1]), 2).unwrap();
        let g = f.rebase_root_order(4).unwrap();
        assert_eq!(g.denominator(), &p(&[1, 0, 1]));
        let t = r(2, 3);
        assert_eq!(g.evaluate(&t).unwrap(), f.evaluate(&(&t * &t)).unwrap());
        assert_eq!(
            f.rebase_root_order(3),
            Err(Error::RootOrderNotMultiple { current: 2, target: 3 })
        );
    }

    #[test]
    fn arithmetic_cancels_to_canonical_form() {
        // 1/(1-w) - w/(1-w) = 1
        let a = RationalFunction::reduce_fraction(p(&[1]), p(&[1, -1]), 1).unwrap();
        let b = RationalFunction::reduce_fraction(p(&[0, 1]), p(&[1, -1]), 1).unwrap();
        assert!((&a - &b).is_one());
        // 1/(1-w^2) * (1+w) = 1/(1-w)
        let c = RationalFunction::reduce_fraction(p(&[1]), p(&[1, 0, -1]), 1).unwrap();
        let d = RationalFunction::from_polynomial(p(&[1, 1]), 1);
        assert_eq!(&c * &d, a);
    }

    #[test]
    fn henrici_addition_with_shared_factor() {
        // 1/((1+w)(1+w^2)) + 1/((1+w)(1-w)) reduced against direct reduction
        let a = RationalFunction::reduce_fraction(p(&[1]), p(&[1, 1]).mul(&p(&[1, 0, 1])), 1).unwrap();
        let b = RationalFunction::reduce_fraction(p(&[1]), p(&[1, 1]).mul(&p(&[1, -1])), 1).unwrap();
        let direct = RationalFunction::reduce_fraction(
            a.numerator().mul(b.denominator()).add(&b.numerator().mul(a.denominator())),
            a.denominator().mul(b.denominator()),
            1,
        )
        .unwrap();
        assert_eq!(&a + &b, direct);
    }

    #[test]
    fn json_round_trip() {
        let f = RationalFunction::reduce_fraction(p(&[0, -1]), p(&[2, 0, 2]), 3).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, r#"{"D":3,"num":["0","-1/2"],"den":["1","0","1"]}"#);
        let back: RationalFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn mismatched_root_orders() {
        let a = RationalFunction::one(1);
        let b = RationalFunction::one(2);
        assert_eq!(a.checked_add(&b), Err(Error::RootOrderMismatch { left: 1, right: 2 }));
    }
}
