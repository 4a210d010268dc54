use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use super::poly::Polynomial;
use super::ratfunc::RationalFunction;
use super::zpoly::{self, ZPoly};
use crate::error::{Error, Result};

/// Integer coefficients of the n-th cyclotomic polynomial.
pub fn cyclotomic_polynomial(n: u64) -> ZPoly {
    assert!(n >= 1);
    // x^n - 1 divided by every Phi_d with d a proper divisor of n.
    let mut acc: ZPoly = vec![BigInt::zero(); n as usize + 1];
    acc[0] = -BigInt::one();
    acc[n as usize] = BigInt::one();
    for d in (1..n).filter(|d| n % d == 0) {
        acc = zpoly::div_exact(&acc, &cyclotomic_polynomial(d)).expect("Phi_d divides x^n - 1");
    }
    acc
}

/// Element of Q(w)[z] / (Phi_L(z)): a polynomial in a primitive L-th root of
/// unity `z` with rational-function coefficients.
#[derive(Clone, PartialEq, Eq)]
pub struct CyclotomicElement {
    coeffs: Vec<RationalFunction>,
    order: u64,
    root_order: u32,
}

impl CyclotomicElement {
    pub fn zero(order: u64, root_order: u32) -> Self {
        CyclotomicElement { coeffs: Vec::new(), order, root_order }
    }

    pub fn from_base(c: RationalFunction, order: u64) -> Self {
        let root_order = c.root_order();
        Self::from_coeffs(vec![c], order, root_order)
    }

    /// `z^k` for any integer `k`.
    pub fn root_power(k: i64, order: u64, root_order: u32) -> Self {
        let k = k.rem_euclid(order as i64) as usize;
        let mut coeffs = vec![RationalFunction::zero(root_order); k + 1];
        coeffs[k] = RationalFunction::one(root_order);
        Self::from_coeffs(coeffs, order, root_order)
    }

    /// Reduces an arbitrary polynomial in `z` modulo `Phi_L`.
    pub fn from_coeffs(mut coeffs: Vec<RationalFunction>, order: u64, root_order: u32) -> Self {
        assert!(order >= 1, "cyclotomic order must be positive");
        let phi = cyclotomic_polynomial(order);
        let deg = phi.len() - 1;
        // Phi_L is monic: eliminate the top coefficient repeatedly.
        while coeffs.len() > deg {
            let top = coeffs.pop().unwrap();
            if top.is_zero() {
                continue;
            }
            let shift = coeffs.len() - deg;
            for (j, pj) in phi[..deg].iter().enumerate() {
                if pj.is_zero() {
                    continue;
                }
                let c = RationalFunction::constant(pj.clone().into(), root_order);
                coeffs[shift + j] = &coeffs[shift + j] - &(&top * &c);
            }
        }
        while coeffs.last().is_some_and(RationalFunction::is_zero) {
            coeffs.pop();
        }
        CyclotomicElement { coeffs, order, root_order }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn root_order(&self) -> u32 {
        self.root_order
    }

    pub fn coeffs(&self) -> &[RationalFunction] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The element as a member of Q(w), when it has no `z` component.
    pub fn as_base(&self) -> Option<RationalFunction> {
        match self.coeffs.len() {
            0 => Some(RationalFunction::zero(self.root_order)),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.order != other.order {
            return Err(Error::CyclotomicOrderMismatch { left: self.order, right: other.order });
        }
        if self.root_order != other.root_order {
            return Err(Error::RootOrderMismatch { left: self.root_order, right: other.root_order });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = RationalFunction::zero(self.root_order);
        let coeffs = (0..n)
            .map(|k| {
                let a = self.coeffs.get(k).unwrap_or(&zero);
                let b = other.coeffs.get(k).unwrap_or(&zero);
                a + b
            })
            .collect();
        Ok(Self::from_coeffs(coeffs, self.order, self.root_order))
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.order, self.root_order));
        }
        let mut coeffs =
            vec![RationalFunction::zero(self.root_order); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] = &coeffs[i + j] + &(a * b);
                }
            }
        }
        Ok(Self::from_coeffs(coeffs, self.order, self.root_order))
    }

    pub fn scale(&self, c: &RationalFunction) -> Self {
        let coeffs = self.coeffs.iter().map(|x| x * c).collect();
        Self::from_coeffs(coeffs, self.order, self.root_order)
    }
}

/// Degree of `Phi_n`, i.e. Euler's totient.
pub fn totient(n: u64) -> u64 {
    (1..=n).filter(|k| k.gcd(&n) == 1).count() as u64
}

impl fmt::Display for CyclotomicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "[{c}]")?,
                1 => write!(f, "[{c}]*z")?,
                _ => write!(f, "[{c}]*z^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for CyclotomicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CyclotomicElement[L={}, D={}]({self})", self.order, self.root_order)
    }
}

/// `{"L": order, "D": root order, "coeffs": [...]}` with coefficients by ascending power of `z`.
impl Serialize for CyclotomicElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("CyclotomicElement", 3)?;
        s.serialize_field("L", &self.order)?;
        s.serialize_field("D", &self.root_order)?;
        s.serialize_field("coeffs", &self.coeffs)?;
        s.end()
    }
}

/// Convenience: Phi_n as a rational polynomial.
pub fn cyclotomic_rational(n: u64) -> Polynomial {
    Polynomial::from_integer(&cyclotomic_polynomial(n), &BigInt::one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: i64) -> CyclotomicElement {
        CyclotomicElement::from_base(RationalFunction::from_int(v, 1), 4)
    }

    #[test]
    fn small_cyclotomic_polynomials() {
        assert_eq!(cyclotomic_rational(1), Polynomial::from_ints(&[-1, 1]));
        assert_eq!(cyclotomic_rational(4), Polynomial::from_ints(&[1, 0, 1]));
        assert_eq!(cyclotomic_rational(6), Polynomial::from_ints(&[1, -1, 1]));
        assert_eq!(cyclotomic_rational(12), Polynomial::from_ints(&[1, 0, -1, 0, 1]));
        for n in 1..=30 {
            assert_eq!(cyclotomic_polynomial(n).len() as u64 - 1, totient(n));
        }
    }

    #[test]
    fn i_squared_is_minus_one() {
        let z = CyclotomicElement::root_power(1, 4, 1);
        assert_eq!(z.mul(&z).unwrap(), c(-1));
        let z4 = z.mul(&z).unwrap().mul(&z).unwrap().mul(&z).unwrap();
        assert_eq!(z4, c(1));
    }

    #[test]
    fn addition_cancels_root() {
        let z = CyclotomicElement::root_power(1, 4, 1);
        let a = c(1).add(&z).unwrap();
        let b = c(1).add(&z.scale(&RationalFunction::from_int(-1, 1))).unwrap();
        assert_eq!(a.add(&b).unwrap(), c(2));
    }

    #[test]
    fn mismatched_orders() {
        let a = CyclotomicElement::root_power(1, 4, 1);
        let b = CyclotomicElement::root_power(1, 3, 1);
        assert_eq!(a.add(&b), Err(Error::CyclotomicOrderMismatch { left: 4, right: 3 }));
    }

    #[test]
    fn sum_of_all_roots_vanishes() {
        for l in [3u64, 5, 6, 8, 12] {
            let mut acc = CyclotomicElement::zero(l, 1);
            for k in 0..l as i64 {
                acc = acc.add(&CyclotomicElement::root_power(k, l, 1)).unwrap();
            }
            assert!(acc.is_zero(), "order {l}");
        }
    }
}
