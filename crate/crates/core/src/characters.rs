//! Dirichlet characters modulo `f`: unit-group decomposition, enumeration,
//! evaluation and conductors.
//!
//! Moduli in scope are tiny, so discrete logarithms are table lookups built
//! by enumerating each prime-power component.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::BigRational;
use serde::Serialize;

use crate::algebra::CyclotomicElement;
use crate::error::{Error, Result};

/// One cyclic factor of `(Z/f)^×`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CyclicFactor {
    /// Generator as a residue mod `f` (lifted by CRT, `≡ 1` on the other components).
    pub generator: u64,
    pub order: u64,
    /// The prime-power component this factor lives in.
    pub component: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UnitGroupStructure {
    pub modulus: u64,
    pub factors: Vec<CyclicFactor>,
    #[serde(skip)]
    logs: HashMap<u64, Vec<u64>>,
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn mult_order(a: u64, m: u64) -> u64 {
    let mut x = a % m;
    let mut k = 1;
    while x != 1 % m {
        x = mul_mod(x, a, m);
        k += 1;
    }
    k
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// `x ≡ local (mod pe)`, `x ≡ 1 (mod f / pe)`.
fn crt_lift(local: u64, pe: u64, f: u64) -> u64 {
    let rest = f / pe;
    if rest == 1 {
        return local % f;
    }
    (0..f)
        .find(|&x| x % pe == local % pe && x % rest == 1)
        .expect("CRT solution exists")
}

impl UnitGroupStructure {
    pub fn new(f: u64) -> Result<Self> {
        if f == 0 {
            return Err(Error::Invalid("modulus must be positive".into()));
        }
        let mut factors = Vec::new();
        for (p, e) in factorize(f) {
            let pe = p.pow(e);
            let local: Vec<(u64, u64)> = if p == 2 {
                match e {
                    1 => vec![],
                    2 => vec![(3, 2)],
                    _ => vec![(pe - 1, 2), (5, pe / 4)],
                }
            } else {
                let phi = pe / p * (p - 1);
                let g = (2..pe)
                    .find(|&g| g % p != 0 && mult_order(g, pe) == phi)
                    .expect("odd prime powers have primitive roots");
                vec![(g, phi)]
            };
            for (g, order) in local {
                factors.push(CyclicFactor { generator: crt_lift(g, pe, f), order, component: pe });
            }
        }
        let mut s = UnitGroupStructure { modulus: f, factors, logs: HashMap::new() };
        s.logs = s.build_log_table();
        Ok(s)
    }

    /// Exponent vectors of every unit, by enumerating all generator products.
    fn build_log_table(&self) -> HashMap<u64, Vec<u64>> {
        let f = self.modulus;
        let mut table = HashMap::new();
        table.insert(1 % f, vec![0; self.factors.len()]);
        for (i, factor) in self.factors.iter().enumerate() {
            let current: Vec<(u64, Vec<u64>)> = table.drain().collect();
            for (a, exps) in current {
                let mut x = a;
                for k in 0..factor.order {
                    let mut e = exps.clone();
                    e[i] = k;
                    table.insert(x, e);
                    x = mul_mod(x, factor.generator, f);
                }
            }
        }
        table
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().map(|c| c.order).product()
    }

    /// Exponents of `a` with respect to the generators; `None` for non-units.
    pub fn discrete_log(&self, a: u64) -> Option<&[u64]> {
        self.logs.get(&(a % self.modulus)).map(Vec::as_slice)
    }
}

/// A Dirichlet character mod `f`, given by exponents `e_i`: `chi(g_i) = exp(2 pi i e_i / order_i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirichletCharacter {
    structure: UnitGroupStructure,
    exponents: Vec<u64>,
    value_order: u64,
}

/// `chi(a)`: rational for values of order at most 2, otherwise a root of unity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CharacterValue {
    Rational(BigRational),
    Cyclotomic(CyclotomicElement),
}

impl DirichletCharacter {
    pub fn new(modulus: u64, exponents: Vec<u64>) -> Result<Self> {
        Self::with_structure(UnitGroupStructure::new(modulus)?, exponents)
    }

    fn with_structure(structure: UnitGroupStructure, exponents: Vec<u64>) -> Result<Self> {
        if exponents.len() != structure.factors.len() {
            return Err(Error::Invalid(format!(
                "modulus {} needs {} exponents, got {}",
                structure.modulus,
                structure.factors.len(),
                exponents.len()
            )));
        }
        let mut value_order = 1u64;
        for (e, c) in exponents.iter().zip(&structure.factors) {
            if *e >= c.order {
                return Err(Error::Invalid(format!("exponent {e} out of range 0..{}", c.order)));
            }
            value_order = value_order.lcm(&(c.order / e.gcd(&c.order)));
        }
        Ok(DirichletCharacter { structure, exponents, value_order })
    }

    pub fn trivial(modulus: u64) -> Result<Self> {
        let s = UnitGroupStructure::new(modulus)?;
        let n = s.factors.len();
        Self::with_structure(s, vec![0; n])
    }

    pub fn modulus(&self) -> u64 {
        self.structure.modulus
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    /// Order of the character, i.e. the order `L` of its value group.
    pub fn value_order(&self) -> u64 {
        self.value_order
    }

    pub fn structure(&self) -> &UnitGroupStructure {
        &self.structure
    }

    pub fn is_trivial(&self) -> bool {
        self.value_order == 1
    }

    /// `k` with `chi(a) = zeta_L^k`, or `None` when `gcd(a, f) > 1`.
    pub fn value_exponent(&self, a: u64) -> Option<u64> {
        let logs = self.structure.discrete_log(a)?;
        let l = self.value_order;
        // e_i * L / order_i is integral because order_i / gcd(e_i, order_i) divides L.
        let k = logs
            .iter()
            .zip(&self.exponents)
            .zip(&self.structure.factors)
            .map(|((x, e), c)| {
                let num = (*x as u128) * (*e as u128) * (l as u128);
                debug_assert_eq!(num % c.order as u128, 0);
                (num / c.order as u128 % l as u128) as u64
            })
            .fold(0, |acc, t| (acc + t) % l);
        Some(k)
    }

    pub fn value(&self, a: u64) -> CharacterValue {
        match self.value_exponent(a) {
            None => CharacterValue::Rational(BigRational::from_integer(0.into())),
            Some(k) => {
                let l = self.value_order;
                if k == 0 {
                    CharacterValue::Rational(BigRational::from_integer(1.into()))
                } else if 2 * k == l {
                    CharacterValue::Rational(BigRational::from_integer((-1).into()))
                } else {
                    CharacterValue::Cyclotomic(CyclotomicElement::root_power(k as i64, l, 1))
                }
            }
        }
    }

    /// `chi(a)` in the cyclotomic field of order `L`, coefficients at root order `D`.
    pub fn value_cyclotomic(&self, a: u64, root_order: u32) -> CyclotomicElement {
        match self.value_exponent(a) {
            None => CyclotomicElement::zero(self.value_order, root_order),
            Some(k) => CyclotomicElement::root_power(k as i64, self.value_order, root_order),
        }
    }

    /// `chi(a)` as a rational; only for characters of order at most 2.
    pub fn value_rational(&self, a: u64) -> Result<BigRational> {
        if self.value_order > 2 {
            return Err(Error::NonQuadraticCharacter { order: self.value_order });
        }
        Ok(match self.value_exponent(a) {
            None => BigRational::from_integer(0.into()),
            Some(0) => BigRational::from_integer(1.into()),
            Some(_) => BigRational::from_integer((-1).into()),
        })
    }

    /// Smallest modulus the character factors through, and whether that is `f` itself.
    pub fn conductor(&self) -> (u64, bool) {
        let f = self.modulus();
        let f0 = (1..=f)
            .filter(|d| f % d == 0)
            .find(|&d| {
                (1..f)
                    .filter(|&a| a % d == 1 % d && a.gcd(&f) == 1)
                    .all(|a| self.value_exponent(a) == Some(0))
            })
            .unwrap_or(f);
        (f0, f0 == f)
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor().1
    }
}

/// All `phi(f)` characters mod `f`, lexicographic in their exponent vectors.
pub fn enumerate_characters(f: u64) -> Result<Vec<DirichletCharacter>> {
    let structure = UnitGroupStructure::new(f)?;
    let orders: Vec<u64> = structure.factors.iter().map(|c| c.order).collect();
    let mut out = Vec::new();
    let mut exps = vec![0u64; orders.len()];
    loop {
        out.push(DirichletCharacter::with_structure(structure.clone(), exps.clone())?);
        // Odometer with the last factor varying fastest.
        let mut i = orders.len();
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            exps[i] += 1;
            if exps[i] < orders[i] {
                break;
            }
            exps[i] = 0;
        }
    }
}

impl fmt::Display for DirichletCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let exps: Vec<String> = self.exponents.iter().map(u64::to_string).collect();
        write!(f, "{}:{}", self.modulus(), exps.join(","))
    }
}

impl FromStr for DirichletCharacter {
    type Err = Error;

    /// `"f:e1,e2,..."`; the exponent list may be empty (`"1:"` or `"1"`).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Invalid(format!("bad character id {s:?}"));
        let (f, exps) = s.split_once(':').unwrap_or((s, ""));
        let f: u64 = f.trim().parse().map_err(|_| bad())?;
        let exponents = if exps.trim().is_empty() {
            Vec::new()
        } else {
            exps.split(',')
                .map(|e| e.trim().parse::<u64>().map_err(|_| bad()))
                .collect::<Result<_>>()?
        };
        DirichletCharacter::new(f, exponents)
    }
}

impl Serialize for DirichletCharacter {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}
