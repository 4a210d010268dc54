//! Dense integer polynomial kernels.
//!
//! Everything in the rational-function layer funnels through here: products,
//! exact quotients and, above all, gcds. The gcd is a small-primes modular
//! algorithm: images modulo 62-bit primes are combined by CRT until the
//! lifted candidate stabilises, and the candidate is then certified by exact
//! division over Z. Coefficient growth of a Euclidean remainder sequence over
//! Q is therefore never paid.

use std::sync::OnceLock;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Coefficients by ascending degree; no trailing zeros. The zero polynomial is empty.
pub type ZPoly = Vec<BigInt>;

pub fn trim(p: &mut ZPoly) {
    while p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

pub fn degree(p: &[BigInt]) -> Option<usize> {
    p.len().checked_sub(1)
}

pub fn add(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    let (long, short) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let mut out: ZPoly = long.to_vec();
    for (o, s) in out.iter_mut().zip(short) {
        *o += s;
    }
    trim(&mut out);
    out
}

pub fn sub(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    let mut out: ZPoly = a.to_vec();
    if out.len() < b.len() {
        out.resize(b.len(), BigInt::zero());
    }
    for (o, s) in out.iter_mut().zip(b) {
        *o -= s;
    }
    trim(&mut out);
    out
}

pub fn scale(a: &[BigInt], c: &BigInt) -> ZPoly {
    if c.is_zero() {
        return Vec::new();
    }
    a.iter().map(|x| x * c).collect()
}

pub fn mul(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    // Sparse operands (monomials, 1 ± w^k) are common; skip their zero terms.
    let (outer, inner) = if count_nonzero(a) <= count_nonzero(b) { (a, b) } else { (b, a) };
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in outer.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        if x.is_one() {
            for (j, y) in inner.iter().enumerate() {
                out[i + j] += y;
            }
        } else {
            for (j, y) in inner.iter().enumerate() {
                if !y.is_zero() {
                    out[i + j] += x * y;
                }
            }
        }
    }
    trim(&mut out);
    out
}

fn count_nonzero(a: &[BigInt]) -> usize {
    a.iter().filter(|c| !c.is_zero()).count()
}

/// Gcd of the coefficients, nonnegative.
pub fn content(a: &[BigInt]) -> BigInt {
    let mut g = BigInt::zero();
    for c in a {
        g = g.gcd(c);
        if g.is_one() {
            break;
        }
    }
    g
}

/// Splits `a = c * pp` with `pp` primitive and a positive leading coefficient.
pub fn primitive_part(a: &[BigInt]) -> (BigInt, ZPoly) {
    if a.is_empty() {
        return (BigInt::zero(), Vec::new());
    }
    let mut c = content(a);
    if a.last().is_some_and(|l| l.is_negative()) {
        c = -c;
    }
    if c.is_one() {
        return (c, a.to_vec());
    }
    let pp = a.iter().map(|x| x / &c).collect();
    (c, pp)
}

/// `Some(a / b)` when `b` divides `a` in Z[x], `None` otherwise.
pub fn div_exact(a: &[BigInt], b: &[BigInt]) -> Option<ZPoly> {
    assert!(!b.is_empty(), "division by the zero polynomial");
    if a.is_empty() {
        return Some(Vec::new());
    }
    if a.len() < b.len() {
        return None;
    }
    let db = b.len() - 1;
    let lb = &b[db];
    let mut rem = a.to_vec();
    let mut quot = vec![BigInt::zero(); a.len() - db];
    for k in (0..quot.len()).rev() {
        let top = &rem[k + db];
        if top.is_zero() {
            continue;
        }
        let (q, r) = top.div_rem(lb);
        if !r.is_zero() {
            return None;
        }
        for (j, bj) in b.iter().enumerate() {
            if !bj.is_zero() {
                rem[k + j] -= &q * bj;
            }
        }
        quot[k] = q;
    }
    if rem.iter().any(|c| !c.is_zero()) {
        return None;
    }
    trim(&mut quot);
    Some(quot)
}

/// Primitive gcd with positive leading coefficient. `gcd(0, 0) = 0`.
pub fn gcd(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    if a.is_empty() {
        return primitive_part(b).1;
    }
    if b.is_empty() {
        return primitive_part(a).1;
    }
    let (_, a) = primitive_part(a);
    let (_, b) = primitive_part(b);
    if a.len() == 1 || b.len() == 1 {
        return vec![BigInt::one()];
    }
    if a == b {
        return a;
    }
    // One side dividing the other is frequent (shared denominators).
    if a.len() <= b.len() {
        if div_exact(&b, &a).is_some() {
            return a;
        }
    } else if div_exact(&a, &b).is_some() {
        return b;
    }
    modular_gcd(&a, &b).unwrap_or_else(|| euclid_gcd(&a, &b))
}

fn modular_gcd(a: &[BigInt], b: &[BigInt]) -> Option<ZPoly> {
    let la = a.last().unwrap();
    let lb = b.last().unwrap();
    let gamma = la.gcd(lb);
    let mut lifted: Option<(ZPoly, BigInt, usize)> = None;

    for &p in primes() {
        let pb = BigInt::from(p);
        if (la % &pb).is_zero() || (lb % &pb).is_zero() {
            continue;
        }
        let ap = reduce_mod(a, p);
        let bp = reduce_mod(b, p);
        let mut g = gcd_mod(ap, bp, p);
        let dg = g.len() - 1;
        if dg == 0 {
            return Some(vec![BigInt::one()]);
        }
        let gm = residue(&gamma, p);
        for c in g.iter_mut() {
            *c = mul_mod(*c, gm, p);
        }
        match lifted.as_mut() {
            Some((_, _, d)) if dg > *d => continue,
            Some((h, m, d)) if dg == *d => {
                let next = crt_step(h, m, &g, p);
                *m *= &pb;
                let stable = next == *h;
                *h = next;
                if stable {
                    let (_, cand) = primitive_part(h);
                    if div_exact(a, &cand).is_some() && div_exact(b, &cand).is_some() {
                        return Some(cand);
                    }
                }
            }
            _ => {
                let h = g.iter().map(|&c| symmetric(c, p)).collect();
                lifted = Some((h, pb, dg));
            }
        }
    }
    None
}

/// Primitive remainder sequence over Z; only reached if the prime table runs dry.
fn euclid_gcd(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    let (mut r0, mut r1) = if a.len() >= b.len() {
        (a.to_vec(), b.to_vec())
    } else {
        (b.to_vec(), a.to_vec())
    };
    while !r1.is_empty() {
        let r = pseudo_rem(&r0, &r1);
        r0 = r1;
        r1 = primitive_part(&r).1;
    }
    primitive_part(&r0).1
}

fn pseudo_rem(a: &[BigInt], b: &[BigInt]) -> ZPoly {
    let mut rem = a.to_vec();
    let db = b.len() - 1;
    let lb = &b[db];
    while rem.len() > db {
        let k = rem.len() - 1 - db;
        let top = rem.last().unwrap().clone();
        for c in rem.iter_mut() {
            *c *= lb;
        }
        for (j, bj) in b.iter().enumerate() {
            rem[k + j] -= &top * bj;
        }
        trim(&mut rem);
    }
    rem
}

fn crt_step(h: &[BigInt], m: &BigInt, g: &[u64], p: u64) -> ZPoly {
    let m_inv = inv_mod(residue(m, p), p);
    let new_m = m * BigInt::from(p);
    let half = &new_m >> 1;
    h.iter()
        .zip(g)
        .map(|(hc, &gc)| {
            let hr = residue(hc, p);
            let t = mul_mod(sub_mod(gc, hr, p), m_inv, p);
            let mut v = hc + m * BigInt::from(t);
            if v > half {
                v -= &new_m;
            }
            v
        })
        .collect()
}

fn residue(x: &BigInt, p: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(p));
    r.to_u64().expect("residue fits in u64")
}

fn symmetric(c: u64, p: u64) -> BigInt {
    if c > p / 2 {
        BigInt::from(c) - BigInt::from(p)
    } else {
        BigInt::from(c)
    }
}

fn reduce_mod(a: &[BigInt], p: u64) -> Vec<u64> {
    let pb = BigInt::from(p);
    let mut out: Vec<u64> = a
        .iter()
        .map(|c| match c.sign() {
            Sign::NoSign => 0,
            _ => c.mod_floor(&pb).to_u64().unwrap(),
        })
        .collect();
    while out.last() == Some(&0) {
        out.pop();
    }
    out
}

#[inline]
fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + (p - b)
    }
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Monic gcd over F_p of two nonzero polynomials.
fn gcd_mod(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        rem_mod_in_place(&mut a, &b, p);
        std::mem::swap(&mut a, &mut b);
    }
    let inv = inv_mod(*a.last().unwrap(), p);
    for c in a.iter_mut() {
        *c = mul_mod(*c, inv, p);
    }
    a
}

fn rem_mod_in_place(a: &mut Vec<u64>, b: &[u64], p: u64) {
    let db = b.len() - 1;
    let inv = inv_mod(b[db], p);
    while a.len() > db {
        let top = *a.last().unwrap();
        let k = a.len() - 1 - db;
        if top != 0 {
            let q = mul_mod(top, inv, p);
            for (j, &bj) in b.iter().enumerate() {
                if bj != 0 {
                    a[k + j] = sub_mod(a[k + j], mul_mod(q, bj, p), p);
                }
            }
        }
        a.pop();
        while a.last() == Some(&0) {
            a.pop();
        }
    }
}

fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % small == 0 {
            return n == small;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

const PRIME_TABLE_LEN: usize = 512;

fn primes() -> &'static [u64] {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = Vec::with_capacity(PRIME_TABLE_LEN);
        let mut n = (1u64 << 62) - 1;
        while out.len() < PRIME_TABLE_LEN {
            if is_prime_u64(n) {
                out.push(n);
            }
            n -= 2;
        }
        out
    })
}

/// Substitutes x -> x^k.
pub fn inflate(a: &[BigInt], k: usize) -> ZPoly {
    if a.is_empty() || k == 1 {
        return a.to_vec();
    }
    let mut out = vec![BigInt::zero(); (a.len() - 1) * k + 1];
    for (i, c) in a.iter().enumerate() {
        out[i * k] = c.clone();
    }
    out
}
