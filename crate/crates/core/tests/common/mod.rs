//! Independent oracles: every formula re-derived with plain rationals at a
//! concrete `w`, where `q = w^D`. Nothing here calls the library formulas.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Zero};

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn int(n: i64) -> BigRational {
    rat(n, 1)
}

pub fn choose(n: u32, k: u32) -> BigRational {
    let mut c = BigInt::one();
    for i in 0..k {
        c = c * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    BigRational::from_integer(c)
}

pub fn fact(n: u32) -> BigRational {
    (1..=n).fold(BigRational::one(), |acc, i| acc * int(i as i64))
}

/// A point `w` together with the root order `D`, so `q = w^D`.
#[derive(Clone)]
pub struct Point {
    pub w: BigRational,
    pub d: u32,
}

impl Point {
    pub fn new(w: BigRational, d: u32) -> Self {
        Point { w, d }
    }

    /// `q^e`, `e D` an integer.
    pub fn q_pow(&self, e: &BigRational) -> BigRational {
        let k = e * int(self.d as i64);
        assert!(k.is_integer(), "exponent needs a finer root");
        let k = i64::try_from(k.to_integer()).unwrap();
        if k >= 0 {
            Pow::pow(&self.w, k as u64)
        } else {
            Pow::pow(&self.w.recip(), (-k) as u64)
        }
    }

    pub fn q(&self) -> BigRational {
        self.q_pow(&int(1))
    }

    /// `[x]_{q^b}`.
    pub fn bracket_base(&self, x: &BigRational, b: i64) -> BigRational {
        let qb = self.q_pow(&int(b));
        (BigRational::one() - self.q_pow(&(x * int(b)))) / (BigRational::one() - qb)
    }

    pub fn bracket(&self, x: &BigRational) -> BigRational {
        self.bracket_base(x, 1)
    }

    /// `[n]_{-q}` for an integer `n`.
    pub fn bracket_neg(&self, n: u64) -> BigRational {
        let mq = -self.q();
        (BigRational::one() - Pow::pow(&mq, n)) / (BigRational::one() + self.q())
    }

    /// `K_{n,q^b}(y) = [2]_{q^b} (1-q^b)^{-n} sum_k C(n,k) (-1)^k q^{b y k} / (1 + q^{b(k+1)})`.
    pub fn k_closed_base(&self, n: u32, y: &BigRational, b: i64) -> BigRational {
        let one = BigRational::one();
        let qb = self.q_pow(&int(b));
        let mut s = BigRational::zero();
        for k in 0..=n {
            let t = choose(n, k) * self.q_pow(&(y * int(b * k as i64))) / (&one + self.q_pow(&int(b * (k as i64 + 1))));
            if k % 2 == 0 {
                s += t;
            } else {
                s -= t;
            }
        }
        (&one + &qb) * s / Pow::pow(&(&one - &qb), n)
    }

    pub fn k_closed(&self, n: u32, x: &BigRational) -> BigRational {
        self.k_closed_base(n, x, 1)
    }

    /// `sum_j C(n,j) [x]^{n-j} q^{jx} K_j`.
    pub fn k_expansion(&self, n: u32, x: &BigRational) -> BigRational {
        let bx = self.bracket(x);
        (0..=n)
            .map(|j| {
                choose(n, j) * Pow::pow(&bx, n - j) * self.q_pow(&(x * int(j as i64))) * self.k_closed(j, &BigRational::zero())
            })
            .fold(BigRational::zero(), |a, b| a + b)
    }

    /// `([m]_q^n / [m]_{-q}) sum_{a<m} (-1)^a q^a K_{n,q^m}((a+x)/m)`.
    pub fn k_distribution(&self, n: u32, x: &BigRational, m: u64) -> BigRational {
        let mut s = BigRational::zero();
        for a in 0..m {
            let y = (int(a as i64) + x) / int(m as i64);
            let t = Pow::pow(&self.q(), a) * self.k_closed_base(n, &y, m as i64);
            if a % 2 == 0 {
                s += t;
            } else {
                s -= t;
            }
        }
        Pow::pow(&self.bracket(&int(m as i64)), n) / self.bracket_neg(m) * s
    }

    /// The fermionic Riemann sum of `[x + j]^n` over `M` points, summed directly.
    pub fn fermionic_sum(&self, n: u32, x: &BigRational, points: u64) -> BigRational {
        let mq = -self.q();
        let mut s = BigRational::zero();
        let mut wj = BigRational::one();
        for j in 0..points {
            s += &wj * Pow::pow(&self.bracket(&(x + int(j as i64))), n);
            wj *= &mq;
        }
        s / self.bracket_neg(points)
    }

    /// `(1-q)^{-n} sum_i C(n,i) (-1)^i q^{x i} (i+1) / [i+1]`.
    pub fn beta_closed(&self, n: u32, x: &BigRational) -> BigRational {
        let one = BigRational::one();
        let mut s = BigRational::zero();
        for i in 0..=n {
            let k = int(i as i64 + 1);
            let t = choose(n, i) * self.q_pow(&(x * int(i as i64))) * &k / self.bracket(&k);
            if i % 2 == 0 {
                s += t;
            } else {
                s -= t;
            }
        }
        s / Pow::pow(&(&one - self.q()), n)
    }

    /// `sum_i C(n,i) q^{ix} beta_i [x]^{n-i}`.
    pub fn beta_expansion(&self, n: u32, x: &BigRational) -> BigRational {
        let bx = self.bracket(x);
        (0..=n)
            .map(|i| {
                choose(n, i) * self.q_pow(&(x * int(i as i64))) * self.beta_closed(i, &BigRational::zero()) * Pow::pow(&bx, n - i)
            })
            .fold(BigRational::zero(), |a, b| a + b)
    }
}

/// Sample values of `w` away from the roots of unity and from 0.
pub fn sample_points() -> Vec<BigRational> {
    vec![rat(2, 1), rat(1, 3), rat(-5, 7), rat(3, 2), rat(-2, 9)]
}

/// Bernoulli numbers with `B_1 = -1/2`, from `sum_{k<=n} C(n+1,k) B_k = 0`.
pub fn bernoulli(n_max: u32) -> Vec<BigRational> {
    let mut b = vec![BigRational::one()];
    for n in 1..=n_max {
        let s = (0..n).map(|k| choose(n + 1, k) * &b[k as usize]).fold(BigRational::zero(), |a, c| a + c);
        b.push(-s / int(n as i64 + 1));
    }
    b
}

/// Euler numbers of `2/(e^t+1)`: `E_n = 2 (1 - 2^{n+1}) B_{n+1} / (n+1)`.
pub fn euler(n_max: u32) -> Vec<BigRational> {
    let b = bernoulli(n_max + 1);
    (0..=n_max)
        .map(|n| {
            let two_pow = Pow::pow(&int(2), n + 1);
            int(2) * (BigRational::one() - two_pow) * &b[n as usize + 1] / int(n as i64 + 1)
        })
        .collect()
}

/// `v_p` of a nonzero rational.
pub fn valuation(r: &BigRational, p: u64) -> i64 {
    assert!(!r.is_zero());
    let p = BigInt::from(p);
    let count = |mut n: BigInt| {
        let mut v = 0;
        while (&n % &p).is_zero() {
            n /= &p;
            v += 1;
        }
        v
    };
    count(r.numer().clone()) - count(r.denom().clone())
}
