//! Integer combinatorics: generalized binomials, factorials, 2-adic
//! valuations and integer partitions.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

const FACTORIAL_CACHE: usize = 64;

fn factorial_table() -> &'static [BigInt] {
    static TABLE: OnceLock<Vec<BigInt>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(FACTORIAL_CACHE);
        t.push(BigInt::one());
        for k in 1..FACTORIAL_CACHE {
            let next = &t[k - 1] * BigInt::from(k);
            t.push(next);
        }
        t
    })
}

pub fn factorial(k: usize) -> BigInt {
    if k < FACTORIAL_CACHE {
        return factorial_table()[k].clone();
    }
    let mut acc = factorial_table()[FACTORIAL_CACHE - 1].clone();
    for j in FACTORIAL_CACHE..=k {
        acc *= BigInt::from(j);
    }
    acc
}

/// Generalized binomial coefficient `a (a-1) ... (a-k+1) / k!` for any integer `a`.
pub fn binomial(a: &BigInt, k: usize) -> BigInt {
    let mut num = BigInt::one();
    let mut term = a.clone();
    for _ in 0..k {
        num *= &term;
        term -= 1;
    }
    let (q, r) = num.div_rem(&factorial(k));
    debug_assert!(r.is_zero());
    q
}

pub fn binomial_i(a: i64, k: usize) -> BigInt {
    binomial(&BigInt::from(a), k)
}

/// Coefficient of `x^k` in `(1 - x)^(-a)`, i.e. `C(a + k - 1, k)`.
pub fn multichoose(a: i64, k: usize) -> BigInt {
    if k == 0 {
        return BigInt::one();
    }
    binomial_i(a + k as i64 - 1, k)
}

/// Largest `e` with `2^e | n`.
pub fn v2(n: &BigInt) -> Result<u64> {
    if n.is_zero() {
        return Err(Error::ZeroValuation);
    }
    Ok(n.abs().trailing_zeros().unwrap_or(0))
}

pub fn v2_factorial(k: usize) -> u64 {
    // Legendre: sum of floor(k / 2^j).
    let mut e = 0u64;
    let mut p = 2usize;
    while p <= k {
        e += (k / p) as u64;
        p *= 2;
    }
    e
}

pub fn pow2(e: usize) -> BigInt {
    BigInt::one() << e
}

/// Integer partition stored with parts in non-increasing order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition(pub Vec<usize>);

impl Partition {
    pub fn parts(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn size(&self) -> usize {
        self.0.iter().sum()
    }

    /// `z_mu = prod_m m^{k_m} k_m!`, the centralizer order of the cycle type.
    pub fn z(&self) -> BigInt {
        let mut z = BigInt::one();
        let mut idx = 0;
        while idx < self.0.len() {
            let part = self.0[idx];
            let mut mult = 0usize;
            while idx < self.0.len() && self.0[idx] == part {
                mult += 1;
                idx += 1;
            }
            z *= BigInt::from(part).pow(mult as u32) * factorial(mult);
        }
        z
    }
}

impl std::fmt::Display for Partition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// All partitions of `n`, in reverse lexicographic order starting from `(n)`.
pub fn partitions(n: usize) -> Vec<Partition> {
    fn rec(rest: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if rest == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        for part in (1..=rest.min(max)).rev() {
            cur.push(part);
            rec(rest - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Trial-division factorization, enough for the small exponents seen here.
pub fn factorize(n: &BigInt) -> Vec<(BigInt, u32)> {
    let mut n = n.abs();
    let mut out = Vec::new();
    if n <= BigInt::one() {
        return out;
    }
    let mut p = BigInt::from(2);
    while &p * &p <= n {
        let mut e = 0;
        while (&n % &p).is_zero() {
            n /= &p;
            e += 1;
        }
        if e > 0 {
            out.push((p.clone(), e));
        }
        p += 1;
    }
    if n > BigInt::one() {
        out.push((n, 1));
    }
    out
}

pub fn to_i64(v: &BigInt) -> Option<i64> {
    v.to_i64()
}
