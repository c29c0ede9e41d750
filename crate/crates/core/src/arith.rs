//! Small exact number theory on machine integers.

use alloc::vec::Vec;

use crate::{Error, Result};

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
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

/// Prime factorization by trial division, ascending primes with exponents.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn prime_divisors(n: u64) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

/// p-adic valuation; `valuation(0, p)` is `u32::MAX`.
pub fn valuation(mut n: u64, p: u64) -> u32 {
    if n == 0 {
        return u32::MAX;
    }
    let mut e = 0;
    while n.is_multiple_of(p) {
        n /= p;
        e += 1;
    }
    e
}

/// p-part of n.
pub fn p_part(n: u64, p: u64) -> u64 {
    p.pow(valuation(n, p))
}

pub fn checked_pow(base: u64, exp: u32) -> Result<u64> {
    base.checked_pow(exp)
        .ok_or_else(|| Error::OutOfRange(alloc::format!("{base}^{exp} overflows u64")))
}

/// Splits a prime power `q = p^t`.
pub fn prime_power(q: u64) -> Result<(u64, u32)> {
    let f = factorize(q);
    match f.as_slice() {
        [(p, t)] => Ok((*p, *t)),
        _ => Err(Error::OutOfRange(alloc::format!("{q} is not a prime power"))),
    }
}

/// Multiplicative order of `a` modulo `n`; requires `gcd(a, n) = 1`.
pub fn multiplicative_order(a: u64, n: u64) -> Result<u64> {
    if n == 1 {
        return Ok(1);
    }
    if gcd(a, n) != 1 {
        return Err(Error::PrimeDividesOrder { p: a, order: n });
    }
    // Order divides Carmichael-ish bound; search over divisors of phi(n).
    let phi = factorize(n)
        .iter()
        .fold(1u64, |acc, &(p, e)| acc * (p - 1) * p.pow(e - 1));
    let mut ord = phi;
    for (p, _) in factorize(phi) {
        while ord % p == 0 && pow_mod(a, ord / p, n) == 1 {
            ord /= p;
        }
    }
    Ok(ord)
}

/// Smallest `count` primes not dividing `avoid`.
pub fn primes_not_dividing(avoid: u64, count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut p = 2;
    while out.len() < count {
        if is_prime(p) && !avoid.is_multiple_of(p) {
            out.push(p);
        }
        p += 1;
    }
    out
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}
