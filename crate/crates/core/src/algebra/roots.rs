use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use super::{GaloisRing, FIELD_SIZE_LIMIT};
use crate::arith;
use crate::{Error, Result};

/// Work bound `n * p^(L-1) * f` for the table-free construction.
pub const TABLE_FREE_LIMIT: u128 = 20_000_000_000;

/// Powers `xi^0, ..., xi^(n-1)` of a primitive `n`-th root of unity in
/// `GR(p^L, f)`, `f = ord_n(p)`, flattened with `f` coefficients per power.
///
/// Small residue fields go through [`GaloisRing`]. Otherwise the ring is
/// `(Z/p^L)[x] / (g)` with `g` the minimal polynomial over `F_p` of an
/// element of order `n`; there `x^s` is the Teichmüller root for
/// `s = 1 mod n`, `s = 0 mod p^(L-1)`, and its powers are powers of `x`.
#[derive(Clone, Debug)]
pub struct RootsOfUnity {
    p: u64,
    precision: u32,
    n: u64,
    degree: usize,
    characteristic: u64,
    modulus: Vec<u64>,
    powers: Vec<u64>,
}

impl RootsOfUnity {
    pub fn new(p: u64, precision: u32, n: u64) -> Result<Self> {
        let f = Self::check(p, precision, n)?;
        if (p as u128)
            .checked_pow(f)
            .is_some_and(|q| q <= FIELD_SIZE_LIMIT as u128)
        {
            Self::from_field(p, precision, n, f)
        } else {
            Self::table_free(p, precision, n, f)
        }
    }

    fn check(p: u64, precision: u32, n: u64) -> Result<u32> {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if n == 0 || n.is_multiple_of(p) {
            return Err(Error::PrimeDividesOrder { p, order: n });
        }
        if precision == 0 {
            return Err(Error::OutOfRange("precision must be positive".into()));
        }
        let pl = (p as u128).pow(precision);
        if pl >= 1 << 31 {
            return Err(Error::SizeGuard {
                what: "p^L",
                value: pl,
                limit: 1 << 31,
            });
        }
        Ok(if n == 1 {
            1
        } else {
            arith::multiplicative_order(p % n, n)? as u32
        })
    }

    fn from_field(p: u64, precision: u32, n: u64, f: u32) -> Result<Self> {
        let ring = GaloisRing::new(p, precision, f)?;
        let xi = ring.root_of_unity(n)?;
        let mut powers = Vec::with_capacity((n * f as u64) as usize);
        let mut cur = ring.one();
        for _ in 0..n {
            powers.extend_from_slice(&cur.coeffs);
            cur = ring.mul(&cur, &xi);
        }
        debug_assert_eq!(cur, ring.one());
        Ok(Self {
            p,
            precision,
            n,
            degree: f as usize,
            characteristic: ring.characteristic(),
            modulus: ring.modulus()[..f as usize].to_vec(),
            powers,
        })
    }

    fn table_free(p: u64, precision: u32, n: u64, f: u32) -> Result<Self> {
        let fu = f as usize;
        let lift = p.pow(precision - 1);
        let work = n as u128 * lift as u128 * f as u128;
        if work > TABLE_FREE_LIMIT {
            return Err(Error::SizeGuard {
                what: "root table work",
                value: work,
                limit: TABLE_FREE_LIMIT,
            });
        }
        let h = first_irreducible(p, fu);
        let w = element_of_order(&h, p, n)?;
        let g = minimal_polynomial(&w, &h, p)?;
        let pl = p.pow(precision);
        // y = x^(p^(L-1)); its t-th power is xi^(t p^(L-1) mod n)
        let mut y = vec![0u64; fu];
        y[0] = 1;
        for _ in 0..lift {
            times_x(&mut y, &g, pl);
        }
        let mut powers = vec![0u64; n as usize * fu];
        let mut cur = vec![0u64; fu];
        cur[0] = 1;
        let step = lift % n;
        let mut e = 0u64;
        for _ in 0..n {
            powers[e as usize * fu..(e as usize + 1) * fu].copy_from_slice(&cur);
            for _ in 0..lift {
                times_x(&mut cur, &g, pl);
            }
            e = (e + step) % n;
        }
        Ok(Self {
            p,
            precision,
            n,
            degree: fu,
            characteristic: pl,
            modulus: g,
            powers,
        })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn order(&self) -> u64 {
        self.n
    }

    /// Degree `f` of the ring over `Z/p^L`.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// `p^L`.
    pub fn characteristic(&self) -> u64 {
        self.characteristic
    }

    /// Lower coefficients of the monic ring modulus.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Coefficients of `xi^e`.
    pub fn power(&self, e: u64) -> &[u64] {
        let i = (e % self.n) as usize * self.degree;
        &self.powers[i..i + self.degree]
    }
}

/// `a <- x a` modulo the monic polynomial with lower coefficients `g`.
fn times_x(a: &mut [u64], g: &[u64], m: u64) {
    let f = a.len();
    let top = a[f - 1];
    a.copy_within(0..f - 1, 1);
    a[0] = 0;
    if top != 0 {
        for (x, &c) in a.iter_mut().zip(g) {
            if c != 0 {
                *x = (*x + (m - top) * c) % m;
            }
        }
    }
}

/// Whether `terms` products of residues mod `m` can be summed in a `u64`.
fn lazy_ok(m: u64, terms: usize) -> bool {
    ((m - 1) as u128).pow(2) * terms as u128 + m as u128 <= u64::MAX as u128
}

/// `a <- x^k a` modulo the monic polynomial with lower coefficients `g`.
fn times_x_pow(a: &mut Vec<u64>, k: usize, g: &[u64], m: u64) {
    let f = a.len();
    let support: Vec<(usize, u64)> = g.iter().copied().enumerate().filter(|&(_, c)| c != 0).collect();
    let mut ext = vec![0u64; f + k];
    ext[k..].copy_from_slice(a);
    for d in (f..f + k).rev() {
        let c = ext[d] % m;
        if c != 0 {
            for &(i, gi) in &support {
                ext[d - f + i] = (ext[d - f + i] + (m - c) * gi) % m;
            }
        }
    }
    ext.truncate(f);
    *a = ext;
}

/// `a b` modulo the monic polynomial with lower coefficients `g`, over `Z/m`.
fn mul_mod(a: &[u64], b: &[u64], g: &[u64], m: u64) -> Vec<u64> {
    let f = g.len();
    let lazy = lazy_ok(m, 2 * f);
    let mut prod = vec![0u64; 2 * f - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = if lazy {
                prod[i + j] + x * y
            } else {
                (prod[i + j] + x * y) % m
            };
        }
    }
    for d in (f..2 * f - 1).rev() {
        let c = prod[d] % m;
        if c != 0 {
            for i in 0..f {
                let t = prod[d - f + i] + (m - c) * g[i];
                prod[d - f + i] = if lazy { t } else { t % m };
            }
        }
    }
    prod.truncate(f);
    for x in prod.iter_mut() {
        *x %= m;
    }
    prod
}

fn trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

/// Monic gcd over `F_p` of two coefficient vectors.
fn poly_gcd(mut a: Vec<u64>, mut b: Vec<u64>, p: u64) -> Vec<u64> {
    let lazy = lazy_ok(p, a.len().max(b.len()) + 1);
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let inv = arith::pow_mod(b[b.len() - 1], p - 2, p);
        while a.len() >= b.len() {
            let c = a[a.len() - 1] % p * inv % p;
            let shift = a.len() - b.len();
            for (i, &y) in b.iter().enumerate() {
                let t = a[shift + i] + (p - c) * y;
                a[shift + i] = if lazy { t } else { t % p };
            }
            a.pop();
            while a.last().is_some_and(|&x| x % p == 0) {
                a.pop();
            }
        }
        for x in a.iter_mut() {
            *x %= p;
        }
        trim(&mut a);
        core::mem::swap(&mut a, &mut b);
    }
    if let Some(&lead) = a.last() {
        let inv = arith::pow_mod(lead, p - 2, p);
        for x in a.iter_mut() {
            *x = *x * inv % p;
        }
    }
    a
}

/// Rows `x^(p i) mod g` for `i < f`, the matrix of the Frobenius map.
fn frobenius_matrix(g: &[u64], p: u64) -> Vec<Vec<u64>> {
    let f = g.len();
    let mut rows = Vec::with_capacity(f);
    let mut x = vec![0u64; f];
    if f > 1 {
        x[1] = 1;
    } else {
        x[0] = (p - g[0]) % p;
    }
    let x_p = pow_small(&x, p, g, p);
    let mut cur = vec![0u64; f];
    cur[0] = 1;
    for _ in 0..f {
        rows.push(cur.clone());
        if p as usize <= f {
            times_x_pow(&mut cur, p as usize, g, p);
        } else {
            cur = mul_mod(&cur, &x_p, g, p);
        }
    }
    rows
}

fn apply(rows: &[Vec<u64>], a: &[u64], p: u64) -> Vec<u64> {
    let lazy = lazy_ok(p, a.len());
    let mut out = vec![0u64; a.len()];
    for (row, &c) in rows.iter().zip(a) {
        if c == 0 {
            continue;
        }
        for (o, &r) in out.iter_mut().zip(row) {
            *o = if lazy { *o + c * r } else { (*o + c * r) % p };
        }
    }
    for x in out.iter_mut() {
        *x %= p;
    }
    out
}

fn has_root(g: &[u64], p: u64) -> bool {
    (0..p).any(|a| {
        let mut acc = 1u64;
        for &c in g.iter().rev() {
            acc = (acc * a + c) % p;
        }
        acc == 0
    })
}

/// Ben-Or test: no factor of degree `i <= f/2` divides `x^(p^i) - x`.
/// While `p^i` is small next to `f^2 / weight(g)`, `x^(p^i)` comes from
/// shifting; afterwards from the Frobenius matrix.
fn is_irreducible(g: &[u64], p: u64) -> bool {
    let f = g.len();
    if f == 1 {
        return true;
    }
    if g[0] == 0 || (p <= 64 && has_root(g, p)) {
        return false;
    }
    let weight = g.iter().filter(|&&c| c != 0).count() as u128;
    let shift_budget = (f as u128 * f as u128) / weight.max(1);
    let mut monic = g.to_vec();
    monic.push(1);
    let mut u = vec![0u64; f];
    u[1] = 1;
    let mut exponent: Option<u128> = Some(1);
    let mut frob: Option<Vec<Vec<u64>>> = None;
    for _ in 1..=f / 2 {
        let next = exponent
            .and_then(|e| e.checked_mul(p as u128))
            .filter(|&e| e <= shift_budget);
        match (next, exponent) {
            (Some(e), Some(prev)) => {
                times_x_pow(&mut u, (e - prev) as usize, g, p);
                exponent = Some(e);
            }
            _ => {
                exponent = None;
                u = if p as u128 <= shift_budget {
                    apply(frob.get_or_insert_with(|| frobenius_matrix(g, p)), &u, p)
                } else {
                    pow_small(&u, p, g, p)
                };
            }
        }
        let mut diff = u.clone();
        diff[1] = (diff[1] + p - 1) % p;
        if poly_gcd(monic.clone(), diff, p).len() > 1 {
            return false;
        }
    }
    true
}

/// Lower coefficients of the first monic irreducible of degree `f` over
/// `F_p`, counting lower-coefficient vectors as base-`p` integers.
fn first_irreducible(p: u64, f: usize) -> Vec<u64> {
    let mut g = vec![0u64; f];
    loop {
        if is_irreducible(&g, p) {
            return g;
        }
        for c in g.iter_mut() {
            *c += 1;
            if *c < p {
                break;
            }
            *c = 0;
        }
    }
}

fn pow_small(a: &[u64], mut e: u64, g: &[u64], p: u64) -> Vec<u64> {
    let mut acc = vec![0u64; g.len()];
    acc[0] = 1;
    let mut b = a.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(&acc, &b, g, p);
        }
        e >>= 1;
        if e > 0 {
            b = mul_mod(&b, &b, g, p);
        }
    }
    acc
}

/// `z^e` for a large exponent, by Horner in base `p` with Frobenius steps.
fn pow_big(z: &[u64], e: &BigUint, g: &[u64], p: u64, frob: &[Vec<u64>]) -> Vec<u64> {
    let mut digits = Vec::new();
    let mut rest = e.clone();
    let base = BigUint::from(p);
    while !rest.is_zero() {
        digits.push((&rest % &base).to_u64().expect("digit below p"));
        rest /= &base;
    }
    let mut acc = vec![0u64; g.len()];
    acc[0] = 1;
    for &d in digits.iter().rev() {
        acc = apply(frob, &acc, p);
        if d != 0 {
            acc = mul_mod(&acc, &pow_small(z, d, g, p), g, p);
        }
    }
    acc
}

/// First element (in base-`p` code order) of `F_p[x]/(g)` whose
/// `(p^f - 1)/n`-th power has order exactly `n`; returns that power.
fn element_of_order(g: &[u64], p: u64, n: u64) -> Result<Vec<u64>> {
    let f = g.len();
    let order = BigUint::from(p).pow(f as u32) - BigUint::one();
    let e = &order / BigUint::from(n);
    let frob = frobenius_matrix(g, p);
    let mut one = vec![0u64; f];
    one[0] = 1;
    let primes = arith::prime_divisors(n);
    let mut z = vec![0u64; f];
    loop {
        for c in z.iter_mut() {
            *c += 1;
            if *c < p {
                break;
            }
            *c = 0;
        }
        if z.iter().all(|&c| c == 0) {
            return Err(Error::Mismatch(format!("no element of order {n} found")));
        }
        let w = pow_big(&z, &e, g, p, &frob);
        if primes.iter().all(|&r| pow_small(&w, n / r, g, p) != one) {
            return Ok(w);
        }
    }
}

/// Monic minimal polynomial of `w` over `F_p`, lower coefficients only.
fn minimal_polynomial(w: &[u64], g: &[u64], p: u64) -> Result<Vec<u64>> {
    let f = g.len();
    // reduced vectors, each with its pivot and the combination of powers of w
    let mut basis: Vec<(usize, Vec<u64>, Vec<u64>)> = Vec::new();
    let mut cur = vec![0u64; f];
    cur[0] = 1;
    for k in 0..=f {
        let mut vec_ = cur.clone();
        let mut comb = vec![0u64; f + 1];
        comb[k] = 1;
        for (piv, bv, bc) in &basis {
            let c = vec_[*piv];
            if c != 0 {
                for (x, &y) in vec_.iter_mut().zip(bv) {
                    *x = (*x + (p - c) * y) % p;
                }
                for (x, &y) in comb.iter_mut().zip(bc) {
                    *x = (*x + (p - c) * y) % p;
                }
            }
        }
        match vec_.iter().position(|&x| x != 0) {
            Some(piv) => {
                let inv = arith::pow_mod(vec_[piv], p - 2, p);
                for x in vec_.iter_mut().chain(comb.iter_mut()) {
                    *x = *x * inv % p;
                }
                basis.push((piv, vec_, comb));
            }
            None => {
                if k != f {
                    return Err(Error::Mismatch(format!(
                        "minimal polynomial has degree {k}, expected {f}"
                    )));
                }
                comb.truncate(f);
                return Ok(comb);
            }
        }
        cur = mul_mod(&cur, w, g, p);
    }
    Err(Error::Mismatch("powers of w never became dependent".into()))
}
