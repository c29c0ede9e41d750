use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::arith;
use crate::{Error, Result};

/// Largest field order for which exp/log tables are built.
pub const FIELD_SIZE_LIMIT: u64 = 1 << 26;

/// `F_{p^t}` with elements encoded as integers `sum c_i p^i`, where `c_i` is
/// the coefficient of `x^i` in the residue modulo the defining polynomial.
///
/// The modulus is the first monic polynomial (ordered by the integer code of
/// its lower coefficients) whose root `x` has order `p^t - 1`, so `x` itself
/// is the distinguished primitive element.
#[derive(Clone, Debug)]
pub struct FiniteField {
    p: u32,
    t: u32,
    order: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl FiniteField {
    pub fn new(p: u64, t: u32) -> Result<Self> {
        if !arith::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if t == 0 {
            return Err(Error::OutOfRange(format!("field degree must be positive, got {t}")));
        }
        let order = (p as u128).pow(t);
        if order > FIELD_SIZE_LIMIT as u128 {
            return Err(Error::SizeGuard {
                what: "field order",
                value: order,
                limit: FIELD_SIZE_LIMIT as u128,
            });
        }
        let order = order as u64;
        let p32 = p as u32;
        let modulus = find_primitive_modulus(p32, t, order);
        let order32 = order as u32;
        let units = order32 - 1;

        let mut exp = vec![0u32; units as usize];
        let mut log = vec![u32::MAX; order as usize];
        let mut cur = vec![0u32; t as usize];
        cur[0] = 1;
        for e in 0..units {
            let code = encode(&cur, p32);
            exp[e as usize] = code;
            log[code as usize] = e;
            times_x(&mut cur, &modulus, p32);
        }
        Ok(Self {
            p: p32,
            t,
            order: order32,
            modulus,
            exp,
            log,
        })
    }

    pub fn characteristic(&self) -> u64 {
        self.p as u64
    }

    pub fn degree(&self) -> u32 {
        self.t
    }

    pub fn order(&self) -> u64 {
        self.order as u64
    }

    /// Monic modulus, coefficients of `x^0 .. x^t`.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn zero(&self) -> u32 {
        0
    }

    pub fn one(&self) -> u32 {
        1
    }

    /// The distinguished primitive element.
    pub fn generator(&self) -> u32 {
        self.exp[1 % self.exp.len()]
    }

    pub fn elements(&self) -> core::ops::Range<u32> {
        0..self.order
    }

    pub fn coefficients(&self, a: u32) -> Vec<u32> {
        decode(a, self.p, self.t)
    }

    pub fn from_coefficients(&self, c: &[u32]) -> u32 {
        encode(c, self.p)
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.p == 2 {
            return a ^ b;
        }
        let p = self.p;
        let (mut a, mut b) = (a, b);
        let mut out = 0u32;
        let mut place = 1u32;
        while a > 0 || b > 0 {
            let d = (a % p + b % p) % p;
            out += d * place;
            a /= p;
            b /= p;
            place = place.wrapping_mul(p);
        }
        out
    }

    pub fn neg(&self, a: u32) -> u32 {
        if self.p == 2 {
            return a;
        }
        let p = self.p;
        let mut a = a;
        let mut out = 0u32;
        let mut place = 1u32;
        while a > 0 {
            let d = (p - a % p) % p;
            out += d * place;
            a /= p;
            place = place.wrapping_mul(p);
        }
        out
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let units = self.order - 1;
        let e = (self.log[a as usize] as u64 + self.log[b as usize] as u64) % units as u64;
        self.exp[e as usize]
    }

    pub fn inv(&self, a: u32) -> Result<u32> {
        if a == 0 {
            return Err(Error::ZeroLog);
        }
        let units = self.order - 1;
        let l = self.log[a as usize];
        Ok(self.exp[((units - l) % units) as usize])
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let units = (self.order - 1) as u128;
        let l = (self.log[a as usize] as u128 * e as u128) % units;
        self.exp[l as usize]
    }

    /// `gamma^e` for the distinguished generator.
    pub fn exp(&self, e: u64) -> u32 {
        self.exp[(e % (self.order as u64 - 1)) as usize]
    }

    /// Discrete logarithm to the distinguished generator, in `[0, p^t - 2]`.
    pub fn dlog(&self, a: u32) -> Result<u64> {
        if a == 0 || a >= self.order {
            return Err(Error::ZeroLog);
        }
        Ok(self.log[a as usize] as u64)
    }

    /// Trace onto the subfield of degree `sub` (which must divide `t`):
    /// `x + x^Q + ... + x^(Q^(t/sub - 1))` with `Q = p^sub`.
    pub fn trace(&self, x: u32, sub: u32) -> Result<u32> {
        if sub == 0 || !self.t.is_multiple_of(sub) {
            return Err(Error::OutOfRange(format!(
                "subfield degree {sub} does not divide {}",
                self.t
            )));
        }
        if x == 0 {
            return Ok(0);
        }
        let units = (self.order - 1) as u128;
        let l = self.log[x as usize] as u128;
        let step = (self.p as u128).pow(sub) % units;
        let mut frob = 1u128;
        let mut acc = 0u32;
        for _ in 0..self.t / sub {
            acc = self.add(acc, self.exp[((l * frob) % units) as usize]);
            frob = (frob * step) % units;
        }
        Ok(acc)
    }

    /// True if `a` lies in the subfield of degree `sub`.
    pub fn in_subfield(&self, a: u32, sub: u32) -> bool {
        self.pow(a, (self.p as u64).pow(sub)) == a
    }

    /// Field embedding of `small = F_{p^s}` (with `s | t`) into this field, as a
    /// table from element codes of `small` to element codes here. The image of
    /// the small field's generator is the first power `gamma^(j (p^t-1)/(p^s-1))`
    /// that is a root of the small modulus.
    pub fn embedding_of(&self, small: &FiniteField) -> Result<Vec<u32>> {
        if small.p != self.p || !self.t.is_multiple_of(small.t) {
            return Err(Error::OutOfRange(format!(
                "F_{}^{} is not a subfield of F_{}^{}",
                small.p, small.t, self.p, self.t
            )));
        }
        let small_units = small.order() - 1;
        let step = (self.order() - 1) / small_units;
        let beta = (1..=small_units)
            .filter(|&j| arith::gcd(j, small_units) == 1)
            .map(|j| self.exp(j * step))
            .find(|&beta| {
                // coefficients of the small modulus are prime-field elements,
                // whose codes coincide in both fields
                let mut acc = 0u32;
                let mut pw = 1u32;
                for &c in small.modulus() {
                    acc = self.add(acc, self.mul(c, pw));
                    pw = self.mul(pw, beta);
                }
                acc == 0
            })
            .ok_or_else(|| Error::Mismatch("no root of the subfield modulus".into()))?;
        let mut table = vec![0u32; small.order() as usize];
        for e in 0..small_units {
            table[small.exp(e) as usize] = self.pow(beta, e);
        }
        Ok(table)
    }

    /// Elements of the subfield of degree `sub` (which must divide `t`),
    /// as elements of this field, sorted by code.
    pub fn subfield_elements(&self, sub: u32) -> Result<Vec<u32>> {
        if sub == 0 || !self.t.is_multiple_of(sub) {
            return Err(Error::OutOfRange(format!(
                "subfield degree {sub} does not divide {}",
                self.t
            )));
        }
        let step = (self.order as u64 - 1) / ((self.p as u64).pow(sub) - 1);
        let mut out: Vec<u32> = (0..(self.p as u64).pow(sub) - 1).map(|i| self.exp(i * step)).collect();
        out.push(0);
        out.sort_unstable();
        Ok(out)
    }
}

/// Dense addition and multiplication tables for small fields, used by the
/// geometry enumerators where per-operation digit loops would dominate.
#[derive(Clone, Debug)]
pub struct FieldTables {
    q: u32,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
}

/// Largest order for which [`FieldTables`] are built.
pub const TABLE_LIMIT: u64 = 1024;

impl FieldTables {
    pub fn new(field: &FiniteField) -> Result<Self> {
        let q = field.order();
        if q > TABLE_LIMIT {
            return Err(Error::SizeGuard {
                what: "field order for dense tables",
                value: q as u128,
                limit: TABLE_LIMIT as u128,
            });
        }
        let q = q as u32;
        let mut add = vec![0u32; (q * q) as usize];
        let mut mul = vec![0u32; (q * q) as usize];
        for a in 0..q {
            for b in 0..q {
                add[(a * q + b) as usize] = field.add(a, b);
                mul[(a * q + b) as usize] = field.mul(a, b);
            }
        }
        let neg = (0..q).map(|a| field.neg(a)).collect();
        Ok(Self { q, add, mul, neg })
    }

    pub fn order(&self) -> u32 {
        self.q
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.add[(a * self.q + b) as usize]
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[(a * self.q + b) as usize]
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.neg[a as usize]
    }
}

fn encode(c: &[u32], p: u32) -> u32 {
    c.iter().rev().fold(0u32, |acc, &d| acc * p + d)
}

fn decode(mut a: u32, p: u32, t: u32) -> Vec<u32> {
    let mut out = vec![0u32; t as usize];
    for d in out.iter_mut() {
        *d = a % p;
        a /= p;
    }
    out
}

/// In place `cur <- cur * x mod modulus` over F_p.
fn times_x(cur: &mut [u32], modulus: &[u32], p: u32) {
    let t = cur.len();
    let top = cur[t - 1];
    for i in (1..t).rev() {
        cur[i] = cur[i - 1];
    }
    cur[0] = 0;
    if top != 0 {
        for i in 0..t {
            cur[i] = (cur[i] + (p - modulus[i]) * top) % p;
        }
    }
}

fn poly_mulmod(a: &[u32], b: &[u32], modulus: &[u32], p: u32) -> Vec<u32> {
    let t = a.len();
    let mut prod = vec![0u64; 2 * t - 1];
    for i in 0..t {
        if a[i] == 0 {
            continue;
        }
        for j in 0..t {
            prod[i + j] += a[i] as u64 * b[j] as u64;
        }
    }
    let p64 = p as u64;
    for d in (t..2 * t - 1).rev() {
        let c = prod[d] % p64;
        if c != 0 {
            for i in 0..t {
                prod[d - t + i] += c * (p64 - modulus[i] as u64);
            }
        }
        prod[d] = 0;
    }
    prod[..t].iter().map(|&c| (c % p64) as u32).collect()
}

fn poly_powmod(base: &[u32], mut e: u64, modulus: &[u32], p: u32) -> Vec<u32> {
    let t = base.len();
    let mut acc = vec![0u32; t];
    acc[0] = 1;
    let mut b = base.to_vec();
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(&acc, &b, modulus, p);
        }
        b = poly_mulmod(&b, &b, modulus, p);
        e >>= 1;
    }
    acc
}

/// First monic degree-t polynomial whose root x has multiplicative order
/// `p^t - 1` (which forces irreducibility).
fn find_primitive_modulus(p: u32, t: u32, order: u64) -> Vec<u32> {
    let units = order - 1;
    let prime_factors = arith::prime_divisors(units);
    let tu = t as usize;
    for code in 0..order as u32 {
        let mut modulus = decode(code, p, t);
        if modulus[0] == 0 {
            continue;
        }
        modulus.push(1);
        let mut x = vec![0u32; tu];
        if tu == 1 {
            x[0] = (p - modulus[0]) % p;
        } else {
            x[1] = 1;
        }
        let mut one = vec![0u32; tu];
        one[0] = 1;
        if poly_powmod(&x, units, &modulus, p) != one {
            continue;
        }
        if prime_factors
            .iter()
            .all(|&l| poly_powmod(&x, units / l, &modulus, p) != one)
        {
            return modulus;
        }
    }
    unreachable!("every finite field has a primitive polynomial")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order_of(f: &FiniteField, a: u32) -> u64 {
        let mut x = a;
        let mut k = 1;
        while x != 1 {
            x = f.mul(x, a);
            k += 1;
        }
        k
    }

    #[test]
    fn prime_field_of_two() {
        let f = FiniteField::new(2, 1).unwrap();
        assert_eq!(f.order(), 2);
        assert_eq!(f.generator(), 1);
    }

    #[test]
    fn nine_elements() {
        let f = FiniteField::new(3, 2).unwrap();
        let units = f.elements().filter(|&a| a != 0).count();
        assert_eq!(units, 8);
        assert_eq!(order_of(&f, f.generator()), 8);
    }

    #[test]
    fn exhaustive_generator_order_3_9() {
        let f = FiniteField::new(3, 9).unwrap();
        assert_eq!(f.order(), 19683);
        // walk the powers of gamma by repeated multiplication, independent of the tables
        let mut x = 1u32;
        let mut seen = vec![false; 19683];
        for k in 0..19682u32 {
            assert!(!seen[x as usize], "gamma^{k} repeats");
            seen[x as usize] = true;
            let mut cur = f.coefficients(x);
            times_x(&mut cur, f.modulus(), 3);
            x = f.from_coefficients(&cur);
        }
        assert_eq!(x, 1);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(FiniteField::new(4, 1).unwrap_err(), Error::NotPrime(4));
        assert!(matches!(FiniteField::new(2, 27), Err(Error::SizeGuard { .. })));
    }

    #[test]
    fn trace_examples() {
        let f4 = FiniteField::new(2, 2).unwrap();
        assert_eq!(f4.trace(0, 1).unwrap(), 0);
        // generator x of F_4: x + x^2 = x + (x + 1) = 1
        let x = f4.generator();
        let x2 = f4.mul(x, x);
        assert_eq!(f4.add(x, x2), 1);
        assert_eq!(f4.trace(x, 1).unwrap(), 1);
        let f9 = FiniteField::new(3, 2).unwrap();
        assert_eq!(f9.trace(1, 1).unwrap(), 2);
        assert!(f9.trace(1, 3).is_err());
    }

    #[test]
    fn dlog_examples() {
        let f = FiniteField::new(5, 3).unwrap();
        assert_eq!(f.dlog(1).unwrap(), 0);
        assert_eq!(f.dlog(f.generator()).unwrap(), 1);
        let a = f.exp(5);
        let b = f.exp(7);
        assert_eq!(f.dlog(f.mul(a, b)).unwrap(), 12 % (f.order() - 1));
        assert_eq!(f.dlog(0), Err(Error::ZeroLog));
    }

    #[test]
    fn trace_transitivity() {
        // F_{2^6} -> F_{2^2} -> F_2 and F_{3^4} -> F_9 -> F_3
        for (p, t, mid) in [(2u64, 6u32, 2u32), (3, 4, 2), (2, 6, 3)] {
            let f = FiniteField::new(p, t).unwrap();
            let mut seed = 12345u64;
            for _ in 0..100 {
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let x = (seed >> 33) as u32 % f.order() as u32;
                let inner = f.trace(x, mid).unwrap();
                assert!(f.in_subfield(inner, mid));
                // trace of an element of F_{p^mid} down to F_p, computed inside the big field
                let mut acc = 0u32;
                let mut y = inner;
                for _ in 0..mid {
                    acc = f.add(acc, y);
                    y = f.pow(y, p);
                }
                assert_eq!(acc, f.trace(x, 1).unwrap());
            }
        }
    }

    #[test]
    fn field_axioms_small() {
        let f = FiniteField::new(5, 2).unwrap();
        for a in f.elements() {
            assert_eq!(f.add(a, f.neg(a)), 0);
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
            for b in f.elements().step_by(3) {
                // distributivity against a fixed third element
                let c = 7u32;
                assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            }
        }
    }
}
