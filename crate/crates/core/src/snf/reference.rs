//! Exact SNF by elimination over `Z/D`, where `D` is the determinant of a
//! nonsingular maximal minor. Slow, independent of the p-local path, and
//! used to cross-check it on small matrices.

use alloc::vec;
use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::plocal::MatrixRows;
use super::InvariantFactorMultiset;
use crate::arith;
use crate::{Error, Result};

/// Largest `b * v * v` for which [`super::snf_exact`] also runs the reference.
pub const REFERENCE_LIMIT: u128 = 20_000_000;

/// Whether the reference elimination runs on this matrix (`b v^2` bound).
pub fn within_limit<M: MatrixRows + ?Sized>(m: &M) -> bool {
    let (b, v) = (m.nrows() as u128, m.ncols() as u128);
    b * v * v <= REFERENCE_LIMIT
}

fn dense<M: MatrixRows + ?Sized>(m: &M) -> Vec<Vec<i64>> {
    let mut entries = Vec::new();
    (0..m.nrows())
        .map(|i| {
            m.row_entries(i, &mut entries);
            let mut row = vec![0i64; m.ncols()];
            for &(c, x) in &entries {
                row[c as usize] = x;
            }
            row
        })
        .collect()
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    (a as u128 * b as u128 % p as u128) as u64
}

fn residue(x: i64, p: u64) -> u64 {
    x.rem_euclid(p as i64) as u64
}

/// Primes just below `2^62`, largest first.
fn big_primes() -> impl Iterator<Item = u64> {
    (0..).map(|i| (1u64 << 62) - 1 - 2 * i).filter(|&n| arith::is_prime(n))
}

/// Indices of `cols` rows independent modulo `p`, if there are that many.
fn independent_rows(a: &[Vec<i64>], cols: usize, p: u64) -> Option<Vec<usize>> {
    let mut basis: Vec<(usize, Vec<u64>)> = Vec::new();
    let mut chosen = Vec::new();
    for (i, row) in a.iter().enumerate() {
        let mut x: Vec<u64> = row.iter().map(|&e| residue(e, p)).collect();
        for (c, b) in &basis {
            let f = x[*c];
            if f != 0 {
                for (e, &y) in x.iter_mut().zip(b) {
                    *e = (*e + p - mulmod(f, y, p)) % p;
                }
            }
        }
        if let Some(c) = x.iter().position(|&e| e != 0) {
            let inv = arith::pow_mod(x[c], p - 2, p);
            for e in x.iter_mut() {
                *e = mulmod(*e, inv, p);
            }
            basis.push((c, x));
            chosen.push(i);
            if chosen.len() == cols {
                return Some(chosen);
            }
        }
    }
    None
}

fn det_mod(a: &[Vec<i64>], p: u64) -> u64 {
    let n = a.len();
    let mut m: Vec<Vec<u64>> = a.iter().map(|r| r.iter().map(|&e| residue(e, p)).collect()).collect();
    let mut det = 1u64;
    for c in 0..n {
        let Some(piv) = (c..n).find(|&i| m[i][c] != 0) else {
            return 0;
        };
        if piv != c {
            m.swap(piv, c);
            det = (p - det) % p;
        }
        det = mulmod(det, m[c][c], p);
        let inv = arith::pow_mod(m[c][c], p - 2, p);
        for i in c + 1..n {
            let f = mulmod(m[i][c], inv, p);
            if f != 0 {
                let (top, rest) = m.split_at_mut(i);
                for (e, &y) in rest[0][c..].iter_mut().zip(&top[c][c..]) {
                    *e = (*e + p - mulmod(f, y, p)) % p;
                }
            }
        }
    }
    det
}

/// Determinant of a square integer matrix by Chinese remaindering past the
/// Hadamard bound.
fn determinant(a: &[Vec<i64>]) -> BigInt {
    let mut hh = BigUint::one();
    for row in a {
        let s: u128 = row.iter().map(|&x| (x as i128 * x as i128) as u128).sum();
        hh *= BigUint::from(s);
    }
    let bound = hh * 4u32;
    let mut modulus = BigUint::one();
    let mut value = BigUint::zero();
    for p in big_primes() {
        let r = det_mod(a, p);
        // value += modulus * ((r - value) / modulus mod p)
        let vp = (&value % p).iter_u64_digits().next().unwrap_or(0);
        let mp = (&modulus % p).iter_u64_digits().next().unwrap_or(0);
        let diff = (r + p - vp) % p;
        let k = mulmod(diff, arith::pow_mod(mp, p - 2, p), p);
        value += &modulus * k;
        modulus *= p;
        if &modulus * &modulus > bound {
            break;
        }
    }
    let half = &modulus >> 1;
    if value > half {
        BigInt::from(value) - BigInt::from(modulus)
    } else {
        BigInt::from(value)
    }
}

fn xgcd(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt) {
    let e = a.extended_gcd(b);
    (e.gcd, e.x, e.y)
}

/// A unit `u` modulo `d` with `a * u = gcd(a, d)` modulo `d`.
fn normalizer(a: &BigInt, d: &BigInt) -> BigInt {
    let g = a.gcd(d);
    let dg = d / &g;
    if dg.is_one() {
        return BigInt::one();
    }
    let (_, x, _) = xgcd(&(a / &g), &dg);
    let mut u = x.mod_floor(&dg);
    while !u.gcd(d).is_one() {
        u += &dg;
    }
    u
}

/// Elimination over `Z/d`; returns the diagonal. Every pivot is kept a
/// divisor of `d`, and it strictly shrinks whenever a Bezout step is needed.
fn diagonalize(mut a: Vec<Vec<BigInt>>, cols: usize, d: &BigInt) -> Vec<BigInt> {
    let rows = a.len();
    let red = |x: BigInt| x.mod_floor(d);
    let mut diag = Vec::with_capacity(cols);
    for k in 0..cols {
        let mut best: Option<(usize, usize, BigInt)> = None;
        'search: for c in k..cols {
            for r in k..rows {
                if a[r][c].is_zero() {
                    continue;
                }
                let g = a[r][c].gcd(d);
                if best.as_ref().is_none_or(|(_, _, bg)| g < *bg) {
                    let unit = g.is_one();
                    best = Some((r, c, g));
                    if unit {
                        break 'search;
                    }
                }
            }
        }
        let Some((pr, pc, _)) = best else {
            diag.extend(core::iter::repeat_n(BigInt::zero(), cols - k));
            break;
        };
        a.swap(k, pr);
        for row in a.iter_mut() {
            row.swap(k, pc);
        }
        let u = normalizer(&a[k][k], d);
        if !u.is_one() {
            for j in k..cols {
                a[k][j] = red(&a[k][j] * &u);
            }
        }
        loop {
            for i in k + 1..rows {
                if a[i][k].is_zero() {
                    continue;
                }
                let (top, rest) = a.split_at_mut(i);
                let (rk, ri) = (&mut top[k], &mut rest[0]);
                if (&ri[k] % &rk[k]).is_zero() {
                    let f = &ri[k] / &rk[k];
                    for j in k..cols {
                        if !rk[j].is_zero() {
                            ri[j] = red(&ri[j] - &f * &rk[j]);
                        }
                    }
                } else {
                    let (g, s, t) = xgcd(&rk[k], &ri[k]);
                    let u = &ri[k] / &g;
                    let w = &rk[k] / &g;
                    for j in k..cols {
                        let x = rk[j].clone();
                        let y = ri[j].clone();
                        rk[j] = red(&s * &x + &t * &y);
                        ri[j] = red(&u * &x - &w * &y);
                    }
                }
            }
            let mut refilled = false;
            for j in k + 1..cols {
                if a[k][j].is_zero() {
                    continue;
                }
                if (&a[k][j] % &a[k][k]).is_zero() {
                    // column k is clear below the pivot
                    a[k][j] = BigInt::zero();
                    continue;
                }
                let (g, s, t) = xgcd(&a[k][k], &a[k][j]);
                let u = &a[k][j] / &g;
                let w = &a[k][k] / &g;
                for row in a.iter_mut().skip(k) {
                    let x = row[k].clone();
                    let y = row[j].clone();
                    row[k] = red(&s * &x + &t * &y);
                    row[j] = red(&u * &x - &w * &y);
                }
                refilled = true;
            }
            if !refilled {
                break;
            }
        }
        diag.push(a[k][k].clone());
    }
    diag
}

/// Exact invariant factors of an integer matrix of full column rank.
pub fn reference_snf<M: MatrixRows + ?Sized>(m: &M) -> Result<InvariantFactorMultiset> {
    let a = dense(m);
    let cols = m.ncols();
    if cols == 0 {
        return InvariantFactorMultiset::new(Vec::new());
    }
    let chosen = big_primes()
        .take(3)
        .find_map(|p| independent_rows(&a, cols, p))
        .ok_or_else(|| Error::Mismatch("matrix does not have full column rank".into()))?;
    let minor: Vec<Vec<i64>> = chosen.iter().map(|&i| a[i].clone()).collect();
    let d = determinant(&minor).abs();
    if d.is_zero() {
        return Err(Error::Mismatch("matrix does not have full column rank".into()));
    }
    let big: Vec<Vec<BigInt>> = a
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x).mod_floor(&d)).collect())
        .collect();
    let mut diag: Vec<BigInt> = diagonalize(big, cols, &d).into_iter().map(|x| x.gcd(&d)).collect();
    // put the diagonal into divisor-chain form
    for i in 0..diag.len() {
        for j in i + 1..diag.len() {
            let g = diag[i].gcd(&diag[j]);
            let l = diag[i].lcm(&diag[j]);
            diag[i] = g;
            diag[j] = l;
        }
    }
    let small: Vec<u64> = diag
        .iter()
        .map(|x| u64::try_from(x).map_err(|_| Error::OutOfRange("invariant factor exceeds u64".into())))
        .collect::<Result<_>>()?;
    InvariantFactorMultiset::from_diagonal(&small)
}
