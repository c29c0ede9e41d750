//! Multi-pass streaming elimination over `Z/p^L`.
//!
//! Pass `a` streams every row through the finished bases of the earlier
//! passes, dividing by `p` after each one, and grows a reduced echelon basis
//! with unit pivots from what is left. The size of that basis is the number
//! of invariant factors of valuation exactly `a`.

use alloc::vec;
use alloc::vec::Vec;

use super::ValuationProfile;
use crate::arith;
use crate::geometry::IncidenceMatrix;
use crate::{Error, Result};

/// Row access for the elimination engine.
pub trait MatrixRows {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    /// Writes row `i` as `(column, value)` pairs.
    fn row_entries(&self, i: usize, out: &mut Vec<(u32, i64)>);
}

impl MatrixRows for IncidenceMatrix {
    fn nrows(&self) -> usize {
        IncidenceMatrix::nrows(self)
    }

    fn ncols(&self) -> usize {
        IncidenceMatrix::ncols(self)
    }

    fn row_entries(&self, i: usize, out: &mut Vec<(u32, i64)>) {
        out.clear();
        out.extend(self.row(i).iter().map(|&c| (c, 1)));
    }
}

/// Dense integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    pub cols: usize,
    pub rows: Vec<Vec<i64>>,
}

impl IntMatrix {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::OutOfRange("rows of unequal length".into()));
        }
        Ok(Self { cols, rows })
    }

    pub fn identity(n: usize, scale: i64) -> Self {
        let rows = (0..n)
            .map(|i| {
                let mut r = vec![0; n];
                r[i] = scale;
                r
            })
            .collect();
        Self { cols: n, rows }
    }
}

impl MatrixRows for IntMatrix {
    fn nrows(&self) -> usize {
        self.rows.len()
    }

    fn ncols(&self) -> usize {
        self.cols
    }

    fn row_entries(&self, i: usize, out: &mut Vec<(u32, i64)>) {
        out.clear();
        out.extend(
            self.rows[i]
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(c, &x)| (c as u32, x)),
        );
    }
}

const NONE: u32 = u32::MAX;

/// Reduced echelon basis over `Z/modulus` with unit pivot entries equal to 1
/// and zeros in every other pivot column.
struct Basis {
    p: u64,
    modulus: u64,
    batch: usize,
    pivots: Vec<u32>,
    pivot_slot: Vec<u32>,
    vectors: Vec<Vec<u32>>,
}

impl Basis {
    fn new(p: u64, modulus: u64, cols: usize) -> Self {
        let m1 = (modulus - 1) as u128;
        let batch = if m1 <= 1 {
            usize::MAX
        } else {
            ((u64::MAX as u128 - modulus as u128) / (m1 * m1)).min(usize::MAX as u128) as usize
        };
        Self {
            p,
            modulus,
            batch: batch.max(1),
            pivots: Vec::new(),
            pivot_slot: vec![NONE; cols],
            vectors: Vec::new(),
        }
    }

    fn len(&self) -> usize {
        self.vectors.len()
    }

    /// `x - sum_c x_c B_c` over the pivot columns `c`, in place.
    fn reduce(&self, x: &mut [u32], acc: &mut Vec<u64>) {
        let m = self.modulus;
        let coeffs: Vec<(usize, u64)> = self
            .pivots
            .iter()
            .enumerate()
            .filter(|(_, &c)| x[c as usize] != 0)
            .map(|(i, &c)| (i, m - x[c as usize] as u64))
            .collect();
        if coeffs.is_empty() {
            return;
        }
        acc.clear();
        acc.extend(x.iter().map(|&e| e as u64));
        for chunk in coeffs.chunks(self.batch) {
            for &(i, c) in chunk {
                for (a, &b) in acc.iter_mut().zip(&self.vectors[i]) {
                    *a += c * b as u64;
                }
            }
            if chunk.len() == self.batch {
                for a in acc.iter_mut() {
                    *a %= m;
                }
            }
        }
        for (e, a) in x.iter_mut().zip(acc.iter()) {
            *e = (a % m) as u32;
        }
    }

    /// Reduces `x` and adds it as a new basis vector if it has a unit entry.
    fn insert(&mut self, x: &mut [u32], acc: &mut Vec<u64>) -> bool {
        self.reduce(x, acc);
        let Some(col) = x.iter().position(|&e| !(e as u64).is_multiple_of(self.p)) else {
            return false;
        };
        let m = self.modulus;
        let inv = inverse_mod(x[col] as u64, m);
        if inv != 1 {
            for e in x.iter_mut() {
                *e = ((*e as u64 * inv) % m) as u32;
            }
        }
        for v in self.vectors.iter_mut() {
            let c = v[col] as u64;
            if c != 0 {
                let neg = m - c;
                for (e, &b) in v.iter_mut().zip(x.iter()) {
                    *e = ((*e as u64 + neg * b as u64) % m) as u32;
                }
            }
        }
        self.pivot_slot[col] = self.vectors.len() as u32;
        self.pivots.push(col as u32);
        self.vectors.push(x.to_vec());
        true
    }
}

fn inverse_mod(a: u64, m: u64) -> u64 {
    let (mut r0, mut r1) = (m as i128, a as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    debug_assert_eq!(r0, 1);
    t0.rem_euclid(m as i128) as u64
}

/// Valuation profile of the row lattice of `m` at `p`, precision `l`: the
/// number of invariant factors with `p`-valuation `0, 1, ..., l-1`, and the
/// rest (including zeros of a rank-deficient matrix) in the top bucket.
pub fn p_local_profile<M: MatrixRows + ?Sized>(m: &M, p: u64, l: u32) -> Result<ValuationProfile> {
    if !arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if l == 0 {
        return Err(Error::OutOfRange("precision must be at least 1".into()));
    }
    let top = arith::checked_pow(p, l)?;
    if top >= 1 << 31 {
        return Err(Error::SizeGuard {
            what: "p^L",
            value: top as u128,
            limit: 1 << 31,
        });
    }
    let cols = m.ncols();
    let mut levels: Vec<Basis> = Vec::new();
    let mut counts = vec![0u64; l as usize + 1];
    let mut remaining = cols as u64;
    let mut entries = Vec::new();
    let mut x = vec![0u32; cols];
    let mut acc = Vec::with_capacity(cols);
    for a in 0..l {
        if remaining == 0 {
            break;
        }
        let modulus = top / arith::checked_pow(p, a)?;
        let mut basis = Basis::new(p, modulus, cols);
        'rows: for i in 0..m.nrows() {
            m.row_entries(i, &mut entries);
            if entries.is_empty() {
                continue;
            }
            for e in x.iter_mut() {
                *e = 0;
            }
            for &(c, val) in &entries {
                x[c as usize] = val.rem_euclid(top as i64) as u32;
            }
            let mut md = top;
            for lev in &levels {
                lev.reduce(&mut x, &mut acc);
                md /= p;
                let mut zero = true;
                for e in x.iter_mut() {
                    debug_assert_eq!(*e as u64 % p, 0);
                    *e = (*e as u64 / p) as u32;
                    zero &= *e == 0;
                }
                if zero {
                    continue 'rows;
                }
            }
            debug_assert_eq!(md, modulus);
            basis.insert(&mut x, &mut acc);
            if basis.len() as u64 == remaining {
                break;
            }
        }
        counts[a as usize] = basis.len() as u64;
        remaining -= basis.len() as u64;
        levels.push(basis);
    }
    counts[l as usize] = remaining;
    ValuationProfile::new(p, l, counts)
}

/// Rank over `Z/p`.
pub fn rank_mod_p<M: MatrixRows + ?Sized>(m: &M, p: u64) -> Result<u64> {
    Ok(p_local_profile(m, p, 1)?.rank())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::incidence_pg;
    use proptest::prelude::*;

    /// Dense rank over Z/p by textbook Gaussian elimination.
    fn dense_rank(rows: &[Vec<i64>], p: i64) -> u64 {
        let mut a: Vec<Vec<i64>> = rows
            .iter()
            .map(|r| r.iter().map(|x| x.rem_euclid(p)).collect())
            .collect();
        let cols = a.first().map_or(0, |r| r.len());
        let mut rank = 0;
        for c in 0..cols {
            let Some(piv) = (rank..a.len()).find(|&i| a[i][c] != 0) else {
                continue;
            };
            a.swap(rank, piv);
            let inv = (1..p).find(|&y| a[rank][c] * y % p == 1).unwrap();
            for j in 0..cols {
                a[rank][j] = a[rank][j] * inv % p;
            }
            for i in 0..a.len() {
                if i != rank && a[i][c] != 0 {
                    let f = a[i][c];
                    for j in 0..cols {
                        a[i][j] = (a[i][j] - f * a[rank][j]).rem_euclid(p);
                    }
                }
            }
            rank += 1;
        }
        rank as u64
    }

    #[test]
    fn fano_ranks() {
        let a = incidence_pg(2, 2, 2).unwrap();
        let dense: Vec<Vec<i64>> = a
            .to_dense()
            .iter()
            .map(|r| r.iter().map(|&x| x as i64).collect())
            .collect();
        for (p, want) in [(2, 4), (3, 6), (5, 7)] {
            assert_eq!(rank_mod_p(&a, p).unwrap(), want);
            assert_eq!(dense_rank(&dense, p as i64), want);
        }
    }

    #[test]
    fn fano_profile() {
        let a = incidence_pg(2, 2, 2).unwrap();
        let prof = p_local_profile(&a, 2, 3).unwrap();
        assert_eq!(prof.counts(), &[4, 3, 0, 0]);
    }

    #[test]
    fn scaled_identity() {
        let id = IntMatrix::identity(5, 1);
        assert_eq!(p_local_profile(&id, 2, 3).unwrap().counts(), &[5, 0, 0, 0]);
        let two = IntMatrix::identity(5, 2);
        assert_eq!(p_local_profile(&two, 2, 3).unwrap().counts(), &[0, 5, 0, 0]);
        let eight = IntMatrix::identity(3, 8);
        assert_eq!(p_local_profile(&eight, 2, 3).unwrap().counts(), &[0, 0, 0, 3]);
    }

    #[test]
    fn diagonal_after_unimodular_mixing() {
        // rows of diag(1, 3, 9, 27) mixed by a unimodular matrix
        let m = IntMatrix::new(vec![
            vec![1, 3, 0, 0],
            vec![1, 6, 9, 0],
            vec![0, 3, 18, 27],
            vec![2, 6, 9, 54],
        ])
        .unwrap();
        assert_eq!(p_local_profile(&m, 3, 4).unwrap().counts(), &[1, 1, 1, 1, 0]);
    }

    #[test]
    fn rejects_bad_input() {
        let id = IntMatrix::identity(2, 1);
        assert!(matches!(p_local_profile(&id, 4, 2), Err(Error::NotPrime(4))));
        assert!(p_local_profile(&id, 2, 0).is_err());
    }

    proptest! {
        #[test]
        fn rank_matches_dense(rows in proptest::collection::vec(proptest::collection::vec(-4i64..5, 6), 1..8), pi in 0usize..3) {
            let p = [2u64, 3, 5][pi];
            let m = IntMatrix::new(rows.clone()).unwrap();
            prop_assert_eq!(rank_mod_p(&m, p).unwrap(), dense_rank(&rows, p as i64));
        }
    }
}
