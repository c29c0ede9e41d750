//! Cyclic difference sets: validation, the Singer, HKM and Lin families, and
//! their development into symmetric designs.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::FiniteField;
use crate::arith;
use crate::geometry::{DesignParams, IncidenceMatrix};
use crate::{Error, Result};

/// Above this group order the pairwise difference count is skipped.
pub const FULL_CHECK_LIMIT: u64 = 10_000;
/// Above this group order the group-ring identity is skipped as well.
pub const GROUP_RING_LIMIT: u64 = 20_000;

/// A subset of `Z_v` with its claimed parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DifferenceSet {
    v: u64,
    k: u64,
    lambda: u64,
    elements: Vec<u64>,
}

/// Why a subset is not a difference set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NotDifferenceSet {
    /// A nonzero residue with the wrong number of representations, if any.
    pub witness: Option<u64>,
    pub reason: String,
}

impl DifferenceSet {
    /// Sorts and deduplicates the residues, then checks the claim: by the
    /// difference count when `v <= FULL_CHECK_LIMIT`, by the group-ring
    /// identity up to `GROUP_RING_LIMIT`, and only the size above that.
    pub fn new(v: u64, k: u64, lambda: u64, mut elements: Vec<u64>) -> Result<Self> {
        elements.sort_unstable();
        elements.dedup();
        if elements.iter().any(|&d| d >= v) {
            return Err(Error::OutOfRange(format!("residue outside Z_{v}")));
        }
        if elements.len() as u64 != k {
            return Err(Error::Mismatch(format!(
                "difference set has {} elements, expected k = {k}",
                elements.len()
            )));
        }
        if lambda * (v - 1) != k * (k - 1) {
            return Err(Error::OutOfRange(format!(
                "(v, k, lambda) = ({v}, {k}, {lambda}) violates lambda(v-1) = k(k-1)"
            )));
        }
        if v <= FULL_CHECK_LIMIT {
            match is_difference_set(&elements, v) {
                Ok((kk, ll)) if kk == k && ll == lambda => {}
                Ok((kk, ll)) => {
                    return Err(Error::Mismatch(format!(
                        "difference set has (k, lambda) = ({kk}, {ll}), expected ({k}, {lambda})"
                    )))
                }
                Err(e) => return Err(Error::NotADesign(e.reason)),
            }
        } else if v <= GROUP_RING_LIMIT && !group_ring_check(&elements, v) {
            return Err(Error::NotADesign("group-ring identity fails".into()));
        }
        Ok(Self { v, k, lambda, elements })
    }

    pub fn v(&self) -> u64 {
        self.v
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn lambda(&self) -> u64 {
        self.lambda
    }

    /// `k - lambda`.
    pub fn n(&self) -> u64 {
        self.k - self.lambda
    }

    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    /// Parameters of the developed symmetric design.
    pub fn params(&self) -> DesignParams {
        DesignParams {
            v: self.v,
            k: self.k,
            lambda: self.lambda,
            b: self.v,
            r: self.k,
            n: self.k - self.lambda,
        }
    }

    pub fn translate(&self, c: u64) -> Result<Self> {
        let els = self.elements.iter().map(|&d| (d + c) % self.v).collect();
        Self::new(self.v, self.k, self.lambda, els)
    }
}

/// Counts differences directly: `(k, lambda)` if every nonzero residue of
/// `Z_v` is `d - d'` for exactly `lambda >= 1` pairs and `1 < k < v`.
pub fn is_difference_set(d: &[u64], v: u64) -> core::result::Result<(u64, u64), NotDifferenceSet> {
    let fail = |witness, reason: String| Err(NotDifferenceSet { witness, reason });
    if d.is_empty() || v < 2 {
        return fail(None, "empty set".into());
    }
    let mut els = d.to_vec();
    els.sort_unstable();
    els.dedup();
    if els.len() != d.len() || els.iter().any(|&x| x >= v) {
        return fail(None, format!("not a subset of Z_{v}"));
    }
    let k = els.len() as u64;
    if k >= v {
        return fail(None, "k = v is degenerate".into());
    }
    let mut counts = vec![0u64; v as usize];
    for &a in &els {
        for &b in &els {
            if a != b {
                counts[((a + v - b) % v) as usize] += 1;
            }
        }
    }
    let lambda = counts[1];
    if lambda == 0 {
        return fail(Some(1), "lambda = 0".into());
    }
    for (g, &c) in counts.iter().enumerate().skip(2) {
        if c != lambda {
            return fail(Some(g as u64), format!("{g} has {c} representations, 1 has {lambda}"));
        }
    }
    Ok((k, lambda))
}

/// `D(x) D(x^-1) = n + lambda (1 + x + ... + x^(v-1))` in `Z[x]/(x^v - 1)`,
/// with `lambda >= 1` and `k < v`.
pub fn group_ring_check(d: &[u64], v: u64) -> bool {
    if d.is_empty() || v < 2 || d.iter().any(|&x| x >= v) {
        return false;
    }
    let n = v as usize;
    let mut f = vec![0i64; n];
    for &x in d {
        f[x as usize] += 1;
    }
    // g(x) = f(x^-1)
    let g: Vec<i64> = (0..n).map(|i| f[(n - i) % n]).collect();
    let mut prod = vec![0i64; n];
    for (i, &a) in f.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (j, &b) in g.iter().enumerate() {
            if b != 0 {
                prod[(i + j) % n] += a * b;
            }
        }
    }
    let lambda = prod[1];
    let k = prod[0];
    lambda >= 1 && (k as u64) < v && f.iter().all(|&c| c <= 1) && prod[1..].iter().all(|&c| c == lambda)
}

/// `{dlog(x) mod v : x != 0, Tr(x) = 0}` in `F_(q^(m+1))`, a difference set
/// with the parameters of the points and hyperplanes of `PG(m, q)`.
pub fn singer(m: u32, q: u64) -> Result<DifferenceSet> {
    if m < 2 {
        return Err(Error::OutOfRange(format!("singer needs m >= 2, got {m}")));
    }
    let (p, e) = arith::prime_power(q)?;
    let field = FiniteField::new(p, e * (m + 1))?;
    let v = (field.order() - 1) / (q - 1);
    let k = (q.pow(m) - 1) / (q - 1);
    let lambda = (q.pow(m - 1) - 1) / (q - 1);
    let mut els = Vec::with_capacity(k as usize);
    for i in 0..v {
        if field.trace(field.exp(i), e)? == 0 {
            els.push(i);
        }
    }
    DifferenceSet::new(v, k, lambda, els)
}

/// `rho({x : Tr(x + x^d) = 1})` in `F_(q^m)` for the exponent `d`; the
/// image must have `q^(m-1)` residues.
fn trace_set(q: u64, m: u32, d: u64, params: (u64, u64, u64)) -> Result<DifferenceSet> {
    let (p, e) = arith::prime_power(q)?;
    let field = FiniteField::new(p, e * m)?;
    let units = field.order() - 1;
    let (v, k, lambda) = params;
    let one = field.one();
    let mut seen = vec![false; v as usize];
    let mut els = Vec::with_capacity(k as usize);
    for i in 0..units {
        let x = field.exp(i);
        let y = field.add(x, field.exp((i as u128 * d as u128 % units as u128) as u64));
        if field.trace(y, e)? == one {
            let r = i % v;
            if q == 3 && seen[r as usize] {
                return Err(Error::Mismatch(format!(
                    "rho is not injective on R: residue {r} repeats"
                )));
            }
            if !seen[r as usize] {
                seen[r as usize] = true;
                els.push(r);
            }
        }
    }
    if els.len() as u64 != k {
        return Err(Error::Mismatch(format!("|rho(R)| = {}, expected {k}", els.len())));
    }
    DifferenceSet::new(v, k, lambda, els)
}

fn classical(q: u64, m: u32) -> Result<(u64, u64, u64)> {
    let qm = arith::checked_pow(q, m)?;
    Ok(((qm - 1) / (q - 1), qm / q, qm / q / q * (q - 1)))
}

/// The HKM set for `q` a power of 3 and `m = 3k`, with `d = q^(2k) - q^k + 1`.
pub fn hkm(q: u64, k: u32) -> Result<DifferenceSet> {
    let (p, _) = arith::prime_power(q)?;
    if p != 3 || k == 0 {
        return Err(Error::OutOfRange(format!(
            "hkm needs q a power of 3 and k >= 1 (q = {q}, k = {k})"
        )));
    }
    let m = 3 * k;
    let field_size = arith::checked_pow(q, m)?;
    if field_size > crate::algebra::FIELD_SIZE_LIMIT {
        return Err(Error::SizeGuard {
            what: "field order q^m",
            value: field_size as u128,
            limit: crate::algebra::FIELD_SIZE_LIMIT as u128,
        });
    }
    let qk = q.pow(k);
    let d = qk * qk - qk + 1;
    trace_set(q, m, d, classical(q, m)?)
}

/// The Lin set for odd `m >= 3`, with `d = 2 * 3^((m-1)/2) + 1` over `F_(3^m)`.
pub fn lin(m: u32) -> Result<DifferenceSet> {
    if m < 3 || m.is_multiple_of(2) {
        return Err(Error::OutOfRange(format!("lin needs odd m >= 3, got {m}")));
    }
    let d = 2 * 3u64.pow((m - 1) / 2) + 1;
    trace_set(3, m, d, classical(3, m)?)
}

/// The `v x v` circulant whose row `g` is `{g + d : d in D}`.
pub fn dev(d: &DifferenceSet) -> IncidenceMatrix {
    let v = d.v;
    IncidenceMatrix::from_rows(
        v as usize,
        (0..v).map(|g| d.elements.iter().map(|&x| ((x + g) % v) as u32).collect::<Vec<u32>>()),
    )
    .expect("translates stay in Z_v")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::verify_2design;

    #[test]
    fn small_difference_sets() {
        assert_eq!(is_difference_set(&[1, 2, 4], 7), Ok((3, 1)));
        assert!(is_difference_set(&[0], 5).is_err());
        let all: Vec<u64> = (0..7).collect();
        assert!(is_difference_set(&all, 7).is_err());
        let e = is_difference_set(&[1, 2, 3], 7).unwrap_err();
        assert!(e.witness.is_some());
    }

    #[test]
    fn group_ring_examples() {
        assert!(group_ring_check(&[1, 2, 4], 7));
        assert!(!group_ring_check(&[1, 2, 3], 7));
        assert!(group_ring_check(&[4, 5, 0], 7));
        assert!(!group_ring_check(&[0], 5));
    }

    #[test]
    fn group_ring_agrees_with_counting() {
        // every subset of Z_v for small v
        for v in 2u64..=13 {
            for mask in 1u32..(1 << v) {
                let d: Vec<u64> = (0..v).filter(|&i| mask >> i & 1 == 1).collect();
                assert_eq!(
                    group_ring_check(&d, v),
                    is_difference_set(&d, v).is_ok(),
                    "v = {v}, D = {d:?}"
                );
            }
        }
    }

    #[test]
    fn singer_parameters() {
        for (m, q, want) in [
            (2, 2, (7, 3, 1)),
            (2, 3, (13, 4, 1)),
            (3, 2, (15, 7, 3)),
            (2, 4, (21, 5, 1)),
        ] {
            let d = singer(m, q).unwrap();
            assert_eq!((d.v(), d.k(), d.lambda()), want);
            assert!(group_ring_check(d.elements(), d.v()));
        }
    }

    #[test]
    fn hkm_and_lin_parameters() {
        let h = hkm(3, 1).unwrap();
        assert_eq!((h.v(), h.k(), h.lambda()), (13, 9, 6));
        let l = lin(3).unwrap();
        assert_eq!((l.v(), l.k(), l.lambda()), (13, 9, 6));
        assert_eq!(h.elements(), l.elements());
        let l5 = lin(5).unwrap();
        assert_eq!((l5.v(), l5.k(), l5.lambda()), (121, 81, 54));
        assert!(hkm(5, 1).is_err());
        assert!(lin(4).is_err());
    }

    #[test]
    fn developments_are_symmetric_designs() {
        let d = singer(2, 2).unwrap();
        let a = dev(&d);
        assert_eq!(verify_2design(&a).unwrap(), d.params());
        assert!(a.rows().all(|r| r.len() == 3));
        let base: Vec<u32> = d.elements().iter().map(|&x| x as u32).collect();
        assert_eq!(a.circulant_base().unwrap(), base);
        let h = hkm(3, 1).unwrap();
        assert_eq!(verify_2design(&dev(&h)).unwrap(), h.params());
    }

    #[test]
    fn translation_keeps_validity() {
        let d = singer(2, 3).unwrap();
        let t = d.translate(5).unwrap();
        assert_eq!(group_ring_check(d.elements(), 13), group_ring_check(t.elements(), 13));
    }
}
