//! Smith normal forms of incidence matrices: invariant-factor multisets,
//! p-local valuation profiles, and the exact SNF of a design.

mod plocal;
mod reference;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::arith;
use crate::geometry::{verify_2design, DesignParams, IncidenceMatrix};
use crate::{Error, Result};

pub use plocal::{p_local_profile, rank_mod_p, IntMatrix, MatrixRows};
pub use reference::{reference_snf, within_limit, REFERENCE_LIMIT};

/// The invariant factors `d_1 | d_2 | ...` of a matrix as `(divisor, multiplicity)`
/// pairs in increasing order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InvariantFactorMultiset {
    terms: Vec<(u64, u64)>,
}

impl InvariantFactorMultiset {
    /// Validates positivity, strict increase and the divisibility chain.
    /// Zero multiplicities are dropped.
    pub fn new(terms: Vec<(u64, u64)>) -> Result<Self> {
        let terms: Vec<(u64, u64)> = terms.into_iter().filter(|&(_, m)| m > 0).collect();
        for &(d, _) in &terms {
            if d == 0 {
                return Err(Error::Parse("invariant factors must be positive".into()));
            }
        }
        for w in terms.windows(2) {
            let (a, b) = (w[0].0, w[1].0);
            if a >= b || b % a != 0 {
                return Err(Error::DivisorChain(a, b));
            }
        }
        Ok(Self { terms })
    }

    /// From an unsorted diagonal whose sorted order must form a divisor chain.
    pub fn from_diagonal(diag: &[u64]) -> Result<Self> {
        let mut sorted = diag.to_vec();
        sorted.sort_unstable();
        let mut terms: Vec<(u64, u64)> = Vec::new();
        for d in sorted {
            match terms.last_mut() {
                Some((last, m)) if *last == d => *m += 1,
                _ => terms.push((d, 1)),
            }
        }
        Self::new(terms)
    }

    pub fn terms(&self) -> &[(u64, u64)] {
        &self.terms
    }

    /// Total multiplicity.
    pub fn len(&self) -> u64 {
        self.terms.iter().map(|&(_, m)| m).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `d_1, ..., d_v` in order.
    pub fn diagonal(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.len() as usize);
        for &(d, m) in &self.terms {
            out.extend(core::iter::repeat_n(d, m as usize));
        }
        out
    }

    pub fn largest(&self) -> Option<u64> {
        self.terms.last().map(|&(d, _)| d)
    }

    pub fn multiplicity(&self, d: u64) -> u64 {
        self.terms.iter().find(|&&(x, _)| x == d).map_or(0, |&(_, m)| m)
    }

    /// Number of invariant factors prime to `p`: the `p`-rank.
    pub fn rank_mod(&self, p: u64) -> u64 {
        self.terms.iter().filter(|&&(d, _)| d % p != 0).map(|&(_, m)| m).sum()
    }

    /// The `p`-valuations, bucketed at precision `l` (the top bucket means `>= l`).
    pub fn profile(&self, p: u64, l: u32) -> ValuationProfile {
        let mut counts = vec![0u64; l as usize + 1];
        for &(d, m) in &self.terms {
            let a = arith::valuation(d, p).min(l);
            counts[a as usize] += m;
        }
        ValuationProfile {
            p,
            precision: l,
            counts,
        }
    }

    /// The product of all invariant factors as a prime-exponent map.
    pub fn product_exponents(&self) -> BTreeMap<u64, u128> {
        let mut out = BTreeMap::new();
        for &(d, m) in &self.terms {
            for (p, e) in arith::factorize(d) {
                *out.entry(p).or_insert(0) += e as u128 * m as u128;
            }
        }
        out
    }

    /// Prime-exponent map of `d_1 * ... * d_i`.
    pub fn prefix_product_exponents(&self, i: u64) -> BTreeMap<u64, u128> {
        let mut out = BTreeMap::new();
        let mut left = i;
        for &(d, m) in &self.terms {
            if left == 0 {
                break;
            }
            let take = m.min(left);
            left -= take;
            for (p, e) in arith::factorize(d) {
                *out.entry(p).or_insert(0) += e as u128 * take as u128;
            }
        }
        out
    }
}

impl fmt::Display for InvariantFactorMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &(d, m)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{d}^{m}")?;
        }
        Ok(())
    }
}

impl FromStr for InvariantFactorMultiset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut terms = Vec::new();
        for tok in s.split_whitespace() {
            let (d, m) = tok
                .split_once('^')
                .ok_or_else(|| Error::Parse(format!("expected d^mult, got {tok:?}")))?;
            let d: u64 = d.parse().map_err(|_| Error::Parse(format!("bad divisor in {tok:?}")))?;
            let m: u64 = m
                .parse()
                .map_err(|_| Error::Parse(format!("bad multiplicity in {tok:?}")))?;
            if m == 0 {
                return Err(Error::Parse(format!("zero multiplicity in {tok:?}")));
            }
            terms.push((d, m));
        }
        Self::new(terms)
    }
}

/// `"d^mult"` terms, ascending, space separated.
pub fn snf_format(inv: &InvariantFactorMultiset) -> String {
    format!("{inv}")
}

pub fn snf_parse(s: &str) -> Result<InvariantFactorMultiset> {
    s.parse()
}

/// Counts of invariant factors by `p`-adic valuation `0..=precision`; the
/// last bucket counts valuations `>= precision`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ValuationProfile {
    p: u64,
    precision: u32,
    counts: Vec<u64>,
}

impl ValuationProfile {
    pub fn new(p: u64, precision: u32, counts: Vec<u64>) -> Result<Self> {
        if counts.len() != precision as usize + 1 {
            return Err(Error::OutOfRange(format!(
                "profile at precision {precision} needs {} buckets, got {}",
                precision + 1,
                counts.len()
            )));
        }
        Ok(Self { p, precision, counts })
    }

    /// Builds a profile from a `valuation -> count` list; valuations at or
    /// above `precision` go to the top bucket.
    pub fn from_pairs(p: u64, precision: u32, pairs: &[(u32, u64)]) -> Self {
        let mut counts = vec![0u64; precision as usize + 1];
        for &(a, c) in pairs {
            counts[a.min(precision) as usize] += c;
        }
        Self { p, precision, counts }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn count(&self, alpha: u32) -> u64 {
        self.counts.get(alpha as usize).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Number of unit invariant factors, i.e. the `p`-rank.
    pub fn rank(&self) -> u64 {
        self.counts[0]
    }

    pub fn censored(&self) -> u64 {
        self.counts[self.precision as usize]
    }

    /// Valuations in ascending order (censored entries reported as `precision`).
    pub fn valuations(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.total() as usize);
        for (a, &c) in self.counts.iter().enumerate() {
            out.extend(core::iter::repeat_n(a as u32, c as usize));
        }
        out
    }

    /// Nonzero buckets as `(valuation, count)`.
    pub fn nonzero(&self) -> Vec<(u32, u64)> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(a, &c)| (a as u32, c))
            .collect()
    }
}

/// Precision that leaves no valuation of a design matrix censored:
/// `nu_p(rn / gcd(n, lambda)) + 1`.
pub fn precision_for(params: &DesignParams, p: u64) -> u32 {
    let t = params.t();
    let rn = params.r as u128 * params.n as u128 / t as u128;
    let mut x = rn;
    let mut a = 0;
    while x.is_multiple_of(p as u128) && x > 0 {
        x /= p as u128;
        a += 1;
    }
    a + 1
}

/// Primes that can divide an invariant factor of the design: those of `r * n`.
pub fn candidate_primes(params: &DesignParams) -> Vec<u64> {
    let mut ps = arith::prime_divisors(params.r);
    ps.extend(arith::prime_divisors(params.n));
    ps.sort_unstable();
    ps.dedup();
    ps
}

/// Combines per-prime profiles over `v` positions: the `i`-th smallest
/// valuation of every prime goes into `d_i`. Fails if anything is censored.
pub fn merge_profiles(v: u64, profiles: &[ValuationProfile]) -> Result<InvariantFactorMultiset> {
    let mut diag = vec![1u64; v as usize];
    for prof in profiles {
        if prof.total() != v {
            return Err(Error::Mismatch(format!(
                "profile for p = {} covers {} positions, expected {v}",
                prof.prime(),
                prof.total()
            )));
        }
        if prof.censored() > 0 {
            return Err(Error::Censored {
                p: prof.prime(),
                l: prof.precision(),
                censored: prof.censored(),
            });
        }
        for (d, a) in diag.iter_mut().zip(prof.valuations()) {
            let f = arith::checked_pow(prof.prime(), a)?;
            *d = d
                .checked_mul(f)
                .ok_or_else(|| Error::OutOfRange("invariant factor exceeds u64".into()))?;
        }
    }
    InvariantFactorMultiset::from_diagonal(&diag)
}

/// Checks the matrix against `params`, returning the verified parameters.
pub fn check_params(m: &IncidenceMatrix, params: &DesignParams) -> Result<DesignParams> {
    let got = verify_2design(m)?;
    if &got != params {
        return Err(Error::NotADesign(format!(
            "matrix has parameters {got:?}, expected {params:?}"
        )));
    }
    Ok(got)
}

/// `p`-local profiles for every candidate prime, by elimination.
pub fn local_profiles(m: &IncidenceMatrix, params: &DesignParams) -> Result<Vec<ValuationProfile>> {
    candidate_primes(params)
        .into_iter()
        .map(|p| p_local_profile(m, p, precision_for(params, p)))
        .collect()
}

/// Exact SNF of a design's incidence matrix. Small matrices are also run
/// through [`reference_snf`] and the two results must agree.
pub fn snf_exact(m: &IncidenceMatrix, params: &DesignParams) -> Result<InvariantFactorMultiset> {
    let params = check_params(m, params)?;
    merge_and_verify(m, &params, &local_profiles(m, &params)?)
}

/// Merges per-prime profiles and, within the reference size limit, checks
/// the result against [`reference_snf`].
pub fn merge_and_verify(
    m: &IncidenceMatrix,
    params: &DesignParams,
    profiles: &[ValuationProfile],
) -> Result<InvariantFactorMultiset> {
    let inv = merge_profiles(params.v, profiles)?;
    if reference::within_limit(m) {
        let r = reference_snf(m)?;
        if r != inv {
            return Err(Error::Mismatch(format!(
                "p-local SNF {inv} disagrees with the reference {r}"
            )));
        }
    }
    Ok(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ag_design_params, incidence_ag, incidence_pg, pg_design_params};
    use alloc::string::ToString;

    #[test]
    fn format_round_trip() {
        let inv = InvariantFactorMultiset::new(vec![(1, 4), (2, 2), (6, 1)]).unwrap();
        assert_eq!(snf_format(&inv), "1^4 2^2 6^1");
        assert_eq!(snf_parse("1^4 2^2 6^1").unwrap(), inv);
        assert!(matches!(snf_parse("2^1 3^1"), Err(Error::DivisorChain(2, 3))));
        assert!(snf_parse("2^x").is_err());
        assert!(snf_parse("4^1 2^1").is_err());
        assert_eq!(inv.len(), 7);
        assert_eq!(inv.rank_mod(2), 4);
        assert_eq!(inv.rank_mod(3), 6);
        assert_eq!(inv.diagonal(), vec![1, 1, 1, 1, 2, 2, 6]);
    }

    #[test]
    fn product_exponents() {
        let inv: InvariantFactorMultiset = "1^4 2^2 6^1".parse().unwrap();
        let e = inv.product_exponents();
        assert_eq!(e.get(&2), Some(&3));
        assert_eq!(e.get(&3), Some(&1));
        let e = inv.prefix_product_exponents(5);
        assert_eq!(e.get(&2), Some(&1));
    }

    #[test]
    fn precision_examples() {
        let fano = pg_design_params(2, 2, 2).unwrap();
        assert_eq!(precision_for(&fano, 2), 2);
        let lin5 = DesignParams::from_vkl(121, 81, 54).unwrap();
        assert_eq!(precision_for(&lin5, 3), 5);
    }

    #[test]
    fn fano_snf() {
        let a = incidence_pg(2, 2, 2).unwrap();
        let inv = snf_exact(&a, &pg_design_params(2, 2, 2).unwrap()).unwrap();
        assert_eq!(inv.to_string(), "1^4 2^2 6^1");
    }

    #[test]
    fn pg24_snf() {
        let a = incidence_pg(2, 2, 4).unwrap();
        let inv = snf_exact(&a, &pg_design_params(2, 2, 4).unwrap()).unwrap();
        assert_eq!(inv.to_string(), "1^10 2^2 4^8 20^1");
    }

    #[test]
    fn affine_snfs() {
        for (m, d, q, want) in [(2, 1, 3, "1^6 3^3"), (3, 2, 2, "1^4 2^3 4^1"), (2, 1, 2, "1^3 2^1")] {
            let a = incidence_ag(m, d, q).unwrap();
            let inv = snf_exact(&a, &ag_design_params(m, d, q).unwrap()).unwrap();
            assert_eq!(inv.to_string(), want);
        }
    }

    #[test]
    fn wrong_params_rejected() {
        let a = incidence_pg(2, 2, 2).unwrap();
        let p = pg_design_params(2, 2, 3).unwrap();
        assert!(matches!(snf_exact(&a, &p), Err(Error::NotADesign(_))));
    }
}
