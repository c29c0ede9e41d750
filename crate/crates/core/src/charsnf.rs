//! SNF of designs with a cyclic automorphism from character sums in a
//! Galois ring.
//!
//! If `sigma` fixes `fixed` points and cycles the remaining `N` points, and
//! `p` does not divide `N`, the row lattice splits over `Z_p[xi_N]` into the
//! eigenspaces of `sigma`. A nontrivial character `j` contributes one
//! invariant factor, of valuation `min_B nu(sum_(c in B) xi^(jc))` over the
//! blocks; the trivial character contributes the SNF of the small matrix
//! with rows `(B restricted to the fixed points, |B minus fixed points|)`.
//! Conjugate characters `j, jp, jp^2, ...` share a valuation.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::{GaloisRing, RootsOfUnity};
use crate::arith;
use crate::diffsets::DifferenceSet;
use crate::geometry::{CyclicDesign, CyclicOrbit, DesignParams};
use crate::snf::{
    merge_profiles, p_local_profile, precision_for, IntMatrix, InvariantFactorMultiset, ValuationProfile,
};
use crate::{Error, Result};

/// Counts of characters of `Z_v` by the valuation of `chi(D)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharacterProfile {
    pub v: u64,
    pub p: u64,
    pub precision: u32,
    /// `counts[a]` characters with valuation `a`; the last bucket means `>= L`.
    pub counts: Vec<u64>,
}

impl CharacterProfile {
    pub fn to_valuation_profile(&self) -> ValuationProfile {
        ValuationProfile::new(self.p, self.precision, self.counts.clone()).expect("bucket count matches precision")
    }
}

/// `nu_p(rn/t) + 1`.
pub fn precision_bound(params: &DesignParams, p: u64) -> u32 {
    precision_for(params, p)
}

struct RootTable {
    n: u64,
    f: usize,
    modulus: u64,
    p: u64,
    l: u32,
    roots: RootsOfUnity,
}

impl RootTable {
    fn new(n: u64, p: u64, l: u32) -> Result<Self> {
        let roots = RootsOfUnity::new(p, l, n)?;
        Ok(Self {
            n,
            f: roots.degree(),
            modulus: roots.characteristic(),
            p,
            l,
            roots,
        })
    }

    /// `nu(sum_(c in residues) xi^(j c))`, capped at `L`.
    fn valuation(&self, residues: &[u32], j: u64, acc: &mut [u64]) -> u32 {
        for a in acc.iter_mut() {
            *a = 0;
        }
        for &c in residues {
            for (a, &x) in acc.iter_mut().zip(self.roots.power(j * c as u64 % self.n)) {
                *a += x;
            }
        }
        acc.iter()
            .map(|&a| a % self.modulus)
            .filter(|&a| a != 0)
            .map(|a| arith::valuation(a, self.p))
            .min()
            .unwrap_or(self.l)
            .min(self.l)
    }
}

/// Representatives of the orbits of `x -> p x` on `1..n`, with orbit sizes.
fn cyclotomic_cosets(n: u64, p: u64) -> Vec<(u64, u64)> {
    let mut seen = vec![false; n as usize];
    let mut out = Vec::new();
    for j in 1..n {
        if seen[j as usize] {
            continue;
        }
        let mut size = 0;
        let mut x = j;
        while !seen[x as usize] {
            seen[x as usize] = true;
            size += 1;
            x = x * p % n;
        }
        out.push((j, size));
    }
    out
}

fn tally(pairs: impl IntoIterator<Item = (u32, u64)>, l: u32) -> Vec<u64> {
    let mut counts = vec![0u64; l as usize + 1];
    for (a, c) in pairs {
        counts[a.min(l) as usize] += c;
    }
    counts
}

/// Valuations of the nontrivial characters, weighted: one sum per
/// cyclotomic coset when `by_coset`, otherwise every `j`.
fn nontrivial(orbits: &[CyclicOrbit], table: &RootTable, by_coset: bool) -> Vec<(u32, u64)> {
    let reps: Vec<(u64, u64)> = if by_coset {
        cyclotomic_cosets(table.n, table.p)
    } else {
        (1..table.n).map(|j| (j, 1)).collect()
    };
    let mut acc = vec![0u64; table.f];
    reps.into_iter()
        .map(|(j, w)| {
            let mut best = table.l;
            for o in orbits {
                best = best.min(table.valuation(&o.residues, j, &mut acc));
                if best == 0 {
                    break;
                }
            }
            (best, w)
        })
        .collect()
}

/// Profile of the trivial-character component.
fn trivial(design: &CyclicDesign, p: u64, l: u32) -> Result<ValuationProfile> {
    let rows: Vec<Vec<i64>> = design
        .orbits
        .iter()
        .map(|o| {
            let mut row = vec![0i64; design.fixed + 1];
            for &x in &o.fixed_points {
                row[x as usize] = 1;
            }
            row[design.fixed] = o.residues.len() as i64;
            row
        })
        .collect();
    p_local_profile(&IntMatrix::new(rows)?, p, l)
}

/// `p`-profile of a cyclic design at precision `l`, by character sums.
pub fn cyclic_profile(design: &CyclicDesign, p: u64, l: u32) -> Result<ValuationProfile> {
    if !arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let table = RootTable::new(design.cycle, p, l)?;
    let mut counts = trivial(design, p, l)?.counts().to_vec();
    for (a, c) in tally(nontrivial(&design.orbits, &table, true), l)
        .into_iter()
        .enumerate()
    {
        counts[a] += c;
    }
    ValuationProfile::new(p, l, counts)
}

fn single_orbit(d: &DifferenceSet) -> CyclicDesign {
    CyclicDesign {
        fixed: 0,
        cycle: d.v(),
        orbits: vec![CyclicOrbit {
            fixed_points: Vec::new(),
            residues: d.elements().iter().map(|&x| x as u32).collect(),
            size: d.v(),
        }],
    }
}

/// Tally of `nu(chi_j(D))` over all characters `j` of `Z_v`, including the
/// trivial one (`chi_0(D) = k`). Needs `p` prime to `v`.
pub fn char_profile(d: &DifferenceSet, p: u64, l: u32) -> Result<CharacterProfile> {
    let prof = cyclic_profile(&single_orbit(d), p, l)?;
    Ok(CharacterProfile {
        v: d.v(),
        p,
        precision: l,
        counts: prof.counts().to_vec(),
    })
}

/// Same tally, summing every character separately instead of one per
/// cyclotomic coset.
pub fn char_profile_unreduced(d: &DifferenceSet, p: u64, l: u32) -> Result<CharacterProfile> {
    let table = RootTable::new(d.v(), p, l)?;
    let design = single_orbit(d);
    let mut counts = tally(nontrivial(&design.orbits, &table, false), l);
    counts[arith::valuation(d.k(), p).min(l) as usize] += 1;
    Ok(CharacterProfile {
        v: d.v(),
        p,
        precision: l,
        counts,
    })
}

/// `chi_j(D)` by Horner evaluation of `D(x)` at `xi^j`, as ring coefficients.
pub fn char_value_horner(d: &DifferenceSet, p: u64, l: u32, j: u64) -> Result<Vec<u64>> {
    let v = d.v();
    let f = arith::multiplicative_order(p % v, v)? as u32;
    let ring = GaloisRing::new(p, l, f)?;
    let x = ring.pow(&ring.root_of_unity(v)?, j % v);
    let mut coeffs = vec![0u64; v as usize];
    for &e in d.elements() {
        coeffs[e as usize] = 1;
    }
    let mut acc = ring.zero();
    for &c in coeffs.iter().rev() {
        acc = ring.add(&ring.mul(&acc, &x), &ring.from_int(c));
    }
    Ok(acc.coeffs)
}

/// `chi_j(D)` as the plain sum of `xi^(jd)`.
pub fn char_value_direct(d: &DifferenceSet, p: u64, l: u32, j: u64) -> Result<Vec<u64>> {
    let table = RootTable::new(d.v(), p, l)?;
    let mut acc = vec![0u64; table.f];
    for &e in d.elements() {
        for (a, &x) in acc.iter_mut().zip(table.roots.power(j * e % d.v())) {
            *a = (*a + x) % table.modulus;
        }
    }
    Ok(acc)
}

/// Profile for a prime not dividing `n`: all units except one factor of
/// valuation `nu_p(k)`.
pub fn profile_prime_to_n(params: &DesignParams, p: u64, l: u32) -> Result<ValuationProfile> {
    if params.n.is_multiple_of(p) {
        return Err(Error::OutOfRange(format!("{p} divides the order n = {}", params.n)));
    }
    Ok(ValuationProfile::from_pairs(
        p,
        l,
        &[(0, params.v - 1), (arith::valuation(params.k, p), 1)],
    ))
}

/// Merges profiles for primes dividing `n`, then multiplies `d_v` by the
/// part of `k` prime to `n` (the only contribution of the other primes).
pub fn snf_from_profiles(params: &DesignParams, profiles: &[ValuationProfile]) -> Result<InvariantFactorMultiset> {
    for p in arith::prime_divisors(params.n) {
        if !profiles.iter().any(|pr| pr.prime() == p) {
            return Err(Error::Mismatch(format!("no profile for p = {p} dividing n")));
        }
    }
    let inv = merge_profiles(params.v, profiles)?;
    let mut extra = 1u64;
    for (p, e) in arith::factorize(params.k) {
        if !params.n.is_multiple_of(p) && !profiles.iter().any(|pr| pr.prime() == p) {
            extra *= p.pow(e);
        }
    }
    if extra == 1 {
        return Ok(inv);
    }
    let mut diag = inv.diagonal();
    let last = diag.last_mut().ok_or_else(|| Error::Mismatch("empty SNF".into()))?;
    *last = last
        .checked_mul(extra)
        .ok_or_else(|| Error::OutOfRange("invariant factor exceeds u64".into()))?;
    InvariantFactorMultiset::from_diagonal(&diag)
}

/// SNF of `dev(D)` from character sums, with the per-prime profiles.
pub fn snf_difference_set(d: &DifferenceSet) -> Result<(InvariantFactorMultiset, Vec<CharacterProfile>)> {
    let params = d.params();
    let mut chars = Vec::new();
    for p in arith::prime_divisors(params.n) {
        chars.push(char_profile(d, p, precision_bound(&params, p))?);
    }
    let profiles: Vec<ValuationProfile> = chars.iter().map(|c| c.to_valuation_profile()).collect();
    Ok((snf_from_profiles(&params, &profiles)?, chars))
}

/// Checks that the orbits describe a design with parameters `params`.
pub fn check_cyclic(design: &CyclicDesign, params: &DesignParams) -> Result<()> {
    if design.fixed as u64 + design.cycle != params.v || design.block_count() != params.b {
        return Err(Error::Mismatch(format!(
            "cyclic design has {} points and {} blocks, expected v = {}, b = {}",
            design.fixed as u64 + design.cycle,
            design.block_count(),
            params.v,
            params.b
        )));
    }
    Ok(())
}

/// Profile of a cyclic design at one prime: the prime-to-`n` formula where
/// it applies, otherwise character sums, which need the prime not to divide
/// the cycle length.
pub fn cyclic_prime_profile(design: &CyclicDesign, params: &DesignParams, p: u64, l: u32) -> Result<ValuationProfile> {
    if !params.n.is_multiple_of(p) {
        profile_prime_to_n(params, p, l)
    } else if !design.cycle.is_multiple_of(p) {
        cyclic_profile(design, p, l)
    } else {
        Err(Error::PrimeDividesOrder { p, order: design.cycle })
    }
}

/// Profiles of a cyclic design for every prime dividing `r n`.
pub fn cyclic_profiles(design: &CyclicDesign, params: &DesignParams) -> Result<Vec<ValuationProfile>> {
    check_cyclic(design, params)?;
    crate::snf::candidate_primes(params)
        .into_iter()
        .map(|p| cyclic_prime_profile(design, params, p, precision_for(params, p)))
        .collect()
}

/// SNF of a cyclic design from its orbit representatives.
pub fn snf_cyclic(design: &CyclicDesign, params: &DesignParams) -> Result<InvariantFactorMultiset> {
    merge_profiles(params.v, &cyclic_profiles(design, params)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffsets::{dev, lin, singer};
    use crate::geometry::{ag_cyclic, ag_design_params, incidence_ag, incidence_pg, pg_cyclic, pg_design_params};
    use crate::snf::{p_local_profile, snf_exact};
    use alloc::string::ToString;

    fn qr11() -> DifferenceSet {
        let els: Vec<u64> = (1..11u64).map(|x| x * x % 11).collect();
        DifferenceSet::new(11, 5, 2, els).unwrap()
    }

    #[test]
    fn precision_examples() {
        let fano = pg_design_params(2, 2, 2).unwrap();
        assert_eq!(precision_bound(&fano, 2), 2);
        let lin5 = DesignParams::from_vkl(121, 81, 54).unwrap();
        assert_eq!(precision_bound(&lin5, 3), 5);
        let lin9 = DesignParams::from_vkl(9841, 6561, 4374).unwrap();
        assert_eq!(precision_bound(&lin9, 3), 9);
    }

    #[test]
    fn fano_characters() {
        let d = singer(2, 2).unwrap();
        let c = char_profile(&d, 2, 2).unwrap();
        assert_eq!(c.counts, vec![4, 3, 0]);
        assert_eq!(c.to_valuation_profile(), p_local_profile(&dev(&d), 2, 2).unwrap());
        let (inv, _) = snf_difference_set(&d).unwrap();
        assert_eq!(inv.to_string(), "1^4 2^2 6^1");
    }

    #[test]
    fn quadratic_residue_set() {
        let d = qr11();
        let c = char_profile(&d, 3, 2).unwrap();
        assert_eq!(c.to_valuation_profile(), p_local_profile(&dev(&d), 3, 2).unwrap());
        let (inv, _) = snf_difference_set(&d).unwrap();
        assert_eq!(inv, snf_exact(&dev(&d), &d.params()).unwrap());
    }

    #[test]
    fn coset_reduction_is_exact() {
        for d in [singer(2, 2).unwrap(), singer(2, 3).unwrap(), lin(5).unwrap(), qr11()] {
            let params = d.params();
            for p in arith::prime_divisors(params.n) {
                let l = precision_bound(&params, p);
                assert_eq!(
                    char_profile(&d, p, l).unwrap(),
                    char_profile_unreduced(&d, p, l).unwrap()
                );
            }
        }
    }

    #[test]
    fn horner_matches_direct() {
        let d = lin(5).unwrap();
        let mut j = 7u64;
        for _ in 0..50 {
            j = (j * 48271 + 11) % d.v();
            assert_eq!(
                char_value_horner(&d, 3, 5, j).unwrap(),
                char_value_direct(&d, 3, 5, j).unwrap()
            );
        }
    }

    #[test]
    fn prime_dividing_v_rejected() {
        let d = singer(2, 2).unwrap();
        assert!(matches!(char_profile(&d, 7, 2), Err(Error::PrimeDividesOrder { .. })));
    }

    #[test]
    fn lin5_rank() {
        let d = lin(5).unwrap();
        let c = char_profile(&d, 3, 5).unwrap();
        assert_eq!(c.counts[0], 40);
        assert_eq!(c.to_valuation_profile(), p_local_profile(&dev(&d), 3, 5).unwrap());
    }

    #[test]
    fn cyclic_route_matches_elimination() {
        for (m, d, q) in [
            (2u32, 2u32, 2u64),
            (2, 2, 4),
            (3, 3, 2),
            (3, 3, 3),
            (2, 2, 5),
            (3, 3, 4),
        ] {
            let params = pg_design_params(m, d, q).unwrap();
            let (cyc, _) = pg_cyclic(m, d, q).unwrap();
            let a = incidence_pg(m, d, q).unwrap();
            assert_eq!(
                snf_cyclic(&cyc, &params).unwrap(),
                snf_exact(&a, &params).unwrap(),
                "PG({m},{q}) d={d}"
            );
        }
        for (m, d, q) in [(2u32, 1u32, 3u64), (3, 2, 2), (2, 1, 4), (3, 2, 3), (2, 1, 5)] {
            let params = ag_design_params(m, d, q).unwrap();
            let (cyc, _) = ag_cyclic(m, d, q).unwrap();
            let a = incidence_ag(m, d, q).unwrap();
            assert_eq!(
                snf_cyclic(&cyc, &params).unwrap(),
                snf_exact(&a, &params).unwrap(),
                "AG({m},{q}) d={d}"
            );
        }
    }

    #[test]
    fn shared_prime_rejected() {
        let params = pg_design_params(3, 2, 2).unwrap();
        let (cyc, _) = pg_cyclic(3, 2, 2).unwrap();
        assert!(matches!(
            snf_cyclic(&cyc, &params),
            Err(Error::PrimeDividesOrder { p: 3, order: 15 })
        ));
    }

    #[test]
    fn prime_to_n_profile() {
        let params = ag_design_params(2, 1, 3).unwrap();
        let p = profile_prime_to_n(&params, 2, 3).unwrap();
        assert_eq!(p.counts(), &[9, 0, 0, 0]);
        let a = incidence_ag(2, 1, 3).unwrap();
        assert_eq!(p, p_local_profile(&a, 2, 3).unwrap());
    }
}
