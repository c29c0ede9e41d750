//! SNF drivers with one worker per prime.

use designrank_core::arith;
use designrank_core::charsnf::{self, check_cyclic, cyclic_prime_profile};
use designrank_core::diffsets::DifferenceSet;
use designrank_core::formulas::{predict_ag_snf, predict_pg_snf};
use designrank_core::geometry::{
    ag_cyclic, ag_design_params, incidence_ag, incidence_pg, pg_cyclic, pg_design_params, verify_2design, CyclicDesign,
};
use designrank_core::snf::{candidate_primes, merge_and_verify, merge_profiles, p_local_profile, precision_for};
use designrank_core::{DesignParams, IncidenceMatrix, InvariantFactorMultiset, ValuationProfile};
use rayon::prelude::*;

use crate::error::Result;
use crate::record::Method;

/// Geometric designs with more points than this go through the cyclic
/// character-sum route in sweeps.
pub const ELIMINATION_MAX_V: u64 = 1000;

#[derive(Clone, Debug)]
pub struct Outcome {
    pub params: DesignParams,
    pub method: Method,
    pub profiles: Vec<ValuationProfile>,
    /// Present when the profiles cover every prime that can occur.
    pub invariants: Option<InvariantFactorMultiset>,
}

fn covers(profiles: &[ValuationProfile], needed: &[u64]) -> bool {
    needed.iter().all(|p| profiles.iter().any(|pr| pr.prime() == *p))
}

fn precision(params: &DesignParams, p: u64, l: Option<u32>) -> u32 {
    l.unwrap_or_else(|| precision_for(params, p))
}

/// p-local elimination on a matrix, verified as a 2-design first.
pub fn eliminate(m: &IncidenceMatrix, primes: Option<&[u64]>, l: Option<u32>) -> Result<Outcome> {
    let params = verify_2design(m)?;
    let needed = candidate_primes(&params);
    let primes = primes.map_or_else(|| needed.clone(), <[u64]>::to_vec);
    let profiles = primes
        .par_iter()
        .map(|&p| p_local_profile(m, p, precision(&params, p, l)))
        .collect::<designrank_core::Result<Vec<_>>>()?;
    let invariants = if covers(&profiles, &needed) {
        Some(merge_and_verify(m, &params, &profiles)?)
    } else {
        None
    };
    Ok(Outcome {
        params,
        method: Method::Elimination,
        profiles,
        invariants,
    })
}

/// Character sums for the development of a cyclic difference set.
pub fn character_sum(d: &DifferenceSet, primes: Option<&[u64]>, l: Option<u32>) -> Result<Outcome> {
    let params = d.params();
    let needed = arith::prime_divisors(params.n);
    let primes = primes.map_or_else(|| needed.clone(), <[u64]>::to_vec);
    let profiles = primes
        .par_iter()
        .map(|&p| charsnf::char_profile(d, p, precision(&params, p, l)).map(|c| c.to_valuation_profile()))
        .collect::<designrank_core::Result<Vec<_>>>()?;
    let invariants = if covers(&profiles, &needed) {
        Some(charsnf::snf_from_profiles(&params, &profiles)?)
    } else {
        None
    };
    Ok(Outcome {
        params,
        method: Method::CharacterSum,
        profiles,
        invariants,
    })
}

/// Character sums over the orbits of a cyclic automorphism.
pub fn cyclic(design: &CyclicDesign, params: &DesignParams) -> Result<Outcome> {
    check_cyclic(design, params)?;
    let profiles = candidate_primes(params)
        .par_iter()
        .map(|&p| cyclic_prime_profile(design, params, p, precision_for(params, p)))
        .collect::<designrank_core::Result<Vec<_>>>()?;
    let invariants = Some(merge_profiles(params.v, &profiles)?);
    Ok(Outcome {
        params: *params,
        method: Method::CharacterSum,
        profiles,
        invariants,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Space {
    Projective,
    Affine,
}

/// SNF of a projective or affine design by elimination when small and by
/// the cyclic route otherwise, with the formula prediction alongside.
pub fn geometry_case(space: Space, m: u32, d: u32, q: u64) -> Result<(Outcome, InvariantFactorMultiset)> {
    let (params, predicted) = match space {
        Space::Projective => (pg_design_params(m, d, q)?, predict_pg_snf(m, d, q)?),
        Space::Affine => (ag_design_params(m, d, q)?, predict_ag_snf(m, d, q)?),
    };
    let outcome = if params.v <= ELIMINATION_MAX_V {
        let a = match space {
            Space::Projective => incidence_pg(m, d, q)?,
            Space::Affine => incidence_ag(m, d, q)?,
        };
        eliminate(&a, None, None)?
    } else {
        let (design, _) = match space {
            Space::Projective => pg_cyclic(m, d, q)?,
            Space::Affine => ag_cyclic(m, d, q)?,
        };
        cyclic(&design, &params)?
    };
    Ok((outcome, predicted))
}

#[cfg(test)]
mod tests {
    use super::*;
    use designrank_core::diffsets::{dev, singer};

    #[test]
    fn routes_agree_on_fano() {
        let d = singer(2, 2).unwrap();
        let a = eliminate(&dev(&d), None, None).unwrap();
        let c = character_sum(&d, None, None).unwrap();
        assert_eq!(a.invariants, c.invariants);
        assert_eq!(a.invariants.unwrap().to_string(), "1^4 2^2 6^1");
    }

    #[test]
    fn partial_primes_leave_invariants_open() {
        let a = incidence_pg(2, 2, 3).unwrap();
        let o = eliminate(&a, Some(&[3]), None).unwrap();
        assert!(o.invariants.is_none());
        assert_eq!(o.profiles[0].rank(), 7);
    }

    #[test]
    fn geometry_case_small() {
        let (o, pred) = geometry_case(Space::Affine, 2, 1, 3).unwrap();
        assert_eq!(o.invariants.unwrap(), pred);
    }
}
