//! Hermitian and Buekenhout-Metz unitals in `PG(2, q^2)`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::FiniteField;
use crate::arith;
use crate::geometry::{for_each_pg_block, projective_index, projective_points, DesignParams, IncidenceMatrix};
use crate::snf::{rank_mod_p, InvariantFactorMultiset};
use crate::{Error, Result};

/// Largest `q` accepted by the constructions.
pub const UNITAL_Q_LIMIT: u64 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnitalFlavor {
    Hermitian,
    /// `beta` is a field code in `F_(q^2)`.
    BuekenhoutMetz {
        beta: u32,
    },
}

/// A unital: `q^3 + 1` points of `PG(2, q^2)` with the secant lines as blocks.
#[derive(Clone, Debug)]
pub struct UnitalDesign {
    pub q: u64,
    pub flavor: UnitalFlavor,
    /// Indices of the unital points among the points of `PG(2, q^2)`.
    pub points: Vec<u32>,
    /// Blocks over the unital points, numbered by position in `points`.
    pub blocks: IncidenceMatrix,
    /// For Buekenhout-Metz unitals, the conics `C_r` in local numbering.
    pub conics: Vec<Vec<u32>>,
}

impl UnitalDesign {
    pub fn params(&self) -> DesignParams {
        unital_params(self.q)
    }
}

/// `2-(q^3 + 1, q + 1, 1)`.
pub fn unital_params(q: u64) -> DesignParams {
    DesignParams::from_vkl(q * q * q + 1, q + 1, 1).expect("unital parameters are admissible")
}

fn check_q(q: u64) -> Result<(u64, u32)> {
    if q > UNITAL_Q_LIMIT {
        return Err(Error::SizeGuard {
            what: "unital q",
            value: q as u128,
            limit: UNITAL_Q_LIMIT as u128,
        });
    }
    arith::prime_power(q)
}

/// Classifies every line of `PG(2, q^2)` against the point set and keeps
/// the secants; fails unless each line meets it in 1 or `q + 1` points.
fn from_point_set(q: u64, member: &[bool], flavor: UnitalFlavor, conics: Vec<Vec<u32>>) -> Result<UnitalDesign> {
    let points: Vec<u32> = (0..member.len() as u32).filter(|&i| member[i as usize]).collect();
    if points.len() as u64 != q * q * q + 1 {
        return Err(Error::NotAUnital(format!(
            "{} points, expected {}",
            points.len(),
            q * q * q + 1
        )));
    }
    let mut local = vec![u32::MAX; member.len()];
    for (i, &x) in points.iter().enumerate() {
        local[x as usize] = i as u32;
    }
    let mut rows: Vec<Vec<u32>> = Vec::new();
    let mut bad: Option<usize> = None;
    let mut meet = Vec::new();
    for_each_pg_block(2, 2, q * q, |line| {
        if bad.is_some() {
            return;
        }
        meet.clear();
        meet.extend(line.iter().filter(|&&x| member[x as usize]).map(|&x| local[x as usize]));
        match meet.len() as u64 {
            1 => {}
            s if s == q + 1 => rows.push(meet.clone()),
            _ => bad = Some(meet.len()),
        }
    })?;
    if let Some(s) = bad {
        return Err(Error::NotAUnital(format!("a line meets the set in {s} points")));
    }
    let blocks = IncidenceMatrix::from_rows(points.len(), rows)?;
    Ok(UnitalDesign {
        q,
        flavor,
        points,
        blocks,
        conics,
    })
}

/// Absolute points of the unitary polarity, `x0^(q+1) + x1^(q+1) + x2^(q+1) = 0`.
pub fn hermitian_unital(q: u64) -> Result<UnitalDesign> {
    let (p, t) = check_q(q)?;
    let field = FiniteField::new(p, 2 * t)?;
    let norm = |a: u32| field.pow(a, q + 1);
    let member: Vec<bool> = projective_points(2, q * q)?
        .iter()
        .map(|x| field.add(field.add(norm(x[0]), norm(x[1])), norm(x[2])) == 0)
        .collect();
    from_point_set(q, &member, UnitalFlavor::Hermitian, Vec::new())
}

/// `1^(q^3 - q^2 + q) (q+1)^(q^2 - q + 1)`.
pub fn hermitian_snf_expected(q: u64) -> Result<InvariantFactorMultiset> {
    let ones = q * q * q - q * q + q;
    InvariantFactorMultiset::new(vec![(1, ones), (q + 1, q * q - q + 1)])
}

/// Default `beta`: the distinguished primitive element of `F_(q^2)`.
pub fn default_beta(q: u64) -> Result<u32> {
    let (p, t) = check_q(q)?;
    Ok(FiniteField::new(p, 2 * t)?.generator())
}

/// `U_beta`: the union over `r in F_q` of the conics
/// `C_r = {(1, y, beta y^2 + r)} + {(0, 0, 1)}`.
pub fn bm_unital(q: u64, beta: u32) -> Result<UnitalDesign> {
    let (p, t) = check_q(q)?;
    if p == 2 {
        return Err(Error::OutOfRange(format!(
            "Buekenhout-Metz construction needs q odd, got {q}"
        )));
    }
    let field = FiniteField::new(p, 2 * t)?;
    if beta == 0 || beta as u64 >= field.order() {
        return Err(Error::OutOfRange(format!(
            "beta = {beta} is not a nonzero element of F_{}",
            q * q
        )));
    }
    let qq = q * q;
    let v = (qq * qq + qq + 1) as usize;
    let infinity = projective_index(&[0, 0, 1], qq);
    let mut member = vec![false; v];
    member[infinity as usize] = true;
    let mut conic_points = Vec::new();
    for r in field.subfield_elements(t)? {
        let mut c = vec![infinity];
        for y in field.elements() {
            let z = field.add(field.mul(beta, field.mul(y, y)), r);
            let idx = projective_index(&[1, y, z], qq);
            member[idx as usize] = true;
            c.push(idx);
        }
        conic_points.push(c);
    }
    let mut u = from_point_set(q, &member, UnitalFlavor::BuekenhoutMetz { beta }, Vec::new())?;
    let mut local = vec![u32::MAX; v];
    for (i, &x) in u.points.iter().enumerate() {
        local[x as usize] = i as u32;
    }
    u.conics = conic_points
        .into_iter()
        .map(|c| {
            let mut l: Vec<u32> = c.into_iter().map(|x| local[x as usize]).collect();
            l.sort_unstable();
            l
        })
        .collect();
    Ok(u)
}

/// Every block meets every conic in an even number of points, and the
/// conic vectors are independent modulo 2.
pub fn conic_vectors_in_dual(blocks: &IncidenceMatrix, conics: &[Vec<u32>]) -> Result<bool> {
    if conics.is_empty() {
        return Ok(false);
    }
    let mut mark = vec![false; blocks.ncols()];
    for c in conics {
        mark.iter_mut().for_each(|m| *m = false);
        for &x in c {
            mark[x as usize] = true;
        }
        if blocks
            .rows()
            .any(|row| row.iter().filter(|&&x| mark[x as usize]).count() % 2 == 1)
        {
            return Ok(false);
        }
    }
    let vectors = IncidenceMatrix::from_rows(blocks.ncols(), conics)?;
    Ok(rank_mod_p(&vectors, 2)? == conics.len() as u64)
}

/// Computed 2-rank of a Buekenhout-Metz unital next to the conjectured
/// `q^3 + 1 - q`, which is also an upper bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rank2Report {
    pub q: u64,
    pub computed: u64,
    pub conjectured: u64,
    pub equal: bool,
    pub within_bound: bool,
}

pub fn bm_rank2_report(u: &UnitalDesign) -> Result<Rank2Report> {
    let computed = rank_mod_p(&u.blocks, 2)?;
    let conjectured = u.q * u.q * u.q + 1 - u.q;
    Ok(Rank2Report {
        q: u.q,
        computed,
        conjectured,
        equal: computed == conjectured,
        within_bound: computed <= conjectured,
    })
}

/// Whether every invariant factor is a power of 2 except the last, which
/// is a power of 2 times `q + 1`.
pub fn two_power_pattern(inv: &InvariantFactorMultiset, q: u64) -> bool {
    let diag = inv.diagonal();
    let Some((&last, rest)) = diag.split_last() else {
        return false;
    };
    let two_power = |d: u64| d.is_power_of_two();
    rest.iter().all(|&d| two_power(d)) && last % (q + 1) == 0 && two_power(last / (q + 1))
}
