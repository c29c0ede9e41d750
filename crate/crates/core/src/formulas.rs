//! Closed-form predictions: the type set of basis monomials, Hamada's rank,
//! the multiplicities of `p^alpha` for point/subspace designs, the affine
//! SNF, the divisibility conditions of Klemm, and assorted counting formulas.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::arith;
use crate::geometry::{gaussian_binomial, DesignParams};
use crate::snf::InvariantFactorMultiset;
use crate::{Error, Result};

/// A type `(s_0, ..., s_(t-1))` of a basis monomial.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeTuple(pub Vec<u32>);

impl TypeTuple {
    pub fn s(&self) -> &[u32] {
        &self.0
    }

    /// `lambda_j = p s_(j+1) - s_j`, indices mod `t`.
    pub fn lambdas(&self, p: u64) -> Vec<i64> {
        let t = self.0.len();
        (0..t)
            .map(|j| p as i64 * self.0[(j + 1) % t] as i64 - self.0[j] as i64)
            .collect()
    }

    /// `sum_j max(0, e - s_j)`.
    pub fn deficit(&self, e: u32) -> u32 {
        self.0.iter().map(|&s| e.saturating_sub(s)).sum()
    }
}

/// All `t`-tuples with `1 <= s_j <= m` and `0 <= p s_(j+1) - s_j <= (p-1)(m+1)`,
/// in lexicographic order.
pub fn enumerate_h(p: u64, t: u32, m: u32) -> Vec<TypeTuple> {
    let mut out = Vec::new();
    if m == 0 || t == 0 {
        return out;
    }
    let upper = (p as i64 - 1) * (m as i64 + 1);
    let mut s = vec![1u32; t as usize];
    loop {
        let ty = TypeTuple(s.clone());
        if ty.lambdas(p).iter().all(|&l| (0..=upper).contains(&l)) {
            out.push(ty);
        }
        let mut j = t as usize;
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            if s[j] < m {
                s[j] += 1;
                break;
            }
            s[j] = 1;
        }
    }
}

/// Coefficient of `x^i` in `(1 + x + ... + x^(p-1))^(m+1)`, by the
/// alternating sum `sum_j (-1)^j C(m+1, j) C(m+i-jp, m)`.
pub fn c_coeff(i: u64, p: u64, m: u32) -> u128 {
    let m = m as u64;
    let mut acc: i128 = 0;
    for j in 0..=i / p {
        let term = arith::binomial(m + 1, j) as i128 * arith::binomial(m + i - j * p, m) as i128;
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc.max(0) as u128
}

/// Type of the basis monomial `x_0^(b_0) ... x_m^(b_m)` over `F_(p^t)`.
pub fn monomial_type(b: &[u64], p: u64, t: u32) -> Result<TypeTuple> {
    let q = arith::checked_pow(p, t)?;
    if b.iter().any(|&x| x >= q) {
        return Err(Error::InvalidMonomial(format!("exponent out of range in {b:?}")));
    }
    if b.iter().all(|&x| x == 0) {
        return Err(Error::InvalidMonomial("constant monomial has no type".into()));
    }
    if b.iter().all(|&x| x == q - 1) {
        return Err(Error::InvalidMonomial(
            "x_0^(q-1)...x_m^(q-1) is not a basis monomial".into(),
        ));
    }
    if b.iter().sum::<u64>() % (q - 1) != 0 {
        return Err(Error::InvalidMonomial(format!(
            "total degree of {b:?} is not divisible by q - 1 = {}",
            q - 1
        )));
    }
    let tu = t as usize;
    let digits: Vec<Vec<u64>> = b
        .iter()
        .map(|&x| (0..tu).map(|l| x / p.pow(l as u32) % p).collect())
        .collect();
    let mut s = Vec::with_capacity(tu);
    for j in 0..tu {
        let mut num = 0u64;
        for a in &digits {
            for (l, &al) in a.iter().enumerate() {
                let e = if l < j { l + tu - j } else { l - j };
                num += p.pow(e as u32) * al;
            }
        }
        if !num.is_multiple_of(q - 1) {
            return Err(Error::InvalidMonomial(format!("non-integral type for {b:?}")));
        }
        s.push((num / (q - 1)) as u32);
    }
    let ty = TypeTuple(s);
    let lambda: Vec<i64> = (0..tu).map(|j| digits.iter().map(|a| a[j] as i64).sum()).collect();
    if ty.lambdas(p) != lambda {
        return Err(Error::InvalidMonomial(format!(
            "type of {b:?} does not match its digit sums"
        )));
    }
    Ok(ty)
}

/// Number of basis monomials of type `s`: `prod_j c_(lambda_j)`.
pub fn count_type(s: &TypeTuple, p: u64, m: u32) -> u128 {
    s.lambdas(p)
        .iter()
        .map(|&l| if l < 0 { 0 } else { c_coeff(l as u64, p, m) })
        .product()
}

/// Whether a basis monomial lies in the dual of the block code of the
/// design of points and `e`-subspaces: some `s_j < e`.
pub fn monomial_in_dual(b: &[u64], p: u64, t: u32, e: u32) -> Result<bool> {
    Ok(monomial_type(b, p, t)?.s().iter().any(|&s| s < e))
}

/// Whether a basis monomial lies in `M_alpha`: `sum_j max(0, e - s_j) >= alpha`.
pub fn monomial_in_m_alpha(b: &[u64], p: u64, t: u32, e: u32, alpha: u32) -> Result<bool> {
    Ok(monomial_type(b, p, t)?.deficit(e) >= alpha)
}

fn check_pg(m: u32, e: u32, q: u64) -> Result<(u64, u32)> {
    if m < 1 || e < 1 || e > m + 1 {
        return Err(Error::OutOfRange(format!("need 1 <= e <= m + 1 (m = {m}, e = {e})")));
    }
    arith::prime_power(q)
}

/// `p`-rank of the points versus `e`-subspaces of `F_q^(m+1)`:
/// `1 + sum over types with every s_j >= e`.
pub fn hamada_rank(m: u32, e: u32, q: u64) -> Result<u128> {
    let (p, t) = check_pg(m, e, q)?;
    Ok(1 + enumerate_h(p, t, m)
        .iter()
        .filter(|s| s.s().iter().all(|&x| x >= e))
        .map(|s| count_type(s, p, m))
        .sum::<u128>())
}

/// Multiplicity of `p^alpha` as an invariant factor of the points versus
/// `e`-subspaces of `F_q^(m+1)`.
pub fn h_mult(alpha: u32, m: u32, e: u32, q: u64) -> Result<u128> {
    let (p, t) = check_pg(m, e, q)?;
    let delta = u128::from(alpha == 0);
    Ok(delta
        + enumerate_h(p, t, m)
            .iter()
            .filter(|s| s.deficit(e) == alpha)
            .map(|s| count_type(s, p, m))
            .sum::<u128>())
}

fn to_u64(x: u128) -> Result<u64> {
    u64::try_from(x).map_err(|_| Error::OutOfRange("value exceeds u64".into()))
}

/// SNF of the points versus `e`-subspaces of `F_q^(m+1)` (the design with
/// blocks of projective dimension `e - 1`).
pub fn predict_pg_snf(m: u32, e: u32, q: u64) -> Result<InvariantFactorMultiset> {
    let (p, t) = check_pg(m, e, q)?;
    let top = (e - 1) * t;
    let mut terms = Vec::new();
    for alpha in 0..=top {
        let h = to_u64(h_mult(alpha, m, e, q)?)?;
        terms.push((arith::checked_pow(p, alpha)?, h));
    }
    let last = terms
        .iter()
        .rposition(|&(_, h)| h > 0)
        .ok_or_else(|| Error::Mismatch("no invariant factors".into()))?;
    terms.truncate(last + 1);
    let k = to_u64(gaussian_binomial(e, 1, q)?)?;
    let (d, h) = terms[last];
    terms[last].1 = h - 1;
    terms.push((
        d.checked_mul(k)
            .ok_or_else(|| Error::OutOfRange("invariant factor exceeds u64".into()))?,
        1,
    ));
    InvariantFactorMultiset::new(terms)
}

/// SNF of the points versus `d`-flats of `AG(m, q)`: multiplicity of `p^alpha`
/// is `h(alpha, m, d+1) - h(alpha, m-1, d+1)`.
pub fn predict_ag_snf(m: u32, d: u32, q: u64) -> Result<InvariantFactorMultiset> {
    if m < 2 || d < 1 || d >= m {
        return Err(Error::OutOfRange(format!("need 1 <= d <= m - 1 (m = {m}, d = {d})")));
    }
    let (p, t) = arith::prime_power(q)?;
    let e = d + 1;
    let mut terms = Vec::new();
    for alpha in 0..=d * t {
        let full = h_mult(alpha, m, e, q)?;
        let sub = h_mult_unchecked(alpha, m - 1, e, p, t);
        if sub > full {
            return Err(Error::Mismatch(format!("negative multiplicity at alpha = {alpha}")));
        }
        terms.push((arith::checked_pow(p, alpha)?, to_u64(full - sub)?));
    }
    InvariantFactorMultiset::new(terms)
}

/// `h_mult` without the `e <= m + 1` range check, for the affine subtrahend.
fn h_mult_unchecked(alpha: u32, m: u32, e: u32, p: u64, t: u32) -> u128 {
    u128::from(alpha == 0)
        + enumerate_h(p, t, m)
            .iter()
            .filter(|s| s.deficit(e) == alpha)
            .map(|s| count_type(s, p, m))
            .sum::<u128>()
}

/// SNF of a projective plane of order `p^2` with `p`-rank `r`:
/// `1^r p^(p^4+p^2-2r+2) (p^2)^(r-2) ((p^2+1)p^2)^1`.
pub fn plane_order_p2_snf(p: u64, r: u64) -> Result<InvariantFactorMultiset> {
    if !arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let p2 = p * p;
    let mid = (p2 * p2 + p2 + 2).checked_sub(2 * r);
    match mid {
        Some(mid) if r >= 2 => InvariantFactorMultiset::new(vec![(1, r), (p, mid), (p2, r - 2), ((p2 + 1) * p2, 1)]),
        _ => Err(Error::OutOfRange(format!(
            "p-rank {r} impossible for a plane of order {p2}"
        ))),
    }
}

fn cubic_third(num: i128) -> Result<i128> {
    if num % 3 != 0 {
        return Err(Error::Mismatch("counting polynomial is not integral here".into()));
    }
    Ok(num / 3)
}

fn check_flag(x: u32) -> Result<i128> {
    if x > 1 {
        return Err(Error::OutOfRange(format!("correction term must be 0 or 1, got {x}")));
    }
    Ok(x as i128)
}

/// Number of 3's in the SNF of the Lin set:
/// `2/3 m^4 - 4m^3 - 14/3 m^2 + 39m + delta m`, valid for odd `m > 7`.
pub fn threes_count_lin(m: u32, delta: u32) -> Result<i128> {
    let m = m as i128;
    Ok(cubic_third(2 * m.pow(4) - 12 * m.pow(3) - 14 * m * m + 117 * m)? + check_flag(delta)? * m)
}

/// Number of 3's in the SNF of the HKM set:
/// `2/3 m^4 - 4m^3 - 28/3 m^2 + 62m + epsilon m`, valid for `m > 9`.
pub fn threes_count_hkm(m: u32, epsilon: u32) -> Result<i128> {
    let m = m as i128;
    Ok(cubic_third(2 * m.pow(4) - 12 * m.pow(3) - 28 * m * m + 186 * m)? + check_flag(epsilon)? * m)
}

pub fn lin_formula_applies(m: u32) -> bool {
    m > 7 && m % 2 == 1
}

pub fn hkm_formula_applies(m: u32) -> bool {
    m > 9 && m.is_multiple_of(3)
}

/// The common 3-rank `2m^2 - 2m` of the HKM and Lin sets.
pub fn rank3_hkm_lin(m: u32) -> u64 {
    let m = m as u64;
    2 * m * m - 2 * m
}

/// Outcome of one divisibility or rank clause.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ClauseStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub name: String,
    pub status: ClauseStatus,
    pub detail: String,
}

/// Pass/fail per clause.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KlemmReport {
    pub clauses: Vec<Clause>,
}

impl KlemmReport {
    fn push(&mut self, name: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.clauses.push(Clause {
            name: name.into(),
            status: if ok { ClauseStatus::Pass } else { ClauseStatus::Fail },
            detail: detail.into(),
        });
    }

    fn skip(&mut self, name: impl Into<String>, reason: impl Into<String>) {
        self.clauses.push(Clause {
            name: name.into(),
            status: ClauseStatus::Skipped,
            detail: reason.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.clauses.iter().all(|c| c.status != ClauseStatus::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Clause> {
        self.clauses.iter().filter(|c| c.status == ClauseStatus::Fail)
    }

    pub fn extend(&mut self, other: KlemmReport) {
        self.clauses.extend(other.clauses);
    }
}

type Exps = BTreeMap<u64, u128>;

fn exps(n: u64) -> Exps {
    arith::factorize(n).into_iter().map(|(p, e)| (p, e as u128)).collect()
}

fn exps_scale(a: &Exps, k: u128) -> Exps {
    a.iter().map(|(&p, &e)| (p, e * k)).collect()
}

fn exps_add(a: &Exps, b: &Exps) -> Exps {
    let mut out = a.clone();
    for (&p, &e) in b {
        *out.entry(p).or_insert(0) += e;
    }
    out
}

/// `a | b` for prime-exponent maps.
fn exps_divides(a: &Exps, b: &Exps) -> bool {
    a.iter().all(|(p, &e)| e == 0 || b.get(p).copied().unwrap_or(0) >= e)
}

fn divides(a: u64, b: u128) -> bool {
    a != 0 && b.is_multiple_of(a as u128)
}

/// Runs `(first index, last index, divisor)`, 1-based.
fn runs(inv: &InvariantFactorMultiset) -> Vec<(u64, u64, u64)> {
    let mut out = Vec::new();
    let mut start = 1;
    for &(d, m) in inv.terms() {
        out.push((start, start + m - 1, d));
        start += m;
    }
    out
}

/// Every clause of the general rank bounds and SNF divisibility conditions
/// that applies to `params`, plus the symmetric-design clauses (skipped,
/// with a reason, when `b != v`).
pub fn klemm_check(params: &DesignParams, inv: &InvariantFactorMultiset) -> KlemmReport {
    let mut rep = KlemmReport::default();
    let v = params.v;
    let n = params.n;
    let t = params.t();
    if inv.len() != v {
        rep.push("size", false, format!("{} invariant factors for v = {v}", inv.len()));
        return rep;
    }
    rep.push("size", true, format!("{v} invariant factors"));
    if n == 0 {
        rep.skip("order", "n = 0");
        return rep;
    }
    let diag_runs = runs(inv);
    let first = inv.terms()[0].0;
    rep.push("d_1 = 1", first == 1, format!("d_1 = {first}"));

    // (d_1...d_i)^2 | t n^(i-1) for 2 <= i <= v-1; both sides are linear in
    // i within a run, so checking run endpoints suffices.
    let (en, et) = (exps(n), exps(t));
    let mut ok = true;
    let mut detail = String::from("holds for all 2 <= i <= v-1");
    let mut prefix: Exps = BTreeMap::new();
    for &(a, b, d) in &diag_runs {
        let ed = exps(d);
        for i in [a, b] {
            if i < 2 || i > v - 1 {
                continue;
            }
            let lhs = exps_scale(&exps_add(&prefix, &exps_scale(&ed, (i - a + 1) as u128)), 2);
            let rhs = exps_add(&et, &exps_scale(&en, (i - 1) as u128));
            if !exps_divides(&lhs, &rhs) {
                ok = false;
                detail = format!("fails at i = {i}");
            }
        }
        prefix = exps_add(&prefix, &exps_scale(&ed, (b - a + 1) as u128));
        if !ok {
            break;
        }
    }
    rep.push("(d_1...d_i)^2 | t n^(i-1)", ok, detail);

    let total = inv.product_exponents();
    let rhs = exps_add(&exps(n + params.lambda * v), &exps_scale(&en, (v - 1) as u128));
    rep.push(
        "(d_1...d_v)^2 | (n + lambda v) n^(v-1)",
        exps_divides(&exps_scale(&total, 2), &rhs),
        "",
    );

    let dv = inv.largest().unwrap_or(0);
    let rnt = params.r as u128 * n as u128 / t as u128;
    rep.push("d_v | rn/t", divides(dv, rnt), format!("d_v = {dv}, rn/t = {rnt}"));

    let mut ok = true;
    let mut detail = String::new();
    for &(a, b, d) in &diag_runs {
        if b >= 2 && a < v && !n.is_multiple_of(d) {
            ok = false;
            detail = format!("d_{} = {d} does not divide n = {n}", a.max(2));
            break;
        }
    }
    rep.push("d_i | n for 2 <= i <= v-1", ok, detail);

    // p | d_i for (b+1)/2 < i <= v: equivalently rank_p <= (b+1)/2, which
    // is also the rank upper bound.
    for p in arith::prime_divisors(n) {
        let rank = inv.rank_mod(p);
        let bound2 = params.b + 1;
        rep.push(
            format!("p = {p}: p | d_i for i > (b+1)/2"),
            2 * rank <= bound2,
            format!("rank_{p} = {rank}, (b+1)/2 = {}/2", bound2),
        );
        if !params.lambda.is_multiple_of(p) && !n.is_multiple_of(p * p) {
            rep.push(
                format!("p = {p}: rank_p >= v/2"),
                2 * rank >= v,
                format!("rank_{p} = {rank}, v = {v}"),
            );
        } else {
            rep.skip(
                format!("p = {p}: rank_p >= v/2"),
                "needs p not dividing lambda and p^2 not dividing n",
            );
        }
    }

    // primes not dividing n: rank is v - 1 exactly when p | k, v otherwise
    let mut others = arith::prime_divisors(params.k);
    others.extend(arith::prime_divisors(params.r));
    others.sort_unstable();
    others.dedup();
    for p in others.into_iter().filter(|p| !n.is_multiple_of(*p)) {
        let rank = inv.rank_mod(p);
        let want = if params.k.is_multiple_of(p) { v - 1 } else { v };
        rep.push(
            format!("p = {p} (not dividing n): rank_p"),
            rank == want,
            format!("rank_{p} = {rank}, expected {want}"),
        );
    }
    rep.extend(klemm_check_symmetric(params, inv));
    rep
}

/// The symmetric-design clauses: the product `k n^((v-1)/2)`, `d_v = kn/t`,
/// and the pairing `(d_i d_(v+2-i))_p = n_p`.
pub fn klemm_check_symmetric(params: &DesignParams, inv: &InvariantFactorMultiset) -> KlemmReport {
    let mut rep = KlemmReport::default();
    let names = ["product = k n^((v-1)/2)", "d_v = kn/t", "(d_i d_(v+2-i))_p = n_p"];
    if params.b != params.v {
        for name in names {
            rep.skip(name, format!("not symmetric (b = {} > v = {})", params.b, params.v));
        }
        return rep;
    }
    let v = params.v;
    let n = params.n;
    if inv.len() != v || n == 0 {
        for name in names {
            rep.skip(name, "size mismatch or n = 0");
        }
        return rep;
    }
    let total = inv.product_exponents();
    let en = exps(n);
    let mut want = exps(params.k);
    let mut integral = true;
    for (&p, &e) in &en {
        let twice = e * (v - 1) as u128;
        if !twice.is_multiple_of(2) {
            integral = false;
        }
        *want.entry(p).or_insert(0) += twice / 2;
    }
    let clean = |m: &Exps| {
        m.iter()
            .filter(|(_, &e)| e > 0)
            .map(|(&p, &e)| (p, e))
            .collect::<Vec<_>>()
    };
    rep.push(
        names[0],
        integral && clean(&total) == clean(&want),
        format!("product exponents {:?}, expected {:?}", clean(&total), clean(&want)),
    );
    let t = params.t();
    let knt = params.k as u128 * n as u128 / t as u128;
    let dv = inv.largest().unwrap_or(0) as u128;
    rep.push(names[1], dv == knt, format!("d_v = {dv}, kn/t = {knt}"));

    let diag = inv.diagonal();
    let mut checked = false;
    let mut ok = true;
    let mut detail = String::new();
    for p in arith::prime_divisors(n) {
        if params.lambda.is_multiple_of(p) {
            continue;
        }
        checked = true;
        let np = arith::valuation(n, p);
        for i in 3..v {
            let j = v + 2 - i;
            let a = arith::valuation(diag[(i - 1) as usize], p) + arith::valuation(diag[(j - 1) as usize], p);
            if a != np {
                ok = false;
                detail = format!("p = {p}, i = {i}: valuation {a}, expected {np}");
                break;
            }
        }
    }
    if checked {
        rep.push(names[2], ok, detail);
    } else {
        rep.skip(names[2], "no prime divides n but not lambda");
    }
    rep
}
