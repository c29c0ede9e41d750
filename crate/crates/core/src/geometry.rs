//! Points, subspaces and flats of finite projective and affine spaces, their
//! incidence matrices, and the 2-design parameter check.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::{FieldTables, FiniteField};
use crate::arith;
use crate::{Error, Result};

/// Largest `b * k` accepted by the incidence generators.
pub const INCIDENCE_LIMIT: u128 = 1_000_000_000;

/// Parameters `(v, k, lambda, b, r, n)` of a 2-design.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DesignParams {
    pub v: u64,
    pub k: u64,
    pub lambda: u64,
    pub b: u64,
    pub r: u64,
    pub n: u64,
}

impl DesignParams {
    /// Parameters from `(v, k, lambda)`, deriving `r`, `b`, `n`.
    pub fn from_vkl(v: u64, k: u64, lambda: u64) -> Result<Self> {
        if v < 2 || k < 2 || k >= v || lambda == 0 {
            return Err(Error::OutOfRange(format!(
                "no 2-design with (v, k, lambda) = ({v}, {k}, {lambda})"
            )));
        }
        let rn = lambda * (v - 1);
        let bn = lambda as u128 * v as u128 * (v - 1) as u128;
        let bd = k as u128 * (k - 1) as u128;
        if !rn.is_multiple_of(k - 1) || !bn.is_multiple_of(bd) {
            return Err(Error::OutOfRange(format!(
                "(v, k, lambda) = ({v}, {k}, {lambda}) fails the divisibility conditions"
            )));
        }
        let r = rn / (k - 1);
        Ok(Self {
            v,
            k,
            lambda,
            b: (bn / bd) as u64,
            r,
            n: r - lambda,
        })
    }

    pub fn is_symmetric(&self) -> bool {
        self.b == self.v
    }

    /// `gcd(n, lambda)`.
    pub fn t(&self) -> u64 {
        arith::gcd(self.n, self.lambda)
    }

    /// Checks `bk = vr`, `r(k-1) = lambda(v-1)`, `n = r - lambda`.
    pub fn is_consistent(&self) -> bool {
        self.b as u128 * self.k as u128 == self.v as u128 * self.r as u128
            && self.r as u128 * (self.k as u128 - 1) == self.lambda as u128 * (self.v as u128 - 1)
            && self.r >= self.lambda
            && self.n == self.r - self.lambda
    }
}

/// Which classical geometry a design comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Space {
    /// Points and `d`-dimensional subspaces of the `(m+1)`-dimensional space.
    Projective,
    /// Points and `d`-flats of the `m`-dimensional affine space.
    Affine,
}

/// `(m, d, q)` for a projective or affine geometry design.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GeometryParams {
    pub space: Space,
    pub m: u32,
    pub d: u32,
    pub q: u64,
}

impl GeometryParams {
    pub fn projective(m: u32, d: u32, q: u64) -> Result<Self> {
        if m < 2 || d < 2 || d > m {
            return Err(Error::OutOfRange(format!(
                "projective design needs 2 <= d <= m (m = {m}, d = {d})"
            )));
        }
        arith::prime_power(q)?;
        Ok(Self {
            space: Space::Projective,
            m,
            d,
            q,
        })
    }

    pub fn affine(m: u32, d: u32, q: u64) -> Result<Self> {
        if m < 2 || d < 1 || d + 1 > m {
            return Err(Error::OutOfRange(format!(
                "affine design needs 1 <= d <= m - 1 (m = {m}, d = {d})"
            )));
        }
        arith::prime_power(q)?;
        Ok(Self {
            space: Space::Affine,
            m,
            d,
            q,
        })
    }

    pub fn design_params(&self) -> Result<DesignParams> {
        match self.space {
            Space::Projective => pg_design_params(self.m, self.d, self.q),
            Space::Affine => ag_design_params(self.m, self.d, self.q),
        }
    }
}

/// Number of `i`-dimensional subspaces of `F_q^m`.
pub fn gaussian_binomial(m: u32, i: u32, q: u64) -> Result<u128> {
    if i > m {
        return Err(Error::OutOfRange(format!("gaussian binomial needs i <= m ({i} > {m})")));
    }
    let q = q as u128;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for j in 0..i {
        let a = q
            .checked_pow(m - j)
            .ok_or_else(|| Error::OutOfRange("gaussian binomial overflow".into()))?;
        num = num
            .checked_mul(a - 1)
            .ok_or_else(|| Error::OutOfRange("gaussian binomial overflow".into()))?;
        den *= q.pow(j + 1) - 1;
        let g = gcd128(num, den);
        num /= g;
        den /= g;
    }
    Ok(num / den)
}

fn gcd128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

fn to_u64(x: u128) -> Result<u64> {
    u64::try_from(x).map_err(|_| Error::OutOfRange("design parameter exceeds u64".into()))
}

pub fn pg_design_params(m: u32, d: u32, q: u64) -> Result<DesignParams> {
    GeometryParams::projective(m, d, q)?;
    let v = to_u64(gaussian_binomial(m + 1, 1, q)?)?;
    let k = to_u64(gaussian_binomial(d, 1, q)?)?;
    let r = to_u64(gaussian_binomial(m, d - 1, q)?)?;
    let lambda = to_u64(gaussian_binomial(m - 1, d - 2, q)?)?;
    let b = to_u64(gaussian_binomial(m + 1, d, q)?)?;
    Ok(DesignParams {
        v,
        k,
        lambda,
        b,
        r,
        n: r - lambda,
    })
}

pub fn ag_design_params(m: u32, d: u32, q: u64) -> Result<DesignParams> {
    GeometryParams::affine(m, d, q)?;
    let v = arith::checked_pow(q, m)?;
    let k = arith::checked_pow(q, d)?;
    let r = to_u64(gaussian_binomial(m, d, q)?)?;
    let lambda = to_u64(gaussian_binomial(m - 1, d - 1, q)?)?;
    let b = to_u64(q.pow(m - d) as u128 * gaussian_binomial(m, d, q)?)?;
    Ok(DesignParams {
        v,
        k,
        lambda,
        b,
        r,
        n: r - lambda,
    })
}

/// Sparse 0/1 matrix: rows are blocks, columns are points, each row stores
/// its sorted column indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IncidenceMatrix {
    cols: usize,
    offsets: Vec<usize>,
    indices: Vec<u32>,
}

impl IncidenceMatrix {
    /// Builds a matrix from per-row column lists (sorted and deduplicated here).
    pub fn from_rows<I, R>(cols: usize, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = R>,
        R: AsRef<[u32]>,
    {
        let mut m = Self::with_cols(cols);
        for row in rows {
            let mut r = row.as_ref().to_vec();
            r.sort_unstable();
            r.dedup();
            m.push_sorted_row(&r)?;
        }
        Ok(m)
    }

    fn with_cols(cols: usize) -> Self {
        Self {
            cols,
            offsets: vec![0],
            indices: Vec::new(),
        }
    }

    fn push_sorted_row(&mut self, row: &[u32]) -> Result<()> {
        if let Some(&last) = row.last() {
            if last as usize >= self.cols {
                return Err(Error::OutOfRange(format!(
                    "column {last} outside a matrix with {} columns",
                    self.cols
                )));
            }
        }
        self.indices.extend_from_slice(row);
        self.offsets.push(self.indices.len());
        Ok(())
    }

    pub fn nrows(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.indices[self.offsets[i]..self.offsets[i + 1]]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> + '_ {
        (0..self.nrows()).map(move |i| self.row(i))
    }

    pub fn column_sums(&self) -> Vec<u64> {
        let mut sums = vec![0u64; self.cols];
        for &c in &self.indices {
            sums[c as usize] += 1;
        }
        sums
    }

    pub fn transpose(&self) -> Self {
        let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); self.cols];
        for (i, row) in self.rows().enumerate() {
            for &c in row {
                buckets[c as usize].push(i as u32);
            }
        }
        let mut t = Self::with_cols(self.nrows());
        for b in &buckets {
            t.push_sorted_row(b).expect("transpose stays in range");
        }
        t
    }

    /// Relabels columns by `perm[old] = new`.
    pub fn permute_columns(&self, perm: &[u32]) -> Result<Self> {
        if perm.len() != self.cols {
            return Err(Error::OutOfRange("column permutation has the wrong length".into()));
        }
        Self::from_rows(
            self.cols,
            self.rows()
                .map(|r| r.iter().map(|&c| perm[c as usize]).collect::<Vec<u32>>()),
        )
    }

    /// Dense 0/1 rows, for small matrices.
    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        self.rows()
            .map(|r| {
                let mut d = vec![0u8; self.cols];
                for &c in r {
                    d[c as usize] = 1;
                }
                d
            })
            .collect()
    }

    /// If every row `g` equals row 0 shifted by `g` (mod the column count),
    /// returns row 0.
    pub fn circulant_base(&self) -> Option<Vec<u32>> {
        let v = self.cols;
        if self.nrows() != v || v == 0 {
            return None;
        }
        let base = self.row(0).to_vec();
        for g in 1..v {
            let mut shifted: Vec<u32> = base.iter().map(|&d| ((d as usize + g) % v) as u32).collect();
            shifted.sort_unstable();
            if shifted != self.row(g) {
                return None;
            }
        }
        Some(base)
    }
}

/// Checks `A^T A = (r - lambda) I + lambda J` and `A J = k J` and returns the
/// parameters, or the first violated cell.
pub fn verify_2design(m: &IncidenceMatrix) -> Result<DesignParams> {
    let b = m.nrows();
    let v = m.ncols();
    if b == 0 || v < 2 {
        return Err(Error::NotADesign(format!("degenerate {b} x {v} matrix")));
    }
    let k = m.row(0).len();
    for (i, row) in m.rows().enumerate() {
        if row.len() != k {
            return Err(Error::NotADesign(format!(
                "AJ != kJ: row {i} has weight {} but row 0 has weight {k}",
                row.len()
            )));
        }
    }
    let t = m.transpose();
    let r = t.row(0).len() as u64;
    let mut lambda: Option<u64> = None;
    let mut counts = vec![0u64; v];
    for x in 0..v {
        for &blk in t.row(x) {
            for &y in m.row(blk as usize) {
                counts[y as usize] += 1;
            }
        }
        for y in 0..v {
            let c = counts[y];
            counts[y] = 0;
            if y == x {
                if c != r {
                    return Err(Error::NotADesign(format!("(A^T A)[{x}][{x}] = {c}, expected r = {r}")));
                }
            } else {
                match lambda {
                    None => lambda = Some(c),
                    Some(l) if l != c => {
                        return Err(Error::NotADesign(format!(
                            "(A^T A)[{x}][{y}] = {c}, expected lambda = {l}"
                        )))
                    }
                    _ => {}
                }
            }
        }
    }
    let lambda = lambda.unwrap_or(0);
    if lambda == 0 {
        return Err(Error::NotADesign("lambda = 0: no pair of points is covered".into()));
    }
    if k as u64 >= v as u64 {
        return Err(Error::NotADesign("blocks are the whole point set".into()));
    }
    Ok(DesignParams {
        v: v as u64,
        k: k as u64,
        lambda,
        b: b as u64,
        r,
        n: r - lambda,
    })
}

/// Small-field context shared by the enumerators.
struct Coords {
    q: u32,
    tables: FieldTables,
}

impl Coords {
    fn new(q: u64) -> Result<Self> {
        let (p, t) = arith::prime_power(q)?;
        let f = FiniteField::new(p, t)?;
        Ok(Self {
            q: q as u32,
            tables: FieldTables::new(&f)?,
        })
    }
}

/// Calls `emit` with the reduced echelon basis (row-major, `d x n`) of every
/// `d`-dimensional subspace of `F_q^n`, in a fixed order: pivot sets in
/// lexicographic order, free entries as an odometer.
fn for_each_subspace(n: usize, d: usize, q: u32, mut emit: impl FnMut(&[u32], &[usize])) {
    if d == 0 || d > n {
        return;
    }
    let mut pivots: Vec<usize> = (0..d).collect();
    loop {
        // free positions: row i, column c > pivots[i] with c not a pivot
        let mut free: Vec<(usize, usize)> = Vec::new();
        for (i, &pc) in pivots.iter().enumerate() {
            for c in pc + 1..n {
                if !pivots.contains(&c) {
                    free.push((i, c));
                }
            }
        }
        let mut basis = vec![0u32; d * n];
        for (i, &pc) in pivots.iter().enumerate() {
            basis[i * n + pc] = 1;
        }
        let mut digits = vec![0u32; free.len()];
        loop {
            for (slot, &(i, c)) in free.iter().enumerate() {
                basis[i * n + c] = digits[slot];
            }
            emit(&basis, &pivots);
            // odometer, last slot fastest
            let mut pos = free.len();
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                digits[pos] += 1;
                if digits[pos] < q {
                    break;
                }
                digits[pos] = 0;
                if pos == 0 {
                    pos = usize::MAX;
                    break;
                }
            }
            if pos == usize::MAX || free.is_empty() {
                break;
            }
        }
        // next combination
        let mut i = d;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if pivots[i] < n - d + i {
                pivots[i] += 1;
                for j in i + 1..d {
                    pivots[j] = pivots[j - 1] + 1;
                }
                break;
            }
            if i == 0 {
                return;
            }
        }
    }
}

/// Index of a normalized projective point (first nonzero coordinate 1) in
/// lexicographic order of the normalized vectors.
pub(crate) fn projective_index(x: &[u32], q: u64) -> u32 {
    let len = x.len();
    let lead = x.iter().position(|&c| c != 0).expect("nonzero vector");
    let m = len - 1;
    let mut idx: u64 = (lead + 1..=m).map(|j| q.pow((m - j) as u32)).sum();
    let mut tail = 0u64;
    for &c in &x[lead + 1..] {
        tail = tail * q + c as u64;
    }
    idx += tail;
    idx as u32
}

/// Index of an affine point: the base-q number with `x[0]` most significant.
fn affine_index(x: &[u32], q: u64) -> u32 {
    x.iter().fold(0u64, |acc, &c| acc * q + c as u64) as u32
}

/// Enumerates the normalized vectors `sum a_i basis_i` of a subspace
/// (first nonzero coefficient 1), writing each into `out`.
fn for_each_projective_point(basis: &[u32], d: usize, n: usize, ctx: &Coords, mut emit: impl FnMut(&[u32])) {
    let q = ctx.q;
    let mut coeffs = vec![0u32; d];
    let mut vec_buf = vec![0u32; n];
    for lead in 0..d {
        for c in coeffs.iter_mut() {
            *c = 0;
        }
        coeffs[lead] = 1;
        let tail_len = d - lead - 1;
        let count = (q as u64).pow(tail_len as u32);
        for _ in 0..count {
            for x in vec_buf.iter_mut() {
                *x = 0;
            }
            for i in lead..d {
                let a = coeffs[i];
                if a == 0 {
                    continue;
                }
                for c in 0..n {
                    let term = ctx.tables.mul(a, basis[i * n + c]);
                    vec_buf[c] = ctx.tables.add(vec_buf[c], term);
                }
            }
            emit(&vec_buf);
            // advance the tail odometer
            let mut pos = d;
            while pos > lead + 1 {
                pos -= 1;
                coeffs[pos] += 1;
                if coeffs[pos] < q {
                    break;
                }
                coeffs[pos] = 0;
            }
        }
    }
}

fn check_guard(b: u64, k: u64) -> Result<()> {
    let size = b as u128 * k as u128;
    if size > INCIDENCE_LIMIT {
        return Err(Error::SizeGuard {
            what: "incidence size b*k",
            value: size,
            limit: INCIDENCE_LIMIT,
        });
    }
    Ok(())
}

/// Streams the blocks of the projective design `(m, d, q)` as sorted point
/// index lists, in canonical reduced-echelon order.
pub fn for_each_pg_block(m: u32, d: u32, q: u64, mut emit: impl FnMut(&[u32])) -> Result<()> {
    let params = pg_design_params(m, d, q)?;
    check_guard(params.b, params.k)?;
    let ctx = Coords::new(q)?;
    let n = (m + 1) as usize;
    let du = d as usize;
    let mut block: Vec<u32> = Vec::with_capacity(params.k as usize);
    for_each_subspace(n, du, ctx.q, |basis, _| {
        block.clear();
        for_each_projective_point(basis, du, n, &ctx, |x| block.push(projective_index(x, q)));
        block.sort_unstable();
        emit(&block);
    });
    Ok(())
}

/// Streams the blocks (d-flats) of the affine design `(m, d, q)`.
pub fn for_each_ag_block(m: u32, d: u32, q: u64, mut emit: impl FnMut(&[u32])) -> Result<()> {
    let params = ag_design_params(m, d, q)?;
    check_guard(params.b, params.k)?;
    let ctx = Coords::new(q)?;
    let n = m as usize;
    let du = d as usize;
    let qu = ctx.q;
    let mut block: Vec<u32> = Vec::with_capacity(params.k as usize);
    let mut point = vec![0u32; n];
    for_each_subspace(n, du, qu, |basis, pivots| {
        // all vectors of the subspace, as coordinate vectors
        let mut members: Vec<Vec<u32>> = Vec::with_capacity(params.k as usize);
        let mut coeffs = vec![0u32; du];
        for _ in 0..params.k {
            let mut w = vec![0u32; n];
            for i in 0..du {
                if coeffs[i] == 0 {
                    continue;
                }
                for c in 0..n {
                    w[c] = ctx.tables.add(w[c], ctx.tables.mul(coeffs[i], basis[i * n + c]));
                }
            }
            members.push(w);
            let mut pos = du;
            while pos > 0 {
                pos -= 1;
                coeffs[pos] += 1;
                if coeffs[pos] < qu {
                    break;
                }
                coeffs[pos] = 0;
            }
        }
        // coset representatives: zero on pivots, free on the other coordinates
        let others: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        let mut rep = vec![0u32; n];
        let reps = (qu as u64).pow(others.len() as u32);
        for _ in 0..reps {
            block.clear();
            for w in &members {
                for c in 0..n {
                    point[c] = ctx.tables.add(rep[c], w[c]);
                }
                block.push(affine_index(&point, q));
            }
            block.sort_unstable();
            emit(&block);
            let mut pos = others.len();
            while pos > 0 {
                pos -= 1;
                let c = others[pos];
                rep[c] += 1;
                if rep[c] < qu {
                    break;
                }
                rep[c] = 0;
            }
        }
    });
    Ok(())
}

/// Incidence matrix of points versus `d`-dimensional subspaces of `F_q^(m+1)`.
pub fn incidence_pg(m: u32, d: u32, q: u64) -> Result<IncidenceMatrix> {
    let params = pg_design_params(m, d, q)?;
    check_guard(params.b, params.k)?;
    let mut mat = IncidenceMatrix::with_cols(params.v as usize);
    mat.indices.reserve((params.b * params.k) as usize);
    for_each_pg_block(m, d, q, |blk| {
        mat.push_sorted_row(blk).expect("generated indices are in range")
    })?;
    Ok(mat)
}

/// Incidence matrix of points versus `d`-flats of `AG(m, q)`.
pub fn incidence_ag(m: u32, d: u32, q: u64) -> Result<IncidenceMatrix> {
    let params = ag_design_params(m, d, q)?;
    check_guard(params.b, params.k)?;
    let mut mat = IncidenceMatrix::with_cols(params.v as usize);
    mat.indices.reserve((params.b * params.k) as usize);
    for_each_ag_block(m, d, q, |blk| {
        mat.push_sorted_row(blk).expect("generated indices are in range")
    })?;
    Ok(mat)
}

/// Projective points of `PG(m, q)` as normalized coordinate vectors, in
/// column order of [`incidence_pg`].
pub fn projective_points(m: u32, q: u64) -> Result<Vec<Vec<u32>>> {
    let n = (m + 1) as usize;
    let v = gaussian_binomial(m + 1, 1, q)? as usize;
    let mut pts = vec![Vec::new(); v];
    for lead in (0..n).rev() {
        let tail = n - lead - 1;
        let count = q.pow(tail as u32);
        for code in 0..count {
            let mut x = vec![0u32; n];
            x[lead] = 1;
            let mut c = code;
            for j in (lead + 1..n).rev() {
                x[j] = (c % q) as u32;
                c /= q;
            }
            let idx = projective_index(&x, q) as usize;
            pts[idx] = x;
        }
    }
    Ok(pts)
}

/// A design with a cyclic automorphism `sigma` fixing `fixed` points and
/// permuting the other `cycle` points as `Z_cycle` (`c -> c + 1`), given by
/// one block per `sigma`-orbit.
///
/// Point labels: `0..fixed` are the fixed points, `fixed + c` is residue `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicDesign {
    pub fixed: usize,
    pub cycle: u64,
    /// Per orbit: which fixed points the block contains, and its residues.
    pub orbits: Vec<CyclicOrbit>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicOrbit {
    pub fixed_points: Vec<u32>,
    pub residues: Vec<u32>,
    pub size: u64,
}

impl CyclicDesign {
    /// Groups the blocks into orbits under the shift; fails if the block set
    /// is not closed under the shift (orbit sizes must add up to the number
    /// of distinct blocks).
    pub fn from_blocks<'a>(fixed: usize, cycle: u64, blocks: impl IntoIterator<Item = &'a [u32]>) -> Result<Self> {
        let mut acc = OrbitCollector::new(fixed, cycle);
        for b in blocks {
            acc.push(b);
        }
        acc.finish()
    }

    pub fn block_count(&self) -> u64 {
        self.orbits.iter().map(|o| o.size).sum()
    }

    /// Expands every orbit into explicit blocks (labels as documented above).
    pub fn to_incidence(&self) -> Result<IncidenceMatrix> {
        let v = self.fixed + self.cycle as usize;
        let mut rows = Vec::new();
        for o in &self.orbits {
            for s in 0..o.size {
                let mut row: Vec<u32> = o.fixed_points.clone();
                row.extend(
                    o.residues
                        .iter()
                        .map(|&c| (self.fixed as u64 + (c as u64 + s) % self.cycle) as u32),
                );
                rows.push(row);
            }
        }
        IncidenceMatrix::from_rows(v, rows)
    }
}

struct OrbitCollector {
    fixed: usize,
    cycle: u64,
    seen: BTreeMap<(Vec<u32>, Vec<u32>), usize>,
    orbits: Vec<CyclicOrbit>,
    blocks: u64,
    scratch: Vec<u32>,
}

impl OrbitCollector {
    fn new(fixed: usize, cycle: u64) -> Self {
        Self {
            fixed,
            cycle,
            seen: BTreeMap::new(),
            orbits: Vec::new(),
            blocks: 0,
            scratch: Vec::new(),
        }
    }

    fn push(&mut self, block: &[u32]) {
        self.blocks += 1;
        let fixed_points: Vec<u32> = block.iter().copied().filter(|&x| (x as usize) < self.fixed).collect();
        self.scratch.clear();
        self.scratch.extend(
            block
                .iter()
                .filter(|&&x| x as usize >= self.fixed)
                .map(|&x| x - self.fixed as u32),
        );
        self.scratch.sort_unstable();
        let (gaps, period) = canonical_gaps(&self.scratch, self.cycle);
        let key = (fixed_points, gaps);
        if self.seen.contains_key(&key) {
            return;
        }
        let k = self.scratch.len() as u64;
        let size = (self.cycle * period as u64).checked_div(k).unwrap_or(1);
        self.seen.insert(key.clone(), self.orbits.len());
        self.orbits.push(CyclicOrbit {
            fixed_points: key.0,
            residues: self.scratch.clone(),
            size,
        });
    }

    fn finish(self) -> Result<CyclicDesign> {
        let total: u64 = self.orbits.iter().map(|o| o.size).sum();
        if total != self.blocks {
            return Err(Error::Mismatch(format!(
                "block set not closed under the cyclic shift: orbits cover {total} blocks, got {}",
                self.blocks
            )));
        }
        Ok(CyclicDesign {
            fixed: self.fixed,
            cycle: self.cycle,
            orbits: self.orbits,
        })
    }
}

/// Cyclic gap sequence of a sorted residue set, rotated to its
/// lexicographically least form, plus its minimal period (in positions).
fn canonical_gaps(sorted: &[u32], n: u64) -> (Vec<u32>, usize) {
    let k = sorted.len();
    if k == 0 {
        return (Vec::new(), 0);
    }
    let gaps: Vec<u32> = (0..k)
        .map(|i| {
            let a = sorted[i] as u64;
            let b = if i + 1 < k {
                sorted[i + 1] as u64
            } else {
                sorted[0] as u64 + n
            };
            (b - a) as u32
        })
        .collect();
    let start = least_rotation(&gaps);
    let rotated: Vec<u32> = (0..k).map(|i| gaps[(start + i) % k]).collect();
    let period = (1..=k)
        .find(|&p| k.is_multiple_of(p) && (0..k).all(|i| rotated[i] == rotated[(i + p) % k]))
        .unwrap_or(k);
    (rotated, period)
}

/// Booth's least-rotation algorithm.
fn least_rotation(s: &[u32]) -> usize {
    let n = s.len();
    let mut f = vec![usize::MAX; 2 * n];
    let mut k = 0usize;
    for j in 1..2 * n {
        let sj = s[j % n];
        let mut i = f[j - k - 1];
        while i != usize::MAX && sj != s[(k + i + 1) % n] {
            if sj < s[(k + i + 1) % n] {
                k = j - i - 1;
            }
            i = f[i];
        }
        if i == usize::MAX && sj != s[(k + i.wrapping_add(1)) % n] {
            if sj < s[k % n] {
                k = j;
            }
            f[j - k] = usize::MAX;
        } else {
            f[j - k] = i.wrapping_add(1);
        }
    }
    k
}

/// Labels points of `F_q^len` by their image `sum c_i gamma^i` in
/// `F_(q^len)`, where `gamma` generates the big field; zero maps to `None`.
struct SingerMap {
    big: FiniteField,
    embed: Vec<u32>,
    powers: Vec<u32>,
}

impl SingerMap {
    fn new(q: u64, len: u32) -> Result<Self> {
        let (p, t) = arith::prime_power(q)?;
        let small = FiniteField::new(p, t)?;
        let big = FiniteField::new(p, t * len)?;
        let embed = big.embedding_of(&small)?;
        let powers = (0..len as u64).map(|i| big.exp(i)).collect();
        Ok(Self { big, embed, powers })
    }

    fn log_of(&self, x: &[u32]) -> Option<u64> {
        let mut acc = 0u32;
        for (i, &c) in x.iter().enumerate() {
            if c != 0 {
                acc = self.big.add(acc, self.big.mul(self.embed[c as usize], self.powers[i]));
            }
        }
        self.big.dlog(acc).ok()
    }
}

/// The projective design `(m, d, q)` in Singer labelling: point `x` gets
/// residue `dlog(x) mod v`, so multiplication by a primitive element of
/// `F_(q^(m+1))` is the shift. Also returns the relabelling of the columns
/// of [`incidence_pg`].
pub fn pg_cyclic(m: u32, d: u32, q: u64) -> Result<(CyclicDesign, Vec<u32>)> {
    let params = pg_design_params(m, d, q)?;
    let v = params.v;
    let map = SingerMap::new(q, m + 1)?;
    let labels: Vec<u32> = projective_points(m, q)?
        .iter()
        .map(|x| (map.log_of(x).expect("nonzero point") % v) as u32)
        .collect();
    let mut acc = OrbitCollector::new(0, v);
    let mut buf = Vec::new();
    for_each_pg_block(m, d, q, |blk| {
        buf.clear();
        buf.extend(blk.iter().map(|&c| labels[c as usize]));
        acc.push(&buf);
    })?;
    Ok((acc.finish()?, labels))
}

/// The affine design `(m, d, q)` with the origin as the single fixed point and
/// nonzero vectors labelled `1 + dlog(x)` in `F_(q^m)`. Also returns the
/// relabelling of the columns of [`incidence_ag`].
pub fn ag_cyclic(m: u32, d: u32, q: u64) -> Result<(CyclicDesign, Vec<u32>)> {
    let params = ag_design_params(m, d, q)?;
    let map = SingerMap::new(q, m)?;
    let cycle = params.v - 1;
    let n = m as usize;
    let mut labels = vec![0u32; params.v as usize];
    let mut x = vec![0u32; n];
    for code in 0..params.v {
        let mut c = code;
        for j in (0..n).rev() {
            x[j] = (c % q) as u32;
            c /= q;
        }
        labels[code as usize] = match map.log_of(&x) {
            None => 0,
            Some(l) => 1 + l as u32,
        };
    }
    let mut acc = OrbitCollector::new(1, cycle);
    let mut buf = Vec::new();
    for_each_ag_block(m, d, q, |blk| {
        buf.clear();
        buf.extend(blk.iter().map(|&c| labels[c as usize]));
        acc.push(&buf);
    })?;
    Ok((acc.finish()?, labels))
}
