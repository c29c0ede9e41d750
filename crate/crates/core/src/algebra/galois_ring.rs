use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::FiniteField;
use crate::arith;
use crate::{Error, Result};

/// Element of a Galois ring: coefficients of `1, x, ..., x^(f-1)` in `Z/p^L`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaloisRingElement {
    pub coeffs: Vec<u64>,
}

/// `GR(p^L, f) = (Z/p^L)[x] / (F)` with `F` a monic lift of the primitive
/// modulus of `F_{p^f}`, together with its Teichmüller unit `omega` of order
/// `p^f - 1` reducing to `x` modulo `p`.
#[derive(Clone, Debug)]
pub struct GaloisRing {
    p: u64,
    precision: u32,
    degree: u32,
    modulus_pl: u64,
    modulus: Vec<u64>,
    omega: GaloisRingElement,
}

/// `p^L` must stay below this so products fit in `u64`.
const RING_MODULUS_LIMIT: u64 = 1 << 31;

impl GaloisRing {
    pub fn new(p: u64, precision: u32, degree: u32) -> Result<Self> {
        if precision == 0 || degree == 0 {
            return Err(Error::OutOfRange(format!(
                "Galois ring needs L >= 1 and f >= 1 (got L = {precision}, f = {degree})"
            )));
        }
        let field = FiniteField::new(p, degree)?;
        let pl = (p as u128).pow(precision);
        if pl >= RING_MODULUS_LIMIT as u128 {
            return Err(Error::SizeGuard {
                what: "p^L",
                value: pl,
                limit: RING_MODULUS_LIMIT as u128,
            });
        }
        let modulus = field.modulus().iter().map(|&c| c as u64).collect();
        let mut ring = Self {
            p,
            precision,
            degree,
            modulus_pl: pl as u64,
            modulus,
            omega: GaloisRingElement { coeffs: Vec::new() },
        };
        ring.omega = ring.teichmuller(&ring.x());
        Ok(ring)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    /// `p^L`.
    pub fn characteristic(&self) -> u64 {
        self.modulus_pl
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Order of the Teichmüller group, `p^f - 1`.
    pub fn unit_order(&self) -> u64 {
        self.p.pow(self.degree) - 1
    }

    pub fn omega(&self) -> &GaloisRingElement {
        &self.omega
    }

    pub fn zero(&self) -> GaloisRingElement {
        GaloisRingElement {
            coeffs: vec![0; self.degree as usize],
        }
    }

    pub fn from_int(&self, n: u64) -> GaloisRingElement {
        let mut z = self.zero();
        z.coeffs[0] = n % self.modulus_pl;
        z
    }

    pub fn one(&self) -> GaloisRingElement {
        self.from_int(1)
    }

    /// The class of `x` (for `f = 1`, the root of the linear modulus).
    pub fn x(&self) -> GaloisRingElement {
        let mut z = self.zero();
        if self.degree == 1 {
            z.coeffs[0] = (self.modulus_pl - self.modulus[0]) % self.modulus_pl;
        } else {
            z.coeffs[1] = 1;
        }
        z
    }

    pub fn add(&self, a: &GaloisRingElement, b: &GaloisRingElement) -> GaloisRingElement {
        let m = self.modulus_pl;
        GaloisRingElement {
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| (x + y) % m).collect(),
        }
    }

    pub fn sub(&self, a: &GaloisRingElement, b: &GaloisRingElement) -> GaloisRingElement {
        let m = self.modulus_pl;
        GaloisRingElement {
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| (x + m - y) % m).collect(),
        }
    }

    pub fn scale(&self, a: &GaloisRingElement, s: u64) -> GaloisRingElement {
        let m = self.modulus_pl;
        let s = s % m;
        GaloisRingElement {
            coeffs: a.coeffs.iter().map(|&x| x * s % m).collect(),
        }
    }

    pub fn mul(&self, a: &GaloisRingElement, b: &GaloisRingElement) -> GaloisRingElement {
        let f = self.degree as usize;
        let m = self.modulus_pl;
        let mut prod = vec![0u64; 2 * f - 1];
        for i in 0..f {
            if a.coeffs[i] == 0 {
                continue;
            }
            for j in 0..f {
                prod[i + j] = (prod[i + j] + a.coeffs[i] * b.coeffs[j]) % m;
            }
        }
        for d in (f..2 * f - 1).rev() {
            let c = prod[d];
            if c != 0 {
                for i in 0..f {
                    let sub = c * self.modulus[i] % m;
                    prod[d - f + i] = (prod[d - f + i] + m - sub) % m;
                }
            }
        }
        prod.truncate(f);
        GaloisRingElement { coeffs: prod }
    }

    pub fn pow(&self, a: &GaloisRingElement, mut e: u64) -> GaloisRingElement {
        let mut acc = self.one();
        let mut b = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &b);
            }
            b = self.mul(&b, &b);
            e >>= 1;
        }
        acc
    }

    /// Teichmüller representative of the residue class of `z`: iterate
    /// `z -> z^(p^f)` L times.
    pub fn teichmuller(&self, z: &GaloisRingElement) -> GaloisRingElement {
        let q = self.p.pow(self.degree);
        let mut w = z.clone();
        for _ in 0..self.precision {
            w = self.pow(&w, q);
        }
        w
    }

    /// Reduction modulo `p`, lifted back with coefficients in `[0, p)`.
    pub fn reduce_mod_p(&self, a: &GaloisRingElement) -> GaloisRingElement {
        GaloisRingElement {
            coeffs: a.coeffs.iter().map(|&c| c % self.p).collect(),
        }
    }

    /// Largest `e <= L` with every coefficient divisible by `p^e`
    /// (`L` for zero, meaning "at least L").
    pub fn valuation(&self, a: &GaloisRingElement) -> u32 {
        a.coeffs
            .iter()
            .filter(|&&c| c != 0)
            .map(|&c| arith::valuation(c, self.p))
            .min()
            .unwrap_or(self.precision)
            .min(self.precision)
    }

    /// Primitive `n`-th root of unity `omega^((p^f - 1) / n)`; `n` must divide `p^f - 1`.
    pub fn root_of_unity(&self, n: u64) -> Result<GaloisRingElement> {
        let order = self.unit_order();
        if n == 0 || !order.is_multiple_of(n) {
            return Err(Error::OutOfRange(format!("{n} does not divide p^f - 1 = {order}")));
        }
        Ok(self.pow(&self.omega, order / n))
    }
}
