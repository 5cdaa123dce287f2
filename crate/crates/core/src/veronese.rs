//! Degree-`n'` monomials in `(x, y, z)` and the map sending a point to its row
//! of monomial values (the coordinates of its Veronese image).
//!
//! The column ordering is graded-lexicographic with `x > y > z`, descending:
//! for `n' = 2` the columns are `x^2, xy, xz, y^2, yz, z^2`. Every matrix,
//! kernel vector and curve-coefficient dump uses this ordering.

use crate::curve::Point;
use crate::field::{FieldElement, PrimeModulus};

/// Exponent triple `(i, j, k)` of the monomial `x^i y^j z^k`.
pub type Exponents = (u32, u32, u32);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialBasis {
    degree: u32,
    exponents: Vec<Exponents>,
}

/// Number of monomials of degree `d` in three variables, `(d+1)(d+2)/2`.
pub fn monomial_count(degree: u32) -> usize {
    let d = degree as usize;
    (d + 1) * (d + 2) / 2
}

impl MonomialBasis {
    /// # Panics
    /// If `degree` is zero.
    pub fn new(degree: u32) -> Self {
        assert!(degree >= 1, "monomial degree must be at least 1");
        let mut exponents = Vec::with_capacity(monomial_count(degree));
        for i in (0..=degree).rev() {
            for j in (0..=degree - i).rev() {
                exponents.push((i, j, degree - i - j));
            }
        }
        MonomialBasis { degree, exponents }
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[Exponents] {
        &self.exponents
    }

    /// Monomial values at a projective triple, as raw residues.
    pub fn evaluate_raw(&self, q: PrimeModulus, x: u64, y: u64, z: u64) -> Vec<u64> {
        let powers = |v: u64| {
            let mut p = Vec::with_capacity(self.degree as usize + 1);
            p.push(1 % q.value());
            for e in 1..=self.degree as usize {
                p.push(q.mul(p[e - 1], v));
            }
            p
        };
        let (px, py, pz) = (powers(x), powers(y), powers(z));
        self.exponents.iter().map(|&(i, j, k)| q.mul(q.mul(px[i as usize], py[j as usize]), pz[k as usize])).collect()
    }

    /// Row of monomial values at the point's normalized coordinates.
    pub fn evaluate_row(&self, p: &Point) -> Vec<FieldElement> {
        let q = p.x().modulus();
        self.evaluate_raw(q, p.x().residue(), p.y().residue(), p.z().residue())
            .into_iter()
            .map(|v| q.element(v))
            .collect()
    }
}
