//! Dense exact linear algebra over `F_q`.
//!
//! Matrices hold raw residues and a single [`PrimeModulus`]. All operations
//! return fresh values; inputs are never modified.

use std::fmt::Write as _;
use std::ops::Range;

use thiserror::Error;

use crate::field::{FieldElement, PrimeModulus};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("row {row} has length {len}, expected {expected}")]
    Ragged { row: usize, len: usize, expected: usize },
    #[error("block width {width} must equal the number of basis vectors {rows}")]
    BlockShape { width: usize, rows: usize },
    #[error("block {start}..{end} exceeds {cols} columns")]
    BlockOutOfRange { start: usize, end: usize, cols: usize },
    #[error("malformed matrix dump at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MatrixFq {
    modulus: PrimeModulus,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl MatrixFq {
    pub fn zero(modulus: PrimeModulus, rows: usize, cols: usize) -> Self {
        MatrixFq { modulus, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(modulus: PrimeModulus, n: usize) -> Self {
        let mut m = Self::zero(modulus, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % modulus.value();
        }
        m
    }

    /// Builds a matrix from rows of residues (reduced on the way in).
    pub fn from_rows<R: AsRef<[u64]>>(modulus: PrimeModulus, rows: &[R], cols: usize) -> Result<Self, LinalgError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(LinalgError::Ragged { row: i, len: r.len(), expected: cols });
            }
            data.extend(r.iter().map(|&v| modulus.reduce(v)));
        }
        Ok(MatrixFq { modulus, rows: rows.len(), cols, data })
    }

    pub fn from_elements(modulus: PrimeModulus, rows: &[Vec<FieldElement>], cols: usize) -> Result<Self, LinalgError> {
        let raw: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|e| e.residue()).collect()).collect();
        Self::from_rows(modulus, &raw, cols)
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn raw(&self, i: usize, j: usize) -> u64 {
        self.data[i * self.cols + j]
    }

    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        self.modulus.element(self.raw(i, j))
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    fn row_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<u64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.modulus, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.raw(i, j);
            }
        }
        t
    }

    /// Submatrix with the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for i in 0..self.rows {
            data.extend(cols.iter().map(|&j| self.raw(i, j)));
        }
        MatrixFq { modulus: self.modulus, rows: self.rows, cols: cols.len(), data }
    }

    /// `v^T M` for a length-`rows` vector `v`.
    pub fn left_mul(&self, v: &[u64]) -> Vec<u64> {
        assert_eq!(v.len(), self.rows);
        let q = self.modulus;
        let mut out = vec![0; self.cols];
        for (i, &c) in v.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (o, &m) in out.iter_mut().zip(self.row(i)) {
                *o = q.add(*o, q.mul(c, m));
            }
        }
        out
    }

    /// `M c` for a length-`cols` vector `c`.
    pub fn right_mul(&self, c: &[u64]) -> Vec<u64> {
        assert_eq!(c.len(), self.cols);
        let q = self.modulus;
        (0..self.rows).map(|i| self.row(i).iter().zip(c).fold(0, |acc, (&m, &x)| q.add(acc, q.mul(m, x)))).collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn scale_row(&mut self, i: usize, s: u64) {
        let q = self.modulus;
        for v in self.row_mut(i) {
            *v = q.mul(*v, s);
        }
    }

    /// `row[target] -= factor * row[source]`
    fn sub_row_multiple(&mut self, target: usize, source: usize, factor: u64) {
        if factor == 0 {
            return;
        }
        let q = self.modulus;
        let cols = self.cols;
        let (src, dst) = if source < target {
            let (lo, hi) = self.data.split_at_mut(target * cols);
            (&lo[source * cols..(source + 1) * cols], &mut hi[..cols])
        } else {
            let (lo, hi) = self.data.split_at_mut(source * cols);
            (&hi[..cols], &mut lo[target * cols..(target + 1) * cols])
        };
        for (d, &s) in dst.iter_mut().zip(src) {
            *d = q.sub(*d, q.mul(factor, s));
        }
    }

    /// Reduced row echelon form with unit pivots.
    pub fn rref(&self) -> Rref {
        let q = self.modulus;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| m.raw(i, c) != 0) else { continue };
            m.swap_rows(r, p);
            let inv = q.inv(m.raw(r, c)).expect("pivot is nonzero");
            m.scale_row(r, inv);
            for i in 0..m.rows {
                if i != r {
                    let f = m.raw(i, c);
                    m.sub_row_multiple(i, r, f);
                }
            }
            pivots.push(c);
            r += 1;
        }
        Rref { rank: pivots.len(), matrix: m, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Basis of `{c : M c = 0}` in canonical form.
    pub fn right_kernel(&self) -> KernelBasis {
        let Rref { matrix, pivots, .. } = self.rref();
        let q = self.modulus;
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut vectors = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = vec![0; self.cols];
            v[f] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = q.neg(matrix.raw(r, f));
            }
            vectors.push(v);
        }
        let basis = MatrixFq::from_rows(q, &vectors, self.cols).expect("uniform rows");
        KernelBasis::canonical_from(basis)
    }

    /// Basis of `{v : v^T M = 0}` in canonical form.
    pub fn left_kernel(&self) -> KernelBasis {
        self.transpose().right_kernel()
    }

    /// One row per line, space-separated residues.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    pub fn parse_dump(modulus: PrimeModulus, text: &str) -> Result<Self, LinalgError> {
        let mut rows: Vec<Vec<u64>> = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row = line
                .split_whitespace()
                .map(|t| t.parse::<u64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| LinalgError::Parse { line: n + 1, reason: e.to_string() })?;
            if let Some(v) = row.iter().find(|&&v| v >= modulus.value()) {
                return Err(LinalgError::Parse { line: n + 1, reason: format!("{v} is not a canonical residue") });
            }
            rows.push(row);
        }
        let cols = rows.first().map_or(0, Vec::len);
        Self::from_rows(modulus, &rows, cols)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub matrix: MatrixFq,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// A list of linearly independent vectors, stored as the rows of a matrix.
///
/// Kernels produced by [`MatrixFq::left_kernel`] and [`MatrixFq::right_kernel`]
/// are in canonical form (the RREF of the basis matrix), so two kernels are
/// equal as subspaces exactly when they compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelBasis {
    basis: MatrixFq,
}

impl KernelBasis {
    /// Wraps basis rows as given. The caller guarantees independence.
    pub fn from_matrix(basis: MatrixFq) -> Self {
        KernelBasis { basis }
    }

    fn canonical_from(basis: MatrixFq) -> Self {
        let rref = basis.rref();
        let mut m = rref.matrix;
        m.rows = rref.rank;
        m.data.truncate(rref.rank * m.cols);
        KernelBasis { basis: m }
    }

    pub fn canonical(&self) -> Self {
        Self::canonical_from(self.basis.clone())
    }

    pub fn is_canonical(&self) -> bool {
        self.basis.rref().matrix == self.basis
    }

    pub fn matrix(&self) -> &MatrixFq {
        &self.basis
    }

    pub fn modulus(&self) -> PrimeModulus {
        self.basis.modulus
    }

    pub fn dim(&self) -> usize {
        self.basis.rows
    }

    pub fn ambient(&self) -> usize {
        self.basis.cols
    }

    pub fn vector(&self, i: usize) -> &[u64] {
        self.basis.row(i)
    }

    pub fn vectors(&self) -> Vec<Vec<u64>> {
        self.basis.row_vecs()
    }

    /// Membership of `v` in the span, by a rank test.
    pub fn contains(&self, v: &[u64]) -> bool {
        if v.len() != self.ambient() {
            return false;
        }
        let mut rows = self.vectors();
        rows.push(v.to_vec());
        let m = MatrixFq::from_rows(self.modulus(), &rows, self.ambient()).expect("uniform rows");
        m.rank() == self.basis.rank()
    }

    pub fn same_span(&self, other: &KernelBasis) -> bool {
        self.canonical() == other.canonical()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockStage {
    LowerTriangular,
    Diagonal,
}

/// Outcome of a block elimination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockReduction {
    pub basis: KernelBasis,
    /// Absolute column placed at each diagonal position of the block.
    pub column_order: Vec<usize>,
    /// Whether each diagonal position received a pivot.
    pub pivoted: Vec<bool>,
    /// Set when some diagonal position received no pivot.
    pub singular: bool,
}

/// Row operations that bring an `l x l` column block of an `l`-row basis into
/// lower-triangular and then diagonal shape.
///
/// When the natural column for a diagonal position has no usable pivot, another
/// unused column of the block takes its place; the permutation is kept in
/// `column_order`. A position with no usable column at all is left without a
/// pivot and `singular` is set.
#[derive(Debug, Clone)]
pub struct BlockEliminator {
    matrix: MatrixFq,
    order: Vec<usize>,
    has_pivot: Vec<bool>,
    triangular: bool,
}

impl BlockEliminator {
    pub fn new(basis: &KernelBasis, block: Range<usize>) -> Result<Self, LinalgError> {
        let m = basis.matrix();
        if block.end > m.cols || block.start > block.end {
            return Err(LinalgError::BlockOutOfRange { start: block.start, end: block.end, cols: m.cols });
        }
        if block.len() != m.rows {
            return Err(LinalgError::BlockShape { width: block.len(), rows: m.rows });
        }
        Ok(BlockEliminator {
            matrix: m.clone(),
            order: block.collect(),
            has_pivot: vec![false; m.rows],
            triangular: false,
        })
    }

    pub fn matrix(&self) -> &MatrixFq {
        &self.matrix
    }

    /// Row `i` ends up zero in the block columns placed after position `i`.
    pub fn lower_triangular(&mut self) {
        let q = self.matrix.modulus;
        let w = self.order.len();
        for k in (0..w).rev() {
            let usable = |m: &MatrixFq, col: usize| (0..=k).rev().find(|&i| m.raw(i, col) != 0);
            let mut choice = usable(&self.matrix, self.order[k]).map(|r| (k, r));
            if choice.is_none() {
                choice = (0..k).find_map(|j| usable(&self.matrix, self.order[j]).map(|r| (j, r)));
            }
            let Some((pos, row)) = choice else {
                self.has_pivot[k] = false;
                continue;
            };
            self.order.swap(pos, k);
            let col = self.order[k];
            self.matrix.swap_rows(row, k);
            let inv = q.inv(self.matrix.raw(k, col)).expect("pivot is nonzero");
            self.matrix.scale_row(k, inv);
            for i in 0..k {
                let f = self.matrix.raw(i, col);
                self.matrix.sub_row_multiple(i, k, f);
            }
            self.has_pivot[k] = true;
        }
        self.triangular = true;
    }

    /// Clears below-diagonal entries; runs the triangular pass first if needed.
    pub fn diagonalize(&mut self) {
        if !self.triangular {
            self.lower_triangular();
        }
        for k in 0..self.order.len() {
            if !self.has_pivot[k] {
                continue;
            }
            let col = self.order[k];
            for i in k + 1..self.order.len() {
                let f = self.matrix.raw(i, col);
                self.matrix.sub_row_multiple(i, k, f);
            }
        }
    }

    pub fn is_singular(&self) -> bool {
        self.triangular && self.has_pivot.iter().any(|p| !p)
    }

    pub fn finish(self) -> BlockReduction {
        let singular = self.is_singular();
        BlockReduction {
            basis: KernelBasis::from_matrix(self.matrix),
            column_order: self.order,
            pivoted: self.has_pivot,
            singular,
        }
    }
}

/// Transforms the `block` columns of `basis` as requested, preserving its span.
pub fn eliminate_block(
    basis: &KernelBasis,
    block: Range<usize>,
    stage: BlockStage,
) -> Result<BlockReduction, LinalgError> {
    let mut e = BlockEliminator::new(basis, block)?;
    match stage {
        BlockStage::LowerTriangular => e.lower_triangular(),
        BlockStage::Diagonal => e.diagonalize(),
    }
    Ok(e.finish())
}
