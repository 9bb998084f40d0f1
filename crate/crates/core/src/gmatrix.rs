//! Dense matrices over GF(2^k), circulants, and the regular representation
//! `w ↦ M(RG, w)` with entry (i, j) equal to the coefficient of `g_i⁻¹ g_j`.

use std::fmt;

use thiserror::Error;

use crate::algebra::{AlgebraElement, GroupAlgebra};
use crate::gf2k::{FieldElement, FieldSpec};
use crate::groups::GroupSpec;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("dimension mismatch: {0}x{0} against {1}x{1}")]
    Dimension(usize, usize),
    #[error("matrices are over different fields")]
    Field,
    #[error("expected an 8x8 matrix, found {0}x{0}")]
    NotEightByEight(usize),
    #[error("block structure violated: {0}")]
    BlockStructure(String),
}

/// Square matrix over a binary field, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    n: usize,
    field: FieldSpec,
    entries: Vec<FieldElement>,
}

impl Matrix {
    pub fn zeros(field: FieldSpec, n: usize) -> Self {
        Matrix {
            n,
            field,
            entries: vec![FieldElement::ZERO; n * n],
        }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n);
        for i in 0..n {
            m.set(i, i, FieldElement::ONE);
        }
        m
    }

    /// Builds a matrix from rows; panics if they are not square.
    pub fn from_rows(field: FieldSpec, rows: &[Vec<FieldElement>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "rows must form a square");
        Matrix {
            n,
            field,
            entries: rows.concat(),
        }
    }

    /// `circ(a_0, ..., a_{n-1})`: row `i` is the first row shifted right `i` places.
    pub fn circulant(field: FieldSpec, first_row: &[FieldElement]) -> Self {
        let n = first_row.len();
        assert!(n > 0, "circulant needs a nonempty first row");
        let mut m = Self::zeros(field, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, first_row[(j + n - i) % n]);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> FieldElement {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: FieldElement) {
        self.entries[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[FieldElement] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// True if every row is the right shift of the one above.
    pub fn is_circulant(&self) -> bool {
        let n = self.n;
        (0..n).all(|i| (0..n).all(|j| self.get(i, j) == self.get(0, (j + n - i) % n)))
    }

    fn conform(&self, other: &Matrix) -> Result<(), MatrixError> {
        if self.n != other.n {
            return Err(MatrixError::Dimension(self.n, other.n));
        }
        if self.field != other.field {
            return Err(MatrixError::Field);
        }
        Ok(())
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        self.conform(other)?;
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| self.field.add(a, b))
            .collect();
        Ok(Matrix {
            n: self.n,
            field: self.field,
            entries,
        })
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix, MatrixError> {
        self.conform(other)?;
        let n = self.n;
        let f = &self.field;
        let mut out = Matrix::zeros(self.field, n);
        for i in 0..n {
            for l in 0..n {
                let a = self.get(i, l);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let idx = i * n + j;
                    out.entries[idx] = f.add(out.entries[idx], f.mul(a, other.get(l, j)));
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> Matrix {
        let n = self.n;
        let mut out = Matrix::zeros(self.field, n);
        for i in 0..n {
            for j in 0..n {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Rank by forward elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.eliminate(None)
    }

    /// Gauss-Jordan inverse, `None` when singular.
    pub fn invert(&self) -> Option<Matrix> {
        let mut m = self.clone();
        let mut inv = Matrix::identity(self.field, self.n);
        (m.eliminate(Some(&mut inv)) == self.n).then_some(inv)
    }

    /// Reduces `self` to reduced row echelon form, mirroring row operations
    /// onto `aug` when given. Returns the rank. Pivots are the first nonzero
    /// entry in each column.
    fn eliminate(&mut self, mut aug: Option<&mut Matrix>) -> usize {
        let n = self.n;
        let f = self.field;
        let mut rank = 0;
        for col in 0..n {
            let Some(p) = (rank..n).find(|&r| !self.get(r, col).is_zero()) else {
                continue;
            };
            self.swap_rows(p, rank);
            if let Some(a) = aug.as_deref_mut() {
                a.swap_rows(p, rank);
            }
            let s = f.inv(self.get(rank, col)).expect("pivot is nonzero");
            self.scale_row(rank, s);
            if let Some(a) = aug.as_deref_mut() {
                a.scale_row(rank, s);
            }
            for r in 0..n {
                let c = self.get(r, col);
                if r != rank && !c.is_zero() {
                    self.add_row_multiple(r, rank, c);
                    if let Some(a) = aug.as_deref_mut() {
                        a.add_row_multiple(r, rank, c);
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.n {
                self.entries.swap(a * self.n + j, b * self.n + j);
            }
        }
    }

    fn scale_row(&mut self, r: usize, s: FieldElement) {
        for j in 0..self.n {
            let v = self.field.mul(self.get(r, j), s);
            self.set(r, j, v);
        }
    }

    /// row[dst] += c * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, c: FieldElement) {
        for j in 0..self.n {
            let v = self
                .field
                .add(self.get(dst, j), self.field.mul(c, self.get(src, j)));
            self.set(dst, j, v);
        }
    }

    /// The `size`×`size` block whose top-left corner is at (`row`, `col`).
    pub fn block(&self, row: usize, col: usize, size: usize) -> Matrix {
        let mut out = Matrix::zeros(self.field, size);
        for i in 0..size {
            for j in 0..size {
                out.set(i, j, self.get(row + i, col + j));
            }
        }
        out
    }

    /// Rows of hex entries, one row per line.
    pub fn to_hex_rows(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(|e| e.to_string()).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex_rows())
    }
}

/// The matrix of G: entry (i, j) is the index of `g_i⁻¹ g_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupMatrix {
    n: usize,
    entries: Vec<usize>,
}

impl GroupMatrix {
    pub fn new(group: &GroupSpec) -> Self {
        let n = group.order();
        let entries = (0..n)
            .flat_map(|i| (0..n).map(move |j| group.mul_idx(group.inv_idx(i), j)))
            .collect();
        GroupMatrix { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> usize {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }
}

pub fn group_matrix(group: &GroupSpec) -> GroupMatrix {
    GroupMatrix::new(group)
}

/// σ(w) = M(RG, w).
pub fn rg_matrix(alg: &GroupAlgebra, w: &AlgebraElement) -> Matrix {
    let group = alg.group();
    let n = group.order();
    let mut m = Matrix::zeros(*alg.field(), n);
    for i in 0..n {
        let gi_inv = group.inv_idx(i);
        for j in 0..n {
            m.set(i, j, w.coeff(group.mul_idx(gi_inv, j)));
        }
    }
    m
}

/// The three circulant blocks of σ(κ) for κ ∈ F_{2^k}Q_8 in the canonical
/// listing: σ(κ) = [[A, B], [C, Aᵀ]].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Q8Blocks {
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
}

/// Splits an 8×8 RG-matrix over Q_8 and checks the expected pattern:
/// A, B, C circulant, bottom-right = Aᵀ, and C = circ(b_2, b_1, b_0, b_3).
pub fn q8_block_decompose(m: &Matrix) -> Result<Q8Blocks, MatrixError> {
    if m.dim() != 8 {
        return Err(MatrixError::NotEightByEight(m.dim()));
    }
    let a = m.block(0, 0, 4);
    let b = m.block(0, 4, 4);
    let c = m.block(4, 0, 4);
    let d = m.block(4, 4, 4);
    for (name, blk) in [("A", &a), ("B", &b), ("C", &c)] {
        if !blk.is_circulant() {
            return Err(MatrixError::BlockStructure(format!(
                "{name} is not circulant"
            )));
        }
    }
    if d != a.transpose() {
        return Err(MatrixError::BlockStructure(
            "bottom-right block is not the transpose of A".into(),
        ));
    }
    let bs = b.row(0);
    let expect_c = Matrix::circulant(*m.field(), &[bs[2], bs[1], bs[0], bs[3]]);
    if c != expect_c {
        return Err(MatrixError::BlockStructure(
            "C is not circ(b_2, b_1, b_0, b_3)".into(),
        ));
    }
    Ok(Q8Blocks { a, b, c })
}
