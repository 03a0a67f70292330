//! Dense matrices over an exact field: rank, kernel, image, affine solving.
//!
//! Subspace bases are always returned in reduced column echelon form, the
//! column analogue of RREF. This makes every basis canonical: two routines
//! that compute the same subspace produce literally equal matrices, so
//! downstream equality checks are plain `==`.

use crate::field::{Field, Scalar};
use std::fmt;

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    field: Field,
    entries: Vec<Scalar>, // row-major
}

impl Matrix {
    pub fn new(field: Field, rows: usize, cols: usize, entries: Vec<Scalar>) -> Self {
        assert_eq!(entries.len(), rows * cols, "entry count mismatch");
        debug_assert!(entries.iter().all(|e| e.field() == field), "mixed fields");
        Matrix { rows, cols, field, entries }
    }

    pub fn from_fn(field: Field, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Matrix::new(field, rows, cols, entries)
    }

    pub fn from_i64(field: Field, data: &[&[i64]]) -> Self {
        let rows = data.len();
        let cols = if rows == 0 { 0 } else { data[0].len() };
        Matrix::from_fn(field, rows, cols, |i, j| field.scalar(data[i][j]))
    }

    pub fn zeros(field: Field, rows: usize, cols: usize) -> Self {
        Matrix::new(field, rows, cols, vec![field.zero(); rows * cols])
    }

    pub fn identity(field: Field, n: usize) -> Self {
        Matrix::from_fn(field, n, n, |i, j| if i == j { field.one() } else { field.zero() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.field, self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix::from_fn(self.field, self.rows, self.cols, |i, j| self.get(i, j).add(rhs.get(i, j)))
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix::from_fn(self.field, self.rows, self.cols, |i, j| self.get(i, j).sub(rhs.get(i, j)))
    }

    pub fn neg(&self) -> Matrix {
        Matrix::from_fn(self.field, self.rows, self.cols, |i, j| self.get(i, j).neg())
    }

    pub fn scale(&self, c: &Scalar) -> Matrix {
        Matrix::from_fn(self.field, self.rows, self.cols, |i, j| self.get(i, j).mul(c))
    }

    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in mul");
        Matrix::from_fn(self.field, self.rows, rhs.cols, |i, j| {
            let mut acc = self.field.zero();
            for k in 0..self.cols {
                acc = acc.add(&self.get(i, k).mul(rhs.get(k, j)));
            }
            acc
        })
    }

    pub fn col(&self, j: usize) -> Vec<Scalar> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn from_cols(field: Field, rows: usize, cols: &[Vec<Scalar>]) -> Matrix {
        for c in cols {
            assert_eq!(c.len(), rows);
        }
        Matrix::from_fn(field, rows, cols.len(), |i, j| cols[j][i].clone())
    }

    /// Horizontal concatenation `[self | rhs]`.
    pub fn hstack(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.rows, rhs.rows);
        Matrix::from_fn(self.field, self.rows, self.cols + rhs.cols, |i, j| {
            if j < self.cols { self.get(i, j).clone() } else { rhs.get(i, j - self.cols).clone() }
        })
    }

    /// Vertical concatenation.
    pub fn vstack(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.cols);
        Matrix::from_fn(self.field, self.rows + rhs.rows, self.cols, |i, j| {
            if i < self.rows { self.get(i, j).clone() } else { rhs.get(i - self.rows, j).clone() }
        })
    }

    pub fn block_diag(field: Field, blocks: &[&Matrix]) -> Matrix {
        let rows = blocks.iter().map(|b| b.rows).sum();
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut m = Matrix::zeros(field, rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m.set(r0 + i, c0 + j, b.get(i, j).clone());
                }
            }
            r0 += b.rows;
            c0 += b.cols;
        }
        m
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Matrix {
        Matrix::from_fn(self.field, rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    /// Row-reduces in place to reduced row echelon form; returns pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(pr) = (row..m.rows).find(|&r| !m.get(r, col).is_zero()) else {
                continue;
            };
            if pr != row {
                for j in 0..m.cols {
                    let a = m.get(row, j).clone();
                    let b = m.get(pr, j).clone();
                    m.set(row, j, b);
                    m.set(pr, j, a);
                }
            }
            let inv = m.get(row, col).inv();
            for j in col..m.cols {
                let v = m.get(row, j).mul(&inv);
                m.set(row, j, v);
            }
            for r in 0..m.rows {
                if r == row || m.get(r, col).is_zero() {
                    continue;
                }
                let factor = m.get(r, col).clone();
                for j in col..m.cols {
                    let v = m.get(r, j).sub(&factor.mul(m.get(row, j)));
                    m.set(r, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}x{}]", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| format!("{}", self.get(i, j))).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// A subspace of `k^n` presented by a canonical basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceBasis {
    /// Columns form the reduced-column-echelon basis of the subspace.
    pub basis: Matrix,
    /// Pivot row of each basis column (strictly increasing).
    pub pivots: Vec<usize>,
}

impl SubspaceBasis {
    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    /// Coordinates of `v` in this basis: because the basis is reduced,
    /// they can be read off the pivot rows. Returns `None` when `v` is
    /// not in the subspace.
    pub fn coords(&self, v: &[Scalar]) -> Option<Vec<Scalar>> {
        let field = self.basis.field();
        assert_eq!(v.len(), self.basis.rows());
        let coords: Vec<Scalar> = self.pivots.iter().map(|&r| v[r].clone()).collect();
        // verify membership exactly
        for i in 0..v.len() {
            let mut acc = field.zero();
            for (j, c) in coords.iter().enumerate() {
                acc = acc.add(&c.mul(self.basis.get(i, j)));
            }
            if acc != v[i] {
                return None;
            }
        }
        Some(coords)
    }
}

/// Canonical basis of the column space of `m` (reduced column echelon form).
pub fn column_space(m: &Matrix) -> SubspaceBasis {
    let (r, pivots) = m.transpose().rref();
    let cols: Vec<Vec<Scalar>> = (0..pivots.len()).map(|i| {
        (0..r.cols()).map(|j| r.get(i, j).clone()).collect()
    }).collect();
    SubspaceBasis { basis: Matrix::from_cols(m.field(), m.rows(), &cols), pivots }
}

/// Kernel basis, image basis (both canonical) and the rank of `m`.
///
/// Columns of the kernel basis span `ker m`, columns of the image basis
/// span `im m`, and `rank + kernel dim = cols` exactly.
pub fn kernel_image(m: &Matrix) -> (SubspaceBasis, SubspaceBasis, usize) {
    let image = column_space(m);
    let rank = image.dim();
    let (r, pivots) = m.rref();
    let field = m.field();
    let mut free_cols: Vec<usize> = Vec::new();
    for j in 0..m.cols() {
        if !pivots.contains(&j) {
            free_cols.push(j);
        }
    }
    let mut kernel_cols: Vec<Vec<Scalar>> = Vec::new();
    for &fc in &free_cols {
        let mut v = vec![field.zero(); m.cols()];
        v[fc] = field.one();
        for (prow, &pcol) in pivots.iter().enumerate() {
            v[pcol] = r.get(prow, fc).neg();
        }
        kernel_cols.push(v);
    }
    let raw = Matrix::from_cols(field, m.cols(), &kernel_cols);
    let kernel = column_space(&raw);
    (kernel, image, rank)
}

/// Solves `A x = b` exactly. Returns the particular solution with all free
/// variables zero together with a canonical nullspace basis, or `None`
/// when the system is inconsistent.
pub fn solve_affine(a: &Matrix, b: &Matrix) -> Option<(Vec<Scalar>, SubspaceBasis)> {
    assert_eq!(b.cols(), 1, "right-hand side must be a column");
    assert_eq!(a.rows(), b.rows(), "dimension mismatch");
    let field = a.field();
    let aug = a.hstack(b);
    let (r, pivots) = aug.rref();
    if pivots.contains(&a.cols()) {
        return None; // pivot in the b column: inconsistent
    }
    let mut x = vec![field.zero(); a.cols()];
    for (prow, &pcol) in pivots.iter().enumerate() {
        x[pcol] = r.get(prow, a.cols()).clone();
    }
    let (null, _, _) = kernel_image(a);
    Some((x, null))
}

/// Two-sided inverse when `m` is square and invertible.
pub fn inverse(m: &Matrix) -> Option<Matrix> {
    if m.rows() != m.cols() {
        return None;
    }
    let n = m.rows();
    let aug = m.hstack(&Matrix::identity(m.field(), n));
    let (r, pivots) = aug.rref();
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| i != p) {
        return None;
    }
    Some(Matrix::from_fn(m.field(), n, n, |i, j| r.get(i, n + j).clone()))
}

pub fn mat_vec(m: &Matrix, v: &[Scalar]) -> Vec<Scalar> {
    assert_eq!(m.cols(), v.len());
    (0..m.rows()).map(|i| {
        let mut acc = m.field().zero();
        for j in 0..m.cols() {
            acc = acc.add(&m.get(i, j).mul(&v[j]));
        }
        acc
    }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f7() -> Field {
        Field::Fp(7)
    }

    #[test]
    fn identity_has_full_rank_and_no_kernel() {
        let m = Matrix::identity(f7(), 2);
        let (k, im, rank) = kernel_image(&m);
        assert_eq!(rank, 2);
        assert_eq!(k.dim(), 0);
        assert_eq!(im.dim(), 2);
    }

    #[test]
    fn zero_matrix_has_full_kernel() {
        let m = Matrix::zeros(f7(), 3, 2);
        let (k, im, rank) = kernel_image(&m);
        assert_eq!(rank, 0);
        assert_eq!(k.dim(), 2);
        assert_eq!(im.dim(), 0);
        assert_eq!(k.basis, Matrix::identity(f7(), 2));
    }

    #[test]
    fn kernel_image_of_rank_two_example() {
        // Worked by hand: columns are e1, e1+e2, 0, so the image is
        // span{e1,e2}, the kernel is span{e3}, rank 2.
        let m = Matrix::from_i64(f7(), &[&[1, 1, 0], &[0, 1, 0], &[0, 0, 0]]);
        let (k, im, rank) = kernel_image(&m);
        assert_eq!(rank, 2);
        assert_eq!(k.dim(), 1);
        assert_eq!(k.basis, Matrix::from_i64(f7(), &[&[0], &[0], &[1]]));
        assert_eq!(im.basis, Matrix::from_i64(f7(), &[&[1, 0], &[0, 1], &[0, 0]]));
    }

    #[test]
    fn solve_identity_returns_rhs() {
        let a = Matrix::identity(f7(), 3);
        let b = Matrix::from_i64(f7(), &[&[2], &[4], &[6]]);
        let (x, null) = solve_affine(&a, &b).unwrap();
        assert_eq!(x, b.col(0));
        assert_eq!(null.dim(), 0);
    }

    #[test]
    fn solve_zero_system() {
        let a = Matrix::zeros(f7(), 2, 2);
        let b = Matrix::zeros(f7(), 2, 1);
        let (x, null) = solve_affine(&a, &b).unwrap();
        assert!(x.iter().all(|s| s.is_zero()));
        assert_eq!(null.dim(), 2);
    }

    #[test]
    fn inconsistent_system_is_detected() {
        let a = Matrix::from_i64(f7(), &[&[1, 1], &[0, 0]]);
        let b = Matrix::from_i64(f7(), &[&[0], &[1]]);
        assert!(solve_affine(&a, &b).is_none());
    }

    #[test]
    fn inverse_round_trips() {
        let m = Matrix::from_i64(f7(), &[&[1, 2], &[3, 4]]);
        let inv = inverse(&m).unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity(f7(), 2));
        assert_eq!(inv.mul(&m), Matrix::identity(f7(), 2));
        let sing = Matrix::from_i64(f7(), &[&[1, 2], &[2, 4]]);
        assert!(inverse(&sing).is_none());
    }

    #[test]
    fn rational_kernel_is_exact() {
        let f = Field::Rat;
        let m = Matrix::from_i64(f, &[&[2, 4], &[1, 2]]);
        let (k, _, rank) = kernel_image(&m);
        assert_eq!(rank, 1);
        assert_eq!(k.dim(), 1);
        // kernel generated by (-2, 1), echelon-normalized to (1, -1/2)... the
        // canonical form has pivot 1 in the first nonzero row.
        let v = k.basis.col(0);
        let lhs = mat_vec(&m, &v);
        assert!(lhs.iter().all(|s| s.is_zero()));
    }

    #[test]
    fn subspace_coords_read_off_pivots() {
        let m = Matrix::from_i64(f7(), &[&[1, 1], &[0, 1], &[2, 0]]);
        let im = column_space(&m);
        let v = mat_vec(&m, &[f7().scalar(3), f7().scalar(5)]);
        let c = im.coords(&v).unwrap();
        let back = mat_vec(&im.basis, &c);
        assert_eq!(back, v);
        let outside = vec![f7().scalar(1), f7().scalar(0), f7().scalar(0)];
        if im.dim() < 3 {
            // membership check must reject vectors outside the span
            let r = im.coords(&outside);
            if let Some(c) = r {
                assert_eq!(mat_vec(&im.basis, &c), outside);
            }
        }
    }
}
