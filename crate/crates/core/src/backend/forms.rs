//! Matrices of homogeneous binary forms: the morphism substrate for sums
//! of line bundles on the projective line.
//!
//! A map `⊕O(a_j) -> ⊕O(b_i)` is a matrix whose `(i,j)` entry is a
//! homogeneous form of degree `b_i - a_j` in `s, t` (the zero space when
//! that degree is negative). Coefficients are stored with the power of `s`
//! descending: `coeffs[u]` multiplies `s^(d-u) t^u`.

use crate::field::{Field, Scalar};
use crate::matrix::Matrix;

/// Degree of a form entry from row/column twists; `None` when negative.
fn entry_degree(dst: i64, src: i64) -> Option<usize> {
    let d = dst - src;
    if d >= 0 { Some(d as usize) } else { None }
}

fn conv(field: Field, a: &[Scalar], b: &[Scalar]) -> Vec<Scalar> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![field.zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormMat {
    pub field: Field,
    /// Twists of the target summands, descending.
    pub dst_twists: Vec<i64>,
    /// Twists of the source summands, descending.
    pub src_twists: Vec<i64>,
    /// Row-major entries; `entries[i*cols+j]` has length `dst[i]-src[j]+1`
    /// or zero length when the degree is negative or the entry is zero.
    pub entries: Vec<Vec<Scalar>>,
}

impl FormMat {
    pub fn zero(field: Field, dst: &[i64], src: &[i64]) -> Self {
        let entries = (0..dst.len() * src.len())
            .map(|k| {
                let (i, j) = (k / src.len().max(1), k % src.len().max(1));
                match entry_degree(dst[i], src[j]) {
                    Some(d) => vec![field.zero(); d + 1],
                    None => Vec::new(),
                }
            })
            .collect();
        FormMat { field, dst_twists: dst.to_vec(), src_twists: src.to_vec(), entries }
    }

    pub fn identity(field: Field, twists: &[i64]) -> Self {
        let mut m = FormMat::zero(field, twists, twists);
        for i in 0..twists.len() {
            m.entries[i * twists.len() + i] = vec![field.one()];
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.dst_twists.len()
    }

    pub fn cols(&self) -> usize {
        self.src_twists.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &[Scalar] {
        &self.entries[i * self.cols() + j]
    }

    pub fn set_entry(&mut self, i: usize, j: usize, coeffs: Vec<Scalar>) {
        let cols = self.cols();
        if let Some(d) = entry_degree(self.dst_twists[i], self.src_twists[j]) {
            assert!(coeffs.len() == d + 1 || coeffs.is_empty(), "coefficient count mismatch");
        } else {
            assert!(coeffs.iter().all(|c| c.is_zero()), "nonzero form of negative degree");
        }
        self.entries[i * cols + j] = coeffs;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.iter().all(|c| c.is_zero()))
    }

    pub fn add(&self, rhs: &FormMat) -> FormMat {
        assert_eq!(self.dst_twists, rhs.dst_twists);
        assert_eq!(self.src_twists, rhs.src_twists);
        let mut out = self.clone();
        for (e, r) in out.entries.iter_mut().zip(rhs.entries.iter()) {
            if e.is_empty() {
                *e = r.clone();
            } else if !r.is_empty() {
                for (a, b) in e.iter_mut().zip(r.iter()) {
                    *a = a.add(b);
                }
            }
        }
        out
    }

    pub fn neg(&self) -> FormMat {
        let mut out = self.clone();
        for e in out.entries.iter_mut() {
            for c in e.iter_mut() {
                *c = c.neg();
            }
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> FormMat {
        let mut out = self.clone();
        for e in out.entries.iter_mut() {
            for x in e.iter_mut() {
                *x = x.mul(c);
            }
        }
        out
    }

    /// Matrix product `self ∘ rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &FormMat) -> FormMat {
        assert_eq!(self.src_twists, rhs.dst_twists, "twist mismatch in composition");
        let mut out = FormMat::zero(self.field, &self.dst_twists, &rhs.src_twists);
        for i in 0..self.rows() {
            for j in 0..rhs.cols() {
                let mut acc: Vec<Scalar> = Vec::new();
                for k in 0..self.cols() {
                    let p = conv(self.field, self.entry(i, k), rhs.entry(k, j));
                    if p.is_empty() {
                        continue;
                    }
                    if acc.is_empty() {
                        acc = p;
                    } else {
                        for (a, b) in acc.iter_mut().zip(p.iter()) {
                            *a = a.add(b);
                        }
                    }
                }
                if !acc.is_empty() {
                    out.set_entry(i, j, acc);
                }
            }
        }
        out
    }

    /// Evaluation of every entry at a point `(s0, t0)`, producing the
    /// fiber map in the fixed trivializations.
    pub fn eval(&self, s0: &Scalar, t0: &Scalar) -> Matrix {
        Matrix::from_fn(self.field, self.rows(), self.cols(), |i, j| {
            eval_form(self.field, self.entry(i, j), s0, t0)
        })
    }

    /// The induced map on global sections after twisting by `O(n)`:
    /// degree-`(a_j+n)` forms to degree-`(b_i+n)` forms, blockwise.
    pub fn section_map(&self, n: i64) -> Matrix {
        let src_dims: Vec<usize> = self.src_twists.iter().map(|a| section_dim(*a, n)).collect();
        let dst_dims: Vec<usize> = self.dst_twists.iter().map(|b| section_dim(*b, n)).collect();
        let total_src: usize = src_dims.iter().sum();
        let total_dst: usize = dst_dims.iter().sum();
        let mut m = Matrix::zeros(self.field, total_dst, total_src);
        let mut col0 = 0;
        for (j, &sc) in src_dims.iter().enumerate() {
            let mut row0 = 0;
            for (i, &dc) in dst_dims.iter().enumerate() {
                let phi = self.entry(i, j);
                if !phi.is_empty() {
                    for r in 0..dc {
                        for c in 0..sc {
                            if r >= c && r - c < phi.len() {
                                m.set(row0 + r, col0 + c, phi[r - c].clone());
                            }
                        }
                    }
                }
                row0 += dc;
            }
            col0 += sc;
        }
        m
    }

    /// Transpose with negated twists: the dual map. Twist lists stay
    /// descending, so summand order reverses on both sides.
    pub fn dual(&self) -> FormMat {
        let dst: Vec<i64> = self.src_twists.iter().rev().map(|a| -a).collect();
        let src: Vec<i64> = self.dst_twists.iter().rev().map(|b| -b).collect();
        let (rx, ry) = (self.cols(), self.rows());
        let mut out = FormMat::zero(self.field, &dst, &src);
        for i in 0..rx {
            for j in 0..ry {
                let orig = self.entry(ry - 1 - j, rx - 1 - i).to_vec();
                if !orig.is_empty() {
                    out.set_entry(i, j, orig);
                }
            }
        }
        out
    }
}

pub fn eval_form(field: Field, coeffs: &[Scalar], s0: &Scalar, t0: &Scalar) -> Scalar {
    if coeffs.is_empty() {
        return field.zero();
    }
    let d = coeffs.len() - 1;
    let mut acc = field.zero();
    for (u, c) in coeffs.iter().enumerate() {
        let term = c.mul(&s0.pow((d - u) as u64)).mul(&t0.pow(u as u64));
        acc = acc.add(&term);
    }
    acc
}

/// `dim H^0(P^1, O(a+n))`
pub fn section_dim(a: i64, n: i64) -> usize {
    let d = a + n;
    if d >= 0 { (d + 1) as usize } else { 0 }
}

/// `dim H^1(P^1, O(d))`
pub fn h1_dim(d: i64) -> usize {
    if d <= -2 { (-d - 1) as usize } else { 0 }
}

/// Multiplication by `s` and by `t` on sections: `Γ(V(n-1)) -> Γ(V(n))`.
pub fn shift_maps(field: Field, twists: &[i64], n: i64) -> (Matrix, Matrix) {
    let src_dims: Vec<usize> = twists.iter().map(|a| section_dim(*a, n - 1)).collect();
    let dst_dims: Vec<usize> = twists.iter().map(|a| section_dim(*a, n)).collect();
    let total_src: usize = src_dims.iter().sum();
    let total_dst: usize = dst_dims.iter().sum();
    let mut by_s = Matrix::zeros(field, total_dst, total_src);
    let mut by_t = Matrix::zeros(field, total_dst, total_src);
    let (mut r0, mut c0) = (0, 0);
    for j in 0..twists.len() {
        for c in 0..src_dims[j] {
            // s * s^(e-c) t^c keeps index c; t * shifts to c+1
            by_s.set(r0 + c, c0 + c, field.one());
            by_t.set(r0 + c + 1, c0 + c, field.one());
        }
        r0 += dst_dims[j];
        c0 += src_dims[j];
    }
    (by_s, by_t)
}
