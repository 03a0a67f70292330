//! Finitely generated modules over the dual numbers `R = k[e]/(e^2)`.
//!
//! Every such module is `R^a ⊕ k^b`; we work with the underlying
//! `k`-vector space of dimension `2a + b` equipped with the nilpotent
//! multiplication-by-`e` operator, in the fixed basis
//! `x_1..x_a, e*x_1..e*x_a, y_1..y_b`. Module maps are exactly the linear
//! maps commuting with the two `e`-operators.

use crate::field::Field;
use crate::matrix::{kernel_image, mat_vec, Matrix};

pub fn underlying_dim(free: usize, socle: usize) -> usize {
    2 * free + socle
}

/// Multiplication by `e` in the standard basis.
pub fn eps_matrix(field: Field, free: usize, socle: usize) -> Matrix {
    let n = underlying_dim(free, socle);
    let mut m = Matrix::zeros(field, n, n);
    for i in 0..free {
        m.set(free + i, i, field.one());
    }
    m
}

/// Greedily extends `start` (columns assumed independent) to include a
/// maximal independent subset of `candidates`, returning the chosen
/// candidate columns in order. Deterministic.
pub fn greedy_extend(start: &Matrix, candidates: &[Vec<crate::field::Scalar>]) -> Vec<Vec<crate::field::Scalar>> {
    let mut acc = start.clone();
    let mut rank = acc.rank();
    let mut chosen = Vec::new();
    for c in candidates {
        let trial = acc.hstack(&Matrix::from_cols(acc.field(), acc.rows(), &[c.clone()]));
        let r = trial.rank();
        if r > rank {
            rank = r;
            acc = trial;
            chosen.push(c.clone());
        }
    }
    chosen
}

/// Brings a square nilpotent operator with `e^2 = 0` to the standard
/// module shape. Returns `(free, socle, into_ambient)` where
/// `into_ambient` maps standard-basis coordinates into the given space
/// and intertwines the `e`-operators.
pub fn normalize_nilpotent(e: &Matrix) -> (usize, usize, Matrix) {
    let field = e.field();
    let n = e.rows();
    debug_assert!(e.mul(e).is_zero(), "operator does not square to zero");
    let (ker, _, rank) = kernel_image(e);
    // complement of ker(e): greedy over the standard basis
    let std: Vec<Vec<crate::field::Scalar>> = (0..n)
        .map(|i| {
            let mut v = vec![field.zero(); n];
            v[i] = field.one();
            v
        })
        .collect();
    let us = greedy_extend(&ker.basis, &std);
    assert_eq!(us.len(), rank, "complement of the kernel has the wrong size");
    let eus: Vec<Vec<crate::field::Scalar>> = us.iter().map(|u| mat_vec(e, u)).collect();
    // complete {e*u_i} inside ker(e)
    let eu_mat = Matrix::from_cols(field, n, &eus);
    let ker_cols: Vec<Vec<crate::field::Scalar>> = (0..ker.dim()).map(|j| ker.basis.col(j)).collect();
    let ws = greedy_extend(&eu_mat, &ker_cols);
    let socle = n - 2 * rank;
    assert_eq!(ws.len(), socle, "socle completion has the wrong size");
    let mut cols = Vec::with_capacity(n);
    cols.extend(us);
    cols.extend(eus);
    cols.extend(ws);
    let into_ambient = Matrix::from_cols(field, n, &cols);
    debug_assert!(crate::matrix::inverse(&into_ambient).is_some());
    (rank, socle, into_ambient)
}
