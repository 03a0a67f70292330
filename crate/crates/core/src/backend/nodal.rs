//! Morphism machinery for bundles on nodal curves: descent-compatible
//! maps, gluing transport along subbundles, and duals.

use super::forms::FormMat;
use crate::curve::{NodalBundle, NodalCurve, P1Point};
use crate::field::Scalar;
use crate::matrix::{self, Matrix, SubspaceBasis};

/// Checks the descent condition for an upstairs map: at every node, the
/// fiber map at the second preimage intertwines the gluings with the
/// fiber map at the first.
pub fn satisfies_gluing(up: &FormMat, src: &NodalBundle, dst: &NodalBundle) -> bool {
    for (i, (p1, p2)) in src.curve.nodes.iter().enumerate() {
        let ev1 = up.eval(&p1.s, &p1.t);
        let ev2 = up.eval(&p2.s, &p2.t);
        let lhs = ev2.mul(&src.gluings[i]);
        let rhs = dst.gluings[i].mul(&ev1);
        if lhs != rhs {
            return false;
        }
    }
    true
}

/// Linear constraints cutting out the descent-compatible maps inside the
/// upstairs hom space; one block of `r_dst * r_src` rows per node.
pub fn gluing_constraint_kernel(
    src: &NodalBundle,
    dst: &NodalBundle,
    flat_len: usize,
    unflatten: impl Fn(&[Scalar]) -> FormMat,
) -> SubspaceBasis {
    let field = src.curve.field;
    let n = src.curve.nodes.len();
    let r_block = dst.rank() * src.rank();
    let mut cols: Vec<Vec<Scalar>> = Vec::with_capacity(flat_len);
    for k in 0..flat_len {
        let mut unit = vec![field.zero(); flat_len];
        unit[k] = field.one();
        let up = unflatten(&unit);
        let mut col = Vec::with_capacity(n * r_block);
        for (i, (p1, p2)) in src.curve.nodes.iter().enumerate() {
            let ev1 = up.eval(&p1.s, &p1.t);
            let ev2 = up.eval(&p2.s, &p2.t);
            let diff = ev2.mul(&src.gluings[i]).sub(&dst.gluings[i].mul(&ev1));
            for a in 0..dst.rank() {
                for b in 0..src.rank() {
                    col.push(diff.get(a, b).clone());
                }
            }
        }
        cols.push(col);
    }
    let constraint = Matrix::from_cols(field, n * r_block, &cols).transpose();
    // rows of `cols` transposed: constraint is (n*r_block) x flat_len
    let (kernel, _, _) = matrix::kernel_image(&constraint.transpose());
    kernel
}

/// Restricts the gluings of `ambient` along a fiberwise-injective
/// upstairs mono `kappa` whose image fibers are gluing-stable; solves
/// `ev2(kappa) . rho_K = rho . ev1(kappa)` exactly at each node.
pub fn transport_gluings(
    kappa: &FormMat,
    sub_rank: usize,
    ambient: &NodalBundle,
) -> Option<Vec<Matrix>> {
    let field = ambient.curve.field;
    let mut out = Vec::with_capacity(ambient.curve.nodes.len());
    for (i, (p1, p2)) in ambient.curve.nodes.iter().enumerate() {
        let ev1 = kappa.eval(&p1.s, &p1.t);
        let ev2 = kappa.eval(&p2.s, &p2.t);
        let rhs = ambient.gluings[i].mul(&ev1);
        // solve ev2 * X = rhs column by column
        let mut x = Matrix::zeros(field, sub_rank, sub_rank);
        for c in 0..sub_rank {
            let b = Matrix::from_cols(field, ev2.rows(), &[rhs.col(c)]);
            let (sol, _) = matrix::solve_affine(&ev2, &b)?;
            for r in 0..sub_rank {
                x.set(r, c, sol[r].clone());
            }
        }
        matrix::inverse(&x)?;
        out.push(x);
    }
    Some(out)
}

/// Descent data of the dual bundle: twists negate (reversing the
/// canonical order) and each gluing becomes the inverse transpose,
/// conjugated by the order-reversing permutation.
pub fn dual_bundle(v: &NodalBundle) -> NodalBundle {
    let field = v.curve.field;
    let r = v.rank();
    let upstairs: Vec<i64> = v.upstairs.iter().rev().map(|a| -a).collect();
    let rev = Matrix::from_fn(field, r, r, |i, j| {
        if i + j == r.saturating_sub(1) && r > 0 { field.one() } else { field.zero() }
    });
    let gluings = v
        .gluings
        .iter()
        .map(|g| {
            let inv_t = matrix::inverse(g).expect("gluing is invertible").transpose();
            rev.mul(&inv_t).mul(&rev)
        })
        .collect();
    NodalBundle { curve: v.curve.clone(), upstairs, gluings }
}

/// The structure sheaf as a nodal bundle: trivial upstairs, identity gluings.
pub fn structure_sheaf(curve: &NodalCurve) -> NodalBundle {
    twisted_free(curve, 0, 1)
}

/// `O(m)^n` upstairs with identity gluings.
pub fn twisted_free(curve: &NodalCurve, m: i64, n: usize) -> NodalBundle {
    NodalBundle {
        curve: curve.clone(),
        upstairs: vec![m; n],
        gluings: vec![Matrix::identity(curve.field, n); curve.nodes.len()],
    }
}

pub fn node_points(curve: &NodalCurve, i: usize) -> (&P1Point, &P1Point) {
    let (a, b) = &curve.nodes[i];
    (a, b)
}
