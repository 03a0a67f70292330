//! Property tests for the exact linear algebra substrate.

use excat_core::field::Field;
use excat_core::matrix::{kernel_image, mat_vec, solve_affine, Matrix};
use proptest::prelude::*;

fn f7() -> Field {
    Field::Fp(7)
}

fn arb_matrix(max_dim: usize) -> impl Strategy<Value = Matrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(r, c)| {
        proptest::collection::vec(0..7i64, r * c).prop_map(move |vals| {
            let mut k = 0;
            Matrix::from_fn(f7(), r, c, |_, _| {
                let s = f7().scalar(vals[k]);
                k += 1;
                s
            })
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn kernel_image_invariants(m in arb_matrix(8)) {
        let (kernel, image, rank) = kernel_image(&m);
        // rank-nullity, exactly
        prop_assert_eq!(rank + kernel.dim(), m.cols());
        prop_assert_eq!(image.dim(), rank);
        // m annihilates every kernel column
        for j in 0..kernel.dim() {
            let v = kernel.basis.col(j);
            prop_assert!(mat_vec(&m, &v).iter().all(|s| s.is_zero()));
        }
        // image columns lie in the column span of m
        let span = excat_core::matrix::column_space(&m);
        for j in 0..image.dim() {
            prop_assert!(span.coords(&image.basis.col(j)).is_some());
        }
    }

    #[test]
    fn solve_affine_is_exact_or_certifiably_inconsistent(
        m in arb_matrix(6),
        rhs in proptest::collection::vec(0..7i64, 1..=6)
    ) {
        let rows = m.rows();
        let b = Matrix::from_fn(f7(), rows, 1, |i, _| f7().scalar(rhs[i % rhs.len()]));
        match solve_affine(&m, &b) {
            Some((x, null)) => {
                let ax = mat_vec(&m, &x);
                prop_assert_eq!(ax, b.col(0));
                // every nullspace column solves the homogeneous system
                for j in 0..null.dim() {
                    let v = null.basis.col(j);
                    prop_assert!(mat_vec(&m, &v).iter().all(|s| s.is_zero()));
                }
            }
            None => {
                // appending b must strictly increase the rank
                let aug = m.hstack(&b);
                prop_assert_eq!(aug.rank(), m.rank() + 1);
            }
        }
    }

    #[test]
    fn canonical_bases_are_reproducible(m in arb_matrix(6)) {
        let (k1, i1, r1) = kernel_image(&m);
        let (k2, i2, r2) = kernel_image(&m);
        prop_assert_eq!(r1, r2);
        prop_assert_eq!(k1.basis, k2.basis);
        prop_assert_eq!(i1.basis, i2.basis);
    }
}
