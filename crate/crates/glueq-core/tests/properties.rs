//! Property-based tests of the algebraic utility layer: Smith normal form,
//! image membership, shape-parameter identities, complex powers, and the
//! symplectic pairing.

use glueq_core::gluing::{cpow, extend_shapes, C64};
use glueq_core::jcomplex::omega_pairing;
use glueq_core::matrix::{image_membership, smith_normal_form, IntMatrix};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

fn small_matrix() -> impl Strategy<Value = IntMatrix> {
    (1usize..6, 1usize..6).prop_flat_map(|(rows, cols)| {
        proptest::collection::vec(-9i64..10, rows * cols).prop_map(move |entries| {
            let mut m = IntMatrix::zero(rows, cols);
            for (k, &v) in entries.iter().enumerate() {
                if v != 0 {
                    m.set(k / cols, k % cols, v);
                }
            }
            m
        })
    })
}

proptest! {
    #[test]
    fn snf_diagonalizes_with_divisibility(m in small_matrix()) {
        let snf = smith_normal_form(&m);
        let umv = snf.u.mul(&m).unwrap().mul(&snf.v).unwrap();
        prop_assert_eq!(&umv, &snf.d);
        // v · v_inv = identity (unimodularity witness).
        let id = snf.v.mul(&snf.v_inv).unwrap();
        prop_assert_eq!(&id, &IntMatrix::identity(m.cols()));
        let diag = snf.diagonal();
        for d in &diag {
            prop_assert!(d.is_positive());
        }
        for w in diag.windows(2) {
            prop_assert!((&w[1] % &w[0]).is_zero());
        }
        // Off-diagonal and beyond-rank entries vanish.
        for (r, c, v) in snf.d.triplets() {
            prop_assert!(r == c && r < snf.rank && !v.is_zero());
        }
    }

    #[test]
    fn image_membership_accepts_images(m in small_matrix(), x in proptest::collection::vec(-5i64..6, 1..6)) {
        let x: Vec<BigInt> = x.into_iter().take(m.cols()).map(BigInt::from)
            .chain(core::iter::repeat_with(BigInt::zero))
            .take(m.cols())
            .collect();
        let y = m.mul_vec(&x).unwrap();
        let preimage = image_membership(&m, &y).unwrap();
        prop_assert!(preimage.is_some());
        let z = preimage.unwrap();
        prop_assert_eq!(m.mul_vec(&z).unwrap(), y);
    }

    #[test]
    fn shape_parameter_relations(re in -3.0f64..3.0, im_mag in 0.05f64..3.0, neg in any::<bool>()) {
        let im = if neg { -im_mag } else { im_mag };
        let z = C64::new(re, im);
        let shapes = extend_shapes(&[z], 1, 2).unwrap();
        let (z0, zp, zpp) = (shapes.z(0), shapes.z_prime(0), shapes.z_double_prime(0));
        prop_assert!((z0 - z).norm_sqr() < 1e-24);
        prop_assert!((zp - 1.0 / (C64::new(1.0, 0.0) - z)).norm_sqr() < 1e-20);
        prop_assert!((zpp - (C64::new(1.0, 0.0) - 1.0 / z)).norm_sqr() < 1e-20);
        let product = z0 * zp * zpp;
        prop_assert!((product - C64::new(-1.0, 0.0)).norm_sqr() < 1e-18);
    }

    #[test]
    fn cpow_is_a_homomorphism(re in -2.0f64..2.0, im_mag in 0.1f64..2.0, a in -6i64..7, b in -6i64..7) {
        let z = C64::new(re, im_mag);
        let lhs = cpow(z, a + b);
        let rhs = cpow(z, a) * cpow(z, b);
        let scale = lhs.norm_sqr().max(1.0);
        prop_assert!((lhs - rhs).norm_sqr() <= 1e-18 * scale);
    }

    #[test]
    fn omega_is_antisymmetric_and_bilinear(
        x in proptest::collection::vec(-7i64..8, 4),
        y in proptest::collection::vec(-7i64..8, 4),
        w in proptest::collection::vec(-7i64..8, 4),
        c in -4i64..5,
    ) {
        let big = |v: &[i64]| v.iter().map(|&k| BigInt::from(k)).collect::<Vec<_>>();
        let (x, y, w) = (big(&x), big(&y), big(&w));
        let xy = omega_pairing(&x, &y).unwrap();
        let yx = omega_pairing(&y, &x).unwrap();
        prop_assert_eq!(&xy, &(-&yx));
        let ycw: Vec<BigInt> = y.iter().zip(&w).map(|(a, b)| a + b * c).collect();
        let lhs = omega_pairing(&x, &ycw).unwrap();
        let rhs = &xy + omega_pairing(&x, &w).unwrap() * c;
        prop_assert_eq!(lhs, rhs);
    }
}
