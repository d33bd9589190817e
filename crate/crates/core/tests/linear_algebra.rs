use nangle_core::rng::rng_from;
use nangle_core::{GradedMap, GradedObject, Matrix, PrimeField};
use proptest::prelude::*;

fn f(p: u32) -> PrimeField {
    PrimeField::new(p).unwrap()
}

/// Every `rows × cols` matrix over F_2, in lexicographic order.
fn all_f2(rows: usize, cols: usize) -> impl Iterator<Item = Matrix> {
    let len = rows * cols;
    (0u32..1 << len).map(move |bits| {
        let data = (0..len).map(|i| (bits >> i) & 1).collect();
        Matrix::from_vec(f(2), rows, cols, data).unwrap()
    })
}

#[test]
fn inconsistent_system_has_no_solution_among_all_candidates() {
    let a = Matrix::from_rows(f(2), &[vec![1, 1], vec![0, 0]]).unwrap();
    let b = Matrix::from_rows(f(2), &[vec![1], vec![1]]).unwrap();
    assert_eq!(a.solve(&b).unwrap(), None);
    assert!(all_f2(2, 1).all(|x| a.mul(&x).unwrap() != b));
}

#[test]
fn kernel_and_image_by_enumeration() {
    let a = Matrix::from_rows(f(5), &[vec![1, 2], vec![2, 4]]).unwrap();
    let mut in_kernel = 0;
    for x in 0..5 {
        for y in 0..5 {
            let v = Matrix::from_rows(f(5), &[vec![x], vec![y]]).unwrap();
            in_kernel += usize::from(a.mul(&v).unwrap().is_zero());
        }
    }
    // A rank-one kernel over F_5 has five vectors.
    assert_eq!(in_kernel, 5);
    assert_eq!(a.kernel_basis().cols(), 1);
    assert_eq!(a.image_basis().cols(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn solve_is_sound_and_complete_over_f2(seed: u64, rows in 1usize..4, cols in 1usize..4, rhs in 1usize..3) {
        prop_assume!(cols * rhs <= 8);
        let mut rng = rng_from(seed);
        let a = Matrix::random(f(2), rows, cols, &mut rng);
        let b = Matrix::random(f(2), rows, rhs, &mut rng);
        match a.solve(&b).unwrap() {
            Some(x) => prop_assert_eq!(a.mul(&x).unwrap(), b),
            None => prop_assert!(all_f2(cols, rhs).all(|x| a.mul(&x).unwrap() != b)),
        }
    }

    #[test]
    fn rref_is_idempotent_and_keeps_rank(seed: u64, p in prop::sample::select(vec![2u32, 3, 5, 7]), rows in 0usize..5, cols in 0usize..5) {
        let a = Matrix::random(f(p), rows, cols, &mut rng_from(seed));
        let (r, piv) = a.rref();
        prop_assert_eq!(r.rref().0, r.clone());
        prop_assert_eq!(piv.len(), a.rank());
        prop_assert_eq!(a.kernel_basis().cols() + a.rank(), cols);
        prop_assert!(a.mul(&a.kernel_basis()).unwrap().is_zero());
    }

    #[test]
    fn inverse_is_two_sided(seed: u64, p in prop::sample::select(vec![2u32, 5]), n in 1usize..5) {
        let a = Matrix::random(f(p), n, n, &mut rng_from(seed));
        match a.inverse() {
            Some(inv) => {
                prop_assert_eq!(a.mul(&inv).unwrap(), Matrix::identity(f(p), n));
                prop_assert_eq!(inv.mul(&a).unwrap(), Matrix::identity(f(p), n));
            }
            None => prop_assert!(a.rank() < n),
        }
    }

    #[test]
    fn field_inverse_and_sign(p in prop::sample::select(vec![2u32, 3, 5, 7, 11]), a in 1u32..100, k in -5i64..5) {
        let field = f(p);
        let a = a % p;
        prop_assume!(a != 0);
        prop_assert_eq!(field.mul(a, field.inv(a)), 1);
        let s = field.sign(k);
        prop_assert_eq!(s, if k.rem_euclid(2) == 0 { 1 } else { p - 1 } % p.max(2));
    }

    #[test]
    fn shift_commutes_with_composition(seed: u64, k in -3i64..3) {
        let field = f(5);
        let mut rng = rng_from(seed);
        let x = GradedObject::from_pairs([(-1, 2), (0, 1), (2, 3)]);
        let y = GradedObject::from_pairs([(-1, 1), (0, 2), (1, 1)]);
        let z = GradedObject::from_pairs([(-1, 2), (0, 2), (2, 1)]);
        let g = GradedMap::random(field, &y, &z, &mut rng);
        let h = GradedMap::random(field, &x, &y, &mut rng);
        prop_assert_eq!(g.compose(&h).unwrap().shift(k), g.shift(k).compose(&h.shift(k)).unwrap());
    }
}
