use std::collections::BTreeMap;

use proptest::prelude::*;

use operad_forge::chain::{homology, homotopy_solve, is_homotopy, tensor, ChainComplex, ChainMap};
use operad_forge::cubical::alt_check;
use operad_forge::fixtures;
use operad_forge::minimal::{is_minimal, minimal_model};
use operad_forge::qlinalg::{char_poly, kernel, min_poly, q, Matrix};
use operad_forge::sigma::Permutation;

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec(-3i64..=3, rows * cols)
        .prop_map(move |xs| Matrix::from_rows_sized(rows, cols, (0..rows).map(|r| (0..cols).map(|c| q(xs[r * cols + c])).collect()).collect()))
}

fn square() -> impl Strategy<Value = Matrix> {
    (1usize..5).prop_flat_map(|n| matrix(n, n))
}

fn permutation() -> impl Strategy<Value = Permutation> {
    (1usize..6).prop_flat_map(|n| Just((0..n).collect::<Vec<_>>()).prop_shuffle()).prop_map(|v| Permutation::new(v).unwrap())
}

/// Two-term complex `C_1 -> C_0` with differential `a`.
fn two_term(a: &Matrix) -> ChainComplex {
    ChainComplex::new(BTreeMap::from([(0, a.rows()), (1, a.cols())]), BTreeMap::from([(1, a.clone())])).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sign_is_multiplicative(p in permutation(), seed in any::<u64>()) {
        let n = p.n();
        let mut images: Vec<usize> = (0..n).collect();
        images.rotate_left((seed as usize) % n);
        let r = Permutation::new(images).unwrap();
        prop_assert_eq!(p.compose(&r).sign(), p.sign() * r.sign());
        prop_assert!(p.compose(&p.inverse()).is_identity());
    }

    #[test]
    fn rank_nullity(m in (0usize..5, 0usize..5).prop_flat_map(|(r, c)| matrix(r, c))) {
        prop_assert_eq!(m.rank() + kernel(&m).dim(), m.cols());
    }

    #[test]
    fn min_poly_kills_and_divides(m in square()) {
        let mp = min_poly(&m);
        prop_assert!(mp.eval_matrix(&m).is_zero());
        prop_assert!(char_poly(&m).eval_matrix(&m).is_zero());
        prop_assert!(mp.0.len() <= m.rows() + 1);
        prop_assert_eq!(mp.0.last().cloned(), Some(q(1)));
    }

    #[test]
    fn euler_characteristic_of_homology(a in (0usize..5, 0usize..5).prop_flat_map(|(r, c)| matrix(r, c))) {
        let h = homology(&two_term(&a));
        let r = a.rank();
        prop_assert_eq!(h.dim(0), a.rows() - r);
        prop_assert_eq!(h.dim(1), a.cols() - r);
    }

    #[test]
    fn kunneth_for_two_term_complexes(
        a in (0usize..3, 0usize..3).prop_flat_map(|(r, c)| matrix(r, c)),
        b in (0usize..3, 0usize..3).prop_flat_map(|(r, c)| matrix(r, c)),
    ) {
        let (x, y) = (two_term(&a), two_term(&b));
        let (hx, hy, hxy) = (homology(&x), homology(&y), homology(&tensor(&x, &y)));
        for n in 0..=2 {
            let expected: usize = (0..=n).map(|i| hx.dim(i) * hy.dim(n - i)).sum();
            prop_assert_eq!(hxy.dim(n), expected);
        }
    }

    #[test]
    fn null_homotopic_perturbations(a in matrix(2, 3), h0 in matrix(3, 2), f1 in -2i64..=2) {
        // f = s id, g = f + dh + hd for h : C_0 -> C_1
        let c = two_term(&a);
        let f = ChainMap::identity(&c).scale(&q(f1));
        let dh = BTreeMap::from([(0, a.mul(&h0)), (1, h0.mul(&a))]);
        let g = ChainMap::new(c.clone(), c.clone(), BTreeMap::from([
            (0, f.comp(0).add(&dh[&0])),
            (1, f.comp(1).add(&dh[&1])),
        ])).unwrap();
        let h = homotopy_solve(&f, &g).expect("homotopic by construction");
        prop_assert!(is_homotopy(&f, &g, &h));
    }

    #[test]
    fn alt_commutes_with_boundary(seed in any::<u64>()) {
        prop_assert!(alt_check(3, 5, seed).passed());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn every_seed_gives_a_minimal_model(seed in any::<u64>()) {
        let p = fixtures::com(3);
        let m = minimal_model(&p, 3, seed).unwrap();
        prop_assert!(is_minimal(&m.model).is_ok());
    }
}
