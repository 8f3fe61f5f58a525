use super::*;
use crate::algebra::{matrix_algebra, matrix_unit_index};
use crate::rational::{q, q_frac};

fn element(m: usize, entries: &[(usize, usize, i64)]) -> AlgebraElement {
    let alg = matrix_algebra(m).unwrap();
    let v = SparseVector::from_entries(entries.iter().map(|&(i, j, x)| (matrix_unit_index(m, i, j), q(x))).collect());
    AlgebraElement::new(alg, v).unwrap()
}

#[test]
fn identity_and_permutation_norms() {
    let id = element(3, &[(0, 0, 1), (1, 1, 1), (2, 2, 1)]);
    for kind in [NormKind::L1, NormKind::Linf, NormKind::L2Numeric] {
        assert_eq!(matrix_norm(&id, kind).unwrap(), NormValue::Exact(q(1)));
    }
    let swap = element(2, &[(0, 1, 1), (1, 0, 1)]);
    assert_eq!(matrix_norm(&swap, NormKind::L1).unwrap(), NormValue::Exact(q(1)));
    assert_eq!(matrix_norm(&swap, NormKind::Linf).unwrap(), NormValue::Exact(q(1)));
}

#[test]
fn l1_and_linf_differ_on_a_row() {
    // [[1, -2], [0, 0]]: column sums 1, 2; row sums 3, 0
    let a = element(2, &[(0, 0, 1), (0, 1, -2)]);
    assert_eq!(matrix_norm(&a, NormKind::L1).unwrap(), NormValue::Exact(q(2)));
    assert_eq!(matrix_norm(&a, NormKind::Linf).unwrap(), NormValue::Exact(q(3)));
    // spectral norm sqrt(5)
    let v = matrix_norm(&a, NormKind::L2Numeric).unwrap();
    match v {
        NormValue::Numeric { value, error_bound } => {
            assert!((value - 5f64.sqrt()).abs() < 1e-12);
            assert!(error_bound < 1e-9);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn non_matrix_algebra_is_rejected() {
    let a = crate::algebra::square_zero_algebra(2);
    let x = AlgebraElement::basis(a, 0).unwrap();
    assert!(matrix_norm(&x, NormKind::L1).is_err());
}

#[test]
fn m1_is_isometric() {
    let f = ShiftFrame::new(1, 4, 0).unwrap();
    let a = f.element(SparseVector::unit(f.index(0, 0, 0))).unwrap();
    let r = check_m1(&f, &a, &[1, 2, 3, 4], NormKind::L1).unwrap();
    assert!(r.isometric);
    assert!(r.rows.iter().all(|row| row.ratio == NormValue::Exact(q(1))));

    let f = ShiftFrame::new(2, 3, 0).unwrap();
    let a = f
        .element(SparseVector::from_entries(vec![(f.index(0, 0, 0), q(2)), (f.index(0, 1, 0), q(1))]))
        .unwrap();
    for kind in [NormKind::Linf, NormKind::L1, NormKind::L2Numeric] {
        let r = check_m1(&f, &a, &[1, 2, 3], kind).unwrap();
        assert!(r.isometric, "{kind:?}");
    }
    let r = check_m1(&f, &a, &[1, 2, 3], NormKind::L2Numeric).unwrap();
    assert!(!r.element_norm.is_exact());
    let outside = f.element(SparseVector::unit(f.index(2, 2, 0))).unwrap();
    assert!(matches!(check_m1(&f, &outside, &[1], NormKind::L1), Err(Error::Support(_))));
}

#[test]
fn m3_signed_permutations_are_isometries() {
    let f = ShiftFrame::new(2, 2, 0).unwrap();
    let a = f
        .element(SparseVector::from_entries(vec![(f.index(0, 0, 0), q(3)), (f.index(1, 0, 0), q(-1))]))
        .unwrap();
    let mut flip = SignedPermutation::transposition(4, 0, 1).unwrap();
    flip = SignedPermutation::new(flip.permutation().to_vec(), vec![-1, 1, 1, 1]).unwrap();
    let r = check_m3(&f, &[(SignedPermutation::identity(4), a.clone()), (flip, a)], NormKind::L1).unwrap();
    assert!(r.isometric);
    assert_eq!(r.max_ratio, NormValue::Exact(q(1)));

    let samples = random_m3_samples(&f, 50, 5).unwrap();
    for kind in [NormKind::L1, NormKind::Linf] {
        let r = check_m3(&f, &samples, kind).unwrap();
        assert!(r.isometric);
        assert_eq!(r.max_ratio, NormValue::Exact(q(1)));
    }
    let r = check_m3(&f, &samples, NormKind::L2Numeric).unwrap();
    assert!(r.isometric);
    assert!((r.max_ratio.to_f64() - 1.0).abs() <= L2_TOLERANCE);
}

#[test]
fn chain_norm_rules() {
    let m2 = matrix_algebra(2).unwrap();
    let e11 = matrix_unit_index(2, 0, 0);
    let e12 = matrix_unit_index(2, 0, 1);
    let e22 = matrix_unit_index(2, 1, 1);
    let c = Chain::basis(m2.clone(), &[e11, e12]).unwrap();
    assert_eq!(chain_norm(&c, NormKind::L1).unwrap(), NormValue::Exact(q(1)));
    assert_eq!(chain_norm(&c.scale(&q(2)), NormKind::L1).unwrap(), NormValue::Exact(q(2)));
    let two = Chain::from_terms(m2.clone(), 1, vec![(vec![e11, e11], q(1)), (vec![e22, e22], q(1))]).unwrap();
    assert_eq!(chain_norm(&two, NormKind::Linf).unwrap(), NormValue::Exact(q(2)));
    let d = Cochain::from_values(m2, 1, vec![(vec![e11, e12], q_frac(-3, 2)), (vec![e22, e22], q(1))]).unwrap();
    assert_eq!(cochain_norm(&d, NormKind::L1).unwrap(), NormValue::Exact(q_frac(3, 2)));
}

#[test]
fn norm_value_json() {
    let v = serde_json::to_value(NormValue::Exact(q_frac(1, 2))).unwrap();
    assert_eq!(v, serde_json::json!({"exact": true, "value": "1/2"}));
    let v = serde_json::to_value(NormValue::Numeric {
        value: 1.0,
        error_bound: 0.5,
    })
    .unwrap();
    assert_eq!(v, serde_json::json!({"exact": false, "value": 1.0, "error_bound": 0.5}));
    let k: NormKind = serde_json::from_str("\"induced-linf\"").unwrap();
    assert_eq!(k, NormKind::Linf);
}

#[test]
fn numeric_ratio_propagates_error() {
    let a = NormValue::Numeric {
        value: 2.0,
        error_bound: 1e-12,
    };
    let r = a.ratio(&NormValue::Exact(q(2))).unwrap();
    assert!(r.is_one());
    match r {
        NormValue::Numeric { error_bound, .. } => assert!(error_bound > 0.0 && error_bound < 1e-11),
        _ => unreachable!(),
    }
}
