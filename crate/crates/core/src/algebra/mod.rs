//! Finite-dimensional associative algebras over Q given by structure
//! constants, plus the constructors used throughout the crate.

mod constructors;
mod extension;
mod presentation;

pub use constructors::{
    extension_from_ideal, matrix_algebra, matrix_unit_index, scalar_algebra, semidirect_product, square_zero_algebra,
    subalgebra, tensor_product, unitization, zero_algebra, BimoduleAction,
};
pub use extension::ExtensionSpec;
pub use presentation::{AlgebraElement, AlgebraPresentation, AlgebraSpec, MatrixRepr};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{SparseMatrix, SparseVector};
    use crate::rational::{q, Q};
    use num_traits::{One, Zero};

    fn el(alg: &std::sync::Arc<AlgebraPresentation>, entries: &[(usize, i64)]) -> AlgebraElement {
        AlgebraElement::new(
            alg.clone(),
            SparseVector::from_entries(entries.iter().map(|&(i, x)| (i, q(x))).collect()),
        )
        .unwrap()
    }

    #[test]
    fn matrix_unit_relations() {
        let m2 = matrix_algebra(2).unwrap();
        let e = |i, j| matrix_unit_index(2, i, j);
        assert_eq!(m2.label(e(0, 1)), "E1,2");
        assert_eq!(m2.basis_product(e(0, 1), e(1, 0)), &SparseVector::unit(e(0, 0)));
        assert!(m2.basis_product(e(0, 1), e(0, 1)).is_zero());
        let unit = el(&m2, &[(e(0, 0), 1), (e(1, 1), 1)]);
        let x = el(&m2, &[(e(0, 1), 1)]);
        assert_eq!(unit.multiply(&x).unwrap(), x);
        assert!(matrix_algebra(0).is_err());
        let m1 = matrix_algebra(1).unwrap();
        assert!(m1.is_idempotent(&SparseVector::unit(0)));
        assert!(matrix_algebra(3).is_ok());
    }

    #[test]
    fn rejects_non_associative_table() {
        // b0*b0 = b1 and b1*b0 = b0 but b0*b1 = 0
        let spec = AlgebraSpec {
            labels: vec!["x".into(), "y".into()],
            products: vec![(0, 0, SparseVector::unit(1)), (1, 0, SparseVector::unit(0))],
            ..AlgebraSpec::default()
        };
        assert!(matches!(AlgebraPresentation::new(spec), Err(crate::Error::NotAssociative(..))));
    }

    #[test]
    fn json_round_trip() {
        let m2 = matrix_algebra(2).unwrap();
        let text = m2.to_json();
        let back = AlgebraPresentation::from_json(&text).unwrap();
        assert_eq!(back.hash(), m2.hash());
        assert!(AlgebraPresentation::from_json(r#"{"dim":1,"labels":["a"],"unit":null,"products":[],"extra":1}"#).is_err());
    }

    #[test]
    fn mismatched_algebras_do_not_multiply() {
        let a = el(&matrix_algebra(2).unwrap(), &[(0, 1)]);
        let b = el(&matrix_algebra(3).unwrap(), &[(0, 1)]);
        assert_eq!(a.multiply(&b), Err(crate::Error::AlgebraMismatch));
    }

    #[test]
    fn unitization_examples() {
        let (u0, _) = unitization(&zero_algebra()).unwrap();
        assert_eq!(u0.dim(), 1);
        assert!(u0.is_unital());

        let (u1, ext) = unitization(&square_zero_algebra(1)).unwrap();
        assert_eq!(u1.dim(), 2);
        // (λ + a)(μ + b) = λμ + λb + μa
        let x = el(&u1, &[(0, 2), (1, 3)]);
        let y = el(&u1, &[(0, 5), (1, 7)]);
        assert_eq!(x.multiply(&y).unwrap(), el(&u1, &[(0, 3 * 5 + 7 * 2), (1, 21)]));
        assert_eq!(ext.quotient().dim(), 1);

        let m2 = matrix_algebra(2).unwrap();
        let (um2, _) = unitization(&m2).unwrap();
        assert_eq!(um2.dim(), 5);
        let old_unit = SparseVector::from_entries(vec![(0, Q::one()), (3, Q::one())]);
        assert!(!um2.is_unit_element(&old_unit));
        assert!(um2.is_idempotent(&old_unit));
        assert_ne!(um2.unit().unwrap(), &old_unit);
    }

    #[test]
    fn semidirect_with_swap_multiplier() {
        let m2 = matrix_algebra(2).unwrap();
        // span{1, U} with U² = 1
        let mult = AlgebraPresentation::new(AlgebraSpec {
            labels: vec!["1".into(), "U".into()],
            products: vec![
                (0, 0, SparseVector::unit(0)),
                (0, 1, SparseVector::unit(1)),
                (1, 0, SparseVector::unit(1)),
                (1, 1, SparseVector::unit(0)),
            ],
            unit: Some(SparseVector::unit(0)),
            ..AlgebraSpec::default()
        })
        .unwrap();
        let u = SparseVector::from_entries(vec![(1, Q::one()), (2, Q::one())]);
        let action = BimoduleAction {
            left: vec![SparseMatrix::identity(4), m2.left_mul_matrix(&u)],
            right: vec![SparseMatrix::identity(4), m2.right_mul_matrix(&u)],
        };
        let (total, ext) = semidirect_product(&m2, &mult, &action).unwrap();
        assert_eq!(total.dim(), 6);
        assert!(total.is_unital());
        assert_eq!(ext.ideal().hash(), m2.hash());
        assert_eq!(ext.quotient().hash(), mult.hash());

        // left action by a non-multiplicative map fails
        let bad = BimoduleAction {
            left: vec![SparseMatrix::identity(4), SparseMatrix::identity(4).scale(&q(2))],
            right: vec![SparseMatrix::identity(4), SparseMatrix::identity(4)],
        };
        assert!(matches!(
            semidirect_product(&m2, &mult, &bad),
            Err(crate::Error::BimoduleViolation { .. })
        ));
    }

    #[test]
    fn quotient_by_ideal() {
        let m2 = matrix_algebra(2).unwrap();
        let (um2, _) = unitization(&m2).unwrap();
        let ideal: Vec<SparseVector> = (0..4).map(SparseVector::unit).collect();
        let ext = extension_from_ideal(&um2, &ideal).unwrap();
        assert_eq!(ext.quotient().dim(), 1);
        assert!(ext.quotient().is_unital());
        // not an ideal: span{E11} inside M_2
        assert!(extension_from_ideal(&m2, &[SparseVector::unit(0)]).is_err());
        // ideal = total
        let all: Vec<SparseVector> = (0..4).map(SparseVector::unit).collect();
        let ext = extension_from_ideal(&m2, &all).unwrap();
        assert_eq!(ext.quotient().dim(), 0);
    }

    #[test]
    fn bad_section_is_rejected() {
        let (_, ext) = unitization(&matrix_algebra(2).unwrap()).unwrap();
        let section = SparseMatrix::zeros(5, 1);
        assert!(ext.with_section(section).is_err());
        let mut shifted = ext.section().column(0).clone();
        shifted = shifted.add(&SparseVector::unit(1));
        assert!(ext.with_section(SparseMatrix::from_columns(5, vec![shifted]).unwrap()).is_ok());
    }

    #[test]
    fn tensor_product_is_kronecker() {
        let m2 = matrix_algebra(2).unwrap();
        let t = tensor_product(&m2, &m2).unwrap();
        assert_eq!(t.dim(), 16);
        assert_eq!(t.matrix_repr().unwrap().order, 4);
        let x = el(&t, &[(5, 1), (3, 2)]);
        let y = el(&t, &[(9, 1), (12, -1)]);
        let dense = |m: Vec<Vec<Q>>| m;
        let xm = dense(x.to_matrix().unwrap());
        let ym = dense(y.to_matrix().unwrap());
        let mut prod = vec![vec![Q::zero(); 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    prod[i][j] += &xm[i][k] * &ym[k][j];
                }
            }
        }
        assert_eq!(x.multiply(&y).unwrap().to_matrix().unwrap(), prod);
    }
}
