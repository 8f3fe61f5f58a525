mod common;

use std::sync::Arc;

use common::{dense_rank, matrix, q};
use hochlab::algebra::{matrix_algebra, unitization, AlgebraElement, AlgebraPresentation};
use hochlab::chain::{bar_differential, decode, dual_differential, encode, hochschild_differential, Chain, Cochain};
use hochlab::frame::{ShiftFrame, SignedPermutation};
use hochlab::linalg::{rank, rank_and_kernel, solve, SolveOutcome, SparseMatrix, SparseVector};
use hochlab::norms::{chain_norm, check_m1, check_m3, NormKind, NormValue};
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use rand::SeedableRng;

fn unitized_m2() -> Arc<AlgebraPresentation> {
    unitization(&matrix_algebra(2).unwrap()).unwrap().0
}

fn chain_strategy(dim: usize, degree: usize) -> impl Strategy<Value = Vec<(Vec<usize>, i64)>> {
    prop::collection::vec((prop::collection::vec(0..dim, degree + 1), -4i64..=4), 1..6)
}

fn chain(alg: &Arc<AlgebraPresentation>, degree: usize, terms: &[(Vec<usize>, i64)]) -> Chain {
    Chain::from_terms(alg.clone(), degree, terms.iter().map(|(t, x)| (t.clone(), q(*x))).collect()).unwrap()
}

fn matrix_strategy() -> impl Strategy<Value = (usize, usize, Vec<i64>)> {
    (1usize..6, 1usize..6).prop_flat_map(|(r, c)| (Just(r), Just(c), prop::collection::vec(-2i64..=2, r * c)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tuple_codes_round_trip(t in prop::collection::vec(0usize..7, 1..5)) {
        prop_assert_eq!(decode(7, encode(7, &t), t.len()), t);
    }

    #[test]
    fn differentials_square_to_zero(terms in chain_strategy(5, 2)) {
        let c = chain(&unitized_m2(), 2, &terms);
        prop_assert!(hochschild_differential(&hochschild_differential(&c).unwrap()).unwrap().is_zero());
        prop_assert!(bar_differential(&bar_differential(&c).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn dual_differential_squares_to_zero(values in prop::collection::vec((prop::collection::vec(0usize..4, 1), -3i64..=3), 1..4)) {
        let alg = matrix_algebra(2).unwrap();
        let f = Cochain::from_values(alg, 0, values.into_iter().map(|(t, x)| (t, q(x))).collect()).unwrap();
        prop_assert!(dual_differential(&dual_differential(&f).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn rank_matches_dense_elimination_and_transpose((r, c, e) in matrix_strategy()) {
        let m = matrix(r, c, &e);
        let k = rank(&m);
        prop_assert_eq!(k, dense_rank(&m));
        prop_assert_eq!(k, rank(&m.transpose()));
        let (k2, kernel) = rank_and_kernel(&m);
        prop_assert_eq!(k2, k);
        prop_assert_eq!(kernel.dim(), c - k);
        for v in kernel.vectors() {
            prop_assert!(m.mul_vec(&v).unwrap().is_zero());
        }
    }

    #[test]
    fn solve_certifies_both_outcomes((r, c, e) in matrix_strategy(), b in prop::collection::vec(-3i64..=3, 6)) {
        let m = matrix(r, c, &e);
        let b = SparseVector::from_dense(&b[..r].iter().map(|&x| q(x)).collect::<Vec<_>>());
        match solve(&m, &b).unwrap() {
            SolveOutcome::Solution(x) => prop_assert_eq!(m.mul_vec(&x).unwrap(), b),
            SolveOutcome::Infeasible(y) => {
                prop_assert!(m.transpose().mul_vec(&y).unwrap().is_zero());
                prop_assert!(!y.dot(&b).is_zero());
            }
        }
    }

    #[test]
    fn market_text_round_trips((r, c, e) in matrix_strategy()) {
        let m = matrix(r, c, &e);
        prop_assert_eq!(SparseMatrix::from_market(&m.to_market(Some("m"))).unwrap(), m);
    }

    #[test]
    fn chain_norm_is_subadditive_and_homogeneous(
        a in chain_strategy(4, 1),
        b in chain_strategy(4, 1),
        s in -5i64..=5,
    ) {
        let alg = matrix_algebra(2).unwrap();
        let (x, y) = (chain(&alg, 1, &a), chain(&alg, 1, &b));
        for kind in [NormKind::L1, NormKind::Linf] {
            let sum = chain_norm(&x.add(&y).unwrap(), kind).unwrap();
            let bound = chain_norm(&x, kind).unwrap().add(&chain_norm(&y, kind).unwrap());
            prop_assert!(sum.compare(&bound) != std::cmp::Ordering::Greater);
            let scaled = chain_norm(&x.scale(&q(s)), kind).unwrap();
            prop_assert_eq!(scaled, chain_norm(&x, kind).unwrap().mul(&NormValue::Exact(q(s).abs())));
        }
    }

    #[test]
    fn signed_permutations_and_amplification_are_isometric(seed in any::<u64>(), entries in prop::collection::vec(-5i64..=5, 4)) {
        prop_assume!(entries.iter().any(|&x| x != 0));
        let frame = ShiftFrame::new(2, 2, 1).unwrap();
        let coeffs: Vec<(usize, hochlab::Q)> = (0..4).map(|i| (frame.index(i / 2, i % 2, 0), q(entries[i]))).collect();
        let a = frame.element(SparseVector::from_entries(coeffs)).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let u = SignedPermutation::random(frame.order(), &mut rng);
        for kind in [NormKind::L1, NormKind::Linf] {
            prop_assert!(check_m1(&frame, &a, &[1, 2], kind).unwrap().isometric);
            prop_assert!(check_m3(&frame, &[(u.clone(), a.clone())], kind).unwrap().isometric);
        }
    }

    #[test]
    fn multiplication_is_associative(x in prop::collection::vec(-3i64..=3, 5), y in prop::collection::vec(-3i64..=3, 5), z in prop::collection::vec(-3i64..=3, 5)) {
        let alg = unitized_m2();
        let el = |v: &[i64]| AlgebraElement::new(alg.clone(), SparseVector::from_dense(&v.iter().map(|&c| q(c)).collect::<Vec<_>>())).unwrap();
        let (a, b, c) = (el(&x), el(&y), el(&z));
        prop_assert_eq!(a.multiply(&b).unwrap().multiply(&c).unwrap(), a.multiply(&b.multiply(&c).unwrap()).unwrap());
    }
}
