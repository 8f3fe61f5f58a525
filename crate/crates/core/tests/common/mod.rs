#![allow(dead_code)]

use hochlab::linalg::SparseMatrix;
use hochlab::Q;
use num_traits::Zero;

pub fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

pub fn dense(m: &SparseMatrix) -> Vec<Vec<Q>> {
    let mut out = vec![vec![Q::zero(); m.cols()]; m.rows()];
    for (r, c, x) in m.triplets() {
        out[r][c] = x.clone();
    }
    out
}

/// Rank by textbook Gaussian elimination on a dense copy.
pub fn dense_rank(m: &SparseMatrix) -> usize {
    let mut a = dense(m);
    let (rows, cols) = (m.rows(), m.cols());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else { continue };
        a.swap(rank, p);
        for r in 0..rows {
            if r != rank && !a[r][c].is_zero() {
                let f = &a[r][c] / &a[rank][c];
                let pivot = a[rank].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn matrix(rows: usize, cols: usize, entries: &[i64]) -> SparseMatrix {
    let data: Vec<Vec<Q>> = (0..rows).map(|r| (0..cols).map(|c| q(entries[r * cols + c])).collect()).collect();
    SparseMatrix::from_dense(&data).unwrap()
}
