use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::SparseVector;
use crate::error::{Error, Result};
use crate::rational::Q;

/// Which end of a vector carries its pivot.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PivotSide {
    /// Smallest nonzero index.
    Leading,
    /// Largest nonzero index.
    Trailing,
}

/// Vectors with pairwise distinct pivots, each scaled so its pivot entry is 1.
///
/// Reduction against an echelon clears every pivot coordinate, so the
/// remainder of `v` is a canonical representative of `v` modulo the span.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Echelon {
    dim: usize,
    side: PivotSide,
    rows: BTreeMap<usize, SparseVector>,
}

impl Echelon {
    pub fn new(dim: usize, side: PivotSide) -> Self {
        Self {
            dim,
            side,
            rows: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side(&self) -> PivotSide {
        self.side
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    pub fn is_pivot(&self, i: usize) -> bool {
        self.rows.contains_key(&i)
    }

    pub fn rows(&self) -> impl Iterator<Item = (usize, &SparseVector)> {
        self.rows.iter().map(|(p, v)| (*p, v))
    }

    pub fn row(&self, pivot: usize) -> Option<&SparseVector> {
        self.rows.get(&pivot)
    }

    fn pivot_of(&self, v: &SparseVector) -> Option<(usize, Q)> {
        match self.side {
            PivotSide::Leading => v.leading().cloned(),
            PivotSide::Trailing => v.trailing().cloned(),
        }
    }

    /// Next entry of `v` sitting on a pivot, scanning away from the pivot side,
    /// strictly beyond `cursor` (if any).
    fn next_pivot_entry(&self, v: &SparseVector, cursor: Option<usize>) -> Option<(usize, Q)> {
        match self.side {
            PivotSide::Leading => {
                let start = match cursor {
                    None => 0,
                    Some(c) => v.entries().partition_point(|(i, _)| *i <= c),
                };
                v.entries()[start..].iter().find(|(i, _)| self.rows.contains_key(i)).cloned()
            }
            PivotSide::Trailing => {
                let end = match cursor {
                    None => v.nnz(),
                    Some(c) => v.entries().partition_point(|(i, _)| *i < c),
                };
                v.entries()[..end].iter().rev().find(|(i, _)| self.rows.contains_key(i)).cloned()
            }
        }
    }

    /// Remainder of `v` with every pivot coordinate cleared.
    pub fn reduce(&self, v: &SparseVector) -> SparseVector {
        self.reduce_from(v.clone(), None)
    }

    fn reduce_from(&self, mut v: SparseVector, mut cursor: Option<usize>) -> SparseVector {
        while let Some((p, c)) = self.next_pivot_entry(&v, cursor) {
            v = v.add_scaled(&self.rows[&p], &-c);
            cursor = Some(p);
        }
        v
    }

    /// Like [`reduce`](Self::reduce) but also returns the coefficient used for
    /// each pivot row: `v = remainder + sum coeff[p] * row[p]`.
    pub fn reduce_with_coefficients(&self, v: &SparseVector) -> (SparseVector, SparseVector) {
        let mut v = v.clone();
        let mut cursor = None;
        let mut coeffs = Vec::new();
        while let Some((p, c)) = self.next_pivot_entry(&v, cursor) {
            v = v.add_scaled(&self.rows[&p], &-&c);
            coeffs.push((p, c));
            cursor = Some(p);
        }
        (v, SparseVector::from_entries(coeffs))
    }

    pub fn contains(&self, v: &SparseVector) -> bool {
        self.reduce(v).is_zero()
    }

    /// Adds `v` if it is independent of the current rows; returns whether it was.
    pub fn insert(&mut self, v: &SparseVector) -> bool {
        let r = self.reduce(v);
        self.insert_reduced(r)
    }

    fn insert_reduced(&mut self, r: SparseVector) -> bool {
        match self.pivot_of(&r) {
            None => false,
            Some((p, c)) => {
                let r = if c.is_one() { r } else { r.scale(&c.recip()) };
                self.rows.insert(p, r);
                true
            }
        }
    }

    /// Brings the rows to fully reduced form: every pivot column is zero in
    /// all rows but its own.
    pub fn fully_reduce(&mut self) {
        let order: Vec<usize> = match self.side {
            PivotSide::Leading => self.rows.keys().rev().copied().collect(),
            PivotSide::Trailing => self.rows.keys().copied().collect(),
        };
        for p in order {
            let row = self.rows.remove(&p).expect("pivot present");
            let reduced = self.reduce_from(row, Some(p));
            self.rows.insert(p, reduced);
        }
    }

    pub(crate) fn from_reduced_rows(dim: usize, side: PivotSide, rows: BTreeMap<usize, SparseVector>) -> Self {
        Self { dim, side, rows }
    }
}

/// A linearly independent family, certified by the echelon form it is kept in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceBasis {
    echelon: Echelon,
}

impl SubspaceBasis {
    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            echelon: Echelon::new(ambient_dim, PivotSide::Leading),
        }
    }

    pub fn whole(ambient_dim: usize) -> Self {
        let rows = (0..ambient_dim).map(|i| (i, SparseVector::unit(i))).collect();
        Self {
            echelon: Echelon::from_reduced_rows(ambient_dim, PivotSide::Leading, rows),
        }
    }

    /// Span of arbitrary vectors (dependent ones are dropped).
    pub fn span(ambient_dim: usize, vectors: &[SparseVector]) -> Result<Self> {
        let mut e = Echelon::new(ambient_dim, PivotSide::Leading);
        for v in vectors {
            check_len(v, ambient_dim)?;
            e.insert(v);
        }
        e.fully_reduce();
        Ok(Self { echelon: e })
    }

    pub fn from_echelon(echelon: Echelon) -> Self {
        Self { echelon }
    }

    pub fn ambient_dim(&self) -> usize {
        self.echelon.dim
    }

    pub fn dim(&self) -> usize {
        self.echelon.rank()
    }

    pub fn echelon(&self) -> &Echelon {
        &self.echelon
    }

    pub fn vectors(&self) -> Vec<SparseVector> {
        self.echelon.rows.values().cloned().collect()
    }

    pub fn contains(&self, v: &SparseVector) -> bool {
        self.echelon.contains(v)
    }
}

pub(crate) fn check_len(v: &SparseVector, dim: usize) -> Result<()> {
    match v.max_index() {
        Some(i) if i >= dim => Err(Error::Dimension(format!("index {i} outside ambient dimension {dim}"))),
        _ => Ok(()),
    }
}

/// Coordinates of each vector in the quotient `ambient / sub`, using the
/// standard basis vectors off the pivots of `sub` as complement basis.
///
/// Two vectors receive equal coordinates iff their difference lies in `sub`.
pub fn quotient_coordinates(sub: &SubspaceBasis, vectors: &[SparseVector]) -> Result<super::SparseMatrix> {
    let dim = sub.ambient_dim();
    let pivots: Vec<usize> = sub.echelon.pivots().collect();
    let complement_index = |i: usize| i - pivots.partition_point(|&p| p < i);
    let mut columns = Vec::with_capacity(vectors.len());
    for v in vectors {
        check_len(v, dim)?;
        let r = sub.echelon.reduce(v);
        columns.push(SparseVector::from_sorted(
            r.into_entries().into_iter().map(|(i, x)| (complement_index(i), x)).collect(),
        ));
    }
    super::SparseMatrix::from_columns(dim - pivots.len(), columns)
}

/// Dense reduced row echelon form, deterministic pivot choice by
/// (column, row). Used for small components.
pub(crate) fn dense_rref(dim: usize, vectors: &[SparseVector]) -> BTreeMap<usize, SparseVector> {
    let mut m: Vec<Vec<Q>> = vectors.iter().map(|v| v.to_dense(dim)).collect();
    let mut pivots = BTreeMap::new();
    let mut top = 0;
    for col in 0..dim {
        let Some(r) = (top..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(top, r);
        let inv = m[top][col].recip();
        for x in m[top].iter_mut().skip(col) {
            *x *= &inv;
        }
        let pivot_row = m[top].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r == top || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row).skip(col) {
                if !p.is_zero() {
                    *x -= &f * p;
                }
            }
        }
        pivots.insert(col, top);
        top += 1;
        if top == m.len() {
            break;
        }
    }
    pivots
        .into_iter()
        .map(|(col, r)| (col, SparseVector::from_dense(&m[r])))
        .collect()
}

/// Sparse reduced row echelon form (leading pivots). Vectors are inserted
/// sparsest first to limit fill-in.
pub(crate) fn sparse_rref(dim: usize, vectors: &[SparseVector]) -> BTreeMap<usize, SparseVector> {
    let mut order: Vec<usize> = (0..vectors.len()).collect();
    order.sort_by_key(|&i| (vectors[i].nnz(), i));
    let mut e = Echelon::new(dim, PivotSide::Leading);
    for i in order {
        e.insert(&vectors[i]);
        if e.rank() == dim {
            break;
        }
    }
    e.fully_reduce();
    e.rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn v(pairs: &[(usize, i64)]) -> SparseVector {
        SparseVector::from_entries(pairs.iter().map(|&(i, x)| (i, q(x))).collect())
    }

    #[test]
    fn reduction_is_canonical() {
        let mut e = Echelon::new(4, PivotSide::Leading);
        assert!(e.insert(&v(&[(0, 1), (1, 1)])));
        assert!(e.insert(&v(&[(1, 2), (2, 2)])));
        assert!(!e.insert(&v(&[(0, 1), (1, 2), (2, 1)])));
        let a = v(&[(0, 3), (3, 1)]);
        let b = a.add(&v(&[(1, 1), (2, 1)]));
        assert_eq!(e.reduce(&a), e.reduce(&b));
        assert_eq!(e.reduce(&a).get(0), q(0));
    }

    #[test]
    fn trailing_side_reduces_from_the_top() {
        let mut e = Echelon::new(3, PivotSide::Trailing);
        e.insert(&v(&[(0, 1), (2, 1)]));
        let r = e.reduce(&v(&[(2, 5)]));
        assert_eq!(r, v(&[(0, -5)]));
    }

    #[test]
    fn coefficients_reconstruct_the_input() {
        let mut e = Echelon::new(3, PivotSide::Leading);
        e.insert(&v(&[(0, 2), (1, 1)]));
        e.insert(&v(&[(1, 1), (2, -1)]));
        let x = v(&[(0, 1), (1, 5), (2, 7)]);
        let (rem, coeffs) = e.reduce_with_coefficients(&x);
        let mut back = rem.clone();
        for (p, c) in coeffs.iter() {
            back = back.add_scaled(e.row(p).unwrap(), c);
        }
        assert_eq!(back, x);
    }

    #[test]
    fn dense_and_sparse_rref_agree() {
        let rows = vec![v(&[(0, 1), (2, 3)]), v(&[(1, 2), (2, 1)]), v(&[(0, 2), (1, 2), (2, 7)])];
        assert_eq!(dense_rref(3, &rows), sparse_rref(3, &rows));
    }
}
