use std::sync::Arc;

use num_traits::One;

use super::ShiftFrame;
use crate::algebra::{matrix_algebra, matrix_unit_index, tensor_product, AlgebraPresentation};
use crate::chain::{face_map, Chain};
use crate::error::{Error, Result};
use crate::linalg::SparseVector;
use crate::rational::Q;

/// A linear map `s: A → A ⊗ A` given on the basis, meant to be a bimodule
/// left inverse of multiplication.
#[derive(Clone, Debug)]
pub struct SplittingData {
    algebra: Arc<AlgebraPresentation>,
    images: Vec<Chain>,
}

/// First violation of each splitting law, if any.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SplittingLaws {
    /// Basis element `b` with `μ(s(b)) ≠ b`.
    pub section: Option<usize>,
    /// Basis pair `(a, b)` with `s(ab) ≠ a·s(b)`.
    pub left: Option<(usize, usize)>,
    /// Basis pair `(a, b)` with `s(ab) ≠ s(a)·b`.
    pub right: Option<(usize, usize)>,
}

impl SplittingLaws {
    pub fn all_hold(&self) -> bool {
        *self == Self::default()
    }
}

/// `x · (c_0 ⊗ c_1)`, multiplying the first factor.
fn left_act(alg: &AlgebraPresentation, x: &SparseVector, c: &Chain) -> Result<Chain> {
    let mut terms = Vec::new();
    for (t, y) in c.terms() {
        for (p, z) in alg.mul(x, &SparseVector::unit(t[0])).iter() {
            let mut t2 = t.clone();
            t2[0] = p;
            terms.push((t2, y * z));
        }
    }
    Chain::from_terms(c.algebra().clone(), c.degree(), terms)
}

/// `(c_0 ⊗ c_1) · x`, multiplying the last factor.
fn right_act(alg: &AlgebraPresentation, c: &Chain, x: &SparseVector) -> Result<Chain> {
    let mut terms = Vec::new();
    let last = c.degree();
    for (t, y) in c.terms() {
        for (p, z) in alg.mul(&SparseVector::unit(t[last]), x).iter() {
            let mut t2 = t.clone();
            t2[last] = p;
            terms.push((t2, y * z));
        }
    }
    Chain::from_terms(c.algebra().clone(), c.degree(), terms)
}

impl SplittingData {
    /// Validated splitting: all three laws must hold.
    pub fn new(algebra: Arc<AlgebraPresentation>, images: Vec<Chain>) -> Result<Self> {
        let s = Self::unchecked(algebra, images)?;
        let laws = s.laws()?;
        if let Some(b) = laws.section {
            return Err(Error::InvalidSplitting(format!("μ(s({})) differs from it", s.algebra.label(b))));
        }
        if let Some((a, b)) = laws.left {
            return Err(Error::InvalidSplitting(format!(
                "left module law fails on ({}, {})",
                s.algebra.label(a),
                s.algebra.label(b)
            )));
        }
        if let Some((a, b)) = laws.right {
            return Err(Error::InvalidSplitting(format!(
                "right module law fails on ({}, {})",
                s.algebra.label(a),
                s.algebra.label(b)
            )));
        }
        Ok(s)
    }

    /// Shape-checked only; used for deliberately broken splittings.
    pub fn unchecked(algebra: Arc<AlgebraPresentation>, images: Vec<Chain>) -> Result<Self> {
        if images.len() != algebra.dim() {
            return Err(Error::Dimension("one image per basis element".into()));
        }
        if images.iter().any(|c| c.degree() != 1 || c.algebra().hash() != algebra.hash()) {
            return Err(Error::InvalidSplitting("images must be degree-1 chains of the same algebra".into()));
        }
        Ok(Self { algebra, images })
    }

    pub fn algebra(&self) -> &Arc<AlgebraPresentation> {
        &self.algebra
    }

    pub fn image(&self, b: usize) -> &Chain {
        &self.images[b]
    }

    /// `s(x)` for an arbitrary element.
    pub fn apply(&self, x: &SparseVector) -> Result<Chain> {
        x.iter().try_fold(Chain::zero(self.algebra.clone(), 1), |acc, (b, c)| {
            acc.add_scaled(&self.images[b], c)
        })
    }

    pub fn laws(&self) -> Result<SplittingLaws> {
        let alg = &self.algebra;
        let dim = alg.dim();
        let mut laws = SplittingLaws::default();
        for b in 0..dim {
            let mu = face_map(0, &self.images[b])?;
            if mu != Chain::basis(alg.clone(), &[b])? {
                laws.section = Some(b);
                break;
            }
        }
        'outer: for a in 0..dim {
            for b in 0..dim {
                let sab = self.apply(alg.basis_product(a, b))?;
                if laws.left.is_none() && sab != left_act(alg, &SparseVector::unit(a), &self.images[b])? {
                    laws.left = Some((a, b));
                }
                if laws.right.is_none() && sab != right_act(alg, &self.images[a], &SparseVector::unit(b))? {
                    laws.right = Some((a, b));
                }
                if laws.left.is_some() && laws.right.is_some() {
                    break 'outer;
                }
            }
        }
        Ok(laws)
    }
}

/// `E_{ij} ↦ E_{i,p} ⊗ E_{p,j}` on `M_m` (all indices 0-based).
pub fn corner_splitting(m: usize, pivot: usize) -> Result<SplittingData> {
    if pivot >= m {
        return Err(Error::OutOfRange(format!("pivot {pivot} in M_{m}")));
    }
    let alg = matrix_algebra(m)?;
    let images = (0..m)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .map(|(i, j)| {
            Chain::basis(
                alg.clone(),
                &[matrix_unit_index(m, i, pivot), matrix_unit_index(m, pivot, j)],
            )
        })
        .collect::<Result<Vec<_>>>()?;
    SplittingData::new(alg, images)
}

/// `E_{ij} ↦ E_{ij} ⊗ E_{jj}` on `M_m`: a section of multiplication that is
/// a left but not a right module map (for `m ≥ 2`).
pub fn corrupted_splitting(m: usize) -> Result<SplittingData> {
    let alg = matrix_algebra(m)?;
    let images = (0..m)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .map(|(i, j)| Chain::basis(alg.clone(), &[matrix_unit_index(m, i, j), matrix_unit_index(m, j, j)]))
        .collect::<Result<Vec<_>>>()?;
    SplittingData::unchecked(alg, images)
}

/// Splitting of `A ⊗ B` from splittings of the factors:
/// `s(a ⊗ b) = Σ (x ⊗ x') ⊗ (y ⊗ y')` where `s(a) = Σ x ⊗ y`, `s(b) = Σ x' ⊗ y'`.
pub fn tensor_splitting(left: &SplittingData, right: &SplittingData) -> Result<SplittingData> {
    let alg = tensor_product(left.algebra(), right.algebra())?;
    let d2 = right.algebra().dim();
    let mut images = Vec::with_capacity(alg.dim());
    for a in 0..left.algebra().dim() {
        for b in 0..d2 {
            let mut terms = Vec::new();
            for (ta, x) in left.image(a).terms() {
                for (tb, y) in right.image(b).terms() {
                    terms.push((vec![ta[0] * d2 + tb[0], ta[1] * d2 + tb[1]], x * y));
                }
            }
            images.push(Chain::from_terms(alg.clone(), 1, terms)?);
        }
    }
    SplittingData::new(alg, images)
}

/// Splitting of the frame's corner algebra `M_k ⊗ C`: the matrix-unit
/// splitting at `pivot`, tensored with `coefficient_split` when the frame
/// has coefficients.
pub fn frame_corner_splitting(
    frame: &ShiftFrame,
    pivot: usize,
    coefficient_split: Option<&SplittingData>,
) -> Result<SplittingData> {
    let base = corner_splitting(frame.k(), pivot)?;
    match (frame.coefficients(), coefficient_split) {
        (None, _) => Ok(base),
        (Some(c), Some(cs)) if cs.algebra().hash() == c.hash() => {
            let s = tensor_splitting(&base, cs)?;
            if s.algebra().hash() != frame.corner_algebra().hash() {
                return Err(Error::Internal("corner algebra presentation mismatch".into()));
            }
            Ok(s)
        }
        (Some(_), _) => Err(Error::InvalidSplitting(
            "frames with coefficients need a splitting of the coefficient algebra".into(),
        )),
    }
}

/// `1 ↦ 1 ⊗ 1` on a one-dimensional algebra with `b·b = b`.
pub fn scalar_splitting(alg: &Arc<AlgebraPresentation>) -> Result<SplittingData> {
    if alg.dim() != 1 || alg.basis_product(0, 0) != &SparseVector::unit(0) {
        return Err(Error::InvalidSplitting("not the scalar algebra".into()));
    }
    let one = Chain::from_terms(alg.clone(), 1, vec![(vec![0, 0], Q::one())])?;
    SplittingData::new(alg.clone(), vec![one])
}
