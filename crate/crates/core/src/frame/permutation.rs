use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use super::ShiftFrame;
use crate::algebra::{
    matrix_algebra, matrix_unit_index, semidirect_product, AlgebraElement, AlgebraPresentation, AlgebraSpec,
    BimoduleAction, ExtensionSpec,
};
use crate::error::{Error, Result};
use crate::rational::Q;

/// A signed permutation matrix `U = DΠ`, stored combinatorially: `Π` sends
/// basis vector `e_i` to `e_{perm[i]}` and `D = diag(signs)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SignedPermutation {
    perm: Vec<usize>,
    signs: Vec<i8>,
}

impl SignedPermutation {
    pub fn new(perm: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        let n = perm.len();
        if signs.len() != n {
            return Err(Error::Dimension("one sign per coordinate".into()));
        }
        let mut seen = vec![false; n];
        for &p in &perm {
            if p >= n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidArgument("not a permutation".into()));
            }
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidArgument("signs must be +1 or -1".into()));
        }
        Ok(Self { perm, signs })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            perm: (0..n).collect(),
            signs: vec![1; n],
        }
    }

    pub fn transposition(n: usize, i: usize, j: usize) -> Result<Self> {
        if i >= n || j >= n {
            return Err(Error::OutOfRange(format!("transposition ({i} {j}) on {n} points")));
        }
        let mut perm: Vec<usize> = (0..n).collect();
        perm.swap(i, j);
        Ok(Self { perm, signs: vec![1; n] })
    }

    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Self {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(rng);
        let signs = (0..n).map(|_| if rng.gen_bool(0.5) { 1 } else { -1 }).collect();
        Self { perm, signs }
    }

    pub fn size(&self) -> usize {
        self.perm.len()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    /// Entries `(row, col, ±1)` of the matrix.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, i8)> + '_ {
        self.perm.iter().enumerate().map(|(i, &p)| (p, i, self.signs[p]))
    }

    pub fn to_dense(&self) -> Vec<Vec<Q>> {
        let n = self.size();
        let mut m = vec![vec![Q::zero(); n]; n];
        for (r, c, s) in self.entries() {
            m[r][c] = Q::from_integer(s.into());
        }
        m
    }

    /// The matrix product `self · other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.size() != other.size() {
            return Err(Error::Dimension("signed permutations of different sizes".into()));
        }
        let perm: Vec<usize> = other.perm.iter().map(|&p| self.perm[p]).collect();
        let mut signs = vec![1i8; self.size()];
        for (i, &target) in perm.iter().enumerate() {
            signs[target] = self.signs[target] * other.signs[other.perm[i]];
        }
        Ok(Self { perm, signs })
    }

    pub fn inverse(&self) -> Self {
        let n = self.size();
        let mut perm = vec![0; n];
        for (i, &p) in self.perm.iter().enumerate() {
            perm[p] = i;
        }
        // (DΠ)^{-1} = Π^{-1} D = D' Π^{-1} with D' = diag(signs ∘ perm)
        let signs = (0..n).map(|i| self.signs[self.perm[i]]).collect();
        Self { perm, signs }
    }

    /// Signs `D'` with `DΠ = ΠD'`.
    pub fn commuted_signs(&self) -> Vec<i8> {
        (0..self.size()).map(|i| self.signs[self.perm[i]]).collect()
    }

    /// Dense `Π · diag(D')`, which equals [`to_dense`](Self::to_dense).
    pub fn to_dense_commuted(&self) -> Vec<Vec<Q>> {
        let n = self.size();
        let d = self.commuted_signs();
        let mut m = vec![vec![Q::zero(); n]; n];
        for (i, &p) in self.perm.iter().enumerate() {
            m[p][i] = Q::from_integer(d[i].into());
        }
        m
    }

    pub fn is_involution(&self) -> bool {
        self.compose(self).is_ok_and(|sq| sq == Self::identity(self.size()))
    }

    /// `U ⊗ 1_C` in the frame's ambient algebra.
    pub fn to_element(&self, frame: &ShiftFrame) -> Result<AlgebraElement> {
        if self.size() != frame.order() {
            return Err(Error::Dimension(format!(
                "permutation of {} points in an order-{} frame",
                self.size(),
                frame.order()
            )));
        }
        let dense: Vec<Vec<Q>> = self.to_dense();
        let unit = match frame.coefficients() {
            None => crate::linalg::SparseVector::unit(0),
            Some(c) => c.unit().expect("frame coefficients are unital").clone(),
        };
        let mut entries = Vec::new();
        for (r, row) in dense.iter().enumerate() {
            for (c, x) in row.iter().enumerate() {
                if !x.is_zero() {
                    for (t, y) in unit.iter() {
                        entries.push((frame.index(r, c, t), x * y));
                    }
                }
            }
        }
        frame.element(crate::linalg::SparseVector::from_entries(entries))
    }
}

/// The involution `U = ∏_{i<k} (i, i+shift)` with `U a U⁻¹ = S^{shift} a R^{shift}`
/// for every `a` in the leading `k`-corner. Validated on the corner basis.
pub fn sigma_conjugator(frame: &ShiftFrame, shift: usize) -> Result<SignedPermutation> {
    let (k, m) = (frame.k(), frame.order());
    if shift + k > m {
        return Err(Error::OutOfRange(format!("shift {shift} of a {k}-corner needs order >= {}", shift + k)));
    }
    if shift != 0 && shift < k {
        return Err(Error::InvalidArgument(format!("shift {shift} overlaps the {k}-corner")));
    }
    let mut u = SignedPermutation::identity(m);
    if shift > 0 {
        for i in 0..k {
            u = u.compose(&SignedPermutation::transposition(m, i, i + shift)?)?;
        }
    }
    let ue = u.to_element(frame)?;
    let ui = u.inverse().to_element(frame)?;
    for &b in frame.corner_indices() {
        let a = frame.element(crate::linalg::SparseVector::unit(b))?;
        let conj = ue.multiply(&a)?.multiply(&ui)?;
        if conj.coeffs() != &frame.conjugate_shift(a.coeffs(), shift) {
            return Err(Error::Internal("conjugator does not realize the shift".into()));
        }
    }
    debug_assert!(u.is_involution());
    Ok(u)
}

/// The split extension `0 → M_m → M_m ⊕ span{1, U} → span{1, U} → 0` for an
/// involution `U`, with `span{1, U}` acting on `M_m` by matrix multiplication.
pub fn involution_extension(
    u: &SignedPermutation,
) -> Result<(std::sync::Arc<AlgebraPresentation>, ExtensionSpec)> {
    if !u.is_involution() {
        return Err(Error::InvalidArgument("U must square to the identity".into()));
    }
    let m = u.size();
    let ideal = matrix_algebra(m)?;
    let one = crate::linalg::SparseVector::unit(0);
    let (i1, iu) = (crate::linalg::SparseVector::unit(0), crate::linalg::SparseVector::unit(1));
    let multipliers = AlgebraPresentation::new(AlgebraSpec {
        labels: vec!["1".into(), "U".into()],
        products: vec![(0, 0, i1.clone()), (0, 1, iu.clone()), (1, 0, iu), (1, 1, i1.clone())],
        unit: Some(one),
        ..Default::default()
    })?;
    let mut coeffs = Vec::new();
    for (r, c, s) in u.entries() {
        coeffs.push((matrix_unit_index(m, r, c), Q::from_integer(s.into())));
    }
    let ue = crate::linalg::SparseVector::from_entries(coeffs);
    let id = crate::linalg::SparseMatrix::identity(ideal.dim());
    let action = BimoduleAction {
        left: vec![id.clone(), ideal.left_mul_matrix(&ue)],
        right: vec![id, ideal.right_mul_matrix(&ue)],
    };
    semidirect_product(&ideal, &multipliers, &action)
}
