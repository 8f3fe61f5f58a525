use std::sync::Arc;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::algebra::{matrix_algebra, tensor_product, AlgebraElement, AlgebraPresentation};
use crate::error::{Error, Result};
use crate::linalg::SparseVector;
use crate::rational::Q;

/// Frame parameters as they appear in scenario files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameConfig {
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default)]
    pub spare: usize,
    #[serde(default)]
    pub coefficient_algebra: Option<serde_json::Value>,
}

/// A finite truncation of the shift multipliers: the ambient algebra
/// `M_M ⊗ C` with `M = N·k + spare`, the down shift `S`, the up shift `R`,
/// and the block projections.
///
/// Ambient basis element `E_{ij} ⊗ c_t` (all 0-based) has index
/// `(i·M + j)·dim C + t`. Blocks are numbered from 0: block `l` covers rows
/// and columns `l·k .. (l+1)·k`.
#[derive(Clone, Debug)]
pub struct ShiftFrame {
    k: usize,
    blocks: usize,
    spare: usize,
    order: usize,
    coefficients: Option<Arc<AlgebraPresentation>>,
    ambient: Arc<AlgebraPresentation>,
    corner: Arc<AlgebraPresentation>,
    corner_indices: Vec<usize>,
}

impl ShiftFrame {
    pub fn new(k: usize, blocks: usize, spare: usize) -> Result<Self> {
        Self::with_coefficients(k, blocks, spare, None)
    }

    /// Frame over `M_M ⊗ C` for a unital coefficient algebra `C`.
    pub fn with_coefficients(
        k: usize,
        blocks: usize,
        spare: usize,
        coefficients: Option<Arc<AlgebraPresentation>>,
    ) -> Result<Self> {
        if k == 0 || blocks == 0 {
            return Err(Error::InvalidArgument("shift frames need k >= 1 and N >= 1".into()));
        }
        if coefficients.as_ref().is_some_and(|c| !c.is_unital()) {
            return Err(Error::InvalidArgument("the coefficient algebra must be unital".into()));
        }
        let order = blocks * k + spare;
        let (ambient, corner) = match &coefficients {
            None => (matrix_algebra(order)?, matrix_algebra(k)?),
            Some(c) => (
                tensor_product(&*matrix_algebra(order)?, c)?,
                tensor_product(&*matrix_algebra(k)?, c)?,
            ),
        };
        let dc = coefficients.as_ref().map_or(1, |c| c.dim());
        let corner_indices = (0..k)
            .flat_map(|i| (0..k).flat_map(move |j| (0..dc).map(move |t| (i * order + j) * dc + t)))
            .collect();
        let frame = Self {
            k,
            blocks,
            spare,
            order,
            coefficients,
            ambient,
            corner,
            corner_indices,
        };
        frame.validate()?;
        Ok(frame)
    }

    pub fn from_config(config: &FrameConfig) -> Result<Self> {
        let coefficients = config
            .coefficient_algebra
            .as_ref()
            .map(AlgebraPresentation::from_json_value)
            .transpose()?;
        Self::with_coefficients(config.k, config.n, config.spare, coefficients)
    }

    pub fn config(&self) -> FrameConfig {
        FrameConfig {
            k: self.k,
            n: self.blocks,
            spare: self.spare,
            coefficient_algebra: self.coefficients.as_ref().map(|c| c.to_json_value()),
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn spare(&self) -> usize {
        self.spare
    }

    /// The ambient matrix order `M`.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coefficients(&self) -> Option<&Arc<AlgebraPresentation>> {
        self.coefficients.as_ref()
    }

    pub fn coefficient_dim(&self) -> usize {
        self.coefficients.as_ref().map_or(1, |c| c.dim())
    }

    pub fn ambient(&self) -> &Arc<AlgebraPresentation> {
        &self.ambient
    }

    /// The leading `k×k` corner as an algebra in its own right (`M_k ⊗ C`).
    pub fn corner_algebra(&self) -> &Arc<AlgebraPresentation> {
        &self.corner
    }

    /// Ambient indices of the corner basis, in corner-algebra order.
    pub fn corner_indices(&self) -> &[usize] {
        &self.corner_indices
    }

    pub fn index(&self, i: usize, j: usize, t: usize) -> usize {
        (i * self.order + j) * self.coefficient_dim() + t
    }

    /// `(i, j, t)` for an ambient basis index.
    pub fn position(&self, b: usize) -> (usize, usize, usize) {
        let dc = self.coefficient_dim();
        let (ij, t) = (b / dc, b % dc);
        (ij / self.order, ij % self.order, t)
    }

    pub fn is_corner(&self, b: usize) -> bool {
        let (i, j, _) = self.position(b);
        i < self.k && j < self.k
    }

    /// `S^s b R^s` for a basis element: the unit moved `s` steps down the
    /// diagonal, or `None` when it falls off the truncation.
    pub fn shift_basis(&self, b: usize, s: usize) -> Option<usize> {
        let (i, j, t) = self.position(b);
        (i + s < self.order && j + s < self.order).then(|| self.index(i + s, j + s, t))
    }

    /// `S^s a R^s`, exact in the truncated ambient algebra.
    pub fn conjugate_shift(&self, a: &SparseVector, s: usize) -> SparseVector {
        SparseVector::from_entries(
            a.iter()
                .filter_map(|(b, x)| self.shift_basis(b, s).map(|b2| (b2, x.clone())))
                .collect(),
        )
    }

    /// `R^s a S^s`.
    pub fn conjugate_unshift(&self, a: &SparseVector, s: usize) -> SparseVector {
        SparseVector::from_entries(
            a.iter()
                .filter_map(|(b, x)| {
                    let (i, j, t) = self.position(b);
                    (i >= s && j >= s).then(|| (self.index(i - s, j - s, t), x.clone()))
                })
                .collect(),
        )
    }

    fn coefficient_unit(&self) -> SparseVector {
        match &self.coefficients {
            None => SparseVector::unit(0),
            Some(c) => c.unit().expect("checked unital").clone(),
        }
    }

    /// `m ⊗ 1_C` for a scalar matrix given by its entries `(i, j, x)`.
    fn lift_scalar_matrix(&self, entries: impl IntoIterator<Item = (usize, usize, Q)>) -> SparseVector {
        let unit = self.coefficient_unit();
        let mut out = Vec::new();
        for (i, j, x) in entries {
            for (t, y) in unit.iter() {
                out.push((self.index(i, j, t), &x * y));
            }
        }
        SparseVector::from_entries(out)
    }

    pub fn element(&self, coeffs: SparseVector) -> Result<AlgebraElement> {
        AlgebraElement::new(self.ambient.clone(), coeffs)
    }

    /// The down shift `S = Σ E_{i+1,i}`.
    pub fn s(&self) -> AlgebraElement {
        let v = self.lift_scalar_matrix((0..self.order - 1).map(|i| (i + 1, i, Q::one())));
        self.element(v).expect("in range")
    }

    /// The up shift `R = Sᵀ`.
    pub fn r(&self) -> AlgebraElement {
        let v = self.lift_scalar_matrix((0..self.order - 1).map(|i| (i, i + 1, Q::one())));
        self.element(v).expect("in range")
    }

    pub fn identity(&self) -> AlgebraElement {
        self.element(self.lift_scalar_matrix((0..self.order).map(|i| (i, i, Q::one()))))
            .expect("in range")
    }

    /// Projection onto block `l` (0-based): `S^{lk}R^{lk} − S^{(l+1)k}R^{(l+1)k}`.
    pub fn projection(&self, l: usize) -> Result<AlgebraElement> {
        if l >= self.blocks {
            return Err(Error::OutOfRange(format!("block {l} of a {}-block frame", self.blocks)));
        }
        self.element(self.lift_scalar_matrix((l * self.k..(l + 1) * self.k).map(|i| (i, i, Q::one()))))
    }

    pub fn projection_vector(&self, l: usize) -> SparseVector {
        self.projection(l).expect("block in range").coeffs().clone()
    }

    pub fn check_corner(&self, a: &SparseVector) -> Result<()> {
        match a.iter().find(|(b, _)| !self.is_corner(*b)) {
            Some((b, _)) => Err(Error::Support(format!(
                "{} is outside the leading {}x{} corner",
                self.ambient.label(b),
                self.k,
                self.k
            ))),
            None => Ok(()),
        }
    }

    /// `Σ_{l<n} S^{lk} a R^{lk}` for corner-supported `a`.
    pub fn block_amplify(&self, a: &AlgebraElement, n: usize) -> Result<AlgebraElement> {
        if a.algebra().hash() != self.ambient.hash() {
            return Err(Error::AlgebraMismatch);
        }
        self.check_corner(a.coeffs())?;
        if n == 0 || n > self.blocks {
            return Err(Error::OutOfRange(format!("{n} blocks requested from a {}-block frame", self.blocks)));
        }
        let sum = (0..n).fold(SparseVector::new(), |acc, l| acc.add(&self.conjugate_shift(a.coeffs(), l * self.k)));
        self.element(sum)
    }

    fn power(&self, x: &AlgebraElement, e: usize) -> AlgebraElement {
        (0..e).fold(self.identity(), |acc, _| acc.multiply(x).expect("same algebra"))
    }

    /// Checks the frame identities by explicit products in the ambient
    /// algebra.
    fn validate(&self) -> Result<()> {
        let fail = |what: &str| Err(Error::Internal(format!("shift frame identity failed: {what}")));
        let (s, r) = (self.s(), self.r());
        let rs = r.multiply(&s)?;
        let last = self.order - 1;
        let expected = self
            .identity()
            .sub(&self.element(self.lift_scalar_matrix([(last, last, Q::one())]))?)?;
        if rs != expected {
            return fail("RS = 1 - E_MM");
        }
        let powers_s: Vec<AlgebraElement> = (0..=self.blocks).map(|l| self.power(&s, l * self.k)).collect();
        let powers_r: Vec<AlgebraElement> = (0..=self.blocks).map(|l| self.power(&r, l * self.k)).collect();
        for l in 0..self.blocks {
            let p = powers_s[l]
                .multiply(&powers_r[l])?
                .sub(&powers_s[l + 1].multiply(&powers_r[l + 1])?)?;
            let pl = self.projection(l)?;
            if p != pl || pl.multiply(&pl)? != pl {
                return fail("block projection");
            }
            for m in 0..self.blocks {
                if m != l && !pl.multiply(&self.projection(m)?)?.is_zero() {
                    return fail("orthogonal projections");
                }
            }
            for &b in &self.corner_indices {
                let a = self.element(SparseVector::unit(b))?;
                let moved = powers_s[l].multiply(&a)?.multiply(&powers_r[l])?;
                if moved.coeffs() != &self.conjugate_shift(a.coeffs(), l * self.k) {
                    return fail("shifted corner element");
                }
                if pl.multiply(&moved)?.multiply(&pl)? != moved {
                    return fail("block support");
                }
                if powers_r[l].multiply(&moved)?.multiply(&powers_s[l])? != a {
                    return fail("unshift of shifted corner element");
                }
            }
        }
        Ok(())
    }
}
