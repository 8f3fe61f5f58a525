use std::sync::Arc;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{SparseMatrix, SparseVector};
use crate::rational::{format_q, parse_q, Q};

/// How the basis sits inside a full matrix algebra: basis element `b`
/// is the matrix unit at `positions[b]` of an `order x order` matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixRepr {
    pub order: usize,
    pub positions: Vec<(usize, usize)>,
}

/// A finite-dimensional associative algebra over Q given by structure
/// constants on a fixed basis.
#[derive(Debug, PartialEq, Eq)]
pub struct AlgebraPresentation {
    labels: Vec<String>,
    /// `products[i * dim + j]` is `b_i * b_j`.
    products: Vec<SparseVector>,
    unit: Option<SparseVector>,
    norm_assignment: Option<Vec<Q>>,
    matrix: Option<MatrixRepr>,
    hash: String,
}

/// `(coordinate, "p/q")` pairs.
type SparseJson = Vec<(usize, String)>;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraJson {
    dim: usize,
    labels: Vec<String>,
    unit: Option<SparseJson>,
    products: Vec<(usize, usize, SparseJson)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    norm_assignment: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<MatrixRepr>,
}

fn vector_to_json(v: &SparseVector) -> Vec<(usize, String)> {
    v.iter().map(|(i, x)| (i, format_q(x))).collect()
}

fn vector_from_json(v: &[(usize, String)]) -> Result<SparseVector> {
    Ok(SparseVector::from_entries(
        v.iter().map(|(i, s)| Ok((*i, parse_q(s)?))).collect::<Result<Vec<_>>>()?,
    ))
}

/// Builder-style input for [`AlgebraPresentation::new`].
#[derive(Clone, Debug, Default)]
pub struct AlgebraSpec {
    pub labels: Vec<String>,
    /// `b_i * b_j` as sparse coefficient vectors; missing pairs are zero.
    pub products: Vec<(usize, usize, SparseVector)>,
    pub unit: Option<SparseVector>,
    pub norm_assignment: Option<Vec<Q>>,
    pub matrix: Option<MatrixRepr>,
}

impl AlgebraPresentation {
    /// Validates associativity on every basis triple (and the unit, if one is
    /// given) before returning.
    pub fn new(spec: AlgebraSpec) -> Result<Arc<Self>> {
        let dim = spec.labels.len();
        let mut products = vec![SparseVector::new(); dim * dim];
        for (i, j, v) in spec.products {
            if i >= dim || j >= dim || v.max_index().is_some_and(|k| k >= dim) {
                return Err(Error::OutOfRange(format!("product entry ({i}, {j}) outside dimension {dim}")));
            }
            let slot = &mut products[i * dim + j];
            *slot = slot.add(&v);
        }
        if let Some(u) = &spec.unit {
            if u.max_index().is_some_and(|k| k >= dim) {
                return Err(Error::OutOfRange("unit vector outside the basis".into()));
            }
        }
        if let Some(n) = &spec.norm_assignment {
            if n.len() != dim || n.iter().any(|x| *x <= Q::zero()) {
                return Err(Error::InvalidArgument("norm assignment needs one positive rational per basis element".into()));
            }
        }
        if let Some(m) = &spec.matrix {
            if m.positions.len() != dim || m.positions.iter().any(|&(r, c)| r >= m.order || c >= m.order) {
                return Err(Error::InvalidArgument("matrix representation does not match the basis".into()));
            }
        }
        let mut alg = AlgebraPresentation {
            labels: spec.labels,
            products,
            unit: spec.unit,
            norm_assignment: spec.norm_assignment,
            matrix: spec.matrix,
            hash: String::new(),
        };
        alg.check_associative()?;
        alg.check_unit()?;
        alg.hash = alg.compute_hash();
        Ok(Arc::new(alg))
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn unit(&self) -> Option<&SparseVector> {
        self.unit.as_ref()
    }

    pub fn is_unital(&self) -> bool {
        self.unit.is_some()
    }

    pub fn norm_assignment(&self) -> Option<&[Q]> {
        self.norm_assignment.as_deref()
    }

    pub fn matrix_repr(&self) -> Option<&MatrixRepr> {
        self.matrix.as_ref()
    }

    /// Content hash (sha256 of the canonical JSON form).
    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn basis_product(&self, i: usize, j: usize) -> &SparseVector {
        &self.products[i * self.dim() + j]
    }

    /// Bilinear extension of the structure constants.
    pub fn mul(&self, x: &SparseVector, y: &SparseVector) -> SparseVector {
        let mut acc: Vec<(usize, Q)> = Vec::new();
        for (i, a) in x.iter() {
            for (j, b) in y.iter() {
                let ab = a * b;
                for (k, c) in self.basis_product(i, j).iter() {
                    acc.push((k, &ab * c));
                }
            }
        }
        SparseVector::from_entries(acc)
    }

    /// Left multiplication by `x` as a `dim x dim` matrix.
    pub fn left_mul_matrix(&self, x: &SparseVector) -> SparseMatrix {
        let cols = (0..self.dim()).map(|j| self.mul(x, &SparseVector::unit(j))).collect();
        SparseMatrix::from_columns(self.dim(), cols).expect("products stay in range")
    }

    /// Right multiplication by `x` as a `dim x dim` matrix.
    pub fn right_mul_matrix(&self, x: &SparseVector) -> SparseMatrix {
        let cols = (0..self.dim()).map(|j| self.mul(&SparseVector::unit(j), x)).collect();
        SparseMatrix::from_columns(self.dim(), cols).expect("products stay in range")
    }

    fn check_associative(&self) -> Result<()> {
        let dim = self.dim();
        let bad = (0..dim).into_par_iter().find_map_first(|i| {
            for j in 0..dim {
                let ij = self.basis_product(i, j);
                for k in 0..dim {
                    let lhs = self.mul(ij, &SparseVector::unit(k));
                    let rhs = self.mul(&SparseVector::unit(i), self.basis_product(j, k));
                    if lhs != rhs {
                        return Some((i, j, k));
                    }
                }
            }
            None
        });
        match bad {
            Some((i, j, k)) => Err(Error::NotAssociative(i, j, k)),
            None => Ok(()),
        }
    }

    fn check_unit(&self) -> Result<()> {
        let Some(u) = &self.unit else { return Ok(()) };
        for i in 0..self.dim() {
            let b = SparseVector::unit(i);
            if self.mul(u, &b) != b || self.mul(&b, u) != b {
                return Err(Error::BadUnit(i));
            }
        }
        Ok(())
    }

    /// Whether `x` acts as a two-sided identity on every basis element.
    pub fn is_unit_element(&self, x: &SparseVector) -> bool {
        (0..self.dim()).all(|i| {
            let b = SparseVector::unit(i);
            self.mul(x, &b) == b && self.mul(&b, x) == b
        })
    }

    pub fn is_idempotent(&self, x: &SparseVector) -> bool {
        self.mul(x, x) == *x
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self.to_json_struct()).expect("algebra serializes")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_struct()).expect("algebra serializes")
    }

    fn to_json_struct(&self) -> AlgebraJson {
        let dim = self.dim();
        let mut products = Vec::new();
        for i in 0..dim {
            for j in 0..dim {
                let p = self.basis_product(i, j);
                if !p.is_zero() {
                    products.push((i, j, vector_to_json(p)));
                }
            }
        }
        AlgebraJson {
            dim,
            labels: self.labels.clone(),
            unit: self.unit.as_ref().map(vector_to_json),
            products,
            norm_assignment: self.norm_assignment.as_ref().map(|v| v.iter().map(format_q).collect()),
            matrix: self.matrix.clone(),
        }
    }

    pub fn from_json(text: &str) -> Result<Arc<Self>> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::from_json_value(&value)
    }

    pub fn from_json_value(value: &serde_json::Value) -> Result<Arc<Self>> {
        let j: AlgebraJson = serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        if j.labels.len() != j.dim {
            return Err(Error::Parse(format!("dim is {} but {} labels given", j.dim, j.labels.len())));
        }
        let products = j
            .products
            .iter()
            .map(|(i, k, v)| Ok((*i, *k, vector_from_json(v)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(AlgebraSpec {
            labels: j.labels,
            products,
            unit: j.unit.as_deref().map(vector_from_json).transpose()?,
            norm_assignment: j
                .norm_assignment
                .map(|v| v.iter().map(|s| parse_q(s)).collect::<Result<Vec<_>>>())
                .transpose()?,
            matrix: j.matrix,
        })
    }

    fn compute_hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_json().as_bytes()))
    }

    /// The same algebra re-presented on a new basis (given as coordinate
    /// vectors in the current basis). Returns the new presentation and the
    /// change-of-basis matrix whose columns are the new basis vectors.
    pub fn change_basis(&self, basis: &[SparseVector], labels: Vec<String>) -> Result<(Arc<Self>, SparseMatrix)> {
        let dim = self.dim();
        if basis.len() != dim || labels.len() != dim {
            return Err(Error::Dimension(format!("a basis of a {dim}-dimensional algebra needs {dim} vectors")));
        }
        let p = SparseMatrix::from_columns(dim, basis.to_vec())?;
        if crate::linalg::rank(&p) != dim {
            return Err(Error::InvalidArgument("new basis vectors are linearly dependent".into()));
        }
        let coords = |v: &SparseVector| -> Result<SparseVector> {
            match crate::linalg::solve(&p, v)? {
                crate::linalg::SolveOutcome::Solution(x) => Ok(x),
                crate::linalg::SolveOutcome::Infeasible(_) => Err(Error::Internal("basis does not span".into())),
            }
        };
        let mut products = Vec::new();
        for i in 0..dim {
            for j in 0..dim {
                let prod = self.mul(&basis[i], &basis[j]);
                if !prod.is_zero() {
                    products.push((i, j, coords(&prod)?));
                }
            }
        }
        let unit = self.unit.as_ref().map(coords).transpose()?;
        let alg = Self::new(AlgebraSpec {
            labels,
            products,
            unit,
            norm_assignment: None,
            matrix: None,
        })?;
        Ok((alg, p))
    }
}

/// An element of a specific algebra.
#[derive(Clone, Debug)]
pub struct AlgebraElement {
    algebra: Arc<AlgebraPresentation>,
    coeffs: SparseVector,
}

impl PartialEq for AlgebraElement {
    fn eq(&self, other: &Self) -> bool {
        self.algebra.hash() == other.algebra.hash() && self.coeffs == other.coeffs
    }
}

impl Eq for AlgebraElement {}

impl AlgebraElement {
    pub fn new(algebra: Arc<AlgebraPresentation>, coeffs: SparseVector) -> Result<Self> {
        if coeffs.max_index().is_some_and(|i| i >= algebra.dim()) {
            return Err(Error::OutOfRange(format!(
                "coefficient index outside algebra of dimension {}",
                algebra.dim()
            )));
        }
        Ok(Self { algebra, coeffs })
    }

    pub fn zero(algebra: Arc<AlgebraPresentation>) -> Self {
        Self {
            algebra,
            coeffs: SparseVector::new(),
        }
    }

    pub fn basis(algebra: Arc<AlgebraPresentation>, i: usize) -> Result<Self> {
        Self::new(algebra, SparseVector::unit(i))
    }

    pub fn unit(algebra: Arc<AlgebraPresentation>) -> Option<Self> {
        let u = algebra.unit()?.clone();
        Some(Self { algebra, coeffs: u })
    }

    pub fn algebra(&self) -> &Arc<AlgebraPresentation> {
        &self.algebra
    }

    pub fn coeffs(&self) -> &SparseVector {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_zero()
    }

    fn same_algebra(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.algebra, &other.algebra) || self.algebra.hash() == other.algebra.hash() {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch)
        }
    }

    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.same_algebra(other)?;
        Ok(Self {
            algebra: self.algebra.clone(),
            coeffs: self.algebra.mul(&self.coeffs, &other.coeffs),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_algebra(other)?;
        Ok(Self {
            algebra: self.algebra.clone(),
            coeffs: self.coeffs.add(&other.coeffs),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_algebra(other)?;
        Ok(Self {
            algebra: self.algebra.clone(),
            coeffs: self.coeffs.sub(&other.coeffs),
        })
    }

    pub fn scale(&self, c: &Q) -> Self {
        Self {
            algebra: self.algebra.clone(),
            coeffs: self.coeffs.scale(c),
        }
    }

    /// Dense matrix form for algebras with a matrix representation.
    pub fn to_matrix(&self) -> Result<Vec<Vec<Q>>> {
        let repr = self
            .algebra
            .matrix_repr()
            .ok_or_else(|| Error::InvalidArgument("algebra has no matrix interpretation".into()))?;
        let mut m = vec![vec![Q::zero(); repr.order]; repr.order];
        for (b, x) in self.coeffs.iter() {
            let (r, c) = repr.positions[b];
            m[r][c] += x;
        }
        Ok(m)
    }

    /// Inverse of [`to_matrix`](Self::to_matrix); fails when a nonzero entry
    /// has no basis element at its position.
    pub fn from_matrix(algebra: Arc<AlgebraPresentation>, m: &[Vec<Q>]) -> Result<Self> {
        let repr = algebra
            .matrix_repr()
            .ok_or_else(|| Error::InvalidArgument("algebra has no matrix interpretation".into()))?;
        let mut entries = Vec::new();
        for (r, row) in m.iter().enumerate() {
            for (c, x) in row.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                let b = repr
                    .positions
                    .iter()
                    .position(|&p| p == (r, c))
                    .ok_or_else(|| Error::Support(format!("entry ({r}, {c}) is not in the algebra")))?;
                entries.push((b, x.clone()));
            }
        }
        Self::new(algebra, SparseVector::from_entries(entries))
    }
}

/// `1` as a one-entry vector.
pub(crate) fn one_vec(i: usize) -> SparseVector {
    SparseVector::from_sorted(vec![(i, Q::one())])
}
