//! Tensor-power chain spaces `A^{⊗(n+1)}`, face maps, the bar and Hochschild
//! differentials and their duals, and graded maps materialized as matrices.

mod basis;
mod cochain;
mod graded;
mod tuple;

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

pub use basis::ChainBasis;
pub use cochain::{dual_differential, Cochain};
pub use graded::{ChainRule, Emitter, GradedMap, Mismatch};
pub(crate) use graded::undefined as undefined_degree;
pub use tuple::{decode, encode, format_tuple, parse_tuple, space_size};

use crate::algebra::AlgebraPresentation;
use crate::error::{Error, Result};
use crate::linalg::SparseVector;
use crate::rational::{format_q, parse_q, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComplexKind {
    /// Differential `β`, omitting the wrap-around face.
    Bar,
    /// Differential `δ = β + (−1)^n d_n`.
    Hochschild,
}

impl ComplexKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ComplexKind::Bar => "bar",
            ComplexKind::Hochschild => "hochschild",
        }
    }
}

/// A degree-`n` element of `A^{⊗(n+1)}`, stored as tuple codes (see
/// [`encode`]) with nonzero rational coefficients.
#[derive(Clone, Debug)]
pub struct Chain {
    algebra: Arc<AlgebraPresentation>,
    degree: usize,
    terms: BTreeMap<u64, Q>,
}

impl PartialEq for Chain {
    fn eq(&self, other: &Self) -> bool {
        self.algebra.hash() == other.algebra.hash() && self.degree == other.degree && self.terms == other.terms
    }
}

impl Eq for Chain {}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChainJson {
    algebra: String,
    degree: usize,
    terms: Vec<(String, String)>,
}

impl Chain {
    pub fn zero(algebra: Arc<AlgebraPresentation>, degree: usize) -> Self {
        Self {
            algebra,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub(crate) fn from_raw(algebra: Arc<AlgebraPresentation>, degree: usize, terms: BTreeMap<u64, Q>) -> Self {
        Self { algebra, degree, terms }
    }

    pub fn basis(algebra: Arc<AlgebraPresentation>, tuple: &[usize]) -> Result<Self> {
        Self::from_terms(algebra, tuple.len().saturating_sub(1), vec![(tuple.to_vec(), Q::one())])
    }

    pub fn from_terms(algebra: Arc<AlgebraPresentation>, degree: usize, terms: Vec<(Vec<usize>, Q)>) -> Result<Self> {
        space_size(algebra.dim(), degree)?;
        let dim = algebra.dim();
        let mut raw = Vec::with_capacity(terms.len());
        for (t, c) in terms {
            if t.len() != degree + 1 {
                return Err(Error::Dimension(format!("degree-{degree} chains need {} factors", degree + 1)));
            }
            if let Some(&a) = t.iter().find(|&&a| a >= dim) {
                return Err(Error::OutOfRange(format!("basis index {a} outside dimension {dim}")));
            }
            raw.push((encode(dim, &t), c));
        }
        Ok(Self::from_raw(algebra, degree, tuple::collect_terms(raw)))
    }

    /// Chain with coordinates `v` in `basis`.
    pub fn from_vector(algebra: Arc<AlgebraPresentation>, basis: &ChainBasis, v: &SparseVector) -> Result<Self> {
        if basis.dim() != algebra.dim() {
            return Err(Error::Dimension("basis belongs to another algebra".into()));
        }
        if v.max_index().is_some_and(|i| i >= basis.len()) {
            return Err(Error::Dimension("coordinate vector longer than the basis".into()));
        }
        let terms = v.iter().map(|(i, x)| (basis.code(i), x.clone())).collect();
        Ok(Self::from_raw(algebra, basis.degree(), terms))
    }

    /// Coordinates in `basis`; fails if a term lies outside it.
    pub fn to_vector(&self, basis: &ChainBasis) -> Result<SparseVector> {
        if basis.dim() != self.algebra.dim() || basis.degree() != self.degree {
            return Err(Error::Dimension("basis does not match the chain".into()));
        }
        let entries = self
            .terms
            .iter()
            .map(|(&code, x)| {
                basis.index_of(code).map(|i| (i, x.clone())).ok_or_else(|| {
                    Error::Support(format!(
                        "term {:?} outside the basis",
                        decode(self.algebra.dim(), code, self.degree + 1)
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SparseVector::from_entries(entries))
    }

    pub fn algebra(&self) -> &Arc<AlgebraPresentation> {
        &self.algebra
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn raw_terms(&self) -> &BTreeMap<u64, Q> {
        &self.terms
    }

    /// Terms as `(tuple, coefficient)` in lexicographic tuple order.
    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, &Q)> + '_ {
        let (dim, len) = (self.algebra.dim(), self.degree + 1);
        self.terms.iter().map(move |(&c, x)| (decode(dim, c, len), x))
    }

    pub fn coefficient(&self, tuple: &[usize]) -> Q {
        self.terms
            .get(&encode(self.algebra.dim(), tuple))
            .cloned()
            .unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.terms.len()
    }

    fn compatible(&self, other: &Chain) -> Result<()> {
        if self.algebra.hash() != other.algebra.hash() {
            return Err(Error::AlgebraMismatch);
        }
        if self.degree != other.degree {
            return Err(Error::Dimension(format!("degrees {} and {} differ", self.degree, other.degree)));
        }
        Ok(())
    }

    pub fn add_scaled(&self, other: &Chain, c: &Q) -> Result<Chain> {
        self.compatible(other)?;
        let mut terms = self.terms.clone();
        for (&k, x) in &other.terms {
            let e = terms.entry(k).or_insert_with(Q::zero);
            *e += x * c;
            if e.is_zero() {
                terms.remove(&k);
            }
        }
        Ok(Self::from_raw(self.algebra.clone(), self.degree, terms))
    }

    pub fn add(&self, other: &Chain) -> Result<Chain> {
        self.add_scaled(other, &Q::one())
    }

    pub fn sub(&self, other: &Chain) -> Result<Chain> {
        self.add_scaled(other, &-Q::one())
    }

    pub fn scale(&self, c: &Q) -> Chain {
        if c.is_zero() {
            return Self::zero(self.algebra.clone(), self.degree);
        }
        let terms = self.terms.iter().map(|(&k, x)| (k, x * c)).collect();
        Self::from_raw(self.algebra.clone(), self.degree, terms)
    }

    pub fn neg(&self) -> Chain {
        self.scale(&-Q::one())
    }

    /// `self ⊗ other`, of degree `p + q + 1`.
    pub fn tensor(&self, other: &Chain) -> Result<Chain> {
        if self.algebra.hash() != other.algebra.hash() {
            return Err(Error::AlgebraMismatch);
        }
        let degree = self.degree + other.degree + 1;
        space_size(self.algebra.dim(), degree)?;
        let shift = space_size(self.algebra.dim(), other.degree)?;
        let mut raw = Vec::with_capacity(self.nnz() * other.nnz());
        for (&a, x) in &self.terms {
            for (&b, y) in &other.terms {
                raw.push((a * shift + b, x * y));
            }
        }
        Ok(Self::from_raw(self.algebra.clone(), degree, tuple::collect_terms(raw)))
    }

    /// Whether every factor of every term lies in `allowed`.
    pub fn supported_in(&self, allowed: &[usize]) -> bool {
        self.terms().all(|(t, _)| t.iter().all(|a| allowed.contains(a)))
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let json = ChainJson {
            algebra: self.algebra.hash().to_string(),
            degree: self.degree,
            terms: self.terms().map(|(t, x)| (format_tuple(&t), format_q(x))).collect(),
        };
        serde_json::to_value(json).expect("chain serializes")
    }

    /// Parses the JSON form, checking the algebra hash.
    pub fn from_json_value(algebra: Arc<AlgebraPresentation>, value: &serde_json::Value) -> Result<Self> {
        let json: ChainJson = serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        if json.algebra != algebra.hash() {
            return Err(Error::AlgebraMismatch);
        }
        let terms = json
            .terms
            .iter()
            .map(|(t, x)| Ok((parse_tuple(t)?, parse_q(x)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(algebra, json.degree, terms)
    }
}

/// Adds `coeff · d_i(tuple)` for a degree-`n` tuple (`n ≥ 1`, `i ≤ n`).
pub(crate) fn apply_face(alg: &AlgebraPresentation, n: usize, i: usize, tuple: &[usize], coeff: &Q, out: &mut Emitter) {
    let mut t: Vec<usize> = Vec::with_capacity(n);
    if i < n {
        let prod = alg.basis_product(tuple[i], tuple[i + 1]);
        for (p, x) in prod.iter() {
            t.clear();
            t.extend_from_slice(&tuple[..i]);
            t.push(p);
            t.extend_from_slice(&tuple[i + 2..]);
            out.emit(&t, coeff * x);
        }
    } else {
        let prod = alg.basis_product(tuple[n], tuple[0]);
        for (p, x) in prod.iter() {
            t.clear();
            t.push(p);
            t.extend_from_slice(&tuple[1..n]);
            out.emit(&t, coeff * x);
        }
    }
}

fn sign(i: usize) -> Q {
    if i.is_multiple_of(2) {
        Q::one()
    } else {
        -Q::one()
    }
}

struct FaceRule {
    algebra: Arc<AlgebraPresentation>,
    i: usize,
}

impl ChainRule for FaceRule {
    fn name(&self) -> String {
        format!("d{}", self.i)
    }
    fn source(&self) -> &Arc<AlgebraPresentation> {
        &self.algebra
    }
    fn target(&self) -> &Arc<AlgebraPresentation> {
        &self.algebra
    }
    fn shift(&self) -> isize {
        -1
    }
    fn check_degree(&self, n: usize) -> Result<()> {
        if n == 0 || self.i > n {
            return Err(graded::undefined(&self.name(), n));
        }
        Ok(())
    }
    fn apply(&self, n: usize, tuple: &[usize], coeff: &Q, out: &mut Emitter) -> Result<()> {
        apply_face(&self.algebra, n, self.i, tuple, coeff, out);
        Ok(())
    }
}

struct DifferentialRule {
    algebra: Arc<AlgebraPresentation>,
    kind: ComplexKind,
}

impl ChainRule for DifferentialRule {
    fn name(&self) -> String {
        match self.kind {
            ComplexKind::Bar => "β".into(),
            ComplexKind::Hochschild => "δ".into(),
        }
    }
    fn source(&self) -> &Arc<AlgebraPresentation> {
        &self.algebra
    }
    fn target(&self) -> &Arc<AlgebraPresentation> {
        &self.algebra
    }
    fn shift(&self) -> isize {
        -1
    }
    fn check_degree(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(graded::undefined(&self.name(), n));
        }
        Ok(())
    }
    fn apply(&self, n: usize, tuple: &[usize], coeff: &Q, out: &mut Emitter) -> Result<()> {
        let last = match self.kind {
            ComplexKind::Bar => n - 1,
            ComplexKind::Hochschild => n,
        };
        for i in 0..=last {
            apply_face(&self.algebra, n, i, tuple, &(coeff * sign(i)), out);
        }
        Ok(())
    }
}

struct IdentityRule {
    algebra: Arc<AlgebraPresentation>,
}

impl ChainRule for IdentityRule {
    fn name(&self) -> String {
        "id".into()
    }
    fn source(&self) -> &Arc<AlgebraPresentation> {
        &self.algebra
    }
    fn target(&self) -> &Arc<AlgebraPresentation> {
        &self.algebra
    }
    fn shift(&self) -> isize {
        0
    }
    fn apply(&self, _n: usize, tuple: &[usize], coeff: &Q, out: &mut Emitter) -> Result<()> {
        out.emit(tuple, coeff.clone());
        Ok(())
    }
}

pub fn face(algebra: &Arc<AlgebraPresentation>, i: usize) -> GradedMap {
    GradedMap::new(FaceRule {
        algebra: algebra.clone(),
        i,
    })
}

pub fn differential(algebra: &Arc<AlgebraPresentation>, kind: ComplexKind) -> GradedMap {
    GradedMap::new(DifferentialRule {
        algebra: algebra.clone(),
        kind,
    })
}

pub fn identity(algebra: &Arc<AlgebraPresentation>) -> GradedMap {
    GradedMap::new(IdentityRule {
        algebra: algebra.clone(),
    })
}

pub fn face_map(i: usize, c: &Chain) -> Result<Chain> {
    face(c.algebra(), i).apply(c)
}

pub fn bar_differential(c: &Chain) -> Result<Chain> {
    differential(c.algebra(), ComplexKind::Bar).apply(c)
}

pub fn hochschild_differential(c: &Chain) -> Result<Chain> {
    differential(c.algebra(), ComplexKind::Hochschild).apply(c)
}
