use std::sync::Arc;

use num_traits::Zero;
use serde::Serialize;

use super::engine::{degree_homology, DegreeHomology, EngineOptions};
use super::dense_strings;
use crate::algebra::{matrix_algebra, scalar_algebra, AlgebraPresentation};
use crate::chain::{differential, space_size, Chain, ChainBasis, ComplexKind, GradedMap};
use crate::error::{Error, Result};
use crate::linalg::{rank, SparseMatrix, SparseVector};

/// `f^{⊗(n+1)}` for a linear map `f: A → B` given by its `dim B × dim A`
/// matrix.
pub fn factorwise_map(
    source: &Arc<AlgebraPresentation>,
    target: &Arc<AlgebraPresentation>,
    matrix: &SparseMatrix,
) -> Result<GradedMap> {
    if matrix.rows() != target.dim() || matrix.cols() != source.dim() {
        return Err(Error::Dimension(format!(
            "a map from a {}-dimensional to a {}-dimensional algebra needs a {}x{} matrix",
            source.dim(),
            target.dim(),
            target.dim(),
            source.dim()
        )));
    }
    let columns: Vec<SparseVector> = matrix.columns().to_vec();
    Ok(GradedMap::from_fn("factorwise", source.clone(), target.clone(), 0, move |_, tuple, c, out| {
        let factors: Vec<SparseVector> = tuple.iter().map(|&a| columns[a].clone()).collect();
        out.emit_product(&factors, c);
        Ok(())
    }))
}

/// [`factorwise_map`] after checking that the matrix is multiplicative on
/// basis pairs.
pub fn algebra_homomorphism(
    source: &Arc<AlgebraPresentation>,
    target: &Arc<AlgebraPresentation>,
    matrix: &SparseMatrix,
) -> Result<GradedMap> {
    let map = factorwise_map(source, target, matrix)?;
    for i in 0..source.dim() {
        for j in 0..source.dim() {
            let lhs = matrix.mul_vec(source.basis_product(i, j))?;
            let rhs = target.mul(matrix.column(i), matrix.column(j));
            if lhs != rhs {
                return Err(Error::InvalidArgument(format!(
                    "map is not multiplicative on ({}, {})",
                    source.label(i),
                    source.label(j)
                )));
            }
        }
    }
    Ok(map)
}

/// The generalized trace `M_m^{⊗(n+1)} → Q^{⊗(n+1)}`:
/// `E_{i_0 j_0} ⊗ ⋯ ⊗ E_{i_n j_n} ↦ 1` when `j_r = i_{r+1}` cyclically, else 0.
pub fn trace_map(m: usize) -> Result<GradedMap> {
    let source = matrix_algebra(m)?;
    Ok(GradedMap::from_fn("trace", source, scalar_algebra(), 0, move |n, tuple, c, out| {
        let ij = |a: usize| (a / m, a % m);
        let cyclic = (0..=n).all(|r| ij(tuple[r]).1 == ij(tuple[(r + 1) % (n + 1)]).0);
        if cyclic {
            out.emit(&vec![0; n + 1], c.clone());
        }
        Ok(())
    }))
}

/// Checks `d ∘ f = f ∘ d` on all of `C_n(source)`, `n ≥ 1`.
pub fn check_chain_map(f: &GradedMap, kind: ComplexKind, n: usize, opts: &EngineOptions) -> Result<()> {
    if f.shift() != 0 {
        return Err(Error::InvalidArgument(format!("{} is not degree-preserving", f.name())));
    }
    let (a, b) = (f.source(), f.target());
    opts.check(&format!("chain-map check in degree {n}"), space_size(a.dim(), n)?)?;
    let lhs = differential(b, kind).compose(f)?;
    let rhs = f.compose(&differential(a, kind))?;
    let basis = ChainBasis::full(a.dim(), n)?;
    match lhs.first_mismatch(&rhs, n, &basis)? {
        Some(m) => Err(Error::NotChainMap {
            degree: n,
            witness: m.tuple,
        }),
        None => Ok(()),
    }
}

/// Matrix of a chain map on homology, in the representative bases.
#[derive(Clone, Debug)]
pub struct InducedMap {
    pub degree: usize,
    pub source_dim: usize,
    pub target_dim: usize,
    pub matrix: SparseMatrix,
    pub rank: usize,
}

#[derive(Serialize)]
struct InducedMapJson {
    degree: usize,
    source_dim: usize,
    target_dim: usize,
    rank: usize,
    is_isomorphism: bool,
    matrix: Vec<Vec<String>>,
}

impl InducedMap {
    pub fn is_isomorphism(&self) -> bool {
        self.source_dim == self.target_dim && self.rank == self.source_dim
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(InducedMapJson {
            degree: self.degree,
            source_dim: self.source_dim,
            target_dim: self.target_dim,
            rank: self.rank,
            is_isomorphism: self.is_isomorphism(),
            matrix: dense_strings(&self.matrix),
        })
        .expect("induced map serializes")
    }
}

/// Homology of one algebra complex in a single degree.
pub(crate) fn single_degree(
    a: &Arc<AlgebraPresentation>,
    kind: ComplexKind,
    n: usize,
    opts: &EngineOptions,
) -> Result<DegreeHomology> {
    opts.check(&format!("{} differential d_{} of {}-dimensional algebra", kind.as_str(), n + 1, a.dim()), space_size(a.dim(), n + 1)?)?;
    let d = differential(a, kind);
    let outgoing = if n >= 1 { Some(d.materialize(n)?) } else { None };
    let incoming = Some(d.materialize(n + 1)?);
    degree_homology(n, space_size(a.dim(), n)? as usize, outgoing, incoming, true)
}

/// The map a chain map induces on degree-`n` homology. The chain-map
/// property is checked first on degrees `max(n, 1)` and `n + 1`.
pub fn induced_map(f: &GradedMap, kind: ComplexKind, n: usize, opts: &EngineOptions) -> Result<InducedMap> {
    check_chain_map(f, kind, n.max(1), opts)?;
    check_chain_map(f, kind, n + 1, opts)?;
    let (hs, ht) = rayon::join(
        || single_degree(f.source(), kind, n, opts),
        || single_degree(f.target(), kind, n, opts),
    );
    let (hs, ht) = (hs?, ht?);
    let src = ChainBasis::full(f.source().dim(), n)?;
    let tgt = ChainBasis::full(f.target().dim(), n)?;
    let columns = hs
        .representatives()
        .map(|z| {
            let image = f.apply(&Chain::from_vector(f.source().clone(), &src, z)?)?;
            ht.class_of(&image.to_vector(&tgt)?)
        })
        .collect::<Result<Vec<_>>>()?;
    let matrix = SparseMatrix::from_columns(ht.homology_dim(), columns)?;
    let rank = rank(&matrix);
    Ok(InducedMap {
        degree: n,
        source_dim: hs.homology_dim(),
        target_dim: ht.homology_dim(),
        matrix,
        rank,
    })
}

/// Keeps the image terms of `f` on `source` that lie in `target`, dropping
/// the rest: the matrix of `f` followed by the projection onto `target`.
pub(crate) fn materialize_projected(
    f: &GradedMap,
    n: usize,
    source: &ChainBasis,
    target: &ChainBasis,
) -> Result<SparseMatrix> {
    let images = f.images(n, source)?;
    let columns = images
        .into_iter()
        .map(|img| {
            SparseVector::from_entries(
                img.into_iter()
                    .filter_map(|(code, x)| target.index_of(code).map(|r| (r, x)))
                    .filter(|(_, x)| !x.is_zero())
                    .collect(),
            )
        })
        .collect();
    SparseMatrix::from_columns(target.len(), columns)
}
