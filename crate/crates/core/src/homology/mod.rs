//! Bar and Hochschild homology and cohomology, induced maps, long exact
//! sequences of extensions and excision comparisons.

mod engine;
mod les;
mod maps;

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

pub use engine::{DegreeHomology, EngineOptions, DEFAULT_BUDGET_COLS};
pub use les::{excision_compare, les_of_subcomplex, ExcisionDegree, ExcisionReport, Junction, LesDegree, LesReport};
pub use maps::{
    algebra_homomorphism, check_chain_map, factorwise_map, induced_map, trace_map, InducedMap,
};

use crate::algebra::AlgebraPresentation;
use crate::chain::{decode, differential, format_tuple, space_size, ComplexKind};
use crate::error::Result;
use crate::linalg::{SparseMatrix, SparseVector};
use crate::rational::format_q;

/// A complex given by its chain dimensions and materialized differentials:
/// `ds[n - 1]` is `d_n: C_n → C_{n-1}`.
pub(crate) struct MatrixComplex {
    pub dims: Vec<usize>,
    pub ds: Vec<Arc<SparseMatrix>>,
}

impl MatrixComplex {
    /// Homology in degrees `0..=max` (needs `ds` up to `d_{max+1}` where
    /// that space is nonzero).
    pub fn homology(&self, max: usize, reps: bool) -> Result<Vec<DegreeHomology>> {
        let outgoing = |n: usize| Ok((n >= 1).then(|| self.ds[n - 1].clone()));
        let incoming = |n: usize| Ok(self.ds.get(n).cloned());
        engine::graded_homology(&self.dims, &outgoing, &incoming, max, reps)
    }

    /// Cohomology of the dual complex, via transposed differentials.
    pub fn cohomology(&self, max: usize, reps: bool) -> Result<Vec<DegreeHomology>> {
        let ts: Vec<Arc<SparseMatrix>> = self.ds.par_iter().map(|d| Arc::new(d.transpose())).collect();
        let outgoing = |n: usize| Ok(ts.get(n).cloned());
        let incoming = |n: usize| Ok((n >= 1).then(|| ts[n - 1].clone()));
        engine::graded_homology(&self.dims, &outgoing, &incoming, max, reps)
    }
}

/// The complex of `a` with differentials `d_1..=d_top`, after a budget check
/// on the columns of `d_top`.
pub(crate) fn algebra_complex(
    a: &Arc<AlgebraPresentation>,
    kind: ComplexKind,
    top: usize,
    opts: &EngineOptions,
) -> Result<MatrixComplex> {
    let cols = space_size(a.dim(), top)?;
    opts.check(&format!("{} differential d_{top} of {}-dimensional algebra", kind.as_str(), a.dim()), cols)?;
    let dims = (0..=top).map(|n| space_size(a.dim(), n).map(|s| s as usize)).collect::<Result<Vec<_>>>()?;
    let d = differential(a, kind);
    let ds = (1..=top).into_par_iter().map(|n| d.materialize(n)).collect::<Result<Vec<_>>>()?;
    Ok(MatrixComplex { dims, ds })
}

/// Per-degree entry of a [`HomologyReport`].
#[derive(Clone, Debug, Serialize)]
pub struct DegreeReport {
    pub degree: usize,
    pub chain_dim: usize,
    pub cycle_rank: usize,
    pub boundary_rank: usize,
    pub homology_dim: usize,
    /// Representative (co)cycles as `[tuple, coefficient]` pairs.
    pub representatives: Vec<Vec<(String, String)>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HomologyReport {
    pub algebra: String,
    pub kind: ComplexKind,
    pub cohomology: bool,
    pub degrees: Vec<DegreeReport>,
    #[serde(skip)]
    data: Vec<DegreeHomology>,
}

impl HomologyReport {
    fn new(a: &AlgebraPresentation, kind: ComplexKind, cohomology: bool, data: Vec<DegreeHomology>) -> Self {
        let degrees = data
            .iter()
            .map(|h| DegreeReport {
                degree: h.degree,
                chain_dim: h.chain_dim,
                cycle_rank: h.cycle_dim,
                boundary_rank: h.boundary_dim,
                homology_dim: h.homology_dim(),
                representatives: h.representatives().map(|v| tuple_terms(a.dim(), h.degree, v)).collect(),
            })
            .collect();
        Self {
            algebra: a.hash().to_string(),
            kind,
            cohomology,
            degrees,
            data,
        }
    }

    pub fn dims(&self) -> Vec<usize> {
        self.degrees.iter().map(|d| d.homology_dim).collect()
    }

    pub fn degree(&self, n: usize) -> Option<&DegreeHomology> {
        self.data.get(n)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// A vector over the full degree-`n` chain space as `[tuple, coefficient]`
/// pairs.
pub(crate) fn tuple_terms(dim: usize, n: usize, v: &SparseVector) -> Vec<(String, String)> {
    v.iter()
        .map(|(i, x)| (format_tuple(&decode(dim, i as u64, n + 1)), format_q(x)))
        .collect()
}

/// Homology of the bar or Hochschild complex in degrees `0..=max_degree`.
pub fn homology(
    a: &Arc<AlgebraPresentation>,
    kind: ComplexKind,
    max_degree: usize,
    opts: &EngineOptions,
) -> Result<HomologyReport> {
    let complex = algebra_complex(a, kind, max_degree + 1, opts)?;
    let data = complex.homology(max_degree, opts.representatives)?;
    Ok(HomologyReport::new(a, kind, false, data))
}

/// Cohomology with coefficients in the dual, from the transposed
/// differentials.
pub fn cohomology(
    a: &Arc<AlgebraPresentation>,
    kind: ComplexKind,
    max_degree: usize,
    opts: &EngineOptions,
) -> Result<HomologyReport> {
    let complex = algebra_complex(a, kind, max_degree + 1, opts)?;
    let data = complex.cohomology(max_degree, opts.representatives)?;
    Ok(HomologyReport::new(a, kind, true, data))
}

#[derive(Clone, Debug, Serialize)]
pub struct AcyclicityDegree {
    pub degree: usize,
    pub bar_homology_dim: usize,
    pub acyclic: bool,
}

/// Bar-complex acyclicity in each degree up to a bound.
#[derive(Clone, Debug, Serialize)]
pub struct HUnitalVerdict {
    pub algebra: String,
    pub max_degree: usize,
    pub degrees: Vec<AcyclicityDegree>,
    pub h_unital: bool,
    pub first_failure: Option<usize>,
}

pub fn is_h_unital_up_to(a: &Arc<AlgebraPresentation>, max_degree: usize, opts: &EngineOptions) -> Result<HUnitalVerdict> {
    let opts = EngineOptions {
        representatives: false,
        ..*opts
    };
    let report = homology(a, ComplexKind::Bar, max_degree, &opts)?;
    let degrees: Vec<AcyclicityDegree> = report
        .degrees
        .iter()
        .map(|d| AcyclicityDegree {
            degree: d.degree,
            bar_homology_dim: d.homology_dim,
            acyclic: d.homology_dim == 0,
        })
        .collect();
    let first_failure = degrees.iter().find(|d| !d.acyclic).map(|d| d.degree);
    Ok(HUnitalVerdict {
        algebra: a.hash().to_string(),
        max_degree,
        degrees,
        h_unital: first_failure.is_none(),
        first_failure,
    })
}

/// Dense rows of `"p/q"` strings, for small matrices in reports.
pub(crate) fn dense_strings(m: &SparseMatrix) -> Vec<Vec<String>> {
    let mut rows = vec![vec!["0/1".to_string(); m.cols()]; m.rows()];
    for (r, c, x) in m.triplets() {
        rows[r][c] = format_q(x);
    }
    rows
}
