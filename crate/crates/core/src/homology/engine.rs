use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{column_space, rank, rank_and_kernel, Echelon, PivotSide, SparseMatrix, SparseVector, SubspaceBasis};

/// Limits applied before any differential is materialized.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EngineOptions {
    /// Largest chain-space dimension a single matrix may have as its column
    /// count.
    pub budget_cols: u64,
    /// Whether to compute representative cycles.
    pub representatives: bool,
}

pub const DEFAULT_BUDGET_COLS: u64 = 250_000;

impl Default for EngineOptions {
    fn default() -> Self {
        Self {
            budget_cols: DEFAULT_BUDGET_COLS,
            representatives: true,
        }
    }
}

impl EngineOptions {
    pub fn check(&self, what: &str, cols: u64) -> Result<()> {
        if cols > self.budget_cols {
            return Err(Error::Budget {
                what: what.to_string(),
                needed: cols as u128,
                budget: self.budget_cols as u128,
            });
        }
        Ok(())
    }
}

/// Homology of a complex at one degree: `ker(out) / im(in)`.
///
/// Representatives are canonical: they are reduced against the boundary
/// echelon form and then brought to reduced echelon form among themselves,
/// so the class of a cycle `z` has coordinates `r[p]` read off at the
/// representative pivots `p`, where `r` is `z` reduced by the boundaries.
#[derive(Clone, Debug)]
pub struct DegreeHomology {
    pub degree: usize,
    pub chain_dim: usize,
    pub cycle_dim: usize,
    pub boundary_dim: usize,
    boundaries: Option<SubspaceBasis>,
    reps: Vec<(usize, SparseVector)>,
}

impl DegreeHomology {
    pub fn homology_dim(&self) -> usize {
        self.cycle_dim - self.boundary_dim
    }

    /// Representative cycles in pivot order.
    pub fn representatives(&self) -> impl Iterator<Item = &SparseVector> {
        self.reps.iter().map(|(_, v)| v)
    }

    pub fn has_representatives(&self) -> bool {
        self.reps.len() == self.homology_dim()
    }

    /// Coordinates of the class of a cycle `z` in the representative basis.
    pub fn class_of(&self, z: &SparseVector) -> Result<SparseVector> {
        if self.homology_dim() == 0 {
            return Ok(SparseVector::new());
        }
        if !self.has_representatives() {
            return Err(Error::Internal("homology computed without representatives".into()));
        }
        let r = self.boundaries.as_ref().map_or_else(|| z.clone(), |b| b.echelon().reduce(z));
        let coords = SparseVector::from_entries(self.reps.iter().enumerate().map(|(i, (p, _))| (i, r.get(*p))).collect());
        // the remainder must lie in the span of the representatives
        let residual = self
            .reps
            .iter()
            .zip(coords.to_dense(self.reps.len()))
            .fold(r, |acc, ((_, v), c)| acc.add_scaled(v, &-c));
        if !residual.is_zero() {
            return Err(Error::NotCycle(format!("vector is not a cycle in degree {}", self.degree)));
        }
        Ok(coords)
    }

    pub fn is_boundary(&self, z: &SparseVector) -> bool {
        match &self.boundaries {
            Some(b) => b.contains(z),
            None => z.is_zero() || self.boundary_dim == self.chain_dim,
        }
    }
}

type MatrixSource<'a> = dyn Fn(usize) -> Result<Option<Arc<SparseMatrix>>> + Sync + 'a;

/// Homology of a graded complex in degrees `0..=max_degree`. `outgoing(n)`
/// is the differential leaving degree `n` (its columns index degree `n`),
/// `incoming(n)` the one arriving there (its rows index degree `n`); `None`
/// stands for a zero map.
pub(crate) fn graded_homology(
    chain_dims: &[usize],
    outgoing: &MatrixSource<'_>,
    incoming: &MatrixSource<'_>,
    max_degree: usize,
    representatives: bool,
) -> Result<Vec<DegreeHomology>> {
    (0..=max_degree)
        .into_par_iter()
        .map(|n| degree_homology(n, chain_dims[n], outgoing(n)?, incoming(n)?, representatives))
        .collect()
}

pub(crate) fn degree_homology(
    degree: usize,
    chain_dim: usize,
    outgoing: Option<Arc<SparseMatrix>>,
    incoming: Option<Arc<SparseMatrix>>,
    representatives: bool,
) -> Result<DegreeHomology> {
    if outgoing.as_ref().is_some_and(|m| m.cols() != chain_dim) || incoming.as_ref().is_some_and(|m| m.rows() != chain_dim) {
        return Err(Error::Internal(format!("differential shapes do not match in degree {degree}")));
    }
    let (boundaries, out_rank) = rayon::join(
        || incoming.as_ref().map(|m| column_space(m)),
        || outgoing.as_ref().map_or(0, |m| rank(m)),
    );
    let boundary_dim = boundaries.as_ref().map_or(0, |b| b.dim());
    let cycle_dim = chain_dim - out_rank;
    if cycle_dim < boundary_dim {
        return Err(Error::Internal(format!("more boundaries than cycles in degree {degree}")));
    }
    let mut h = DegreeHomology {
        degree,
        chain_dim,
        cycle_dim,
        boundary_dim,
        boundaries: None,
        reps: Vec::new(),
    };
    if cycle_dim == boundary_dim || !representatives {
        return Ok(h);
    }
    let kernel: Vec<SparseVector> = match &outgoing {
        Some(m) => rank_and_kernel(m).1.vectors(),
        None => (0..chain_dim).map(SparseVector::unit).collect(),
    };
    let reduce = |v: &SparseVector| boundaries.as_ref().map_or_else(|| v.clone(), |b| b.echelon().reduce(v));
    let mut classes = Echelon::new(chain_dim, PivotSide::Leading);
    for z in &kernel {
        classes.insert(&reduce(z));
        if classes.rank() == cycle_dim - boundary_dim {
            break;
        }
    }
    classes.fully_reduce();
    if classes.rank() != cycle_dim - boundary_dim {
        return Err(Error::Internal(format!("homology representatives incomplete in degree {degree}")));
    }
    h.reps = classes.rows().map(|(p, v)| (p, v.clone())).collect();
    h.boundaries = boundaries;
    Ok(h)
}
