use std::sync::Arc;

use sha2::{Digest, Sha256};

use super::presentation::AlgebraPresentation;
use crate::error::{Error, Result};
use crate::linalg::{self, SparseMatrix, SparseVector, SubspaceBasis};

/// A short exact sequence of algebras `0 → ideal → total → quotient → 0`
/// together with a linear section of the projection.
#[derive(Clone, Debug)]
pub struct ExtensionSpec {
    ideal: Arc<AlgebraPresentation>,
    total: Arc<AlgebraPresentation>,
    quotient: Arc<AlgebraPresentation>,
    inclusion: SparseMatrix,
    projection: SparseMatrix,
    section: SparseMatrix,
    hash: String,
}

fn invalid(msg: &str) -> Error {
    Error::InvalidExtension(msg.to_string())
}

impl ExtensionSpec {
    /// Validates every extension law exactly before returning.
    pub fn new(
        ideal: Arc<AlgebraPresentation>,
        total: Arc<AlgebraPresentation>,
        quotient: Arc<AlgebraPresentation>,
        inclusion: SparseMatrix,
        projection: SparseMatrix,
        section: SparseMatrix,
    ) -> Result<Self> {
        let mut ext = Self {
            ideal,
            total,
            quotient,
            inclusion,
            projection,
            section,
            hash: String::new(),
        };
        ext.validate()?;
        ext.hash = ext.compute_hash();
        Ok(ext)
    }

    fn validate(&self) -> Result<()> {
        let (da, db, dc) = (self.ideal.dim(), self.total.dim(), self.quotient.dim());
        let shape = |m: &SparseMatrix, r, c| m.rows() == r && m.cols() == c;
        if !shape(&self.inclusion, db, da) || !shape(&self.projection, dc, db) || !shape(&self.section, db, dc) {
            return Err(Error::Dimension("extension maps have the wrong shapes".into()));
        }
        if linalg::rank(&self.inclusion) != da {
            return Err(invalid("inclusion is not injective"));
        }
        let iota = |v: &SparseVector| self.inclusion.mul_vec(v).expect("shape checked");
        let pi = |v: &SparseVector| self.projection.mul_vec(v).expect("shape checked");
        for i in 0..da {
            for j in 0..da {
                let lhs = iota(self.ideal.basis_product(i, j));
                let rhs = self.total.mul(self.inclusion.column(i), self.inclusion.column(j));
                if lhs != rhs {
                    return Err(invalid(&format!("inclusion is not multiplicative on ({i}, {j})")));
                }
            }
        }
        let image = SubspaceBasis::span(db, self.inclusion.columns())?;
        for b in 0..db {
            let eb = SparseVector::unit(b);
            for a in 0..da {
                let ia = self.inclusion.column(a);
                if !image.contains(&self.total.mul(&eb, ia)) || !image.contains(&self.total.mul(ia, &eb)) {
                    return Err(invalid(&format!("image of inclusion is not an ideal (basis {b}, {a})")));
                }
            }
        }
        for b in 0..db {
            for b2 in 0..db {
                let lhs = pi(self.total.basis_product(b, b2));
                let rhs = self.quotient.mul(self.projection.column(b), self.projection.column(b2));
                if lhs != rhs {
                    return Err(invalid(&format!("projection is not multiplicative on ({b}, {b2})")));
                }
            }
        }
        if linalg::rank(&self.projection) != dc {
            return Err(invalid("projection is not surjective"));
        }
        // kernel ⊇ image, and equal dimensions force equality
        if !self.projection.matmul(&self.inclusion)?.is_zero() || da + dc != db {
            return Err(invalid("kernel of projection differs from image of inclusion"));
        }
        if self.projection.matmul(&self.section)? != SparseMatrix::identity(dc) {
            return Err(invalid("projection composed with section is not the identity"));
        }
        Ok(())
    }

    fn compute_hash(&self) -> String {
        let mut h = Sha256::new();
        for part in [self.ideal.hash(), self.total.hash(), self.quotient.hash()] {
            h.update(part.as_bytes());
        }
        for m in [&self.inclusion, &self.projection, &self.section] {
            h.update(m.to_market(None).as_bytes());
        }
        hex::encode(h.finalize())
    }

    pub fn ideal(&self) -> &Arc<AlgebraPresentation> {
        &self.ideal
    }

    pub fn total(&self) -> &Arc<AlgebraPresentation> {
        &self.total
    }

    pub fn quotient(&self) -> &Arc<AlgebraPresentation> {
        &self.quotient
    }

    pub fn inclusion(&self) -> &SparseMatrix {
        &self.inclusion
    }

    pub fn projection(&self) -> &SparseMatrix {
        &self.projection
    }

    pub fn section(&self) -> &SparseMatrix {
        &self.section
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    /// Same extension with another linear section (validated).
    pub fn with_section(&self, section: SparseMatrix) -> Result<Self> {
        Self::new(
            self.ideal.clone(),
            self.total.clone(),
            self.quotient.clone(),
            self.inclusion.clone(),
            self.projection.clone(),
            section,
        )
    }
}
