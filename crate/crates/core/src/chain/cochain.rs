use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tuple::{decode, encode, format_tuple, parse_tuple, space_size};
use super::{differential, Chain, ComplexKind, GradedMap};
use crate::algebra::AlgebraPresentation;
use crate::error::{Error, Result};
use crate::linalg::SparseVector;
use crate::rational::{format_q, parse_q, Q};

/// A linear functional on the degree-`n` chain space, given by its values
/// on basis tuples (missing tuples are zero).
#[derive(Clone, Debug)]
pub struct Cochain {
    algebra: Arc<AlgebraPresentation>,
    degree: usize,
    values: BTreeMap<u64, Q>,
}

impl PartialEq for Cochain {
    fn eq(&self, other: &Self) -> bool {
        self.algebra.hash() == other.algebra.hash() && self.degree == other.degree && self.values == other.values
    }
}

impl Eq for Cochain {}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CochainJson {
    algebra: String,
    degree: usize,
    values: Vec<(String, String)>,
}

impl Cochain {
    pub fn zero(algebra: Arc<AlgebraPresentation>, degree: usize) -> Self {
        Self {
            algebra,
            degree,
            values: BTreeMap::new(),
        }
    }

    pub fn from_values(algebra: Arc<AlgebraPresentation>, degree: usize, values: Vec<(Vec<usize>, Q)>) -> Result<Self> {
        space_size(algebra.dim(), degree)?;
        let dim = algebra.dim();
        let mut map = BTreeMap::new();
        for (t, x) in values {
            if t.len() != degree + 1 || t.iter().any(|&a| a >= dim) {
                return Err(Error::OutOfRange(format!("tuple {t:?} is not a degree-{degree} basis tuple")));
            }
            let e = map.entry(encode(dim, &t)).or_insert_with(Q::zero);
            *e += x;
        }
        map.retain(|_, x: &mut Q| !x.is_zero());
        Ok(Self {
            algebra,
            degree,
            values: map,
        })
    }

    /// Values indexed by tuple code (the full-basis coordinate vector).
    pub fn from_vector(algebra: Arc<AlgebraPresentation>, degree: usize, v: &SparseVector) -> Result<Self> {
        let size = space_size(algebra.dim(), degree)?;
        if v.max_index().is_some_and(|i| i as u64 >= size) {
            return Err(Error::Dimension("coordinate vector longer than the chain space".into()));
        }
        Ok(Self {
            algebra,
            degree,
            values: v.iter().map(|(i, x)| (i as u64, x.clone())).collect(),
        })
    }

    pub fn to_vector(&self) -> SparseVector {
        SparseVector::from_entries(self.values.iter().map(|(&c, x)| (c as usize, x.clone())).collect())
    }

    pub fn algebra(&self) -> &Arc<AlgebraPresentation> {
        &self.algebra
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn raw_values(&self) -> &BTreeMap<u64, Q> {
        &self.values
    }

    pub fn value(&self, tuple: &[usize]) -> Q {
        self.value_code(encode(self.algebra.dim(), tuple))
    }

    pub fn value_code(&self, code: u64) -> Q {
        self.values.get(&code).cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn evaluate(&self, c: &Chain) -> Result<Q> {
        if c.algebra().hash() != self.algebra.hash() {
            return Err(Error::AlgebraMismatch);
        }
        if c.degree() != self.degree {
            return Err(Error::Dimension(format!(
                "degree-{} cochain evaluated on a degree-{} chain",
                self.degree,
                c.degree()
            )));
        }
        Ok(c.raw_terms().iter().map(|(k, x)| self.value_code(*k) * x).sum())
    }

    pub fn add_scaled(&self, other: &Cochain, c: &Q) -> Result<Cochain> {
        if self.algebra.hash() != other.algebra.hash() || self.degree != other.degree {
            return Err(Error::AlgebraMismatch);
        }
        let v = self.to_vector().add_scaled(&other.to_vector(), c);
        Self::from_vector(self.algebra.clone(), self.degree, &v)
    }

    pub fn sub(&self, other: &Cochain) -> Result<Cochain> {
        self.add_scaled(other, &Q::from_integer((-1).into()))
    }

    pub fn scale(&self, c: &Q) -> Cochain {
        Self::from_vector(self.algebra.clone(), self.degree, &self.to_vector().scale(c)).expect("same support")
    }

    /// `f ∘ map`, a cochain on the source of `map`.
    pub fn pullback(&self, map: &GradedMap, source_degree: usize) -> Result<Cochain> {
        if map.target().hash() != self.algebra.hash() || map.target_degree(source_degree)? != self.degree {
            return Err(Error::AlgebraMismatch);
        }
        let size = space_size(map.source().dim(), source_degree)?;
        let values: Vec<(u64, Q)> = (0..size)
            .into_par_iter()
            .map(|code| {
                let t = decode(map.source().dim(), code, source_degree + 1);
                let img = map.apply_tuple(source_degree, &t)?;
                Ok((code, img.iter().map(|(k, x)| self.value_code(*k) * x).sum::<Q>()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            algebra: map.source().clone(),
            degree: source_degree,
            values: values.into_iter().filter(|(_, x)| !x.is_zero()).collect(),
        })
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let (dim, len) = (self.algebra.dim(), self.degree + 1);
        let json = CochainJson {
            algebra: self.algebra.hash().to_string(),
            degree: self.degree,
            values: self
                .values
                .iter()
                .map(|(&c, x)| (format_tuple(&decode(dim, c, len)), format_q(x)))
                .collect(),
        };
        serde_json::to_value(json).expect("cochain serializes")
    }

    pub fn from_json_value(algebra: Arc<AlgebraPresentation>, value: &serde_json::Value) -> Result<Self> {
        let json: CochainJson = serde_json::from_value(value.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        if json.algebra != algebra.hash() {
            return Err(Error::AlgebraMismatch);
        }
        let values = json
            .values
            .iter()
            .map(|(t, x)| Ok((parse_tuple(t)?, parse_q(x)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_values(algebra, json.degree, values)
    }
}

/// `(∂f)(c) = f(δc)`: the dual of the Hochschild differential, a cochain one
/// degree higher.
pub fn dual_differential(f: &Cochain) -> Result<Cochain> {
    let delta = differential(f.algebra(), ComplexKind::Hochschild);
    let m = delta.materialize(f.degree() + 1)?;
    let fv = f.to_vector();
    let values = m
        .columns()
        .par_iter()
        .enumerate()
        .map(|(j, col)| (j, col.dot(&fv)))
        .filter(|(_, x)| !x.is_zero())
        .collect::<Vec<_>>();
    Cochain::from_vector(f.algebra().clone(), f.degree() + 1, &SparseVector::from_entries(values))
}
