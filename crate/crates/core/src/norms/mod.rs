//! Induced matrix norms and the representation-based chain norm.
//!
//! `l1` and `linf` are exact rationals. `l2-numeric` is the spectral norm in
//! floating point with a residual error bound; it only appears in reports.

use std::cmp::Ordering;

use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::algebra::{AlgebraElement, AlgebraPresentation};
use crate::chain::{Chain, Cochain};
use crate::error::{Error, Result};
use crate::frame::{ShiftFrame, SignedPermutation};
use crate::linalg::SparseVector;
use crate::rational::{format_q, to_f64, Q};

/// Numeric results count as equal to 1 when within this distance.
pub const L2_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NormKind {
    #[serde(rename = "l1", alias = "induced-l1")]
    L1,
    #[serde(rename = "linf", alias = "induced-linf")]
    Linf,
    #[serde(rename = "l2-numeric", alias = "induced-l2-numeric")]
    L2Numeric,
}

impl NormKind {
    pub fn as_str(self) -> &'static str {
        match self {
            NormKind::L1 => "l1",
            NormKind::Linf => "linf",
            NormKind::L2Numeric => "l2-numeric",
        }
    }

    pub fn is_exact(self) -> bool {
        self != NormKind::L2Numeric
    }
}

/// A norm value. Serializes as `{"exact": true, "value": "p/q"}` or
/// `{"exact": false, "value": 1.0, "error_bound": 1e-15}`.
#[derive(Clone, Debug, PartialEq)]
pub enum NormValue {
    Exact(Q),
    Numeric { value: f64, error_bound: f64 },
}

impl Serialize for NormValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            NormValue::Exact(x) => {
                let mut m = s.serialize_map(Some(2))?;
                m.serialize_entry("exact", &true)?;
                m.serialize_entry("value", &format_q(x))?;
                m.end()
            }
            NormValue::Numeric { value, error_bound } => {
                let mut m = s.serialize_map(Some(3))?;
                m.serialize_entry("exact", &false)?;
                m.serialize_entry("value", value)?;
                m.serialize_entry("error_bound", error_bound)?;
                m.end()
            }
        }
    }
}

impl NormValue {
    pub fn exact(&self) -> Option<&Q> {
        match self {
            NormValue::Exact(x) => Some(x),
            NormValue::Numeric { .. } => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, NormValue::Exact(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            NormValue::Exact(x) => to_f64(x),
            NormValue::Numeric { value, .. } => *value,
        }
    }

    fn parts(&self) -> (f64, f64) {
        match self {
            NormValue::Exact(x) => {
                let v = to_f64(x);
                (v, v.abs() * f64::EPSILON)
            }
            NormValue::Numeric { value, error_bound } => (*value, *error_bound),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            NormValue::Exact(x) => x.is_zero(),
            NormValue::Numeric { value, .. } => *value == 0.0,
        }
    }

    /// Exactly 1, or within [`L2_TOLERANCE`] of 1 for numeric values.
    pub fn is_one(&self) -> bool {
        match self {
            NormValue::Exact(x) => x.is_one(),
            NormValue::Numeric { value, .. } => (value - 1.0).abs() <= L2_TOLERANCE,
        }
    }

    pub fn add(&self, other: &NormValue) -> NormValue {
        match (self, other) {
            (NormValue::Exact(a), NormValue::Exact(b)) => NormValue::Exact(a + b),
            _ => {
                let ((a, ea), (b, eb)) = (self.parts(), other.parts());
                NormValue::Numeric {
                    value: a + b,
                    error_bound: ea + eb,
                }
            }
        }
    }

    pub fn mul(&self, other: &NormValue) -> NormValue {
        match (self, other) {
            (NormValue::Exact(a), NormValue::Exact(b)) => NormValue::Exact(a * b),
            _ => {
                let ((a, ea), (b, eb)) = (self.parts(), other.parts());
                NormValue::Numeric {
                    value: a * b,
                    error_bound: a.abs() * eb + b.abs() * ea + ea * eb,
                }
            }
        }
    }

    pub fn ratio(&self, other: &NormValue) -> Result<NormValue> {
        if other.is_zero() {
            return Err(Error::InvalidArgument("ratio with a zero norm".into()));
        }
        match (self, other) {
            (NormValue::Exact(a), NormValue::Exact(b)) => Ok(NormValue::Exact(a / b)),
            _ => {
                let ((a, ea), (b, eb)) = (self.parts(), other.parts());
                if b <= eb {
                    return Err(Error::InvalidArgument("denominator is not separated from zero".into()));
                }
                let v = a / b;
                Ok(NormValue::Numeric {
                    value: v,
                    error_bound: (ea + v.abs() * eb) / (b - eb),
                })
            }
        }
    }

    /// Exact comparison when both sides are exact, by value otherwise.
    pub fn compare(&self, other: &NormValue) -> Ordering {
        match (self, other) {
            (NormValue::Exact(a), NormValue::Exact(b)) => a.cmp(b),
            _ => self.to_f64().total_cmp(&other.to_f64()),
        }
    }
}

/// `l1`, `linf` or the spectral norm of a dense rational matrix.
pub fn dense_norm(m: &[Vec<Q>], kind: NormKind) -> NormValue {
    match kind {
        NormKind::L1 => {
            let cols = m.first().map_or(0, Vec::len);
            let best = (0..cols)
                .map(|c| m.iter().map(|row| row[c].abs()).sum::<Q>())
                .max()
                .unwrap_or_else(Q::zero);
            NormValue::Exact(best)
        }
        NormKind::Linf => NormValue::Exact(
            m.iter()
                .map(|row| row.iter().map(Q::abs).sum::<Q>())
                .max()
                .unwrap_or_else(Q::zero),
        ),
        NormKind::L2Numeric => spectral_norm(m),
    }
}

/// At most one nonzero per row and column: the spectral norm is the
/// largest absolute entry, exactly.
fn monomial_norm(m: &[Vec<Q>]) -> Option<Q> {
    let cols = m.first().map_or(0, Vec::len);
    let mut col_used = vec![false; cols];
    let mut best = Q::zero();
    for row in m {
        let mut seen = false;
        for (c, x) in row.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            if seen || std::mem::replace(&mut col_used[c], true) {
                return None;
            }
            seen = true;
            best = best.max(x.abs());
        }
    }
    Some(best)
}

fn spectral_norm(m: &[Vec<Q>]) -> NormValue {
    if let Some(x) = monomial_norm(m) {
        return NormValue::Exact(x);
    }
    let (rows, cols) = (m.len(), m.first().map_or(0, Vec::len));
    let a = DMatrix::from_fn(rows, cols, |r, c| to_f64(&m[r][c]));
    let b = a.transpose() * &a;
    let eig = SymmetricEigen::new(b.clone());
    // every true eigenvalue lies within the largest residual of a computed pair
    let mut residual: f64 = 0.0;
    for i in 0..cols {
        let v = eig.eigenvectors.column(i);
        let r = (&b * v - v * eig.eigenvalues[i]).norm() / v.norm();
        residual = residual.max(r);
    }
    let rounding = (cols as f64 + 2.0) * f64::EPSILON * b.norm();
    let lambda = eig.eigenvalues.max().max(0.0);
    let err = residual + rounding;
    let sigma = lambda.sqrt();
    let error_bound = if sigma > 0.0 { (err / sigma).min(err.sqrt()) } else { err.sqrt() };
    NormValue::Numeric { value: sigma, error_bound }
}

/// Norm of an element of an algebra with a matrix interpretation.
pub fn matrix_norm(a: &AlgebraElement, kind: NormKind) -> Result<NormValue> {
    Ok(dense_norm(&a.to_matrix()?, kind))
}

/// Norm of an algebra vector: the matrix norm when the algebra has a matrix
/// interpretation, else the triangle bound from the basis norm assignment.
pub fn element_norm(alg: &std::sync::Arc<AlgebraPresentation>, x: &SparseVector, kind: NormKind) -> Result<NormValue> {
    if alg.matrix_repr().is_some() {
        return matrix_norm(&AlgebraElement::new(alg.clone(), x.clone())?, kind);
    }
    match alg.norm_assignment() {
        Some(w) => Ok(NormValue::Exact(x.iter().map(|(b, c)| c.abs() * &w[b]).sum())),
        None => Err(Error::InvalidArgument(
            "algebra has neither a matrix interpretation nor a norm assignment".into(),
        )),
    }
}

fn basis_norms(alg: &std::sync::Arc<AlgebraPresentation>, kind: NormKind) -> Result<Vec<NormValue>> {
    (0..alg.dim()).map(|b| element_norm(alg, &SparseVector::unit(b), kind)).collect()
}

/// `Σ |c| · Π ‖b_i‖` over the stored terms. This bounds the projective
/// tensor norm from above and depends on the representation.
pub fn chain_norm(c: &Chain, kind: NormKind) -> Result<NormValue> {
    let norms = basis_norms(c.algebra(), kind)?;
    Ok(c.terms().fold(NormValue::Exact(Q::zero()), |acc, (t, x)| {
        let term = t
            .iter()
            .fold(NormValue::Exact(x.abs()), |p, &b| p.mul(&norms[b]));
        acc.add(&term)
    }))
}

/// `Σ |c| · Π ‖x_i‖` for a chain written as a sum of elementary tensors of
/// arbitrary algebra vectors.
pub fn factored_norm(
    alg: &std::sync::Arc<AlgebraPresentation>,
    terms: &[(Q, Vec<SparseVector>)],
    kind: NormKind,
) -> Result<NormValue> {
    terms.iter().try_fold(NormValue::Exact(Q::zero()), |acc, (c, factors)| {
        let term = factors
            .iter()
            .try_fold(NormValue::Exact(c.abs()), |p, x| Ok::<_, Error>(p.mul(&element_norm(alg, x, kind)?)))?;
        Ok(acc.add(&term))
    })
}

/// Dual of [`chain_norm`]: `sup_t |D(t)| / Π ‖b_i‖` over basis tuples.
pub fn cochain_norm(d: &Cochain, kind: NormKind) -> Result<NormValue> {
    let norms = basis_norms(d.algebra(), kind)?;
    let (dim, len) = (d.algebra().dim(), d.degree() + 1);
    let mut best = NormValue::Exact(Q::zero());
    for (&code, x) in d.raw_values() {
        let t = crate::chain::decode(dim, code, len);
        let denom = t.iter().fold(NormValue::Exact(Q::one()), |p, &b| p.mul(&norms[b]));
        let r = NormValue::Exact(x.abs()).ratio(&denom)?;
        if r.compare(&best) == Ordering::Greater {
            best = r;
        }
    }
    Ok(best)
}

fn element_terms(a: &AlgebraElement) -> Vec<(String, String)> {
    a.coeffs()
        .iter()
        .map(|(b, x)| (a.algebra().label(b).to_string(), format_q(x)))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct M1Row {
    #[serde(rename = "N")]
    pub blocks: usize,
    pub amplified_norm: NormValue,
    pub ratio: NormValue,
}

/// `‖Σ_{l<N} S^{lk} a R^{lk}‖ / ‖a‖` per `N`.
#[derive(Clone, Debug, Serialize)]
pub struct M1Report {
    pub norm: NormKind,
    pub k: usize,
    pub order: usize,
    pub element: Vec<(String, String)>,
    pub element_norm: NormValue,
    pub rows: Vec<M1Row>,
    pub isometric: bool,
}

pub fn check_m1(frame: &ShiftFrame, a: &AlgebraElement, n_range: &[usize], kind: NormKind) -> Result<M1Report> {
    frame.check_corner(a.coeffs())?;
    let element_norm = matrix_norm(a, kind)?;
    if element_norm.is_zero() {
        return Err(Error::InvalidArgument("the element is zero".into()));
    }
    let rows = n_range
        .par_iter()
        .map(|&n| {
            let amplified_norm = matrix_norm(&frame.block_amplify(a, n)?, kind)?;
            let ratio = amplified_norm.ratio(&element_norm)?;
            Ok(M1Row {
                blocks: n,
                amplified_norm,
                ratio,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(M1Report {
        norm: kind,
        k: frame.k(),
        order: frame.order(),
        element: element_terms(a),
        element_norm,
        isometric: rows.iter().all(|r| r.ratio.is_one()),
        rows,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct M3Witness {
    pub sample: usize,
    /// `"left"` for `‖Ua‖`, `"right"` for `‖aU‖`.
    pub side: &'static str,
    pub permutation: SignedPermutation,
    pub element: Vec<(String, String)>,
    pub ratio: NormValue,
}

/// Largest of `‖Ua‖/‖a‖` and `‖aU‖/‖a‖` over a sample, with the pair that
/// attains it.
#[derive(Clone, Debug, Serialize)]
pub struct M3Report {
    pub norm: NormKind,
    pub samples: usize,
    pub max_ratio: NormValue,
    pub witness: Option<M3Witness>,
    pub isometric: bool,
}

pub fn check_m3(frame: &ShiftFrame, samples: &[(SignedPermutation, AlgebraElement)], kind: NormKind) -> Result<M3Report> {
    let ratios = samples
        .par_iter()
        .enumerate()
        .map(|(i, (u, a))| {
            let ue = u.to_element(frame)?;
            let base = matrix_norm(a, kind)?;
            let left = matrix_norm(&ue.multiply(a)?, kind)?.ratio(&base)?;
            let right = matrix_norm(&a.multiply(&ue)?, kind)?.ratio(&base)?;
            Ok([(i, "left", left), (i, "right", right)])
        })
        .collect::<Result<Vec<_>>>()?;
    let mut isometric = true;
    let mut best: Option<(usize, &'static str, NormValue)> = None;
    for (i, side, r) in ratios.into_iter().flatten() {
        isometric &= r.is_one();
        if best.as_ref().is_none_or(|(_, _, b)| r.compare(b) == Ordering::Greater) {
            best = Some((i, side, r));
        }
    }
    let witness = best.map(|(i, side, ratio)| M3Witness {
        sample: i,
        side,
        permutation: samples[i].0.clone(),
        element: element_terms(&samples[i].1),
        ratio,
    });
    Ok(M3Report {
        norm: kind,
        samples: samples.len(),
        max_ratio: witness
            .as_ref()
            .map_or(NormValue::Exact(Q::zero()), |w| w.ratio.clone()),
        witness,
        isometric,
    })
}

/// Seeded random pairs of an order-`M` signed permutation and a nonzero
/// corner element with small integer entries.
pub fn random_m3_samples(frame: &ShiftFrame, count: usize, seed: u64) -> Result<Vec<(SignedPermutation, AlgebraElement)>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let u = SignedPermutation::random(frame.order(), &mut rng);
            let mut coeffs = SparseVector::new();
            while coeffs.is_zero() {
                coeffs = SparseVector::from_entries(
                    frame
                        .corner_indices()
                        .iter()
                        .map(|&b| (b, Q::from_integer(rng.gen_range(-5i64..=5).into())))
                        .collect(),
                );
            }
            Ok((u, frame.element(coeffs)?))
        })
        .collect()
}

#[cfg(test)]
mod tests;
