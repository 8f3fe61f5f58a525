use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::engine::{DegreeHomology, EngineOptions};
use super::maps::{factorwise_map, materialize_projected};
use super::{algebra_complex, MatrixComplex};
use crate::algebra::{AlgebraPresentation, ExtensionSpec};
use crate::chain::{decode, differential, encode, space_size, Chain, ChainBasis, ComplexKind};
use crate::error::{Error, Result};
use crate::linalg::{rank, solve, SolveOutcome, SparseMatrix, SparseVector};

/// The total algebra re-presented on the basis `ι(a_0), …, ι(a_{dA-1}),
/// σ(c_0), …, σ(c_{dC-1})`. In this basis `C(A)` is spanned by the tuples
/// with all entries below `dA`, and the remaining tuples give a basis of
/// the quotient complex.
struct Adapted {
    total: Arc<AlgebraPresentation>,
    /// Columns are the adapted basis vectors in the original coordinates.
    basis: SparseMatrix,
    da: usize,
}

fn adapted(ext: &ExtensionSpec) -> Result<Adapted> {
    let (a, c) = (ext.ideal(), ext.quotient());
    let vectors: Vec<SparseVector> = ext
        .inclusion()
        .columns()
        .iter()
        .chain(ext.section().columns())
        .cloned()
        .collect();
    let labels = a
        .labels()
        .iter()
        .map(|l| format!("i({l})"))
        .chain(c.labels().iter().map(|l| format!("s({l})")))
        .collect();
    let (total, basis) = ext.total().change_basis(&vectors, labels)?;
    Ok(Adapted {
        total,
        basis,
        da: a.dim(),
    })
}

fn in_ideal(tuple: &[usize], da: usize) -> bool {
    tuple.iter().all(|&x| x < da)
}

/// `Q_n`: tuples of the adapted total algebra with some entry outside the
/// ideal.
fn quotient_basis(db: usize, da: usize, n: usize) -> Result<ChainBasis> {
    let size = space_size(db, n)?;
    let codes = (0..size).filter(|&c| !in_ideal(&decode(db, c, n + 1), da)).collect();
    ChainBasis::from_codes(db, n, codes)
}

/// The quotient complex `C(B)/C(A)` on the complement basis.
struct QuotientComplex {
    adapted: Adapted,
    bases: Vec<ChainBasis>,
    homology: Vec<DegreeHomology>,
}

impl QuotientComplex {
    fn build(ext: &ExtensionSpec, kind: ComplexKind, max: usize, opts: &EngineOptions) -> Result<Self> {
        let adapted = adapted(ext)?;
        let (db, da) = (adapted.total.dim(), adapted.da);
        let top = max + 1;
        let cols = space_size(db, top)? - space_size(da, top)?;
        opts.check(&format!("quotient complex differential d_{top}"), cols)?;
        let bases = (0..=top).map(|n| quotient_basis(db, da, n)).collect::<Result<Vec<_>>>()?;
        let d = differential(&adapted.total, kind);
        let ds = (1..=top)
            .into_par_iter()
            .map(|n| materialize_projected(&d, n, &bases[n], &bases[n - 1]).map(Arc::new))
            .collect::<Result<Vec<_>>>()?;
        let complex = MatrixComplex {
            dims: bases.iter().map(|b| b.len()).collect(),
            ds,
        };
        let homology = complex.homology(max, true)?;
        Ok(Self {
            adapted,
            bases,
            homology,
        })
    }

    /// A vector on `Q_n` as a chain of the adapted total algebra.
    fn lift(&self, n: usize, v: &SparseVector) -> Chain {
        Chain::from_raw(
            self.adapted.total.clone(),
            n,
            v.iter().map(|(i, x)| (self.bases[n].code(i), x.clone())).collect(),
        )
    }

    /// Drops the ideal tuples of a chain of the adapted total algebra.
    fn project(&self, c: &Chain) -> SparseVector {
        let basis = &self.bases[c.degree()];
        SparseVector::from_entries(
            c.raw_terms()
                .iter()
                .filter_map(|(&code, x)| basis.index_of(code).map(|i| (i, x.clone())))
                .collect(),
        )
    }
}

fn remap(code: u64, from: usize, to: usize, len: usize) -> u64 {
    encode(to, &decode(from, code, len))
}

/// Connecting map `H_n(Q) → H_{n-1}(A)`: lift along the section, apply the
/// differential, and read off the class of the result inside `C(A)`.
fn connecting(
    q: &QuotientComplex,
    ha: &DegreeHomology,
    kind: ComplexKind,
    n: usize,
) -> Result<SparseMatrix> {
    let (da, db) = (q.adapted.da, q.adapted.total.dim());
    let d = differential(&q.adapted.total, kind);
    let columns = q.homology[n]
        .representatives()
        .map(|z| {
            let boundary = d.apply(&q.lift(n, z))?;
            let mut v = Vec::with_capacity(boundary.nnz());
            for (&code, x) in boundary.raw_terms() {
                let t = decode(db, code, n);
                if !in_ideal(&t, da) {
                    return Err(Error::Internal("boundary of a lifted quotient cycle leaves the ideal".into()));
                }
                v.push((encode(da, &t) as usize, x.clone()));
            }
            ha.class_of(&SparseVector::from_entries(v))
        })
        .collect::<Result<Vec<_>>>()?;
    SparseMatrix::from_columns(ha.homology_dim(), columns)
}

#[derive(Clone, Debug, Serialize)]
pub struct LesDegree {
    pub degree: usize,
    /// `dim H_n(A)`.
    pub ideal: usize,
    /// `dim H_n(B)`.
    pub total: usize,
    /// `dim H_n(C(B)/C(A))`.
    pub quotient: usize,
    pub inclusion_rank: usize,
    pub projection_rank: usize,
    /// Rank of `H_n(Q) → H_{n-1}(A)`; zero in degree 0.
    pub connecting_rank: usize,
}

/// Exactness at one group of the sequence.
#[derive(Clone, Debug, Serialize)]
pub struct Junction {
    pub degree: usize,
    /// `"ideal"`, `"total"` or `"quotient"`.
    pub group: &'static str,
    pub incoming_rank: usize,
    pub outgoing_nullity: usize,
    pub composite_zero: bool,
    pub exact: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LesReport {
    pub extension: String,
    pub kind: ComplexKind,
    pub max_degree: usize,
    pub degrees: Vec<LesDegree>,
    pub junctions: Vec<Junction>,
    /// Whether a perturbed section gives the same connecting maps.
    pub section_independent: bool,
    pub exact: bool,
}

impl LesReport {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

fn junction(degree: usize, group: &'static str, incoming: &SparseMatrix, outgoing: &SparseMatrix) -> Result<Junction> {
    let incoming_rank = rank(incoming);
    let outgoing_nullity = outgoing.cols() - rank(outgoing);
    let composite_zero = outgoing.matmul(incoming)?.is_zero();
    Ok(Junction {
        degree,
        group,
        incoming_rank,
        outgoing_nullity,
        composite_zero,
        exact: composite_zero && incoming_rank == outgoing_nullity,
    })
}

/// `σ' = σ + ι∘g` with `g(c_j) = a_{j mod dA}`; `None` when the section is
/// forced (trivial ideal or quotient).
fn perturbed(ext: &ExtensionSpec) -> Result<Option<ExtensionSpec>> {
    let (da, dc) = (ext.ideal().dim(), ext.quotient().dim());
    if da == 0 || dc == 0 {
        return Ok(None);
    }
    let columns = (0..dc)
        .map(|j| ext.section().column(j).add(ext.inclusion().column(j % da)))
        .collect();
    let section = SparseMatrix::from_columns(ext.total().dim(), columns)?;
    ext.with_section(section).map(Some)
}

/// Coordinates change between two adapted bases, `to⁻¹ · from`.
fn basis_change(from: &SparseMatrix, to: &SparseMatrix) -> Result<SparseMatrix> {
    let columns = from
        .columns()
        .iter()
        .map(|v| match solve(to, v)? {
            SolveOutcome::Solution(x) => Ok(x),
            SolveOutcome::Infeasible(_) => Err(Error::Internal("adapted bases span different spaces".into())),
        })
        .collect::<Result<Vec<_>>>()?;
    SparseMatrix::from_columns(to.cols(), columns)
}

/// The long exact homology sequence of `C(A) → C(B) → C(B)/C(A)` in degrees
/// `0..=max_degree`, with exactness checked at every group.
pub fn les_of_subcomplex(
    ext: &ExtensionSpec,
    kind: ComplexKind,
    max_degree: usize,
    opts: &EngineOptions,
) -> Result<LesReport> {
    let max = max_degree;
    let a = ext.ideal();
    let ((ha, q), hb) = rayon::join(
        || {
            rayon::join(
                || algebra_complex(a, kind, max + 1, opts).and_then(|c| c.homology(max, true)),
                || QuotientComplex::build(ext, kind, max + 1, opts),
            )
        },
        || {
            // total homology on the adapted basis so that C(A) is literally a
            // subcomplex
            adapted(ext)
                .and_then(|ad| algebra_complex(&ad.total, kind, max + 1, opts))
                .and_then(|c| c.homology(max, true))
        },
    );
    let (ha, q, hb) = (ha?, q?, hb?);
    let (da, db) = (q.adapted.da, q.adapted.total.dim());

    let inclusion = (0..=max)
        .map(|n| {
            let cols = ha[n]
                .representatives()
                .map(|z| {
                    let v = SparseVector::from_entries(
                        z.iter().map(|(i, x)| (remap(i as u64, da, db, n + 1) as usize, x.clone())).collect(),
                    );
                    hb[n].class_of(&v)
                })
                .collect::<Result<Vec<_>>>()?;
            SparseMatrix::from_columns(hb[n].homology_dim(), cols)
        })
        .collect::<Result<Vec<_>>>()?;
    let projection = (0..=max)
        .map(|n| {
            let cols = hb[n]
                .representatives()
                .map(|z| {
                    let v = SparseVector::from_entries(
                        z.iter()
                            .filter_map(|(i, x)| q.bases[n].index_of(i as u64).map(|j| (j, x.clone())))
                            .collect(),
                    );
                    q.homology[n].class_of(&v)
                })
                .collect::<Result<Vec<_>>>()?;
            SparseMatrix::from_columns(q.homology[n].homology_dim(), cols)
        })
        .collect::<Result<Vec<_>>>()?;
    // connecting[n] : H_n(Q) → H_{n-1}(A), n = 1..=max+1
    let connect = |q: &QuotientComplex| -> Result<Vec<SparseMatrix>> {
        (1..=max + 1)
            .map(|n| connecting(q, &ha[n - 1], kind, n))
            .collect()
    };
    let conn = connect(&q)?;
    let zero_out = |rows: usize, cols: usize| SparseMatrix::zeros(rows, cols);

    let mut junctions = Vec::new();
    let mut degrees = Vec::new();
    for n in 0..=max {
        let (dha, dhb, dhq) = (ha[n].homology_dim(), hb[n].homology_dim(), q.homology[n].homology_dim());
        junctions.push(junction(n, "ideal", &conn[n], &inclusion[n])?);
        junctions.push(junction(n, "total", &inclusion[n], &projection[n])?);
        let outgoing = if n == 0 { zero_out(0, dhq) } else { conn[n - 1].clone() };
        junctions.push(junction(n, "quotient", &projection[n], &outgoing)?);
        degrees.push(LesDegree {
            degree: n,
            ideal: dha,
            total: dhb,
            quotient: dhq,
            inclusion_rank: rank(&inclusion[n]),
            projection_rank: rank(&projection[n]),
            connecting_rank: if n == 0 { 0 } else { rank(&conn[n - 1]) },
        });
    }

    let section_independent = match perturbed(ext)? {
        None => true,
        Some(ext2) => {
            let q2 = QuotientComplex::build(&ext2, kind, max + 1, opts)?;
            let conn2 = connect(&q2)?;
            let change = factorwise_map(
                &q.adapted.total,
                &q2.adapted.total,
                &basis_change(&q.adapted.basis, &q2.adapted.basis)?,
            )?;
            let mut same = true;
            for n in 1..=max + 1 {
                let cols = q.homology[n]
                    .representatives()
                    .map(|z| q2.homology[n].class_of(&q2.project(&change.apply(&q.lift(n, z))?)))
                    .collect::<Result<Vec<_>>>()?;
                let t = SparseMatrix::from_columns(q2.homology[n].homology_dim(), cols)?;
                if conn2[n - 1].matmul(&t)? != conn[n - 1] {
                    same = false;
                }
            }
            same
        }
    };

    let exact = junctions.iter().all(|j| j.exact);
    Ok(LesReport {
        extension: ext.hash().to_string(),
        kind,
        max_degree: max,
        degrees,
        junctions,
        section_independent,
        exact,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ExcisionDegree {
    pub degree: usize,
    /// `dim H_n(C(B)/C(A))`.
    pub quotient_complex: usize,
    /// `dim H_n(C)` for the quotient algebra `C = B/A`.
    pub quotient_algebra: usize,
    pub comparison_rank: usize,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExcisionReport {
    pub extension: String,
    pub kind: ComplexKind,
    pub max_degree: usize,
    pub degrees: Vec<ExcisionDegree>,
    pub holds: bool,
    pub first_failure: Option<usize>,
}

impl ExcisionReport {
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Compares `H_n(C(B)/C(A))` with `H_n(C)` through the map induced by the
/// projection `B → C`.
pub fn excision_compare(
    ext: &ExtensionSpec,
    kind: ComplexKind,
    max_degree: usize,
    opts: &EngineOptions,
) -> Result<ExcisionReport> {
    let c = ext.quotient();
    let (q, hc) = rayon::join(
        || QuotientComplex::build(ext, kind, max_degree, opts),
        || algebra_complex(c, kind, max_degree + 1, opts).and_then(|x| x.homology(max_degree, true)),
    );
    let (q, hc) = (q?, hc?);
    let (da, dc) = (q.adapted.da, c.dim());
    let degrees = (0..=max_degree)
        .map(|n| {
            let cols = q.homology[n]
                .representatives()
                .map(|z| {
                    let mut v = Vec::new();
                    for (i, x) in z.iter() {
                        let t = q.bases[n].tuple(i);
                        if t.iter().all(|&e| e >= da) {
                            let shifted: Vec<usize> = t.iter().map(|&e| e - da).collect();
                            v.push((encode(dc, &shifted) as usize, x.clone()));
                        }
                    }
                    hc[n].class_of(&SparseVector::from_entries(v))
                })
                .collect::<Result<Vec<_>>>()?;
            let m = SparseMatrix::from_columns(hc[n].homology_dim(), cols)?;
            let (dq, dh) = (q.homology[n].homology_dim(), hc[n].homology_dim());
            let r = rank(&m);
            Ok(ExcisionDegree {
                degree: n,
                quotient_complex: dq,
                quotient_algebra: dh,
                comparison_rank: r,
                holds: dq == dh && r == dq,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let first_failure = degrees.iter().find(|d| !d.holds).map(|d| d.degree);
    Ok(ExcisionReport {
        extension: ext.hash().to_string(),
        kind,
        max_degree,
        degrees,
        holds: first_failure.is_none(),
        first_failure,
    })
}
