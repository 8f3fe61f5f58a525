use std::sync::Arc;

use num_traits::One;

use super::extension::ExtensionSpec;
use super::presentation::{one_vec, AlgebraPresentation, AlgebraSpec, MatrixRepr};
use crate::error::{Error, Result};
use crate::linalg::{self, SolveOutcome, SparseMatrix, SparseVector};
use crate::rational::Q;

/// Index of the matrix unit `E_{ij}` (0-based) in [`matrix_algebra`].
pub fn matrix_unit_index(m: usize, i: usize, j: usize) -> usize {
    i * m + j
}

/// The full matrix algebra `M_m` on the matrix units, `E_ij E_kl = δ_jk E_il`.
pub fn matrix_algebra(m: usize) -> Result<Arc<AlgebraPresentation>> {
    if m == 0 {
        return Err(Error::InvalidArgument("matrix algebra needs m >= 1".into()));
    }
    let idx = |i, j| matrix_unit_index(m, i, j);
    let mut products = Vec::with_capacity(m * m * m);
    for i in 0..m {
        for j in 0..m {
            for l in 0..m {
                products.push((idx(i, j), idx(j, l), one_vec(idx(i, l))));
            }
        }
    }
    let labels = (0..m)
        .flat_map(|i| (0..m).map(move |j| format!("E{},{}", i + 1, j + 1)))
        .collect();
    AlgebraPresentation::new(AlgebraSpec {
        labels,
        products,
        unit: Some(SparseVector::from_entries((0..m).map(|i| (idx(i, i), Q::one())).collect())),
        norm_assignment: None,
        matrix: Some(MatrixRepr {
            order: m,
            positions: (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).collect(),
        }),
    })
}

/// The ground field as a 1-dimensional algebra labelled `1`.
pub fn scalar_algebra() -> Arc<AlgebraPresentation> {
    AlgebraPresentation::new(AlgebraSpec {
        labels: vec!["1".into()],
        products: vec![(0, 0, one_vec(0))],
        unit: Some(one_vec(0)),
        norm_assignment: None,
        matrix: Some(MatrixRepr {
            order: 1,
            positions: vec![(0, 0)],
        }),
    })
    .expect("scalar algebra is valid")
}

pub fn zero_algebra() -> Arc<AlgebraPresentation> {
    AlgebraPresentation::new(AlgebraSpec::default()).expect("zero algebra is valid")
}

/// `dim`-dimensional algebra in which every product vanishes.
pub fn square_zero_algebra(dim: usize) -> Arc<AlgebraPresentation> {
    AlgebraPresentation::new(AlgebraSpec {
        labels: (1..=dim).map(|i| format!("a{i}")).collect(),
        ..AlgebraSpec::default()
    })
    .expect("square-zero algebra is valid")
}

/// `A ⊗ B` with basis `a_i ⊗ b_j` at index `i * dim B + j`.
pub fn tensor_product(a: &AlgebraPresentation, b: &AlgebraPresentation) -> Result<Arc<AlgebraPresentation>> {
    let (da, db) = (a.dim(), b.dim());
    let idx = |i: usize, j: usize| i * db + j;
    let mut products = Vec::new();
    for i in 0..da {
        for k in 0..da {
            let ak = a.basis_product(i, k);
            if ak.is_zero() {
                continue;
            }
            for j in 0..db {
                for l in 0..db {
                    let bl = b.basis_product(j, l);
                    if bl.is_zero() {
                        continue;
                    }
                    let mut v = Vec::new();
                    for (p, x) in ak.iter() {
                        for (r, y) in bl.iter() {
                            v.push((idx(p, r), x * y));
                        }
                    }
                    products.push((idx(i, j), idx(k, l), SparseVector::from_entries(v)));
                }
            }
        }
    }
    let unit = match (a.unit(), b.unit()) {
        (Some(ua), Some(ub)) => {
            let mut v = Vec::new();
            for (p, x) in ua.iter() {
                for (r, y) in ub.iter() {
                    v.push((idx(p, r), x * y));
                }
            }
            Some(SparseVector::from_entries(v))
        }
        _ => None,
    };
    let matrix = match (a.matrix_repr(), b.matrix_repr()) {
        (Some(ma), Some(mb)) => Some(MatrixRepr {
            order: ma.order * mb.order,
            positions: (0..da)
                .flat_map(|i| {
                    (0..db).map(move |j| {
                        let (ra, ca) = ma.positions[i];
                        let (rb, cb) = mb.positions[j];
                        (ra * mb.order + rb, ca * mb.order + cb)
                    })
                })
                .collect(),
        }),
        _ => None,
    };
    AlgebraPresentation::new(AlgebraSpec {
        labels: (0..da)
            .flat_map(|i| (0..db).map(move |j| format!("{}|{}", a.label(i), b.label(j))))
            .collect(),
        products,
        unit,
        norm_assignment: None,
        matrix,
    })
}

/// The subalgebra spanned by `basis` (vectors of `parent`), with the
/// inclusion matrix. Fails if the span is not closed under multiplication.
pub fn subalgebra(
    parent: &AlgebraPresentation,
    basis: &[SparseVector],
    labels: Vec<String>,
) -> Result<(Arc<AlgebraPresentation>, SparseMatrix)> {
    if labels.len() != basis.len() {
        return Err(Error::Dimension("one label per basis vector".into()));
    }
    let inc = SparseMatrix::from_columns(parent.dim(), basis.to_vec())?;
    if linalg::rank(&inc) != basis.len() {
        return Err(Error::InvalidArgument("subalgebra basis is linearly dependent".into()));
    }
    let coords = |v: &SparseVector| -> Result<SparseVector> {
        match linalg::solve(&inc, v)? {
            SolveOutcome::Solution(x) => Ok(x),
            SolveOutcome::Infeasible(_) => Err(Error::InvalidArgument("span is not closed under multiplication".into())),
        }
    };
    let mut products = Vec::new();
    for (i, x) in basis.iter().enumerate() {
        for (j, y) in basis.iter().enumerate() {
            let p = parent.mul(x, y);
            if !p.is_zero() {
                products.push((i, j, coords(&p)?));
            }
        }
    }
    let alg = AlgebraPresentation::new(AlgebraSpec {
        labels,
        products,
        unit: None,
        norm_assignment: None,
        matrix: None,
    })?;
    Ok((alg, inc))
}

/// Left and right actions of a multiplier algebra on an ideal: for each
/// multiplier basis element `c`, `left[c]` is the matrix of `a ↦ c·a` and
/// `right[c]` the matrix of `a ↦ a·c`.
#[derive(Clone, Debug)]
pub struct BimoduleAction {
    pub left: Vec<SparseMatrix>,
    pub right: Vec<SparseMatrix>,
}

impl BimoduleAction {
    /// Every multiplier acts as `scale` times the identity on both sides.
    pub fn scalar(ideal_dim: usize, scales: &[Q]) -> Self {
        let act: Vec<SparseMatrix> = scales.iter().map(|s| SparseMatrix::identity(ideal_dim).scale(s)).collect();
        Self {
            left: act.clone(),
            right: act,
        }
    }

    fn act_left(&self, c: usize, a: &SparseVector) -> SparseVector {
        self.left[c].mul_vec(a).expect("action sized to ideal")
    }

    fn act_right(&self, a: &SparseVector, c: usize) -> SparseVector {
        self.right[c].mul_vec(a).expect("action sized to ideal")
    }

    fn act_left_vec(&self, c: &SparseVector, a: &SparseVector) -> SparseVector {
        c.iter()
            .fold(SparseVector::new(), |acc, (k, x)| acc.add_scaled(&self.act_left(k, a), x))
    }

    fn act_right_vec(&self, a: &SparseVector, c: &SparseVector) -> SparseVector {
        c.iter()
            .fold(SparseVector::new(), |acc, (k, x)| acc.add_scaled(&self.act_right(a, k), x))
    }

    /// Checks the six bimodule/multiplicativity laws on all basis triples.
    pub fn validate(&self, ideal: &AlgebraPresentation, multipliers: &AlgebraPresentation) -> Result<()> {
        let (da, dc) = (ideal.dim(), multipliers.dim());
        if self.left.len() != dc || self.right.len() != dc {
            return Err(Error::Dimension("one action matrix per multiplier basis element".into()));
        }
        for m in self.left.iter().chain(&self.right) {
            if m.rows() != da || m.cols() != da {
                return Err(Error::Dimension("action matrices must be square of the ideal's dimension".into()));
            }
        }
        let e = SparseVector::unit;
        let fail = |law, a, b, c| Err(Error::BimoduleViolation { law, a, b, c });
        for c in 0..dc {
            for a in 0..da {
                for a2 in 0..da {
                    let aa = ideal.basis_product(a, a2);
                    if self.act_left(c, aa) != ideal.mul(&self.act_left(c, &e(a)), &e(a2)) {
                        return fail("c(aa') = (ca)a'", c, a, a2);
                    }
                    if self.act_right(aa, c) != ideal.mul(&e(a), &self.act_right(&e(a2), c)) {
                        return fail("(aa')c = a(a'c)", a, a2, c);
                    }
                    if ideal.mul(&self.act_right(&e(a), c), &e(a2)) != ideal.mul(&e(a), &self.act_left(c, &e(a2))) {
                        return fail("(ac)a' = a(ca')", a, c, a2);
                    }
                }
                for c2 in 0..dc {
                    let cc = multipliers.basis_product(c, c2);
                    if self.act_left_vec(cc, &e(a)) != self.act_left(c, &self.act_left(c2, &e(a))) {
                        return fail("(cc')a = c(c'a)", c, c2, a);
                    }
                    if self.act_right_vec(&e(a), multipliers.basis_product(c, c2))
                        != self.act_right(&self.act_right(&e(a), c), c2)
                    {
                        return fail("a(cc') = (ac)c'", a, c, c2);
                    }
                    if self.act_right(&self.act_left(c, &e(a)), c2) != self.act_left(c, &self.act_right(&e(a), c2)) {
                        return fail("(ca)c' = c(ac')", c, a, c2);
                    }
                }
            }
        }
        Ok(())
    }
}

/// `ideal ⊕ multipliers` with `(a,c)(a',c') = (aa' + c·a' + a·c', cc')`,
/// plus the split extension `0 → ideal → total → multipliers → 0` with
/// section `c ↦ (0, c)`.
pub fn semidirect_product(
    ideal: &Arc<AlgebraPresentation>,
    multipliers: &Arc<AlgebraPresentation>,
    action: &BimoduleAction,
) -> Result<(Arc<AlgebraPresentation>, ExtensionSpec)> {
    action.validate(ideal, multipliers)?;
    let (da, dc) = (ideal.dim(), multipliers.dim());
    let shift = |v: &SparseVector| v.map_indices(|k| k + da);
    let mut products = Vec::new();
    for a in 0..da {
        for a2 in 0..da {
            products.push((a, a2, ideal.basis_product(a, a2).clone()));
        }
        for c in 0..dc {
            // c·a and a·c land in the ideal
            products.push((da + c, a, action.act_left(c, &SparseVector::unit(a))));
            products.push((a, da + c, action.act_right(&SparseVector::unit(a), c)));
        }
    }
    for c in 0..dc {
        for c2 in 0..dc {
            products.push((da + c, da + c2, shift(multipliers.basis_product(c, c2))));
        }
    }
    let mut labels: Vec<String> = ideal.labels().to_vec();
    for l in multipliers.labels() {
        let mut l = l.clone();
        while labels.contains(&l) {
            l.push('\'');
        }
        labels.push(l);
    }
    let mut spec = AlgebraSpec {
        labels,
        products,
        unit: None,
        norm_assignment: None,
        matrix: None,
    };
    // (0, 1_C) is the unit whenever 1_C acts trivially on the ideal
    if let Some(uc) = multipliers.unit() {
        let candidate = shift(uc);
        let probe = AlgebraPresentation::new(spec.clone())?;
        if probe.is_unit_element(&candidate) {
            spec.unit = Some(candidate);
        }
    }
    let total = AlgebraPresentation::new(spec)?;
    let inclusion = SparseMatrix::from_columns(da + dc, (0..da).map(SparseVector::unit).collect())?;
    let projection = SparseMatrix::from_columns(
        dc,
        (0..da + dc)
            .map(|b| if b < da { SparseVector::new() } else { SparseVector::unit(b - da) })
            .collect(),
    )?;
    let section = SparseMatrix::from_columns(da + dc, (0..dc).map(|c| SparseVector::unit(da + c)).collect())?;
    let ext = ExtensionSpec::new(ideal.clone(), total.clone(), multipliers.clone(), inclusion, projection, section)?;
    Ok((total, ext))
}

/// Adjoins a unit: `A ⊕ Q` with the scalars acting by scaling, and the
/// augmentation extension onto the scalars.
pub fn unitization(a: &Arc<AlgebraPresentation>) -> Result<(Arc<AlgebraPresentation>, ExtensionSpec)> {
    let scalars = scalar_algebra();
    semidirect_product(a, &scalars, &BimoduleAction::scalar(a.dim(), &[Q::one()]))
}

/// The extension `0 → I → B → B/I → 0` for a two-sided ideal `I` of `total`
/// spanned by `ideal_basis`. The quotient is presented on the standard basis
/// vectors off the pivots of the ideal's echelon form, which also gives the
/// section.
pub fn extension_from_ideal(
    total: &Arc<AlgebraPresentation>,
    ideal_basis: &[SparseVector],
) -> Result<ExtensionSpec> {
    let db = total.dim();
    let ideal_labels = (1..=ideal_basis.len()).map(|i| format!("i{i}")).collect();
    let (ideal, inclusion) = subalgebra(total, ideal_basis, ideal_labels)?;
    let sub = linalg::SubspaceBasis::span(db, ideal_basis)?;
    let complement: Vec<usize> = (0..db).filter(|i| !sub.echelon().is_pivot(*i)).collect();
    let project = |v: &SparseVector| -> Result<SparseVector> {
        let m = linalg::quotient_coordinates(&sub, std::slice::from_ref(v))?;
        Ok(m.column(0).clone())
    };
    let mut products = Vec::new();
    for (i, &bi) in complement.iter().enumerate() {
        for (j, &bj) in complement.iter().enumerate() {
            let p = project(total.basis_product(bi, bj))?;
            if !p.is_zero() {
                products.push((i, j, p));
            }
        }
    }
    let unit = total.unit().map(&project).transpose()?;
    let quotient = AlgebraPresentation::new(AlgebraSpec {
        labels: complement.iter().map(|&b| format!("[{}]", total.label(b))).collect(),
        products,
        unit,
        norm_assignment: None,
        matrix: None,
    })?;
    let projection = SparseMatrix::from_columns(
        complement.len(),
        (0..db).map(|b| project(&SparseVector::unit(b))).collect::<Result<Vec<_>>>()?,
    )?;
    let section = SparseMatrix::from_columns(db, complement.iter().map(|&b| SparseVector::unit(b)).collect())?;
    ExtensionSpec::new(ideal, total.clone(), quotient, inclusion, projection, section)
}
