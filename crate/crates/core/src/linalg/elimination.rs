use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};
use rayon::prelude::*;

use super::echelon::{check_len, dense_rref, sparse_rref, Echelon, PivotSide, SubspaceBasis};
use super::{SparseMatrix, SparseVector};
use crate::error::{Error, Result};
use crate::rational::Q;

/// Components with at most this many coordinates are eliminated densely.
pub const DENSE_COLUMN_THRESHOLD: usize = 64;

/// A block of the coordinate/vector incidence graph.
struct Component {
    /// Global coordinates touched, ascending.
    coords: Vec<usize>,
    /// Indices into the input vector list.
    members: Vec<usize>,
}

/// Splits `vectors` into groups that share no coordinates. Elimination then
/// runs independently per group.
fn components(vectors: &[SparseVector]) -> Vec<Component> {
    let mut local: HashMap<usize, usize> = HashMap::new();
    let mut coords: Vec<usize> = Vec::new();
    for v in vectors {
        for (i, _) in v.iter() {
            local.entry(i).or_insert_with(|| {
                coords.push(i);
                coords.len() - 1
            });
        }
    }
    let mut parent: Vec<usize> = (0..coords.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for v in vectors {
        let mut it = v.iter();
        if let Some((first, _)) = it.next() {
            let head = local[&first];
            for (i, _) in it {
                // re-find: an earlier union may have re-rooted the head
                let a = find(&mut parent, head);
                let b = find(&mut parent, local[&i]);
                if a != b {
                    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                    parent[hi] = lo;
                }
            }
        }
    }
    // each component is keyed by its smallest global coordinate
    let mut root_key: HashMap<usize, usize> = HashMap::new();
    for (li, &g) in coords.iter().enumerate() {
        let root = find(&mut parent, li);
        let key = root_key.entry(root).or_insert(g);
        *key = (*key).min(g);
    }
    let mut groups: BTreeMap<usize, Component> = BTreeMap::new();
    for (li, &g) in coords.iter().enumerate() {
        let root = find(&mut parent, li);
        let key = root_key[&root];
        groups
            .entry(key)
            .or_insert_with(|| Component {
                coords: Vec::new(),
                members: Vec::new(),
            })
            .coords
            .push(g);
    }
    for (vi, v) in vectors.iter().enumerate() {
        if let Some((first, _)) = v.leading() {
            let root = find(&mut parent, local[first]);
            groups.get_mut(&root_key[&root]).expect("component exists").members.push(vi);
        }
    }
    groups
        .into_values()
        .map(|mut c| {
            c.coords.sort_unstable();
            c
        })
        .collect()
}

fn to_local(v: &SparseVector, coords: &[usize]) -> SparseVector {
    SparseVector::from_sorted(
        v.iter()
            .map(|(i, x)| (coords.binary_search(&i).expect("coordinate in component"), x.clone()))
            .collect(),
    )
}

fn to_global(v: SparseVector, coords: &[usize]) -> SparseVector {
    SparseVector::from_sorted(v.into_entries().into_iter().map(|(i, x)| (coords[i], x)).collect())
}

fn component_rref(c: &Component, vectors: &[SparseVector]) -> BTreeMap<usize, SparseVector> {
    let local: Vec<SparseVector> = c.members.iter().map(|&i| to_local(&vectors[i], &c.coords)).collect();
    if c.coords.len() <= DENSE_COLUMN_THRESHOLD {
        dense_rref(c.coords.len(), &local)
    } else {
        sparse_rref(c.coords.len(), &local)
    }
}

/// Reduced row echelon form (leading pivots) of the span of `vectors`.
pub fn rref(dim: usize, vectors: &[SparseVector]) -> Result<Echelon> {
    for v in vectors {
        check_len(v, dim)?;
    }
    let comps = components(vectors);
    let blocks: Vec<BTreeMap<usize, SparseVector>> = comps
        .par_iter()
        .map(|c| {
            component_rref(c, vectors)
                .into_iter()
                .map(|(p, row)| (c.coords[p], to_global(row, &c.coords)))
                .collect()
        })
        .collect();
    let rows = blocks.into_iter().flatten().collect();
    Ok(Echelon::from_reduced_rows(dim, PivotSide::Leading, rows))
}

pub fn rank(m: &SparseMatrix) -> usize {
    let vectors = if m.rows() < m.cols() { m.row_vectors() } else { m.columns().to_vec() };
    let dim = if m.rows() < m.cols() { m.cols() } else { m.rows() };
    rref(dim, &vectors).expect("matrix vectors fit their dimension").rank()
}

/// Rank together with a kernel basis. The kernel basis carries one vector per
/// free column `f`, equal to 1 at `f` and supported otherwise on pivot columns
/// below `f`; it is therefore in reduced echelon form with trailing pivots.
pub fn rank_and_kernel(m: &SparseMatrix) -> (usize, SubspaceBasis) {
    let rows = m.row_vectors();
    let comps = components(&rows);
    let blocks: Vec<(usize, Vec<(usize, SparseVector)>)> = comps
        .par_iter()
        .map(|c| {
            let rref = component_rref(c, &rows);
            let pivots: Vec<usize> = rref.keys().copied().collect();
            // column f -> [(pivot, R[pivot row][f])]
            let mut by_col: BTreeMap<usize, Vec<(usize, Q)>> = BTreeMap::new();
            for (&p, row) in &rref {
                for (f, x) in row.iter() {
                    if f != p {
                        by_col.entry(f).or_default().push((p, x.clone()));
                    }
                }
            }
            let kernel = (0..c.coords.len())
                .filter(|f| pivots.binary_search(f).is_err())
                .map(|f| {
                    let mut entries: Vec<(usize, Q)> = vec![(f, Q::one())];
                    if let Some(col) = by_col.get(&f) {
                        entries.extend(col.iter().map(|(p, x)| (*p, -x)));
                    }
                    (c.coords[f], to_global(SparseVector::from_entries(entries), &c.coords))
                })
                .collect();
            (rref.len(), kernel)
        })
        .collect();
    let mut rank = 0;
    let mut kernel: BTreeMap<usize, SparseVector> = BTreeMap::new();
    for (r, k) in blocks {
        rank += r;
        kernel.extend(k);
    }
    // columns that no row touches are free as well
    for c in 0..m.cols() {
        if m.column(c).is_zero() {
            kernel.insert(c, SparseVector::unit(c));
        }
    }
    let echelon = Echelon::from_reduced_rows(m.cols(), PivotSide::Trailing, kernel);
    (rank, SubspaceBasis::from_echelon(echelon))
}

/// Basis of the column space (image), fully reduced with leading pivots.
pub fn column_space(m: &SparseMatrix) -> SubspaceBasis {
    SubspaceBasis::from_echelon(rref(m.rows(), m.columns()).expect("columns fit"))
}

/// Basis of the row space, fully reduced with leading pivots.
pub fn row_space(m: &SparseMatrix) -> SubspaceBasis {
    SubspaceBasis::from_echelon(rref(m.cols(), &m.row_vectors()).expect("rows fit"))
}

/// Result of [`solve`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    /// `m * x = b`.
    Solution(SparseVector),
    /// A functional `y` with `y^T m = 0` and `y^T b != 0`.
    Infeasible(SparseVector),
}

impl SolveOutcome {
    pub fn solution(&self) -> Option<&SparseVector> {
        match self {
            SolveOutcome::Solution(x) => Some(x),
            SolveOutcome::Infeasible(_) => None,
        }
    }
}

struct TrackedRow {
    vec: SparseVector,
    rhs: Q,
    track: SparseVector,
}

fn solve_component(rows: Vec<TrackedRow>) -> std::result::Result<Vec<(usize, Q)>, SparseVector> {
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by_key(|&i| (rows[i].vec.nnz(), i));
    let mut rows: Vec<Option<TrackedRow>> = rows.into_iter().map(Some).collect();
    let mut pivots: BTreeMap<usize, TrackedRow> = BTreeMap::new();
    for i in order {
        let mut row = rows[i].take().expect("each row once");
        let mut cursor: Option<usize> = None;
        loop {
            let start = cursor.map_or(0, |c| row.vec.entries().partition_point(|(j, _)| *j <= c));
            let hit = row.vec.entries()[start..].iter().find(|(j, _)| pivots.contains_key(j)).cloned();
            let Some((p, c)) = hit else { break };
            let piv = &pivots[&p];
            let neg = -c;
            row.vec = row.vec.add_scaled(&piv.vec, &neg);
            row.rhs += &piv.rhs * &neg;
            row.track = row.track.add_scaled(&piv.track, &neg);
            cursor = Some(p);
        }
        match row.vec.leading().cloned() {
            None => {
                if !row.rhs.is_zero() {
                    return Err(row.track);
                }
            }
            Some((p, c)) => {
                if !c.is_one() {
                    let inv = c.recip();
                    row.vec = row.vec.scale(&inv);
                    row.rhs *= &inv;
                    row.track = row.track.scale(&inv);
                }
                pivots.insert(p, row);
            }
        }
    }
    let mut x: BTreeMap<usize, Q> = BTreeMap::new();
    for (&p, row) in pivots.iter().rev() {
        let mut val = row.rhs.clone();
        for (j, a) in row.vec.iter().skip(1) {
            if let Some(xj) = x.get(&j) {
                val -= a * xj;
            }
        }
        if !val.is_zero() {
            x.insert(p, val);
        }
    }
    Ok(x.into_iter().collect())
}

/// Exact solve of `m x = b`; failure comes with a verified certificate.
pub fn solve(m: &SparseMatrix, b: &SparseVector) -> Result<SolveOutcome> {
    check_len(b, m.rows())?;
    let rows = m.row_vectors();
    // a nonzero rhs on an empty row is infeasible outright
    for (r, x) in b.iter() {
        if rows[r].is_zero() && !x.is_zero() {
            return Ok(SolveOutcome::Infeasible(SparseVector::unit(r)));
        }
    }
    let comps = components(&rows);
    let results: Vec<std::result::Result<Vec<(usize, Q)>, SparseVector>> = comps
        .par_iter()
        .map(|c| {
            let tracked = c
                .members
                .iter()
                .map(|&r| TrackedRow {
                    vec: to_local(&rows[r], &c.coords),
                    rhs: b.get(r),
                    track: SparseVector::unit(r),
                })
                .collect();
            solve_component(tracked).map(|x| x.into_iter().map(|(i, v)| (c.coords[i], v)).collect())
        })
        .collect();
    let mut x = Vec::new();
    for res in results {
        match res {
            Ok(part) => x.extend(part),
            Err(y) => {
                let ym = m.transpose().mul_vec(&y)?;
                if !ym.is_zero() || y.dot(b).is_zero() {
                    return Err(Error::Internal("infeasibility certificate failed verification".into()));
                }
                return Ok(SolveOutcome::Infeasible(y));
            }
        }
    }
    let x = SparseVector::from_entries(x);
    if m.mul_vec(&x)? != *b {
        return Err(Error::Internal("solution failed residual check".into()));
    }
    Ok(SolveOutcome::Solution(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn mat(rows: &[&[i64]]) -> SparseMatrix {
        SparseMatrix::from_dense(&rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn zero_and_identity() {
        let (r, k) = rank_and_kernel(&SparseMatrix::zeros(3, 3));
        assert_eq!((r, k.dim()), (0, 3));
        let (r, k) = rank_and_kernel(&SparseMatrix::identity(4));
        assert_eq!((r, k.dim()), (4, 0));
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let m = mat(&[&[1, 2, 0, 1], &[0, 0, 1, 1], &[1, 2, 1, 2]]);
        let (r, k) = rank_and_kernel(&m);
        assert_eq!(r, 2);
        assert_eq!(k.dim(), 2);
        for v in k.vectors() {
            assert!(m.mul_vec(&v).unwrap().is_zero());
        }
    }

    #[test]
    fn solve_identity_returns_rhs() {
        let b = SparseVector::from_entries(vec![(0, q(3)), (2, q(-1))]);
        let out = solve(&SparseMatrix::identity(3), &b).unwrap();
        assert_eq!(out, SolveOutcome::Solution(b));
    }

    #[test]
    fn solve_outside_column_space_gives_certificate() {
        let m = mat(&[&[1, 1], &[2, 2]]);
        let b = SparseVector::from_entries(vec![(0, q(1))]);
        let SolveOutcome::Infeasible(y) = solve(&m, &b).unwrap() else {
            panic!("expected infeasible");
        };
        assert!(m.transpose().mul_vec(&y).unwrap().is_zero());
        assert!(!y.dot(&b).is_zero());
    }

    #[test]
    fn block_diagonal_matrices_split_into_components() {
        let m = mat(&[&[1, 1, 0, 0], &[0, 0, 2, 0], &[0, 0, 0, 0]]);
        let comps = components(&m.row_vectors());
        assert_eq!(comps.len(), 2);
        assert_eq!(rank(&m), 2);
        assert_eq!(column_space(&m).dim(), 2);
    }

    #[test]
    fn components_keep_each_support_together() {
        use rand::{Rng, SeedableRng};
        // the head of a vector can be re-rooted by a union partway through it
        let vs = vec![
            SparseVector::from_entries(vec![(3, q(1)), (4, q(1))]),
            SparseVector::from_entries(vec![(1, q(1)), (2, q(1))]),
            SparseVector::from_entries(vec![(2, q(1)), (3, q(1)), (5, q(1))]),
            SparseVector::from_entries(vec![(0, q(1)), (5, q(1))]),
        ];
        assert_eq!(components(&vs).len(), 1);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let vs: Vec<SparseVector> = (0..rng.gen_range(1..12))
                .map(|_| SparseVector::from_entries((0..rng.gen_range(1..4)).map(|_| (rng.gen_range(0..30), q(1))).collect()))
                .collect();
            let comps = components(&vs);
            for v in &vs {
                let owners = comps.iter().filter(|c| v.iter().any(|(i, _)| c.coords.binary_search(&i).is_ok())).count();
                assert_eq!(owners, 1);
            }
            let members: usize = comps.iter().map(|c| c.members.len()).sum();
            assert_eq!(members, vs.iter().filter(|v| !v.is_zero()).count());
        }
    }
}
