//! Reference computations for the acceptance run, written directly from the
//! definitions: chain spaces as tuple codes, faces and operators as explicit
//! formulas, ranks by plain dense elimination. Nothing here calls into the
//! library's chain, homology or linear-algebra code.
#![allow(dead_code)]

use std::collections::BTreeMap;

use hochlab::Q;
use num_traits::{One, Signed, Zero};

pub type Vector = BTreeMap<usize, Q>;

pub fn q(n: i64) -> Q {
    Q::from_integer(n.into())
}

pub fn unit(i: usize) -> Vector {
    BTreeMap::from([(i, Q::one())])
}

pub fn add_into(acc: &mut Vector, i: usize, x: Q) {
    let e = acc.entry(i).or_insert_with(Q::zero);
    *e += x;
    if e.is_zero() {
        acc.remove(&i);
    }
}

pub fn add_scaled(acc: &mut Vector, v: &Vector, c: &Q) {
    for (i, x) in v {
        add_into(acc, *i, x * c);
    }
}

pub fn sub(a: &Vector, b: &Vector) -> Vector {
    let mut out = a.clone();
    add_scaled(&mut out, b, &q(-1));
    out
}

/// Multiplication table of a finite-dimensional algebra.
pub struct Structure {
    pub dim: usize,
    pub mult: Vec<Vec<Vector>>,
}

impl Structure {
    /// `M_m` with `E_ij` at index `i·m + j` and `E_ij E_kl = [j = k] E_il`.
    pub fn matrix_units(m: usize) -> Self {
        Self::from_fn(m * m, |a, b| {
            let ((i, j), (k, l)) = ((a / m, a % m), (b / m, b % m));
            if j == k {
                unit(i * m + l)
            } else {
                Vector::new()
            }
        })
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Vector) -> Self {
        let mult = (0..dim).map(|a| (0..dim).map(|b| f(a, b)).collect()).collect();
        Self { dim, mult }
    }

    /// Reads only the structure constants of a presentation.
    pub fn of(a: &hochlab::algebra::AlgebraPresentation) -> Self {
        Self::from_fn(a.dim(), |i, j| a.basis_product(i, j).iter().map(|(k, x)| (k, x.clone())).collect())
    }

    pub fn mul(&self, x: &Vector, y: &Vector) -> Vector {
        let mut out = Vector::new();
        for (a, s) in x {
            for (b, t) in y {
                add_scaled(&mut out, &self.mult[*a][*b], &(s * t));
            }
        }
        out
    }

    pub fn same_constants(&self, other: &Structure) -> bool {
        self.dim == other.dim && self.mult == other.mult
    }
}

pub fn code(dim: usize, tuple: &[usize]) -> usize {
    tuple.iter().fold(0, |acc, &a| acc * dim + a)
}

pub fn tuple_of(dim: usize, mut code: usize, len: usize) -> Vec<usize> {
    let mut t = vec![0; len];
    for slot in t.iter_mut().rev() {
        *slot = code % dim;
        code /= dim;
    }
    t
}

pub fn tuples(dim: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..dim.pow(len as u32)).map(move |c| tuple_of(dim, c, len))
}

/// Expands `coeff · x_0 ⊗ ⋯ ⊗ x_n` into tuple codes.
pub fn expand(dim: usize, factors: &[Vector], coeff: &Q, out: &mut Vector) {
    let mut partial: Vec<(usize, Q)> = vec![(0, coeff.clone())];
    for f in factors {
        let mut next = Vec::with_capacity(partial.len() * f.len());
        for (c, x) in &partial {
            for (b, y) in f {
                next.push((c * dim + b, x * y));
            }
        }
        partial = next;
    }
    for (c, x) in partial {
        add_into(out, c, x);
    }
}

fn units(t: &[usize]) -> Vec<Vector> {
    t.iter().map(|&b| unit(b)).collect()
}

/// `d_i` on a basis tuple of length `n + 1`; `d_n` wraps the last factor
/// around to the front.
pub fn face(s: &Structure, t: &[usize], i: usize) -> Vector {
    let n = t.len() - 1;
    let mut f = units(t);
    let mut out = Vector::new();
    if i < n {
        let p = s.mul(&f[i], &f[i + 1]);
        f.splice(i..=i + 1, [p]);
    } else {
        let p = s.mul(&f[n], &f[0]);
        f.pop();
        f[0] = p;
    }
    expand(s.dim, &f, &Q::one(), &mut out);
    out
}

pub fn sign(i: usize) -> Q {
    if i.is_multiple_of(2) {
        q(1)
    } else {
        q(-1)
    }
}

/// `β` (no wrap face) or `δ` on a basis tuple.
pub fn boundary(s: &Structure, t: &[usize], bar: bool) -> Vector {
    let n = t.len() - 1;
    let top = if bar { n } else { n + 1 };
    let mut out = Vector::new();
    for i in 0..top {
        add_scaled(&mut out, &face(s, t, i), &sign(i));
    }
    out
}

/// Linear extension of a map given on basis tuples of length `len`.
pub fn apply(dim: usize, len: usize, v: &Vector, f: &dyn Fn(&[usize]) -> Vector) -> Vector {
    let mut out = Vector::new();
    for (c, x) in v {
        add_scaled(&mut out, &f(&tuple_of(dim, *c, len)), x);
    }
    out
}

/// Columns of `β_n` or `δ_n`.
pub fn differential_columns(s: &Structure, n: usize, bar: bool) -> Vec<Vector> {
    tuples(s.dim, n + 1).map(|t| boundary(s, &t, bar)).collect()
}

const P: u64 = 2_147_483_647;

fn to_mod_p(x: &Q) -> u64 {
    let reduce = |z: &num_bigint::BigInt| -> u64 {
        let r = z % num_bigint::BigInt::from(P);
        let r = if r.is_negative() { r + num_bigint::BigInt::from(P) } else { r };
        u64::try_from(r).expect("reduced residue")
    };
    let (n, d) = (reduce(x.numer()), reduce(x.denom()));
    n * pow_mod(d, P - 2) % P
}

fn pow_mod(mut b: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % P;
        }
        b = b * b % P;
        e >>= 1;
    }
    r
}

/// Rank over `F_p`, `p = 2^31 − 1`. Never exceeds the rank over `Q`.
pub fn rank_mod_p(rows: usize, cols: &[Vector]) -> usize {
    let mut m = vec![vec![0u64; cols.len()]; rows];
    for (c, col) in cols.iter().enumerate() {
        for (r, x) in col {
            m[*r][c] = to_mod_p(x);
        }
    }
    let mut rank = 0;
    for c in 0..cols.len() {
        let Some(p) = (rank..rows).find(|&r| m[r][c] != 0) else { continue };
        m.swap(rank, p);
        let inv = pow_mod(m[rank][c], P - 2);
        for x in m[rank][c..].iter_mut() {
            *x = *x * inv % P;
        }
        let pivot = m[rank].clone();
        for row in m[rank + 1..].iter_mut() {
            let f = row[c];
            if f == 0 {
                continue;
            }
            for (x, y) in row[c..].iter_mut().zip(&pivot[c..]) {
                *x = (*x + P * P - f * y) % P;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Exact rank over `Q` by dense elimination.
pub fn rank_exact(rows: usize, cols: &[Vector]) -> usize {
    let mut m = vec![vec![Q::zero(); cols.len()]; rows];
    for (c, col) in cols.iter().enumerate() {
        for (r, x) in col {
            m[*r][c] = x.clone();
        }
    }
    let mut rank = 0;
    for c in 0..cols.len() {
        let Some(p) = (rank..rows).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, p);
        let pivot = m[rank].clone();
        for row in m[rank + 1..].iter_mut() {
            if row[c].is_zero() {
                continue;
            }
            let f = &row[c] / &pivot[c];
            for (x, y) in row[c..].iter_mut().zip(&pivot[c..]) {
                *x -= &f * y;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// `dim H_n` for `n = 0..=max` of the bar or Hochschild complex.
pub fn homology_dims(s: &Structure, max: usize, bar: bool, exact: bool) -> Vec<usize> {
    let rank = |n: usize| -> usize {
        if n == 0 {
            return 0;
        }
        let cols = differential_columns(s, n, bar);
        let rows = s.dim.pow(n as u32);
        if exact {
            rank_exact(rows, &cols)
        } else {
            rank_mod_p(rows, &cols)
        }
    };
    let ranks: Vec<usize> = (0..=max + 1).map(rank).collect();
    (0..=max).map(|n| s.dim.pow(n as u32 + 1) - ranks[n] - ranks[n + 1]).collect()
}

/// Dense rational matrix product.
pub fn matmul(a: &[Vec<Q>], b: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|c| (0..inner).map(|k| &row[k] * &b[k][c]).sum())
                .collect()
        })
        .collect()
}

pub fn l1(m: &[Vec<Q>]) -> Q {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols).map(|c| m.iter().map(|r| r[c].abs()).sum::<Q>()).max().unwrap_or_else(Q::zero)
}

pub fn linf(m: &[Vec<Q>]) -> Q {
    m.iter().map(|r| r.iter().map(Q::abs).sum::<Q>()).max().unwrap_or_else(Q::zero)
}

/// Largest singular value from the cyclic Jacobi eigenvalue iteration on
/// `AᵀA`.
#[allow(clippy::needless_range_loop)]
pub fn spectral(m: &[Vec<Q>]) -> f64 {
    let to_f = |x: &Q| hochlab::rational::to_f64(x);
    let (rows, cols) = (m.len(), m.first().map_or(0, Vec::len));
    let mut b = vec![vec![0.0f64; cols]; cols];
    for i in 0..cols {
        for j in 0..cols {
            b[i][j] = (0..rows).map(|r| to_f(&m[r][i]) * to_f(&m[r][j])).sum();
        }
    }
    for _sweep in 0..100 {
        let off: f64 = (0..cols).flat_map(|i| (0..cols).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| b[i][j] * b[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..cols {
            for r in p + 1..cols {
                if b[p][r].abs() < 1e-300 {
                    continue;
                }
                let theta = (b[r][r] - b[p][p]) / (2.0 * b[p][r]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let (c, s) = (1.0 / (t * t + 1.0).sqrt(), t / (t * t + 1.0).sqrt());
                for k in 0..cols {
                    let (bkp, bkr) = (b[k][p], b[k][r]);
                    b[k][p] = c * bkp - s * bkr;
                    b[k][r] = s * bkp + c * bkr;
                }
                for k in 0..cols {
                    let (bpk, brk) = (b[p][k], b[r][k]);
                    b[p][k] = c * bpk - s * brk;
                    b[r][k] = s * bpk + c * brk;
                }
            }
        }
    }
    (0..cols).map(|i| b[i][i]).fold(0.0, f64::max).sqrt()
}
