use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::SparseVector;
use crate::error::{Error, Result};
use crate::rational::{format_q, parse_q, Q};

/// Column-major sparse rational matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    columns: Vec<SparseVector>,
}

#[derive(Serialize, Deserialize)]
struct MarketHeader {
    rows: usize,
    cols: usize,
    nnz: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            columns: vec![SparseVector::new(); cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            rows: n,
            cols: n,
            columns: (0..n).map(SparseVector::unit).collect(),
        }
    }

    pub fn from_columns(rows: usize, columns: Vec<SparseVector>) -> Result<Self> {
        for (c, col) in columns.iter().enumerate() {
            if let Some(r) = col.max_index() {
                if r >= rows {
                    return Err(Error::Dimension(format!(
                        "column {c} has row index {r} but matrix has {rows} rows"
                    )));
                }
            }
        }
        Ok(Self {
            rows,
            cols: columns.len(),
            columns,
        })
    }

    pub fn from_rows(cols: usize, rows: Vec<SparseVector>) -> Result<Self> {
        let t = Self::from_columns(cols, rows)?;
        Ok(t.transpose())
    }

    pub fn from_triplets(rows: usize, cols: usize, triplets: impl IntoIterator<Item = (usize, usize, Q)>) -> Result<Self> {
        let mut buckets: Vec<Vec<(usize, Q)>> = vec![Vec::new(); cols];
        for (r, c, x) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::Dimension(format!("entry ({r}, {c}) outside {rows}x{cols}")));
            }
            buckets[c].push((r, x));
        }
        Ok(Self {
            rows,
            cols,
            columns: buckets.into_iter().map(SparseVector::from_entries).collect(),
        })
    }

    pub fn from_dense(data: &[Vec<Q>]) -> Result<Self> {
        let rows = data.len();
        let cols = data.first().map_or(0, Vec::len);
        if data.iter().any(|r| r.len() != cols) {
            return Err(Error::Dimension("ragged dense matrix".into()));
        }
        let triplets = data
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().enumerate().map(move |(c, x)| (r, c, x.clone())));
        Self::from_triplets(rows, cols, triplets)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, c: usize) -> &SparseVector {
        &self.columns[c]
    }

    pub fn columns(&self) -> &[SparseVector] {
        &self.columns
    }

    pub fn get(&self, r: usize, c: usize) -> Q {
        self.columns[c].get(r)
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(SparseVector::nnz).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(SparseVector::is_zero)
    }

    /// Nonzero entries in (column, row) order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &Q)> {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(c, col)| col.iter().map(move |(r, x)| (r, c, x)))
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut buckets: Vec<Vec<(usize, Q)>> = vec![Vec::new(); self.rows];
        for (c, col) in self.columns.iter().enumerate() {
            for (r, x) in col.iter() {
                buckets[r].push((c, x.clone()));
            }
        }
        SparseMatrix {
            rows: self.cols,
            cols: self.rows,
            columns: buckets.into_iter().map(SparseVector::from_sorted).collect(),
        }
    }

    /// Rows as sparse vectors over column indices.
    pub fn row_vectors(&self) -> Vec<SparseVector> {
        self.transpose().columns
    }

    pub fn mul_vec(&self, v: &SparseVector) -> Result<SparseVector> {
        if let Some(i) = v.max_index() {
            if i >= self.cols {
                return Err(Error::Dimension(format!("vector index {i} but matrix has {} columns", self.cols)));
            }
        }
        let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
        for (c, x) in v.iter() {
            for (r, y) in self.columns[c].iter() {
                *acc.entry(r).or_insert_with(Q::zero) += x * y;
            }
        }
        Ok(SparseVector::from_map(acc))
    }

    /// `self * other`.
    pub fn matmul(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let columns = other
            .columns
            .iter()
            .map(|col| self.mul_vec(col))
            .collect::<Result<Vec<_>>>()?;
        Ok(SparseMatrix {
            rows: self.rows,
            cols: other.cols,
            columns,
        })
    }

    pub fn add_scaled(&self, other: &SparseMatrix, c: &Q) -> Result<SparseMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            columns: self
                .columns
                .iter()
                .zip(&other.columns)
                .map(|(a, b)| a.add_scaled(b, c))
                .collect(),
        })
    }

    pub fn sub(&self, other: &SparseMatrix) -> Result<SparseMatrix> {
        self.add_scaled(other, &-num_traits::one::<Q>())
    }

    pub fn scale(&self, c: &Q) -> SparseMatrix {
        SparseMatrix {
            rows: self.rows,
            cols: self.cols,
            columns: self.columns.iter().map(|v| v.scale(c)).collect(),
        }
    }

    /// Keeps only the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> SparseMatrix {
        SparseMatrix {
            rows: self.rows,
            cols: cols.len(),
            columns: cols.iter().map(|&c| self.columns[c].clone()).collect(),
        }
    }

    /// Matrix-market style text: a JSON header line, then one `row col p/q`
    /// line per nonzero (1-based, column-major order).
    pub fn to_market(&self, name: Option<&str>) -> String {
        let header = MarketHeader {
            rows: self.rows,
            cols: self.cols,
            nnz: self.nnz(),
            name: name.map(str::to_owned),
        };
        let mut out = format!("%%hochlab-matrix {}\n", serde_json::to_string(&header).expect("header serializes"));
        for (r, c, x) in self.triplets() {
            let _ = writeln!(out, "{} {} {}", r + 1, c + 1, format_q(x));
        }
        out
    }

    pub fn from_market(text: &str) -> Result<SparseMatrix> {
        let mut lines = text.lines();
        let first = lines.next().ok_or_else(|| Error::Parse("empty matrix text".into()))?;
        let json = first
            .strip_prefix("%%hochlab-matrix ")
            .ok_or_else(|| Error::Parse("missing %%hochlab-matrix header".into()))?;
        let header: MarketHeader = serde_json::from_str(json).map_err(|e| Error::Parse(e.to_string()))?;
        let mut triplets = Vec::with_capacity(header.nnz);
        for (n, line) in lines.enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [r, c, x] = parts.as_slice() else {
                return Err(Error::Parse(format!("line {}: expected `row col p/q`", n + 2)));
            };
            let r: usize = r.parse().map_err(|_| Error::Parse(format!("line {}: bad row", n + 2)))?;
            let c: usize = c.parse().map_err(|_| Error::Parse(format!("line {}: bad column", n + 2)))?;
            if r == 0 || c == 0 {
                return Err(Error::Parse(format!("line {}: indices are 1-based", n + 2)));
            }
            triplets.push((r - 1, c - 1, parse_q(x)?));
        }
        if triplets.len() != header.nnz {
            return Err(Error::Parse(format!("header says {} entries, found {}", header.nnz, triplets.len())));
        }
        Self::from_triplets(header.rows, header.cols, triplets)
    }
}
