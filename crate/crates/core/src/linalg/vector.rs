use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::rational::Q;

/// Sparse rational vector: entries sorted by index, no stored zeros.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SparseVector {
    entries: Vec<(usize, Q)>,
}

impl SparseVector {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds from arbitrary pairs; duplicates are summed and zeros dropped.
    pub fn from_entries(mut pairs: Vec<(usize, Q)>) -> Self {
        pairs.sort_by_key(|(i, _)| *i);
        let mut entries: Vec<(usize, Q)> = Vec::with_capacity(pairs.len());
        for (i, x) in pairs {
            match entries.last_mut() {
                Some((j, y)) if *j == i => *y += x,
                _ => entries.push((i, x)),
            }
        }
        entries.retain(|(_, x)| !x.is_zero());
        Self { entries }
    }

    pub fn from_map(map: BTreeMap<usize, Q>) -> Self {
        Self {
            entries: map.into_iter().filter(|(_, x)| !x.is_zero()).collect(),
        }
    }

    /// Caller guarantees sorted, distinct indices and nonzero values.
    pub(crate) fn from_sorted(entries: Vec<(usize, Q)>) -> Self {
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(entries.iter().all(|(_, x)| !x.is_zero()));
        Self { entries }
    }

    pub fn unit(i: usize) -> Self {
        Self {
            entries: vec![(i, Q::one())],
        }
    }

    pub fn from_dense(values: &[Q]) -> Self {
        Self {
            entries: values
                .iter()
                .enumerate()
                .filter(|(_, x)| !x.is_zero())
                .map(|(i, x)| (i, x.clone()))
                .collect(),
        }
    }

    pub fn to_dense(&self, len: usize) -> Vec<Q> {
        let mut out = vec![Q::zero(); len];
        for (i, x) in &self.entries {
            out[*i] = x.clone();
        }
        out
    }

    pub fn entries(&self) -> &[(usize, Q)] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<(usize, Q)> {
        self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Q)> {
        self.entries.iter().map(|(i, x)| (*i, x))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize) -> Q {
        match self.entries.binary_search_by_key(&i, |(j, _)| *j) {
            Ok(pos) => self.entries[pos].1.clone(),
            Err(_) => Q::zero(),
        }
    }

    pub fn leading(&self) -> Option<&(usize, Q)> {
        self.entries.first()
    }

    pub fn trailing(&self) -> Option<&(usize, Q)> {
        self.entries.last()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.entries.last().map(|(i, _)| *i)
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, other: &SparseVector, c: &Q) -> SparseVector {
        if c.is_zero() {
            return self.clone();
        }
        let (a, b) = (&self.entries, &other.entries);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i].0 < b[j].0) {
                out.push(a[i].clone());
                i += 1;
            } else if i == a.len() || b[j].0 < a[i].0 {
                out.push((b[j].0, &b[j].1 * c));
                j += 1;
            } else {
                let s = &a[i].1 + &b[j].1 * c;
                if !s.is_zero() {
                    out.push((a[i].0, s));
                }
                i += 1;
                j += 1;
            }
        }
        SparseVector { entries: out }
    }

    pub fn add(&self, other: &SparseVector) -> SparseVector {
        self.add_scaled(other, &Q::one())
    }

    pub fn sub(&self, other: &SparseVector) -> SparseVector {
        self.add_scaled(other, &-Q::one())
    }

    pub fn scale(&self, c: &Q) -> SparseVector {
        if c.is_zero() {
            return SparseVector::new();
        }
        SparseVector {
            entries: self.entries.iter().map(|(i, x)| (*i, x * c)).collect(),
        }
    }

    pub fn neg(&self) -> SparseVector {
        SparseVector {
            entries: self.entries.iter().map(|(i, x)| (*i, -x)).collect(),
        }
    }

    pub fn dot(&self, other: &SparseVector) -> Q {
        let (a, b) = (&self.entries, &other.entries);
        let (mut i, mut j) = (0, 0);
        let mut acc = Q::zero();
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += &a[i].1 * &b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    /// Re-indexes through `f`; `f` must be injective.
    pub fn map_indices(&self, f: impl Fn(usize) -> usize) -> SparseVector {
        SparseVector::from_entries(self.entries.iter().map(|(i, x)| (f(*i), x.clone())).collect())
    }
}

impl FromIterator<(usize, Q)> for SparseVector {
    fn from_iter<T: IntoIterator<Item = (usize, Q)>>(iter: T) -> Self {
        SparseVector::from_entries(iter.into_iter().collect())
    }
}
