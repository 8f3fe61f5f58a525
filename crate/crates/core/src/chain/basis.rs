use std::sync::Arc;

use super::tuple::{decode, encode, space_size};
use crate::error::{Error, Result};

/// An ordered set of basis tuples spanning (part of) a chain space. Column
/// and row indices of materialized matrices refer to positions in this
/// order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChainBasis {
    /// Every tuple; the position of a tuple is its code.
    Full { dim: usize, degree: usize, size: u64 },
    /// A sorted list of tuple codes.
    Listed { dim: usize, degree: usize, codes: Arc<Vec<u64>> },
}

impl ChainBasis {
    pub fn full(dim: usize, degree: usize) -> Result<Self> {
        let size = space_size(dim, degree)?;
        usize::try_from(size).map_err(|_| Error::Budget {
            what: "chain space size".into(),
            needed: size as u128,
            budget: usize::MAX as u128,
        })?;
        Ok(ChainBasis::Full { dim, degree, size })
    }

    pub fn from_codes(dim: usize, degree: usize, mut codes: Vec<u64>) -> Result<Self> {
        let size = space_size(dim, degree)?;
        codes.sort_unstable();
        codes.dedup();
        if codes.last().is_some_and(|&c| c >= size) {
            return Err(Error::OutOfRange("tuple code outside the chain space".into()));
        }
        Ok(ChainBasis::Listed {
            dim,
            degree,
            codes: Arc::new(codes),
        })
    }

    /// Tuples whose `i`-th entry lies in `sets[i]`.
    pub fn product(dim: usize, sets: &[Vec<usize>]) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::InvalidArgument("a chain tuple has at least one factor".into()));
        }
        if sets.iter().flatten().any(|&a| a >= dim) {
            return Err(Error::OutOfRange("factor outside the algebra basis".into()));
        }
        let degree = sets.len() - 1;
        let mut codes = vec![0u64];
        for set in sets {
            codes = codes
                .iter()
                .flat_map(|&c| set.iter().map(move |&a| c * dim as u64 + a as u64))
                .collect();
        }
        Self::from_codes(dim, degree, codes)
    }

    /// Tuples with every entry in `allowed`.
    pub fn restricted(dim: usize, degree: usize, allowed: &[usize]) -> Result<Self> {
        Self::product(dim, &vec![allowed.to_vec(); degree + 1])
    }

    /// Tuples of the full space not in `self`.
    pub fn complement(&self) -> Result<Self> {
        let (dim, degree) = (self.dim(), self.degree());
        let size = space_size(dim, degree)?;
        let codes = (0..size).filter(|c| !self.contains_code(*c)).collect();
        Self::from_codes(dim, degree, codes)
    }

    pub fn dim(&self) -> usize {
        match self {
            ChainBasis::Full { dim, .. } | ChainBasis::Listed { dim, .. } => *dim,
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            ChainBasis::Full { degree, .. } | ChainBasis::Listed { degree, .. } => *degree,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            ChainBasis::Full { size, .. } => *size as usize,
            ChainBasis::Listed { codes, .. } => codes.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn code(&self, index: usize) -> u64 {
        match self {
            ChainBasis::Full { .. } => index as u64,
            ChainBasis::Listed { codes, .. } => codes[index],
        }
    }

    pub fn tuple(&self, index: usize) -> Vec<usize> {
        decode(self.dim(), self.code(index), self.degree() + 1)
    }

    pub fn index_of(&self, code: u64) -> Option<usize> {
        match self {
            ChainBasis::Full { size, .. } => (code < *size).then_some(code as usize),
            ChainBasis::Listed { codes, .. } => codes.binary_search(&code).ok(),
        }
    }

    pub fn index_of_tuple(&self, tuple: &[usize]) -> Option<usize> {
        if tuple.len() != self.degree() + 1 || tuple.iter().any(|&a| a >= self.dim()) {
            return None;
        }
        self.index_of(encode(self.dim(), tuple))
    }

    pub fn contains_code(&self, code: u64) -> bool {
        self.index_of(code).is_some()
    }

    pub fn codes(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len()).map(|i| self.code(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn restricted_and_complement_partition() {
        let sub = ChainBasis::restricted(3, 1, &[0, 1]).unwrap();
        assert_eq!(sub.len(), 4);
        let rest = sub.complement().unwrap();
        assert_eq!(rest.len(), 5);
        assert!(sub.codes().all(|c| !rest.contains_code(c)));
        assert_eq!(sub.index_of_tuple(&[1, 0]), Some(2));
        assert_eq!(ChainBasis::full(3, 1).unwrap().index_of_tuple(&[2, 2]), Some(8));
    }
}
