use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::rational::Q;

/// Number of basis tuples of length `degree + 1`, or a budget error when it
/// does not fit the 64-bit tuple encoding.
pub fn space_size(dim: usize, degree: usize) -> Result<u64> {
    let len = u32::try_from(degree + 1).map_err(|_| Error::InvalidArgument("degree too large".into()))?;
    (dim as u64).checked_pow(len).ok_or_else(|| Error::Budget {
        what: format!("tuple encoding for dimension {dim} in degree {degree}"),
        needed: (dim as u128).saturating_pow(len),
        budget: u64::MAX as u128,
    })
}

/// Mixed-radix code of a tuple; the first entry is most significant, so code
/// order is lexicographic tuple order.
pub fn encode(dim: usize, tuple: &[usize]) -> u64 {
    tuple.iter().fold(0u64, |acc, &a| acc * dim as u64 + a as u64)
}

pub fn decode(dim: usize, mut code: u64, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    decode_into(dim, &mut code, &mut out);
    out
}

pub(crate) fn decode_into(dim: usize, code: &mut u64, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = (*code % dim as u64) as usize;
        *code /= dim as u64;
    }
}

pub fn format_tuple(tuple: &[usize]) -> String {
    tuple.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",")
}

pub fn parse_tuple(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|e| Error::Parse(format!("bad tuple entry {s:?}: {e}"))))
        .collect()
}

/// Sums coefficients of repeated codes and drops zeros.
pub(crate) fn collect_terms(mut pairs: Vec<(u64, Q)>) -> BTreeMap<u64, Q> {
    pairs.sort_by_key(|p| p.0);
    let mut out = BTreeMap::new();
    let mut iter = pairs.into_iter().peekable();
    while let Some((code, mut c)) = iter.next() {
        while let Some((_, x)) = iter.next_if(|p| p.0 == code) {
            c += x;
        }
        if !c.is_zero() {
            out.insert(code, c);
        }
    }
    out
}
