use std::fmt;

use crate::error::{Error, Result};

/// A sorted, duplicate-free set of column indices into a matrix with `m` columns.
///
/// Indices are stored 0-based; every parser, formatter and error message
/// uses the 1-based convention `1..=m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsetIndex {
    indices: Vec<usize>,
    m: usize,
}

impl SubsetIndex {
    /// The full set `{1, ..., m}`.
    pub fn full(m: usize) -> Self {
        SubsetIndex {
            indices: (0..m).collect(),
            m,
        }
    }

    /// Builds a subset from 0-based indices in any order.
    pub fn from_zero_based(mut indices: Vec<usize>, m: usize) -> Result<Self> {
        indices.sort_unstable();
        for w in indices.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateIndex { index: w[0] + 1 });
            }
        }
        if let Some(&last) = indices.last() {
            if last >= m {
                return Err(Error::IndexOutOfRange { index: last + 1, m });
            }
        }
        Ok(SubsetIndex { indices, m })
    }

    /// Builds a subset from 1-based indices in any order.
    pub fn from_one_based(indices: &[usize], m: usize) -> Result<Self> {
        let zero_based = indices
            .iter()
            .map(|&i| {
                if i == 0 || i > m {
                    Err(Error::IndexOutOfRange { index: i, m })
                } else {
                    Ok(i - 1)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_zero_based(zero_based, m)
    }

    /// Builds a subset from indices already known to be strictly increasing and in range.
    pub(crate) fn from_sorted_unchecked(indices: Vec<usize>, m: usize) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(indices.last().is_none_or(|&l| l < m));
        SubsetIndex { indices, m }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Number of columns of the ambient matrix.
    pub fn m(&self) -> usize {
        self.m
    }

    /// 0-based indices, strictly increasing.
    pub fn as_slice(&self) -> &[usize] {
        &self.indices
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.indices.iter().map(|&i| i + 1).collect()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    /// The normalisation `M / |I|`.
    pub fn scale(&self) -> f64 {
        self.m as f64 / self.indices.len() as f64
    }
}

impl fmt::Display for SubsetIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.indices.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorts_and_validates() {
        let s = SubsetIndex::from_one_based(&[3, 1, 2], 3).unwrap();
        assert_eq!(s.as_slice(), &[0, 1, 2]);
        assert_eq!(s.to_one_based(), vec![1, 2, 3]);
        assert_eq!(s.to_string(), "{1,2,3}");
        assert_eq!(s, SubsetIndex::full(3));
    }

    #[test]
    fn rejects_bad_indices() {
        assert_eq!(
            SubsetIndex::from_one_based(&[0], 3),
            Err(Error::IndexOutOfRange { index: 0, m: 3 })
        );
        assert_eq!(
            SubsetIndex::from_one_based(&[4], 3),
            Err(Error::IndexOutOfRange { index: 4, m: 3 })
        );
        assert_eq!(
            SubsetIndex::from_one_based(&[2, 2], 3),
            Err(Error::DuplicateIndex { index: 2 })
        );
    }

    #[test]
    fn scale_is_m_over_size() {
        let s = SubsetIndex::from_one_based(&[1, 5], 8).unwrap();
        assert_eq!(s.scale(), 4.0);
        assert!(s.contains(4));
        assert!(!s.contains(3));
    }
}
