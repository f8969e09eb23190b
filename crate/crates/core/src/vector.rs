use crate::error::{invalid, Result};

/// Element index inside a vector. `u32::MAX` is reserved as a sentinel in the
/// sketch file format.
pub type Index = u32;

/// A nonnegative sparse vector. Only strictly positive entries are stored,
/// sorted by index with no duplicates.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVector {
    indices: Vec<Index>,
    weights: Vec<f64>,
    dim: Option<u64>,
}

impl SparseVector {
    /// Builds a vector from `(index, weight)` pairs in any order.
    ///
    /// Rejects duplicate indices, the reserved index `u32::MAX`, and weights
    /// that are not finite and strictly positive.
    pub fn new(mut entries: Vec<(Index, f64)>) -> Result<Self> {
        entries.sort_by_key(|&(i, _)| i);
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(invalid(format!("duplicate index {}", w[0].0)));
            }
        }
        for &(i, w) in &entries {
            if i == Index::MAX {
                return Err(invalid("index u32::MAX is reserved"));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(invalid(format!(
                    "weight at index {i} must be positive and finite, got {w}"
                )));
            }
        }
        let (indices, weights) = entries.into_iter().unzip();
        Ok(SparseVector {
            indices,
            weights,
            dim: None,
        })
    }

    /// Dense input; zero entries are dropped.
    pub fn from_dense(values: &[f64]) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, &w) in values.iter().enumerate() {
            if w != 0.0 {
                entries.push((i as Index, w));
            }
        }
        let mut v = Self::new(entries)?;
        v.dim = Some(values.len() as u64);
        Ok(v)
    }

    pub fn with_dim(mut self, dim: u64) -> Self {
        self.dim = Some(dim);
        self
    }

    pub fn dim(&self) -> Option<u64> {
        self.dim
    }

    /// Number of positive entries (n⁺).
    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[Index] {
        &self.indices
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (Index, f64)> + '_ {
        self.indices
            .iter()
            .copied()
            .zip(self.weights.iter().copied())
    }

    pub fn get(&self, index: Index) -> Option<f64> {
        self.indices
            .binary_search(&index)
            .ok()
            .map(|p| self.weights[p])
    }

    /// Sum of weights, accumulated in index order.
    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Normalized weights `v_i / Σ v`.
    pub fn normalized_weights(&self) -> Vec<f64> {
        let total = self.total();
        self.weights.iter().map(|w| w / total).collect()
    }

    /// Every weight multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(invalid(format!("scale factor must be positive, got {c}")));
        }
        let weights: Vec<f64> = self.weights.iter().map(|w| w * c).collect();
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(invalid("scaled weight overflowed or underflowed"));
        }
        Ok(SparseVector {
            indices: self.indices.clone(),
            weights,
            dim: self.dim,
        })
    }
}
