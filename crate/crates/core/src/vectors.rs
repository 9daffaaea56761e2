//! The two vector spaces the reconstruction moves between: sparse joint
//! distributions over the full index space and stacked pairwise marginals.

use crate::error::{Error, Result};
use crate::shape::ProblemShape;
use serde::{Deserialize, Serialize};

/// A sparse vector over the joint index space, kept sorted by flat index
/// with unique entries. Used for the searched distribution and for solver
/// iterates, so weights may be negative mid-solve.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SparseVector {
    entries: Vec<(u64, f64)>,
}

impl SparseVector {
    pub fn empty() -> Self {
        Self { entries: Vec::new() }
    }

    /// Builds from entries that must already be strictly increasing in index.
    pub fn new(entries: Vec<(u64, f64)>) -> Result<Self> {
        if entries.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidShape(
                "sparse entries must be strictly increasing in index".into(),
            ));
        }
        Ok(Self { entries })
    }

    /// Builds from arbitrary-order entries, accumulating duplicate indices.
    pub fn from_unsorted(mut entries: Vec<(u64, f64)>) -> Self {
        entries.sort_unstable_by_key(|&(t, _)| t);
        let mut merged: Vec<(u64, f64)> = Vec::with_capacity(entries.len());
        for (t, w) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == t => last.1 += w,
                _ => merged.push((t, w)),
            }
        }
        Self { entries: merged }
    }

    pub fn point_mass(index: u64) -> Self {
        Self { entries: vec![(index, 1.0)] }
    }

    pub fn entries(&self) -> &[(u64, f64)] {
        &self.entries
    }

    pub fn sparsity(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn weight_at(&self, index: u64) -> f64 {
        match self.entries.binary_search_by_key(&index, |&(t, _)| t) {
            Ok(pos) => self.entries[pos].1,
            Err(_) => 0.0,
        }
    }

    /// Adds `delta` to the coefficient at `index`, inserting it if absent.
    /// Repeated selections of one index accumulate instead of duplicating.
    pub fn add_weight(&mut self, index: u64, delta: f64) {
        match self.entries.binary_search_by_key(&index, |&(t, _)| t) {
            Ok(pos) => self.entries[pos].1 += delta,
            Err(pos) => self.entries.insert(pos, (index, delta)),
        }
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().map(|&(_, w)| w).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries.iter().map(|&(_, w)| w * w).sum()
    }

    /// Inner product, walking both sorted entry lists once.
    pub fn dot(&self, other: &Self) -> f64 {
        let mut acc = 0.0;
        let mut rhs = other.entries.iter().peekable();
        for &(t, w) in &self.entries {
            while let Some(&&(u, _)) = rhs.peek() {
                if u < t {
                    rhs.next();
                } else {
                    break;
                }
            }
            if let Some(&&(u, v)) = rhs.peek() {
                if u == t {
                    acc += w * v;
                }
            }
        }
        acc
    }

    /// True iff all weights are at least `-tol` and the total is within
    /// `tol` of one.
    pub fn is_distribution(&self, tol: f64) -> bool {
        self.entries.iter().all(|&(_, w)| w >= -tol) && (self.sum() - 1.0).abs() <= tol
    }
}

/// Stacked pairwise-marginal values: one `levels x levels` block per measured
/// pair, in pair-list order, row-major over (n_i, n_j) within a block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasurementVector {
    levels: usize,
    pair_count: usize,
    values: Vec<f64>,
}

impl MeasurementVector {
    pub fn zeros(shape: &ProblemShape) -> Self {
        Self {
            levels: shape.levels(),
            pair_count: shape.pairs().len(),
            values: vec![0.0; shape.measurement_count()],
        }
    }

    /// Wraps a flat value list; the length must equal the shape's
    /// measurement count.
    pub fn from_values(shape: &ProblemShape, values: Vec<f64>) -> Result<Self> {
        if values.len() != shape.measurement_count() {
            return Err(Error::LengthMismatch {
                got: values.len(),
                expected: shape.measurement_count(),
            });
        }
        Ok(Self { levels: shape.levels(), pair_count: shape.pairs().len(), values })
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn pair_count(&self) -> usize {
        self.pair_count
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    fn offset(&self, pair: usize, u: usize, v: usize) -> usize {
        (pair * self.levels + u) * self.levels + v
    }

    pub fn get(&self, pair: usize, u: usize, v: usize) -> f64 {
        self.values[self.offset(pair, u, v)]
    }

    pub fn add(&mut self, pair: usize, u: usize, v: usize, delta: f64) {
        let at = self.offset(pair, u, v);
        self.values[at] += delta;
    }

    /// The `levels x levels` block of one pair, row-major.
    pub fn block(&self, pair: usize) -> &[f64] {
        let size = self.levels * self.levels;
        &self.values[pair * size..(pair + 1) * size]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a * b).sum()
    }

    /// self -= scale * other, entry-wise.
    pub fn sub_scaled(&mut self, other: &Self, scale: f64) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a -= scale * b;
        }
    }
}
