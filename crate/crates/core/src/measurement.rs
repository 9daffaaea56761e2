//! The structured binary measurement operator that maps a joint distribution
//! to its stacked pairwise marginals. The operator is never stored: forward
//! application walks the sparse entries, and the adjoint is evaluated through
//! per-pair residual tables. A dense materializer exists only as a test
//! oracle behind a size cap.

use crate::error::{Error, Result};
use crate::shape::{ModePair, ProblemShape};
use crate::vectors::{MeasurementVector, SparseVector};
use nalgebra::DMatrix;

/// Implicit `k x levels^modes` binary operator defined by a shape's pair list.
#[derive(Debug, Clone)]
pub struct MeasurementOperator {
    shape: ProblemShape,
}

impl MeasurementOperator {
    pub fn new(shape: ProblemShape) -> Self {
        Self { shape }
    }

    pub fn shape(&self) -> &ProblemShape {
        &self.shape
    }

    /// The marginal bin of `pair` that fires for column `flat`: the N-inary
    /// digits of `flat` at the pair's two modes.
    pub fn row_bin_of_index(&self, pair: ModePair, flat: u64) -> Result<(usize, usize)> {
        self.shape.check_index(flat)?;
        Ok(self.shape.digits_at(flat, pair))
    }

    /// y[p, u, v] = sum of weights of entries whose digits at pair p are
    /// (u, v). Costs O(sparsity * (modes + pairs)); no dense storage.
    pub fn forward(&self, x: &SparseVector) -> Result<MeasurementVector> {
        for &(t, _) in x.entries() {
            self.shape.check_index(t)?;
        }
        Ok(self.forward_entries(x.entries().iter().copied()))
    }

    /// Forward application over raw (index, weight) pairs in any order.
    /// Indices must be in range.
    pub(crate) fn forward_entries(
        &self,
        entries: impl Iterator<Item = (u64, f64)>,
    ) -> MeasurementVector {
        let mut y = MeasurementVector::zeros(&self.shape);
        for (t, w) in entries {
            for (p, &pair) in self.shape.pairs().iter().enumerate() {
                let (u, v) = self.shape.digits_at(t, pair);
                y.add(p, u, v, w);
            }
        }
        y
    }

    /// (A^T A)_{t, t'}: the number of pairs on which the two columns share
    /// both digits. Equal columns score the full pair count.
    pub fn gram_entry(&self, t: u64, t_prime: u64) -> Result<usize> {
        self.shape.check_index(t)?;
        self.shape.check_index(t_prime)?;
        Ok(self
            .shape
            .pairs()
            .iter()
            .filter(|&&pair| self.shape.digits_at(t, pair) == self.shape.digits_at(t_prime, pair))
            .count())
    }

    /// Explicit dense matrix, rows ordered (pair, u, v) row-major, columns by
    /// flat index. Refused above the dimension cap; intended for test oracles.
    pub fn dense_matrix(&self) -> Result<DMatrix<f64>> {
        let dimension = self.shape.dimension();
        let cap = crate::dimension_cap();
        if dimension > cap {
            return Err(Error::DimensionCap { dimension, cap });
        }
        let d = dimension as usize;
        let k = self.shape.measurement_count();
        let n = self.shape.levels();
        let mut dense = DMatrix::zeros(k, d);
        for t in 0..d {
            for (p, &pair) in self.shape.pairs().iter().enumerate() {
                let (u, v) = self.shape.digits_at(t as u64, pair);
                dense[((p * n + u) * n + v, t)] = 1.0;
            }
        }
        Ok(dense)
    }
}

/// Per-pair `levels x levels` tables holding a residual vector in the
/// compressed form the adjoint acts through: (A^T r)_t is the sum over pairs
/// of the table entry picked out by t's digits.
#[derive(Debug, Clone)]
pub struct ResidualTables {
    shape: ProblemShape,
    values: Vec<f64>,
}

impl ResidualTables {
    /// Pure reshape of a stacked marginal-space vector into per-pair tables.
    pub fn from_slice(shape: &ProblemShape, values: &[f64]) -> Result<Self> {
        if values.len() != shape.measurement_count() {
            return Err(Error::LengthMismatch {
                got: values.len(),
                expected: shape.measurement_count(),
            });
        }
        Ok(Self { shape: shape.clone(), values: values.to_vec() })
    }

    pub fn from_measurement(shape: &ProblemShape, r: &MeasurementVector) -> Result<Self> {
        Self::from_slice(shape, r.as_slice())
    }

    pub fn shape(&self) -> &ProblemShape {
        &self.shape
    }

    /// Table entry of pair `p` at bin (u, v).
    pub fn entry(&self, p: usize, u: usize, v: usize) -> f64 {
        let n = self.shape.levels();
        self.values[(p * n + u) * n + v]
    }

    /// The `levels x levels` table of one pair, row-major.
    pub fn table(&self, p: usize) -> &[f64] {
        let size = self.shape.levels() * self.shape.levels();
        &self.values[p * size..(p + 1) * size]
    }

    pub fn flatten(&self) -> &[f64] {
        &self.values
    }

    /// Largest absolute table entry, used to scale annealing temperatures.
    pub fn max_abs_entry(&self) -> f64 {
        self.values.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
    }

    /// All tables negated; evaluating the adjoint of -r.
    pub fn negated(&self) -> Self {
        Self { shape: self.shape.clone(), values: self.values.iter().map(|v| -v).collect() }
    }

    /// (A^T r)_t, summed over pairs in pair-list order. Costs
    /// O(modes + pairs) per call.
    pub fn adjoint_entry(&self, flat: u64) -> Result<f64> {
        self.shape.check_index(flat)?;
        let n = self.shape.levels();
        let mut acc = 0.0;
        for (p, &pair) in self.shape.pairs().iter().enumerate() {
            let (u, v) = self.shape.digits_at(flat, pair);
            acc += self.values[(p * n + u) * n + v];
        }
        Ok(acc)
    }
}
