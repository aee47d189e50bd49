//! Principal-component model: fit from a training matrix, project onto the
//! leading components.
//!
//! The decomposition keeps all d components (orthonormal, ordered by
//! descending eigenvalue) so callers can choose the cut-off k at projection
//! time. Eigenvector signs are fixed so the largest-magnitude entry of each
//! column is positive, making fits reproducible bit-for-bit.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PcaError {
    #[error("need at least 2 samples to fit, got {n}")]
    TooFewSamples { n: usize },
    #[error("input matrix has no feature columns")]
    NoFeatures,
    #[error("non-finite entry in input matrix")]
    NonFinite,
    #[error("vector dimension {got} does not match model dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("component count {k} out of range 1..={dim}")]
    ComponentCountOutOfRange { k: usize, dim: usize },
}

/// Mean, full orthonormal component basis, and eigenvalues of the training
/// sample covariance (denominator n-1).
#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    mean: DVector<f64>,
    components: DMatrix<f64>,
    eigenvalues: DVector<f64>,
}

impl PcaModel {
    /// Fits the model on an n x d matrix with one sample per row.
    ///
    /// At most min(n-1, d) eigenvalues are nonzero; the rest are zeroed
    /// exactly, and small negative values from the eigensolver are clamped
    /// to zero.
    pub fn fit(x: &DMatrix<f64>) -> Result<Self, PcaError> {
        let (n, d) = (x.nrows(), x.ncols());
        if n < 2 {
            return Err(PcaError::TooFewSamples { n });
        }
        if d == 0 {
            return Err(PcaError::NoFeatures);
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(PcaError::NonFinite);
        }

        let mean_row = x.row_mean();
        let centered = DMatrix::from_fn(n, d, |i, j| x[(i, j)] - mean_row[j]);
        let covariance = centered.tr_mul(&centered) / (n as f64 - 1.0);
        let eigen = SymmetricEigen::new(covariance);

        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| {
            eigen.eigenvalues[b]
                .partial_cmp(&eigen.eigenvalues[a])
                .expect("eigenvalues of a finite symmetric matrix are finite")
                .then(a.cmp(&b))
        });

        let rank_bound = (n - 1).min(d);
        let mut eigenvalues = DVector::zeros(d);
        let mut components = DMatrix::zeros(d, d);
        for (slot, &src) in order.iter().enumerate() {
            if slot < rank_bound {
                eigenvalues[slot] = eigen.eigenvalues[src].max(0.0);
            }
            components
                .column_mut(slot)
                .copy_from(&eigen.eigenvectors.column(src));
        }
        fix_signs(&mut components);

        Ok(PcaModel {
            mean: mean_row.transpose(),
            components,
            eigenvalues,
        })
    }

    /// Feature dimension d.
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    /// d x d orthonormal matrix, one component per column, descending
    /// eigenvalue order.
    pub fn components(&self) -> &DMatrix<f64> {
        &self.components
    }

    /// Eigenvalues, descending, all >= 0.
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    /// Largest k that can carry variance: min(n-1, d) at fit time shows up
    /// as the number of nonzero eigenvalues; this reports the model's d.
    pub fn max_components(&self) -> usize {
        self.dim()
    }

    /// Projects one vector onto the top k components: Cᵀ(x - mean) truncated
    /// to k coordinates. Test-time vectors are centered with the training
    /// mean.
    pub fn project(&self, x: &DVector<f64>, k: usize) -> Result<DVector<f64>, PcaError> {
        self.check_k(k)?;
        if x.len() != self.dim() {
            return Err(PcaError::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let centered = x - &self.mean;
        Ok(self.components.columns(0, k).tr_mul(&centered))
    }

    /// Projects every row of an n x d matrix, returning n x k.
    pub fn project_rows(&self, x: &DMatrix<f64>, k: usize) -> Result<DMatrix<f64>, PcaError> {
        self.check_k(k)?;
        if x.ncols() != self.dim() {
            return Err(PcaError::DimensionMismatch {
                expected: self.dim(),
                got: x.ncols(),
            });
        }
        let centered = DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| x[(i, j)] - self.mean[j]);
        Ok(centered * self.components.columns(0, k))
    }

    /// Maps a k-dimensional projection back to feature space:
    /// mean + C[:, 0..k] * projection.
    pub fn reconstruct(&self, projection: &DVector<f64>) -> Result<DVector<f64>, PcaError> {
        let k = projection.len();
        self.check_k(k)?;
        Ok(&self.mean + self.components.columns(0, k) * projection)
    }

    fn check_k(&self, k: usize) -> Result<(), PcaError> {
        if k == 0 || k > self.dim() {
            return Err(PcaError::ComponentCountOutOfRange { k, dim: self.dim() });
        }
        Ok(())
    }

    /// Reassembles a model from stored parts (artifact deserialization).
    pub(crate) fn from_parts(
        mean: DVector<f64>,
        components: DMatrix<f64>,
        eigenvalues: DVector<f64>,
    ) -> Result<Self, PcaError> {
        let d = mean.len();
        if components.nrows() != d || components.ncols() != d || eigenvalues.len() != d {
            return Err(PcaError::DimensionMismatch {
                expected: d,
                got: components.nrows(),
            });
        }
        if mean.iter().any(|v| !v.is_finite())
            || components.iter().any(|v| !v.is_finite())
            || eigenvalues.iter().any(|v| !v.is_finite())
        {
            return Err(PcaError::NonFinite);
        }
        Ok(PcaModel {
            mean,
            components,
            eigenvalues,
        })
    }
}

/// Flips each column so its largest-magnitude entry (first such entry on
/// ties) is positive.
fn fix_signs(components: &mut DMatrix<f64>) {
    for mut column in components.column_iter_mut() {
        let mut lead = 0;
        let mut best = f64::NEG_INFINITY;
        for (i, v) in column.iter().enumerate() {
            if v.abs() > best {
                best = v.abs();
                lead = i;
            }
        }
        if column[lead] < 0.0 {
            column.neg_mut();
        }
    }
}
