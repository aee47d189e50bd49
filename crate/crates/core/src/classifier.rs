//! Dictionary assembly and minimum class-residual classification.
//!
//! Training samples, projected to the retained components, become the
//! unit-norm columns of an over-complete dictionary (class-1 columns first).
//! A probe is projected, unit-normalized, and sparsely coded against the
//! dictionary; the per-class reconstructions T*delta_c(omega) compete and
//! the smaller residual wins.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use thiserror::Error;

use crate::encoding::EncodingKind;
use crate::pca::{PcaError, PcaModel};
use crate::seqio::ClassLabel;
use crate::sparse::{self, BpProblem, SolverError};

/// Columns with norm at or below this are rejected as zero vectors.
const ZERO_NORM: f64 = 1e-12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClassifierError {
    #[error("class {0} has no training samples")]
    EmptyClass(ClassLabel),
    #[error("training sample {index} has zero norm")]
    ZeroNormSample { index: usize },
    #[error("sample {index} has dimension {got}, expected {expected}")]
    SampleDimensionMismatch {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("probe has dimension {got}, expected {expected}")]
    ProbeDimensionMismatch { expected: usize, got: usize },
    #[error("probe projection has zero norm; it carries no signal in the retained components")]
    ZeroProjection,
    #[error("omega length {got} does not match dictionary columns {expected}")]
    OmegaLengthMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Pca(#[from] PcaError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Over-complete dictionary: p x m matrix of unit-norm columns, class-1
/// block first, with per-column labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dictionary {
    columns: DMatrix<f64>,
    labels: Vec<ClassLabel>,
}

impl Dictionary {
    /// Builds the dictionary from labeled projected samples: class-1
    /// columns first, then class-2, input order preserved within each
    /// class, every column scaled to unit l2 norm.
    pub fn build(samples: &[(DVector<f64>, ClassLabel)]) -> Result<Self, ClassifierError> {
        let dim = samples
            .first()
            .map(|(v, _)| v.len())
            .ok_or(ClassifierError::EmptyClass(ClassLabel::Afp))?;
        for (index, (sample, _)) in samples.iter().enumerate() {
            if sample.len() != dim {
                return Err(ClassifierError::SampleDimensionMismatch {
                    index,
                    expected: dim,
                    got: sample.len(),
                });
            }
        }
        for class in ClassLabel::BOTH {
            if !samples.iter().any(|(_, label)| *label == class) {
                return Err(ClassifierError::EmptyClass(class));
            }
        }

        let ordered: Vec<usize> = ClassLabel::BOTH
            .iter()
            .flat_map(|&class| {
                samples
                    .iter()
                    .enumerate()
                    .filter(move |(_, (_, label))| *label == class)
                    .map(|(i, _)| i)
            })
            .collect();

        let mut columns = DMatrix::zeros(dim, samples.len());
        let mut labels = Vec::with_capacity(samples.len());
        for (slot, &index) in ordered.iter().enumerate() {
            let (sample, label) = &samples[index];
            let norm = sample.norm();
            if norm <= ZERO_NORM {
                return Err(ClassifierError::ZeroNormSample { index });
            }
            columns.column_mut(slot).copy_from(&(sample / norm));
            labels.push(*label);
        }
        Ok(Dictionary { columns, labels })
    }

    pub fn columns(&self) -> &DMatrix<f64> {
        &self.columns
    }

    pub fn labels(&self) -> &[ClassLabel] {
        &self.labels
    }

    /// Row dimension p (number of retained components).
    pub fn dim(&self) -> usize {
        self.columns.nrows()
    }

    /// Column count m.
    pub fn len(&self) -> usize {
        self.columns.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn class_count(&self, class: ClassLabel) -> usize {
        self.labels.iter().filter(|&&l| l == class).count()
    }

    /// Delta rule: keeps the coefficients of columns labeled `class` and
    /// zeroes the rest.
    pub fn delta_mask(
        &self,
        omega: &DVector<f64>,
        class: ClassLabel,
    ) -> Result<DVector<f64>, ClassifierError> {
        if omega.len() != self.len() {
            return Err(ClassifierError::OmegaLengthMismatch {
                expected: self.len(),
                got: omega.len(),
            });
        }
        Ok(DVector::from_fn(omega.len(), |i, _| {
            if self.labels[i] == class {
                omega[i]
            } else {
                0.0
            }
        }))
    }

    /// Reassembles a dictionary from stored parts (artifact
    /// deserialization). Labels must be non-decreasing class indices.
    pub(crate) fn from_parts(
        columns: DMatrix<f64>,
        labels: Vec<ClassLabel>,
    ) -> Result<Self, ClassifierError> {
        if columns.ncols() != labels.len() {
            return Err(ClassifierError::OmegaLengthMismatch {
                expected: columns.ncols(),
                got: labels.len(),
            });
        }
        for class in ClassLabel::BOTH {
            if !labels.contains(&class) {
                return Err(ClassifierError::EmptyClass(class));
            }
        }
        Ok(Dictionary { columns, labels })
    }
}

/// Solver settings carried by a model. `lambda` is relative: the absolute
/// penalty used for a probe t is lambda * ||T^T t||_inf.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverParams {
    pub lambda: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            lambda: 1e-4,
            tol: sparse::DEFAULT_TOL,
            max_iter: sparse::DEFAULT_MAX_ITER,
        }
    }
}

/// Outcome of classifying one probe.
#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub label: ClassLabel,
    /// Reconstruction residuals [r_1, r_2]; the decision is their argmin
    /// with ties going to class 1.
    pub residuals: [f64; 2],
    /// Per-class l1 mass of omega: the sample-association score.
    pub scores: [f64; 2],
    pub omega: DVector<f64>,
    /// False when the solver hit max_iter before meeting tol.
    pub converged: bool,
}

/// Everything inference needs: the PCA, the dictionary at k components,
/// and the solver settings, bundled so "training" is exactly dictionary
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SrcModel {
    pca: PcaModel,
    dictionary: Dictionary,
    k: usize,
    solver: SolverParams,
    encoding: EncodingKind,
}

impl SrcModel {
    pub fn new(
        pca: PcaModel,
        dictionary: Dictionary,
        solver: SolverParams,
        encoding: EncodingKind,
    ) -> Result<Self, ClassifierError> {
        let k = dictionary.dim();
        if k == 0 || k > pca.dim() {
            return Err(ClassifierError::ProbeDimensionMismatch {
                expected: pca.dim(),
                got: k,
            });
        }
        Ok(SrcModel {
            pca,
            dictionary,
            k,
            solver,
            encoding,
        })
    }

    pub fn pca(&self) -> &PcaModel {
        &self.pca
    }

    pub fn dictionary(&self) -> &Dictionary {
        &self.dictionary
    }

    /// Number of retained components; equals the dictionary row count.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn solver(&self) -> &SolverParams {
        &self.solver
    }

    pub fn encoding(&self) -> EncodingKind {
        self.encoding
    }

    /// Classifies one raw feature vector (dimension = encoding dim):
    /// project to k components, normalize, sparse-code, compare per-class
    /// reconstruction residuals.
    pub fn classify(&self, features: &DVector<f64>) -> Result<Classification, ClassifierError> {
        if features.len() != self.pca.dim() {
            return Err(ClassifierError::ProbeDimensionMismatch {
                expected: self.pca.dim(),
                got: features.len(),
            });
        }
        let projected = self.pca.project(features, self.k)?;
        let norm = projected.norm();
        if norm <= ZERO_NORM {
            return Err(ClassifierError::ZeroProjection);
        }
        let probe = projected / norm;

        let dictionary = self.dictionary.columns();
        let lambda = self.solver.lambda * dictionary.tr_mul(&probe).amax();
        let problem = BpProblem {
            dictionary,
            probe: &probe,
            lambda,
            tol: self.solver.tol,
            max_iter: self.solver.max_iter,
        };
        let solution = sparse::solve_bp(&problem)?;

        let mut residuals = [0.0; 2];
        let mut scores = [0.0; 2];
        for (slot, class) in ClassLabel::BOTH.into_iter().enumerate() {
            let masked = self.dictionary.delta_mask(&solution.omega, class)?;
            residuals[slot] = (&probe - dictionary * &masked).norm();
            scores[slot] = masked.iter().map(|v| v.abs()).sum();
        }
        let label = if residuals[0] <= residuals[1] {
            ClassLabel::Afp
        } else {
            ClassLabel::NonAfp
        };
        Ok(Classification {
            label,
            residuals,
            scores,
            omega: solution.omega,
            converged: solution.converged,
        })
    }

    /// Classifies every row of an n x dim feature matrix in parallel,
    /// returning per-row results in input order.
    pub fn classify_rows(
        &self,
        features: &DMatrix<f64>,
    ) -> Vec<Result<Classification, ClassifierError>> {
        (0..features.nrows())
            .into_par_iter()
            .map(|i| self.classify(&features.row(i).transpose()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{gaussian_clusters, model_from_samples, nearest_centroid_accuracy};

    fn vec2(x: f64, y: f64) -> DVector<f64> {
        DVector::from_row_slice(&[x, y])
    }

    fn labeled(samples: &[(f64, f64, u8)]) -> Vec<(DVector<f64>, ClassLabel)> {
        samples
            .iter()
            .map(|&(x, y, c)| (vec2(x, y), ClassLabel::from_index(c).unwrap()))
            .collect()
    }

    #[test]
    fn dictionary_layout_class_one_first() {
        let samples = labeled(&[(1.0, 0.0, 2), (0.0, 1.0, 1), (1.0, 1.0, 2), (0.5, 0.5, 1)]);
        let dict = Dictionary::build(&samples).unwrap();
        assert_eq!(dict.len(), 4);
        let indices: Vec<u8> = dict.labels().iter().map(|l| l.index()).collect();
        assert_eq!(indices, vec![1, 1, 2, 2]);
        // Within-class input order preserved: first class-1 column is the
        // normalized (0,1).
        assert_eq!(dict.columns()[(1, 0)], 1.0);
    }

    #[test]
    fn dictionary_columns_are_normalized() {
        let samples = labeled(&[(3.0, 4.0, 1), (1.0, 0.0, 2)]);
        let dict = Dictionary::build(&samples).unwrap();
        assert!((dict.columns()[(0, 0)] - 0.6).abs() < 1e-15);
        assert!((dict.columns()[(1, 0)] - 0.8).abs() < 1e-15);
        for j in 0..dict.len() {
            assert!((dict.columns().column(j).norm() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn duplicate_samples_stay_duplicated() {
        let samples = labeled(&[(1.0, 2.0, 1), (1.0, 2.0, 1), (0.0, 1.0, 2)]);
        let dict = Dictionary::build(&samples).unwrap();
        assert_eq!(dict.len(), 3);
        assert_eq!(dict.columns().column(0), dict.columns().column(1));
    }

    #[test]
    fn dictionary_rejects_zero_and_missing_class() {
        let zero = labeled(&[(0.0, 0.0, 1), (1.0, 0.0, 2)]);
        assert_eq!(
            Dictionary::build(&zero).unwrap_err(),
            ClassifierError::ZeroNormSample { index: 0 }
        );
        let one_class = labeled(&[(1.0, 0.0, 1), (0.0, 1.0, 1)]);
        assert_eq!(
            Dictionary::build(&one_class).unwrap_err(),
            ClassifierError::EmptyClass(ClassLabel::NonAfp)
        );
    }

    #[test]
    fn delta_mask_selects_class_blocks() {
        let samples = labeled(&[(1.0, 0.0, 1), (0.0, 1.0, 1), (1.0, 1.0, 2), (2.0, 1.0, 2)]);
        let dict = Dictionary::build(&samples).unwrap();
        let omega = DVector::from_row_slice(&[1.0, 2.0, 3.0, 4.0]);
        let class1 = dict.delta_mask(&omega, ClassLabel::Afp).unwrap();
        let class2 = dict.delta_mask(&omega, ClassLabel::NonAfp).unwrap();
        assert_eq!(class1.as_slice(), &[1.0, 2.0, 0.0, 0.0]);
        assert_eq!(class2.as_slice(), &[0.0, 0.0, 3.0, 4.0]);
        assert_eq!(&class1 + &class2, omega);
    }

    #[test]
    fn probe_matching_a_dictionary_column_self_reconstructs() {
        let samples = gaussian_clusters(6, 5, 0.3, 11);
        let model = model_from_samples(&samples, 6);
        let probe = &samples[2].0;
        let result = model.classify(probe).unwrap();
        assert_eq!(result.label, ClassLabel::Afp);
        assert!(result.residuals[0] < 1e-3);
        assert!(result.residuals[0] < result.residuals[1]);
    }

    #[test]
    fn equidistant_probe_ties_to_class_one() {
        // Mirror-symmetric dictionary in 2D: class 1 along e1, class 2
        // along e2; the diagonal probe is equidistant.
        let pca = PcaModel::fit(&DMatrix::from_row_slice(
            4,
            2,
            &[2.0, 0.0, -2.0, 0.0, 0.0, 2.0, 0.0, -2.0],
        ))
        .unwrap();
        let projected = vec![
            (pca.project(&vec2(2.0, 0.0), 2).unwrap(), ClassLabel::Afp),
            (pca.project(&vec2(0.0, 2.0), 2).unwrap(), ClassLabel::NonAfp),
        ];
        let dictionary = Dictionary::build(&projected).unwrap();
        let model =
            SrcModel::new(pca, dictionary, SolverParams::default(), EncodingKind::Aac).unwrap();
        let result = model.classify(&vec2(2.0, 2.0)).unwrap();
        assert!((result.residuals[0] - result.residuals[1]).abs() < 1e-9);
        assert_eq!(result.label, ClassLabel::Afp);
    }

    #[test]
    fn separable_clusters_reach_95_percent_with_centroid_oracle() {
        let train = gaussian_clusters(10, 20, 1.0, 42);
        let probes = gaussian_clusters(10, 100, 1.0, 43);
        let model = model_from_samples(&train, 10);

        // Independent separability oracle: nearest centroid on raw vectors.
        let oracle_accuracy = nearest_centroid_accuracy(&train, &probes);
        assert!(
            oracle_accuracy >= 0.95,
            "oracle found the synthetic data inseparable: {oracle_accuracy}"
        );

        let src_hits = probes
            .iter()
            .filter(|(v, c)| model.classify(v).unwrap().label == *c)
            .count();
        assert!(
            src_hits * 100 >= probes.len() * 95,
            "sparse classifier accuracy {src_hits}/{}",
            probes.len()
        );
    }

    #[test]
    fn masked_reconstructions_partition_the_full_one() {
        let samples = gaussian_clusters(8, 6, 0.8, 17);
        let model = model_from_samples(&samples, 8);
        let probe = gaussian_clusters(8, 1, 0.8, 18)[0].0.clone();
        let result = model.classify(&probe).unwrap();
        let dict = model.dictionary();
        let m1 = dict.delta_mask(&result.omega, ClassLabel::Afp).unwrap();
        let m2 = dict.delta_mask(&result.omega, ClassLabel::NonAfp).unwrap();
        let lhs = dict.columns() * &m1 + dict.columns() * &m2;
        let rhs = dict.columns() * &result.omega;
        assert!((lhs - rhs).norm() < 1e-9);
    }

    #[test]
    fn classification_is_scale_invariant_and_deterministic() {
        let samples = gaussian_clusters(6, 8, 0.5, 23);
        let model = model_from_samples(&samples, 6);
        let probe = gaussian_clusters(6, 1, 0.5, 29)[0].0.clone();
        let base = model.classify(&probe).unwrap();
        let again = model.classify(&probe).unwrap();
        assert_eq!(base, again);
        assert!(base
            .omega
            .iter()
            .zip(again.omega.iter())
            .all(|(a, b)| a.to_bits() == b.to_bits()));

        // The probe is centered with the training mean before projection,
        // so exact scale invariance holds for scaling around the mean.
        let mean = model.pca().mean().clone();
        let doubled = &mean + (&probe - &mean) * 2.0;
        let scaled = model.classify(&doubled).unwrap();
        assert_eq!(base.label, scaled.label);
        for i in 0..2 {
            assert!((base.residuals[i] - scaled.residuals[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn class_permutation_within_class_leaves_residuals_unchanged() {
        let samples = gaussian_clusters(6, 5, 0.5, 31);
        let model = model_from_samples(&samples, 6);
        // Permute class-1 samples (indices 0..5) before building.
        let mut permuted = samples.clone();
        permuted.swap(0, 3);
        permuted.swap(1, 4);
        let model_permuted = model_from_samples(&permuted, 6);
        let probe = gaussian_clusters(6, 1, 0.5, 37)[0].0.clone();
        let a = model.classify(&probe).unwrap();
        let b = model_permuted.classify(&probe).unwrap();
        for i in 0..2 {
            assert!(
                (a.residuals[i] - b.residuals[i]).abs() < 1e-8,
                "residual {i}: {} vs {}",
                a.residuals[i],
                b.residuals[i]
            );
        }
        assert_eq!(a.label, b.label);
    }

    #[test]
    fn zero_projection_is_an_error() {
        let samples = labeled(&[(1.0, 1.0, 1), (2.0, 2.0, 1), (3.0, 3.0, 2), (4.0, 4.0, 2)]);
        let model = {
            let matrix = DMatrix::from_fn(4, 2, |i, j| samples[i].0[j]);
            let pca = PcaModel::fit(&matrix).unwrap();
            let projected: Vec<_> = samples
                .iter()
                .map(|(v, c)| (pca.project(v, 1).unwrap(), *c))
                .collect();
            let dictionary = Dictionary::build(&projected).unwrap();
            SrcModel::new(pca, dictionary, SolverParams::default(), EncodingKind::Aac).unwrap()
        };
        // The training mean projects to zero by construction.
        let mean = model.pca().mean().clone();
        assert_eq!(
            model.classify(&mean).unwrap_err(),
            ClassifierError::ZeroProjection
        );
    }

    #[test]
    fn batch_matches_single_probe_classification() {
        let samples = gaussian_clusters(6, 6, 0.6, 51);
        let model = model_from_samples(&samples, 6);
        let probes = gaussian_clusters(6, 4, 0.6, 52);
        let matrix = DMatrix::from_fn(probes.len(), 6, |i, j| probes[i].0[j]);
        let batch = model.classify_rows(&matrix);
        for (i, result) in batch.iter().enumerate() {
            let single = model.classify(&probes[i].0).unwrap();
            assert_eq!(result.as_ref().unwrap(), &single);
        }
    }
}
