//! Shared fixtures for unit tests.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::classifier::{Dictionary, SolverParams, SrcModel};
use crate::encoding::EncodingKind;
use crate::pca::PcaModel;
use crate::seqio::ClassLabel;

/// Two well-separated Gaussian clusters, class 1 first.
///
/// Each class scatters mainly inside its own half of the coordinates.
/// Balanced two-cluster data has exactly antipodal class means after
/// centering, so a signed sparse coder could otherwise reconstruct either
/// class from the other's negated columns; the class-private scatter
/// directions are what give reconstruction residuals their signal.
pub fn gaussian_clusters(
    dim: usize,
    per_class: usize,
    spread: f64,
    seed: u64,
) -> Vec<(DVector<f64>, ClassLabel)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = dim / 2;
    let center1 = DVector::from_fn(dim, |i, _| if i < half { 3.0 } else { 0.0 });
    let center2 = DVector::from_fn(dim, |i, _| if i < half { 0.0 } else { 3.0 });
    let mut samples = Vec::new();
    for (center, own_half, class) in [
        (center1, true, ClassLabel::Afp),
        (center2, false, ClassLabel::NonAfp),
    ] {
        for _ in 0..per_class {
            let noise: DVector<f64> = DVector::from_fn(dim, |i, _| {
                let own = (i < half) == own_half;
                let sd = if own { spread } else { 0.1 * spread };
                sd * rng.sample::<f64, _>(StandardNormal)
            });
            samples.push((&center + noise, class));
        }
    }
    samples
}

/// Stacks labeled vectors into a row-per-sample matrix plus labels.
pub fn to_matrix(samples: &[(DVector<f64>, ClassLabel)]) -> (DMatrix<f64>, Vec<ClassLabel>) {
    let dim = samples[0].0.len();
    let matrix = DMatrix::from_fn(samples.len(), dim, |i, j| samples[i].0[j]);
    let labels = samples.iter().map(|(_, c)| *c).collect();
    (matrix, labels)
}

/// Fits a PCA + dictionary model on labeled raw vectors.
pub fn model_from_samples(samples: &[(DVector<f64>, ClassLabel)], k: usize) -> SrcModel {
    let (matrix, _) = to_matrix(samples);
    let pca = PcaModel::fit(&matrix).unwrap();
    let projected: Vec<(DVector<f64>, ClassLabel)> = samples
        .iter()
        .map(|(v, c)| (pca.project(v, k).unwrap(), *c))
        .collect();
    let dictionary = Dictionary::build(&projected).unwrap();
    SrcModel::new(pca, dictionary, SolverParams::default(), EncodingKind::Aac).unwrap()
}

/// Share of probes a nearest-centroid classifier (fit on `train`, raw
/// feature space) labels correctly; the separability oracle for synthetic
/// benchmarks.
pub fn nearest_centroid_accuracy(
    train: &[(DVector<f64>, ClassLabel)],
    probes: &[(DVector<f64>, ClassLabel)],
) -> f64 {
    let dim = train[0].0.len();
    let mut centroids = [DVector::zeros(dim), DVector::zeros(dim)];
    let mut counts = [0.0, 0.0];
    for (v, c) in train {
        let slot = (c.index() - 1) as usize;
        centroids[slot] += v;
        counts[slot] += 1.0;
    }
    centroids[0] /= counts[0];
    centroids[1] /= counts[1];
    let hits = probes
        .iter()
        .filter(|(v, c)| {
            let da = (v - &centroids[0]).norm();
            let db = (v - &centroids[1]).norm();
            let guess = if da <= db {
                ClassLabel::Afp
            } else {
                ClassLabel::NonAfp
            };
            guess == *c
        })
        .count();
    hits as f64 / probes.len() as f64
}
